#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ionctl/types.hpp"

namespace ionctl {

inline constexpr int schema_version = 1;

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);   // row-major nested arrays
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json profile_to_json(const ForceProfile& profile);
ForceProfile profile_from_json(const nlohmann::json& j);

nlohmann::json modes_to_json(const NormalModeBasis& modes);
NormalModeBasis modes_from_json(const nlohmann::json& j);

nlohmann::json design_to_json(const EntanglerDesign& design);
EntanglerDesign design_from_json(const nlohmann::json& j);

nlohmann::json kick_solution_to_json(const KickSolution& sol);

// Serializes with stable formatting (2-space indent, trailing newline) so
// identical inputs give byte-identical files.
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

// CSV: '.' decimal, ',' separator, header row, 17 significant digits.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Sampled modulation table (columns t, f) of a Fourier profile.
void write_profile_csv(const std::string& path, const ForceProfile& profile, int samples);

}  // namespace ionctl
