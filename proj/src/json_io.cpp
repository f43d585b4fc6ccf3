#include "ionctl/json_io.hpp"

#include <fstream>

namespace ionctl {

using nlohmann::json;

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

}  // namespace

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r)));
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("matrix_from_json: expected an array");
    const Eigen::Index nr = static_cast<Eigen::Index>(j.size());
    if (nr == 0) return {};
    const Eigen::Index nc = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(nr, nc);
    for (Eigen::Index r = 0; r < nr; ++r) {
        if (static_cast<Eigen::Index>(j[r].size()) != nc)
            throw std::invalid_argument("matrix_from_json: ragged rows");
        for (Eigen::Index c = 0; c < nc; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

json profile_to_json(const ForceProfile& profile) {
    json j;
    j["schema_version"] = schema_version;
    j["T"] = profile.T;
    j["weights"] = vector_to_json(profile.weights);
    if (profile.kind == ForceProfile::Kind::Fourier) {
        j["n_modes"] = profile.n_modes;
        json coeffs = json::array();
        for (Eigen::Index i = 0; i < profile.coeff.size(); ++i)
            coeffs.push_back({profile.coeff(i).real(), profile.coeff(i).imag()});
        j["coefficients"] = coeffs;
    } else {
        json kicks = json::array();
        for (size_t l = 0; l < profile.kick_times.size(); ++l)
            kicks.push_back({profile.kick_times[l], profile.kick_units[l]});
        j["kicks"] = kicks;
        j["momentum"] = profile.momentum;
    }
    return j;
}

ForceProfile profile_from_json(const json& j) {
    ForceProfile p;
    p.T = j.at("T").get<double>();
    p.weights = vector_from_json(j.at("weights"));
    if (j.contains("kicks")) {
        p.kind = ForceProfile::Kind::Kicks;
        p.momentum = j.at("momentum").get<double>();
        for (const auto& k : j.at("kicks")) {
            p.kick_times.push_back(k.at(0).get<double>());
            p.kick_units.push_back(k.at(1).get<double>());
        }
    } else {
        p.kind = ForceProfile::Kind::Fourier;
        p.n_modes = j.at("n_modes").get<int>();
        const auto& coeffs = j.at("coefficients");
        if (static_cast<int>(coeffs.size()) != 2 * p.n_modes + 1)
            throw std::invalid_argument("profile_from_json: coefficient count mismatch");
        p.coeff.resize(coeffs.size());
        for (size_t i = 0; i < coeffs.size(); ++i)
            p.coeff(static_cast<Eigen::Index>(i)) =
                complexd(coeffs[i].at(0).get<double>(), coeffs[i].at(1).get<double>());
    }
    return p;
}

json modes_to_json(const NormalModeBasis& modes) {
    json j;
    j["schema_version"] = schema_version;
    j["equilibrium"] = vector_to_json(modes.equilibrium);
    j["frequencies"] = vector_to_json(modes.freq);
    j["lengths"] = vector_to_json(modes.length);
    j["mode_matrix"] = matrix_to_json(modes.modes);
    j["degenerate_warning"] = modes.degenerate_warning;
    return j;
}

NormalModeBasis modes_from_json(const json& j) {
    NormalModeBasis m;
    m.equilibrium = vector_from_json(j.at("equilibrium"));
    m.freq = vector_from_json(j.at("frequencies"));
    m.length = vector_from_json(j.at("lengths"));
    m.modes = matrix_from_json(j.at("mode_matrix"));
    m.degenerate_warning = j.value("degenerate_warning", false);
    return m;
}

json design_to_json(const EntanglerDesign& design) {
    json j;
    j["schema_version"] = schema_version;
    j["weights"] = vector_to_json(design.weights);
    j["profile"] = profile_to_json(design.profile);
    j["T"] = design.T;
    j["target"] = matrix_to_json(design.target);
    j["achieved"] = matrix_to_json(design.achieved);
    j["delta"] = matrix_to_json(design.delta);
    j["fidelity_estimate"] = design.fidelity_estimate;
    j["converged"] = design.converged;
    j["residual"] = design.residual;
    return j;
}

EntanglerDesign design_from_json(const json& j) {
    EntanglerDesign d;
    d.weights = vector_from_json(j.at("weights"));
    d.profile = profile_from_json(j.at("profile"));
    d.T = j.at("T").get<double>();
    d.target = matrix_from_json(j.at("target"));
    d.achieved = matrix_from_json(j.at("achieved"));
    d.delta = matrix_from_json(j.at("delta"));
    d.fidelity_estimate = j.at("fidelity_estimate").get<double>();
    d.converged = j.at("converged").get<bool>();
    d.residual = j.at("residual").get<double>();
    return d;
}

json kick_solution_to_json(const KickSolution& sol) {
    json j;
    j["schema_version"] = schema_version;
    j["train"] = profile_to_json(sol.train);
    j["gamma"] = sol.gamma;
    j["n_repeat"] = sol.n_repeat;
    j["total_time"] = sol.total_time;
    j["phase_achieved"] = sol.phase_achieved;
    j["pulses"] = sol.pulses;
    j["spin_flip"] = sol.spin_flip;
    json closure = json::array();
    for (Eigen::Index k = 0; k < sol.closure.size(); ++k)
        closure.push_back({sol.closure(k).real(), sol.closure(k).imag()});
    j["closure"] = closure;
    return j;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return json::parse(in);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << "\n";
    char buf[64];
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("write_csv: row width mismatch");
        for (size_t c = 0; c < row.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", row[c]);
            out << (c ? "," : "") << buf;
        }
        out << "\n";
    }
}

void write_profile_csv(const std::string& path, const ForceProfile& profile, int samples) {
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<size_t>(samples));
    for (int s = 0; s <= samples; ++s) {
        double t = profile.T * s / samples;
        rows.push_back({t, profile.modulation(t)});
    }
    write_csv(path, {"t", "f"}, rows);
}

}  // namespace ionctl
