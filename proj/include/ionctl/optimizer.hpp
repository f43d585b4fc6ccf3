#pragma once

#include "ionctl/types.hpp"

namespace ionctl {

enum class Objective { Norm, Smoothness };

struct ConstraintBasis {
    double T = 0.0;
    int n_modes = 0;
    Eigen::MatrixXd basis;   // orthonormal columns, closure-satisfying directions
    int dimension = 0;
    bool degenerate = false; // a harmonic coincides with a mode frequency
};

// Basis of real Fourier series on [0, T] orthogonal to e^{i w_c t} and
// e^{i w_r t} (the four real closure constraints); needs N_m >= 3.
ConstraintBasis build_constraint_basis(double T, const NormalModeBasis& modes, int n_modes);

struct OptimalForce {
    ForceProfile profile;
    double mu = 0.0;         // achieved Rayleigh quotient
    double kappa = 0.0;      // decay of the emitted profile (penalized runs)
    int ascent_iterations = 0;
};

struct KappaPenalty {
    DissipationModel dissipation;
    double weight = 0.0;
};

// Optimal two-ion pi/4 force: maximizes the phase quadratic form over the
// closure subspace, normalized by the L2 norm (Norm) or the derivative norm
// (Smoothness), then rescales the eigenvector to J_12 = pi/4.  With a kappa
// penalty, runs projected gradient ascent on phase - weight*kappa starting
// from the eigenvector.
OptimalForce optimal_force(double T, const NormalModeBasis& modes, int n_modes,
                           Objective objective,
                           const std::optional<KappaPenalty>& kappa_penalty = {});

struct IntensityRow {
    double T = 0.0;
    double l1 = 0.0;   // time-averaged amplitude, int |f| dt / T
    double l2 = 0.0;   // rms amplitude, sqrt(int f^2 dt / T)
    double mu = 0.0;
};

std::vector<IntensityRow> intensity_scan(const std::vector<double>& T_list,
                                         const NormalModeBasis& modes, int n_modes,
                                         Objective objective);

}  // namespace ionctl
