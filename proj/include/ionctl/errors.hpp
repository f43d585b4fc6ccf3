#pragma once

#include "ionctl/types.hpp"

namespace ionctl {

// Residual per-mode displacement between branch s and branch r at time T:
//   beta_k = i int_0^T e^{-g_k(T-tau)} [conj g_kr - conj g_ks] dtau,
// with g_ki = F_i M_ik alpha_k e^{-i w_k t} / sqrt(2).  Closed form.
Eigen::VectorXcd dissipative_displacement(const ForceProfile& profile,
                                          const NormalModeBasis& modes,
                                          const DissipationModel& dissipation,
                                          const Eigen::VectorXi& s, const Eigen::VectorXi& r);

// Coherence decay kappa = sum_k g_k (N_k + 1/2) int_0^T |beta_k(tau)|^2 dtau.
double decay_kappa(const ForceProfile& profile, const NormalModeBasis& modes,
                   const DissipationModel& dissipation, const Eigen::VectorXi& s,
                   const Eigen::VectorXi& r);

// Single-mode analytic moments for a pair of branch envelopes (the closed
// forms the master-moment oracle is checked against).
struct SingleModeMoments {
    complexd beta = 0.0;
    double kappa = 0.0;
    double phase = 0.0;
};

// Branch envelopes are real Fourier series c_s, c_r (coefficients m=-nm..nm)
// on [0, T]; rotating-frame forces g_b = f_b e^{-i w t}/sqrt(2).
SingleModeMoments dissipative_single_mode(const Eigen::VectorXcd& c_s,
                                          const Eigen::VectorXcd& c_r, double omega,
                                          double gamma, double nbar, double T);

// F = sqrt(1 + |<sigma+>_id|^2 (2 e^{-kappa} cos(delta_phi) - 1)).
double single_qubit_uhlmann(double delta_phi, double kappa, complexd sigma_plus_ideal);

// F = sum_{s,r} |c_s|^2 |c_r|^2 e^{i(s' dJ s - r' dJ r)}
//     prod_k exp[-|beta_k(s)-beta_k(r)|^2 (1/2 + nbar_k)],
// with beta_k(s) - beta_k(r) = sum_i beta_ki (s_i - r_i).
double thermal_fidelity(const CouplingMatrix& delta_J, const BranchDisplacement& residuals,
                        const Eigen::VectorXd& nbar, const Eigen::VectorXcd& state_coeffs);

// Thermal occupation: the high-temperature Gaussian form kT/w by default, or
// the exact Bose factor.
double thermal_nbar(double kT, double omega, bool exact_bose = false);

// First-order effect of a force error delta_F on top of base_F: per-ion
// residual displacements beta_ki and the coupling shift delta_J.
struct ControlPerturbation {
    BranchDisplacement displacement;
    CouplingMatrix delta_J;
};

ControlPerturbation control_perturbation(const ForceProfile& delta_F, const ForceProfile& base_F,
                                         const NormalModeBasis& modes);

// Anharmonic (cubic Coulomb) error estimate and the speed-limit time at which
// it reaches 1e-4: E = (alpha/d)^2 phi^{3/2} / (4^{3/2} T).
struct AnharmonicEstimate {
    double error = 0.0;
    double x_max_bound = 0.0;
    double speed_limit_T = 0.0;
};

AnharmonicEstimate anharmonic_error(double phase, double T, double alpha_over_d);

}  // namespace ionctl
