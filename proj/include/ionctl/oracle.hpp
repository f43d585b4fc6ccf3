#pragma once

#include "ionctl/types.hpp"

namespace ionctl {

// --- coherent-branch integration -------------------------------------------

struct BranchResult {
    Eigen::VectorXcd z;   // final coherent amplitude per mode
    double phase = 0.0;   // accumulated geometric phase
};

// Integrates every mode's forced-oscillator equation for one spin branch,
// dz_k/dt = -i w_k z_k + i f_k(t)/sqrt(2), dphi/dt = sum_k f_k (z_k+conj z_k)/(2 sqrt 2),
// with f_k(t) = alpha_k sum_i s_i gamma_i M_ik f(t).  Adaptive RK at 1e-12;
// kicks handled exactly as free rotations plus momentum jumps.
BranchResult integrate_branch(const ForceProfile& profile, const NormalModeBasis& modes,
                              const Eigen::VectorXi& spin, const Eigen::VectorXcd& z0);

struct PhaseFit {
    double constant = 0.0;
    Eigen::VectorXd local;   // coefficient of s_i
    CouplingMatrix J;        // coefficient of s_i s_j on the off-diagonal
    double residual = 0.0;   // max absolute fit residual
};

// Regresses the oracle branch phases over all 2^N spin configurations onto
// the basis {1, s_i, s_i s_j}; the fit is exact for harmonic dynamics.
PhaseFit branch_phase_fit(const ForceProfile& profile, const NormalModeBasis& modes);

// --- dissipative moments (single mode) --------------------------------------

struct MasterMoments {
    complexd beta = 0.0;
    double kappa = 0.0;
    double phase = 0.0;   // relative phase between the two branches
};

// Numeric integration of the moment equations for one damped mode driven by
// two branch envelopes f_s, f_r (rotating-frame forces g_b = f_b e^{-iwt}/sqrt 2):
//   dbeta/dt = -gamma beta + i (conj g_r - conj g_s),
//   dkappa/dt = gamma (nbar + 1/2) |beta|^2,
//   dphase/dt = Im[conj(g_s) h_s - conj(g_r) h_r],  dh_b/dt = -gamma h_b + g_b.
MasterMoments integrate_master_moments(double omega, double gamma, double nbar,
                                       const std::function<double(double)>& f_s,
                                       const std::function<double(double)>& f_r, double T);

// --- full Coulomb classical dynamics ----------------------------------------

struct CoulombResult {
    Eigen::MatrixXd trajectory;   // sampled positions, rows = times
    Eigen::VectorXd times;
    double phase = 0.0;           // (1/2) sum_i s_i int F_i (x_i - x_eq,i) dt
    double position_defect = 0.0; // |x(T) - x(0)|
    double momentum_defect = 0.0; // |p(T) - p(0)|
    double energy_drift = 0.0;    // relative, forces off only meaningful
};

// Classical ion chain with the full 1/|x_i - x_j| potential, integrated in
// oscillator-length units: V = sum x^2/2 + rho^3 sum 1/|x_i-x_j| with
// rho = setup.coulomb_length_ratio.  `harmonic` replaces the Coulomb term by
// its quadratic expansion around equilibrium (for cross-checks).
CoulombResult integrate_full_coulomb(const ForceProfile& profile, const TrapSetup& setup,
                                     const Eigen::VectorXi& spin, bool harmonic = false,
                                     int samples = 200);

// --- small-N spin states -----------------------------------------------------

// |+>^N in the computational basis; bit i of the index is spin i, bit value
// 0 meaning s_i = +1.
Eigen::VectorXcd plus_state(int n);

// Applies the diagonal evolution e^{-i angle * s^T J s} (full quadratic form,
// diagonal of J contributing only a global phase).  N <= 14.
Eigen::VectorXcd spin_evolve(const CouplingMatrix& J, double angle,
                             const Eigen::VectorXcd& input);

// Overlap with the best GHZ-class cat state up to local z-rotations,
// (|<cat_+|psi>| + |<cat_-|psi>|)/sqrt(2) maximized over the x and y cat bases.
double ghz_overlap(const Eigen::VectorXcd& state);

// Kitagawa-Ueda squeezing parameter xi^2 = N min Var(S_perp) / |<S>|^2.
double squeezing_metric(const Eigen::VectorXcd& state);

// Dense Ising Hamiltonian sum_{i<j} J_ij s^a_i s^a_j + sum_i h_i s^a_i for
// axis a in {x,y,z}, N <= 12; used to verify Trotter schedules exactly.
Eigen::MatrixXcd ising_hamiltonian(char axis, const CouplingMatrix& J,
                                   const Eigen::VectorXd& h, int n);

// e^{-i t H} |state> for Hermitian H by dense eigendecomposition.
Eigen::VectorXcd evolve_dense(const Eigen::MatrixXcd& H, double t,
                              const Eigen::VectorXcd& state);

}  // namespace ionctl
