#pragma once

#include <numbers>

#include "ionctl/types.hpp"

namespace ionctl {

// All couplings here use the pair convention: the design target J_ij is the
// coefficient of s_i s_j (i < j) in the accumulated phase.  Graph states are
// produced by e^{-i (pi/8) sum_{ij} A_ij s_i s_j} on |+>^N, i.e. a per-pair
// phase of pi/4 on every edge — the single conversion constant lives here.
inline constexpr double graph_pair_phase = std::numbers::pi / 4.0;

// Named graphs as 0/1 adjacency matrices.
Eigen::MatrixXd ghz_graph(int n);
Eigen::MatrixXd linear_cluster_graph(int n);

// Validates a 0/1 symmetric adjacency matrix and returns it as a coupling
// template (unit edge weights, zero diagonal).
CouplingMatrix graph_state_target(const Eigen::MatrixXd& adjacency);

// --- constructive pairwise schedule ------------------------------------------

struct PairInterval {
    int i = 0, j = 0;        // the two driven ions
    double t0 = 0.0;         // interval start within the concatenated program
    ForceProfile profile;    // defined on [0, dt], weights nonzero only at i, j
};

// One closed two-ion interval per unordered pair, concatenated over [0, T].
// Every interval satisfies all per-mode closure constraints, so the pair
// couplings add up independently; zero target entries get zero forces.
std::vector<PairInterval> pairwise_schedule(const CouplingMatrix& target, double T,
                                            const NormalModeBasis& modes);

// Sum of the accumulated couplings of a schedule (valid because each
// interval closes every mode).
CouplingMatrix schedule_coupling(const std::vector<PairInterval>& schedule,
                                 const NormalModeBasis& modes);

// --- common-modulation Gauss-Newton design ------------------------------------

// Finds weights gamma_i and a Fourier modulation f on [0, T] such that the
// accumulated coupling matches `target` off-diagonally, with all mode
// closure constraints built in exactly.  N_m <= 0 picks the default budget;
// multistarts are deterministic in `seed`.
EntanglerDesign common_mode_design(const CouplingMatrix& target, double T,
                                   const NormalModeBasis& modes, int N_m = 0,
                                   unsigned long seed = 1);

// F = |2^{-N} sum_s e^{-i s^T delta s}| over all spin configurations; exact
// sum, N <= 20.  Note the full quadratic form: symmetric pair-convention
// deltas must be halved by the caller.
double entangler_fidelity(const CouplingMatrix& delta);

// Effective coupling of CW forces F_i(t) = f_i cos(Omega t):
//   J_ij = sum_k f_i M_ik M_jk [1 + delta_{Omega,0}] f_j / (2 (w_k^2 - Omega^2))
// (pair convention; secular rate of the accumulated phase).
CouplingMatrix cw_effective_coupling(const Eigen::VectorXd& f, double drive_freq,
                                     const NormalModeBasis& modes);

// First-order Trotter schedule cycling x, y, z (axes with zero coupling and
// field are skipped).  Each emitted step carries the evolution parameter
// T / n_steps, so per axis the parameters sum to T.
TrotterSchedule trotter_schedule(const CouplingMatrix& Jx, const CouplingMatrix& Jy,
                                 const CouplingMatrix& Jz, const Eigen::VectorXd& hx,
                                 const Eigen::VectorXd& hy, const Eigen::VectorXd& hz,
                                 double T, int n_steps);

}  // namespace ionctl
