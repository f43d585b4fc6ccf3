#pragma once

#include <functional>

#include "ionctl/types.hpp"

namespace ionctl {

// Low-level exponential integrals shared by the closed-form phase and
// closure expressions.  `a` may be complex (dissipative kernels).
namespace detail {

// E1(a, T) = integral_0^T e^{i a t} dt, stable for small |a|T.
complexd E1(complexd a, double T);
// E2(a, T) = integral_0^T t e^{i a t} dt.
complexd E2(complexd a, double T);
// P(w; m, n) = iint_{0<t2<t1<T} e^{i w (t1-t2)} e^{i nu m t1} e^{i nu n t2},
// nu = 2 pi / T.  Handles the resonant case nu*n ~ w.
complexd triangular_product(complexd w, int m, int n, double T);

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Every kick is a two-photon recoil: kick l imparts the per-ion impulse
// 2 * momentum * weight_l.  Frozen once against the oracle integrator.
inline constexpr double kick_impulse_factor = 2.0;

}  // namespace detail

struct TrajectoryPoint {
    double t;
    complexd z;
    double phase;
};

// Single-mode coherent trajectory z(t) and accumulated geometric phase under
// a scalar force f(t), from z(0) = z0.  The path is integrated to high order
// between the requested sample instants.
std::vector<TrajectoryPoint> coherent_trajectory(const std::function<double(double)>& f,
                                                 double omega, complexd z0, double T,
                                                 int samples);

// Per-mode closure residual D_k = sum_i int_0^T e^{(i w_k + g_k) tau}
// alpha_k M_ik F_i(tau) dtau; zero residual means the mode returns to its
// initial coherent state (spiralling back to it when g_k > 0).
Eigen::VectorXcd closure_residual(const ForceProfile& profile, const NormalModeBasis& modes,
                                  const std::optional<DissipationModel>& dissipation = {});

// Windowed transform int_0^t e^{(i omega + gamma) tau} f(tau) dtau of the
// common modulation, in closed form (partial kick sums for trains).
complexd modulation_transform(const ForceProfile& profile, double omega, double gamma, double t);

// Two-time phase kernel G_ij(t) = sum_k M_ik M_jk alpha_k^2/2 sin(w_k|t|) e^{-g_k|t|}.
struct PhaseKernel {
    NormalModeBasis modes;
    std::optional<DissipationModel> dissipation;
    double operator()(int i, int j, double t) const;
};

PhaseKernel phase_kernel_G(const NormalModeBasis& modes,
                           const std::optional<DissipationModel>& dissipation = {});

// Accumulated coupling matrix J_ij: the coefficient of s_i s_j (i != j) in
// the total geometric phase, diagonal entries carrying the global-phase
// part.  Closed form for Fourier and kick profiles.
CouplingMatrix accumulated_coupling(const ForceProfile& profile, const NormalModeBasis& modes,
                                    const std::optional<DissipationModel>& dissipation = {});

// Bilinear cross term: J[a+b] = J[a] + J[b] + coupling_cross(a, b).  Used for
// first-order control-error propagation; mixed Fourier/kick pairs are done
// by panelled Gauss-Legendre quadrature refined to 1e-10.
CouplingMatrix coupling_cross(const ForceProfile& a, const ForceProfile& b,
                              const NormalModeBasis& modes,
                              const std::optional<DissipationModel>& dissipation = {});

// Adiabatic (slow-force) limit of the two-ion phase coefficient:
//   phi = 1/2 (w_c^{-2} - w_r^{-2}) int_0^T F(t)^2 dt.
// Requires F(0) = F(T) = 0 within 1e-9 (adiabatic switching).
double adiabatic_phase(const std::function<double(double)>& F, double omega_c, double omega_r,
                       double T);

// --- Fourier machinery shared with the optimizer and designer ---------------

// Real parameter vector v = (a0, a_1..a_Nm, b_1..b_Nm) for the series
// f(t) = a0 + sum_m a_m cos(nu m t) + b_m sin(nu m t); the complex
// coefficients are c_m = (a_m - i b_m)/2, c_{-m} = conj(c_m).
Eigen::MatrixXcd real_to_complex_map(int n_modes);

Eigen::VectorXd fourier_real_params(const ForceProfile& profile);
ForceProfile profile_from_params(double T, int n_modes, const Eigen::VectorXd& v,
                                 const Eigen::VectorXd& weights);

// Closure rows acting on the complex coefficient vector: row k dotted with c
// gives Phi_k = int_0^T e^{(i w_k + g_k) t} f(t) dt.  For a common modulation
// the full residual is D_k = (sum_i gamma_i M_ik) alpha_k Phi_k.
Eigen::MatrixXcd fourier_closure_rows(const Eigen::VectorXd& freq, double T, int n_modes,
                                      const Eigen::VectorXd* gamma = nullptr);

// Per-mode phase quadratic forms on the real parameters: u_k = v^T Q_k v is
// the mode phase alpha_k^2 * iint sin(w_k dt) e^{-g_k dt} f f, so that
// J_ij = gamma_i gamma_j sum_k M_ik M_jk u_k.
std::vector<Eigen::MatrixXd> mode_phase_forms(const NormalModeBasis& modes, double T,
                                              int n_modes,
                                              const std::optional<DissipationModel>& dissipation = {});

// Orthonormal basis (columns) of the real-parameter subspace satisfying all
// per-mode closure constraints; reports the detected rank.
Eigen::MatrixXd closure_nullspace(const Eigen::VectorXd& freq, double T, int n_modes,
                                  int* rank_out = nullptr);

}  // namespace ionctl
