#pragma once

#include "ionctl/types.hpp"

namespace ionctl {

// Two-ion phase accumulated by a kick train applied to both ions:
//   phi = kappa^2 sum_{l,m} n_l n_m [sin(w_c t_lm)/w_c - sin(w_r t_lm)/w_r],
// t_lm = |t_l - t_m|.  Equals the s1 s2 coefficient of the oracle branch
// phases under the two-photon-recoil convention (see kernel.hpp).
double kick_phase(const ForceProfile& train, const NormalModeBasis& modes, double momentum);

// 4-group protocol: antisymmetric pattern (gamma, -t1), (1, -t2), (-1, t2),
// (-gamma, t1), closure gamma sin(w t1) + sin(w t2) = 0 for both modes.
// Picks the smallest repetition n with n^2 phi0 >= pi/4, then retunes gamma
// (re-solving the closure roots) so the phase is exactly pi/4.
KickSolution solve_protocol1(double gamma, double momentum,
                             const NormalModeBasis& modes);

// 6-group protocol: pattern (-2,-t1), (3,-t2), (-2,-t3), (2,t3), (-3,t2),
// (2,t1) with t1 = T/2; closure 2 sin(w t1) - 3 sin(w t2) + 2 sin(w t3) = 0.
// Reaches pi/4 by choosing n and rescaling the kick momentum; pulse count 14n.
KickSolution solve_protocol2(double T, double momentum, const NormalModeBasis& modes);

struct ScanRow {
    double T = 0.0;
    double tau1 = 0.0, tau2 = 0.0, tau3 = 0.0;
    int n = 0;
    int pulses = 0;
    bool ok = false;
};

// Protocol-2 pulse count versus gate duration; N_p ~ T^{-3/2} in the fast
// regime.
std::vector<ScanRow> scaling_scan(const std::vector<double>& T_list,
                                  const NormalModeBasis& modes, double momentum);

}  // namespace ionctl
