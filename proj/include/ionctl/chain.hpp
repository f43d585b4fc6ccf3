#pragma once

#include "ionctl/types.hpp"

namespace ionctl {

// Equilibrium positions of the linear crystal, in Coulomb-length units.
// Minimizes sum u_i^2/2 + sum_{i<j} 1/|u_i - u_j| by damped Newton iteration;
// the returned gradient norm is below 1e-12.
Eigen::VectorXd equilibrium_positions(const TrapSetup& setup);

// Hessian of the potential at the given positions (same units).
Eigen::MatrixXd chain_hessian(const TrapSetup& setup, const Eigen::VectorXd& u);

// Full normal-mode analysis: frequencies ascending, orthonormal mode matrix,
// per-mode oscillator lengths alpha_k = 1/sqrt(omega_k).
NormalModeBasis normal_modes(const TrapSetup& setup);

// Two-ion basis with the stretch frequency tuned by hand, used for the
// kick protocols where the trap anisotropy is a free parameter.  The
// center-of-mass mode keeps omega = 1; stretch_ratio = omega_r/omega_c must
// lie in (1, sqrt(3)].  Ratios within 1e-6 of 1 set degenerate_warning.
NormalModeBasis tuned_two_ion_modes(double stretch_ratio);

}  // namespace ionctl
