#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ionctl {

using complexd = std::complex<double>;

// All quantities are dimensionless: hbar = m = 1 and the axial trap
// frequency is 1, so times are measured in 1/omega and lengths in the
// ground-state size of the axial mode.

enum class TrapKind { HarmonicChain, Microtraps };

struct TrapSetup {
    int n_ions = 2;
    TrapKind kind = TrapKind::HarmonicChain;
    // Microtraps: centers of the individual wells (user-chosen spacing, in
    // units of the Coulomb length of the harmonic chain problem).
    std::vector<double> microtrap_centers;
    // Ratio d0/alpha between the Coulomb length and the oscillator length;
    // only needed when comparing against the full anharmonic problem.
    double coulomb_length_ratio = 50.0;
};

struct NormalModeBasis {
    Eigen::VectorXd equilibrium;   // equilibrium positions, Coulomb-length units
    Eigen::VectorXd freq;          // mode frequencies, ascending
    Eigen::MatrixXd modes;         // columns are orthonormal mode vectors
    Eigen::VectorXd length;        // per-mode oscillator lengths alpha_k = freq_k^{-1/2}
    bool degenerate_warning = false;

    int n_ions() const { return static_cast<int>(equilibrium.size()); }
    int n_modes() const { return static_cast<int>(freq.size()); }
};

// A state-dependent force profile F_i(t) = weights[i] * f(t), where the
// common modulation f is either a truncated Fourier series on [0, T],
//   f(t) = a0 + sum_m a_m cos(2 pi m t / T) + b_m sin(2 pi m t / T),
// or a train of instantaneous momentum kicks.
struct ForceProfile {
    enum class Kind { Fourier, Kicks };

    Kind kind = Kind::Fourier;
    double T = 0.0;
    Eigen::VectorXd weights;       // per-ion weight gamma_i

    // Fourier data: complex coefficients c_m for m = -n_modes .. n_modes,
    // stored at index m + n_modes, with c_{-m} = conj(c_m).
    int n_modes = 0;
    Eigen::VectorXcd coeff;

    // Kick data: kick l imparts the per-ion impulse 2 * momentum * kick_units[l]
    // at kick_times[l] (two-photon recoil per kick).  Units are real so the
    // tilted protocol trains (gamma-weighted groups) fit the same container.
    std::vector<double> kick_times;
    std::vector<double> kick_units;
    double momentum = 0.0;

    complexd coefficient(int m) const { return coeff(m + n_modes); }
    double modulation(double t) const;   // f(t); Fourier profiles only
};

using CouplingMatrix = Eigen::MatrixXd;

struct DissipationModel {
    Eigen::VectorXd gamma;       // per-mode heating/decay rate
    Eigen::VectorXd occupation;  // per-mode thermal occupation nbar_k
};

struct KickSolution {
    ForceProfile train;
    double gamma = 1.0;                 // tilt parameter of the 4-group pattern
    int n_repeat = 1;                   // pulse multiplier n
    double total_time = 0.0;
    double phase_achieved = 0.0;
    Eigen::VectorXcd closure;           // per-mode closure residual
    int pulses = 0;                     // physical pulse count N_p
    bool spin_flip = false;             // odd-count bookkeeping flag
};

struct EntanglerDesign {
    Eigen::VectorXd weights;     // per-ion weight gamma_i
    ForceProfile profile;        // common modulation with the weights above
    double T = 0.0;
    CouplingMatrix target;       // requested pair phases
    CouplingMatrix achieved;     // phases produced by the profile
    CouplingMatrix delta;        // achieved - target
    double fidelity_estimate = 1.0;
    bool converged = false;
    double residual = 0.0;
};

struct TrotterStep {
    char axis;       // 'x', 'y' or 'z'
    double duration; // evolution time under the corresponding Ising term
    Eigen::VectorXd field;     // local field applied with this slice
    CouplingMatrix coupling;   // Ising couplings of this slice
};

struct TrotterSchedule {
    std::vector<TrotterStep> steps;
    double T = 0.0;
    int n_steps = 0;
    double error_bound = 0.0;  // second-order commutator bound, O(T^2/n)
};

struct BranchDisplacement {
    Eigen::MatrixXcd beta;   // n_modes x n_branches (or n_ions) displacements
};

}  // namespace ionctl
