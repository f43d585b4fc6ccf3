#include "ionctl/errors.hpp"

#include <cmath>
#include <numbers>

#include "ionctl/kernel.hpp"

namespace ionctl {

namespace {

// A_k(s) = sum_i s_i gamma_i M_ik alpha_k, the per-mode force amplitude.
Eigen::VectorXd mode_amplitudes(const ForceProfile& profile, const NormalModeBasis& modes,
                                const Eigen::VectorXi& s) {
    Eigen::VectorXd A(modes.n_modes());
    for (int k = 0; k < modes.n_modes(); ++k) {
        double a = 0.0;
        for (int i = 0; i < modes.n_ions(); ++i)
            a += s(i) * profile.weights(i) * modes.modes(i, k);
        A(k) = a * modes.length(k);
    }
    return A;
}

// Refining Gauss-Legendre quadrature of a scalar function on [0, T].
double quad_refine(const std::function<double(double)>& f, double T, double tol) {
    std::vector<double> gx, gw;
    detail::gauss_legendre(64, gx, gw);
    double prev = 0.0, value = 0.0;
    for (int panels = 1; panels <= 256; panels *= 2) {
        value = 0.0;
        for (int p = 0; p < panels; ++p) {
            double lo = T * p / panels, hi = T * (p + 1) / panels;
            double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (size_t q = 0; q < gx.size(); ++q) value += gw[q] * half * f(mid + half * gx[q]);
        }
        if (panels > 1 && std::abs(value - prev) < tol * (1.0 + std::abs(value))) break;
        prev = value;
    }
    return value;
}

}  // namespace

Eigen::VectorXcd dissipative_displacement(const ForceProfile& profile,
                                          const NormalModeBasis& modes,
                                          const DissipationModel& dissipation,
                                          const Eigen::VectorXi& s, const Eigen::VectorXi& r) {
    Eigen::VectorXd As = mode_amplitudes(profile, modes, s);
    Eigen::VectorXd Ar = mode_amplitudes(profile, modes, r);
    Eigen::VectorXcd beta(modes.n_modes());
    for (int k = 0; k < modes.n_modes(); ++k) {
        double g = dissipation.gamma(k);
        complexd phi = modulation_transform(profile, modes.freq(k), g, profile.T);
        beta(k) = complexd(0, 1) * (Ar(k) - As(k)) / std::sqrt(2.0) *
                  std::exp(-g * profile.T) * phi;
    }
    return beta;
}

double decay_kappa(const ForceProfile& profile, const NormalModeBasis& modes,
                   const DissipationModel& dissipation, const Eigen::VectorXi& s,
                   const Eigen::VectorXi& r) {
    Eigen::VectorXd As = mode_amplitudes(profile, modes, s);
    Eigen::VectorXd Ar = mode_amplitudes(profile, modes, r);
    double kappa = 0.0;
    for (int k = 0; k < modes.n_modes(); ++k) {
        double g = dissipation.gamma(k);
        if (g == 0.0) continue;
        double amp2 = 0.5 * (Ar(k) - As(k)) * (Ar(k) - As(k));
        if (amp2 == 0.0) continue;
        auto beta2 = [&](double tau) {
            complexd phi = modulation_transform(profile, modes.freq(k), g, tau);
            return amp2 * std::exp(-2.0 * g * tau) * std::norm(phi);
        };
        kappa += g * (dissipation.occupation(k) + 0.5) * quad_refine(beta2, profile.T, 1e-10);
    }
    return kappa;
}

SingleModeMoments dissipative_single_mode(const Eigen::VectorXcd& c_s,
                                          const Eigen::VectorXcd& c_r, double omega,
                                          double gamma, double nbar, double T) {
    if (c_s.size() != c_r.size() || c_s.size() % 2 == 0)
        throw std::invalid_argument("dissipative_single_mode: coefficient vectors must match");
    const int nm = (static_cast<int>(c_s.size()) - 1) / 2;
    const double nu = 2.0 * std::numbers::pi / T;

    auto transform = [&](const Eigen::VectorXcd& c, double t) {
        complexd phi = 0.0;
        for (int m = -nm; m <= nm; ++m)
            phi += c(m + nm) * detail::E1(complexd(omega, -gamma) + nu * double(m), t);
        return phi;
    };
    auto phase_form = [&](const Eigen::VectorXcd& c) {
        complexd acc = 0.0;
        for (int m = -nm; m <= nm; ++m)
            for (int n = -nm; n <= nm; ++n)
                acc += c(m + nm) * c(n + nm) *
                       detail::triangular_product(complexd(omega, gamma), m, n, T);
        return acc.imag();
    };

    SingleModeMoments out;
    out.beta = complexd(0, 1) / std::sqrt(2.0) * std::exp(-gamma * T) *
               (transform(c_r, T) - transform(c_s, T));
    auto beta2 = [&](double tau) {
        complexd d = transform(c_r, tau) - transform(c_s, tau);
        return 0.5 * std::exp(-2.0 * gamma * tau) * std::norm(d);
    };
    out.kappa = gamma * (nbar + 0.5) * quad_refine(beta2, T, 1e-10);
    out.phase = 0.5 * (phase_form(c_s) - phase_form(c_r));
    return out;
}

double single_qubit_uhlmann(double delta_phi, double kappa, complexd sigma_plus_ideal) {
    if (kappa < 0) throw std::invalid_argument("single_qubit_uhlmann: kappa must be >= 0");
    double arg = 1.0 + std::norm(sigma_plus_ideal) *
                           (2.0 * std::exp(-kappa) * std::cos(delta_phi) - 1.0);
    if (arg < 0.0)
        throw std::runtime_error("single_qubit_uhlmann: invariant violated (|sigma+| > 1/2?)");
    return std::sqrt(arg);
}

double thermal_fidelity(const CouplingMatrix& delta_J, const BranchDisplacement& residuals,
                        const Eigen::VectorXd& nbar, const Eigen::VectorXcd& state_coeffs) {
    const int n = static_cast<int>(delta_J.rows());
    if (n > 10) throw std::invalid_argument("thermal_fidelity: N > 10 not supported");
    const long long dim = 1LL << n;
    if (state_coeffs.size() != dim)
        throw std::invalid_argument("thermal_fidelity: state dimension mismatch");
    const int nk = static_cast<int>(residuals.beta.rows());
    if (nk > 0 && residuals.beta.cols() != n)
        throw std::invalid_argument("thermal_fidelity: displacement shape mismatch");

    // per-configuration quadratic phase and per-mode displacement
    Eigen::VectorXd quad(dim);
    Eigen::MatrixXcd disp(dim, nk);
    Eigen::VectorXd s(n);
    for (long long c = 0; c < dim; ++c) {
        for (int i = 0; i < n; ++i) s(i) = (c >> i) & 1 ? -1.0 : 1.0;
        quad(c) = s.dot(delta_J * s);
        for (int k = 0; k < nk; ++k) {
            complexd b = 0.0;
            for (int i = 0; i < n; ++i) b += residuals.beta(k, i) * s(i);
            disp(c, k) = b;
        }
    }
    complexd F = 0.0;
    for (long long cs = 0; cs < dim; ++cs) {
        double ps = std::norm(state_coeffs(cs));
        if (ps == 0.0) continue;
        for (long long cr = 0; cr < dim; ++cr) {
            double pr = std::norm(state_coeffs(cr));
            if (pr == 0.0) continue;
            double decay = 0.0;
            for (int k = 0; k < nk; ++k)
                decay += std::norm(disp(cs, k) - disp(cr, k)) * (0.5 + nbar(k));
            F += ps * pr * std::exp(complexd(-decay, quad(cs) - quad(cr)));
        }
    }
    if (std::abs(F.imag()) > 1e-12)
        throw std::runtime_error("thermal_fidelity: imaginary residual above tolerance");
    return F.real();
}

double thermal_nbar(double kT, double omega, bool exact_bose) {
    if (!exact_bose) return kT / omega;
    return 1.0 / std::expm1(omega / kT);
}

ControlPerturbation control_perturbation(const ForceProfile& delta_F, const ForceProfile& base_F,
                                         const NormalModeBasis& modes) {
    if (std::abs(delta_F.T - base_F.T) > 1e-12)
        throw std::invalid_argument("control_perturbation: profiles must share their duration");
    ControlPerturbation out;
    out.displacement.beta.resize(modes.n_modes(), modes.n_ions());
    for (int k = 0; k < modes.n_modes(); ++k) {
        complexd phi = modulation_transform(delta_F, modes.freq(k), 0.0, delta_F.T);
        for (int i = 0; i < modes.n_ions(); ++i)
            out.displacement.beta(k, i) = complexd(0, -1) / std::sqrt(2.0) *
                                          delta_F.weights(i) * modes.modes(i, k) *
                                          modes.length(k) * phi;
    }
    out.delta_J = coupling_cross(base_F, delta_F, modes);
    return out;
}

AnharmonicEstimate anharmonic_error(double phase, double T, double alpha_over_d) {
    if (phase < 0 || T <= 0 || alpha_over_d <= 0)
        throw std::invalid_argument("anharmonic_error: positive inputs required");
    AnharmonicEstimate est;
    const double ratio2 = alpha_over_d * alpha_over_d;
    est.error = ratio2 * std::pow(phase, 1.5) / (std::pow(4.0, 1.5) * T);
    est.speed_limit_T = ratio2 * std::pow(phase, 1.5) / (std::pow(4.0, 1.5) * 1e-4);
    // crude force scale from phi ~ F^2 T / 4, worst-case displacement F T^2 / 2
    double f_est = std::sqrt(4.0 * phase / T);
    est.x_max_bound = 0.5 * f_est * T * T;
    return est;
}

}  // namespace ionctl
