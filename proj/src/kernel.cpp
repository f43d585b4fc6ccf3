#include "ionctl/kernel.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>

namespace ionctl {

namespace detail {

complexd E1(complexd a, double T) {
    complexd x = complexd(0, 1) * a * T;   // i a T
    if (std::abs(x) < 1e-6) {
        // E1 = T (1 + x/2 + x^2/6 + x^3/24 + x^4/120)
        return T * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0 + x * x * x * x / 120.0);
    }
    return (std::exp(x) - 1.0) / (complexd(0, 1) * a);
}

complexd E2(complexd a, double T) {
    complexd x = complexd(0, 1) * a * T;
    if (std::abs(x) < 1e-6) {
        // E2 = T^2 (1/2 + x/3 + x^2/8 + x^3/30)
        return T * T * (0.5 + x / 3.0 + x * x / 8.0 + x * x * x / 30.0);
    }
    complexd ia = complexd(0, 1) * a;
    return T * std::exp(x) / ia - (std::exp(x) - 1.0) / (ia * ia);
}

complexd triangular_product(complexd w, int m, int n, double T) {
    const double nu = 2.0 * std::numbers::pi / T;
    complexd b = nu * double(n) - w;     // inner-integral exponent
    if (std::abs(b) * T < 1e-8) return E2(w + nu * double(m), T);
    return (E1(nu * double(m + n), T) - E1(w + nu * double(m), T)) / (complexd(0, 1) * b);
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double xi = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n and P'_n at xi
            double p0 = 1.0, p1 = xi;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
            double dx = p1 / dp;
            xi -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        x[i] = -xi;
        x[n - 1 - i] = xi;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
}

}  // namespace detail

double ForceProfile::modulation(double t) const {
    if (kind != Kind::Fourier)
        throw std::logic_error("ForceProfile::modulation: kick trains have no smooth modulation");
    const double nu = 2.0 * std::numbers::pi / T;
    double f = coeff(n_modes).real();   // c_0
    for (int m = 1; m <= n_modes; ++m)
        f += 2.0 * (coefficient(m) * std::exp(complexd(0, nu * m * t))).real();
    return f;
}

std::vector<TrajectoryPoint> coherent_trajectory(const std::function<double(double)>& f,
                                                 double omega, complexd z0, double T,
                                                 int samples) {
    if (samples < 2) throw std::invalid_argument("coherent_trajectory: samples >= 2");
    namespace ode = boost::numeric::odeint;
    using state = std::array<double, 3>;   // Re z, Im z, phase

    auto rhs = [&](const state& s, state& ds, double t) {
        complexd z(s[0], s[1]);
        double ft = f(t);
        complexd dz = complexd(0, -omega) * z + complexd(0, ft / std::sqrt(2.0));
        ds[0] = dz.real();
        ds[1] = dz.imag();
        ds[2] = ft * (z + std::conj(z)).real() / (2.0 * std::sqrt(2.0));
    };

    auto stepper = ode::make_controlled<ode::runge_kutta_fehlberg78<state>>(1e-12, 1e-12);
    state s = {z0.real(), z0.imag(), 0.0};
    std::vector<TrajectoryPoint> path;
    path.push_back({0.0, z0, 0.0});
    for (int i = 1; i <= samples; ++i) {
        double t0 = T * (i - 1) / samples, t1 = T * i / samples;
        ode::integrate_adaptive(stepper, rhs, s, t0, t1, (t1 - t0) / 16.0);
        path.push_back({t1, complexd(s[0], s[1]), s[2]});
    }
    return path;
}

namespace {

Eigen::VectorXd mode_gamma(const NormalModeBasis& modes,
                           const std::optional<DissipationModel>& dissipation) {
    if (!dissipation) return Eigen::VectorXd::Zero(modes.n_modes());
    if (dissipation->gamma.size() != modes.n_modes())
        throw std::invalid_argument("dissipation model does not match mode count");
    return dissipation->gamma;
}

void check_profile(const ForceProfile& profile, const NormalModeBasis& modes) {
    if (profile.weights.size() != modes.n_ions())
        throw std::invalid_argument("force profile and mode basis disagree on ion count");
    if (profile.kind == ForceProfile::Kind::Fourier &&
        profile.coeff.size() != 2 * profile.n_modes + 1)
        throw std::invalid_argument("Fourier profile has inconsistent coefficient count");
    if (profile.kind == ForceProfile::Kind::Kicks &&
        profile.kick_times.size() != profile.kick_units.size())
        throw std::invalid_argument("kick train has mismatched times/weights");
}

}  // namespace

complexd modulation_transform(const ForceProfile& p, double omega, double gamma, double t) {
    if (p.kind == ForceProfile::Kind::Fourier) {
        const double nu = 2.0 * std::numbers::pi / p.T;
        complexd phi = 0.0;
        for (int m = -p.n_modes; m <= p.n_modes; ++m)
            phi += p.coefficient(m) * detail::E1(complexd(omega, -gamma) + nu * double(m), t);
        return phi;
    }
    complexd phi = 0.0;
    for (size_t l = 0; l < p.kick_times.size(); ++l)
        if (p.kick_times[l] <= t)
            phi += detail::kick_impulse_factor * p.momentum * p.kick_units[l] *
                   std::exp(complexd(gamma * p.kick_times[l], omega * p.kick_times[l]));
    return phi;
}

namespace {

complexd closure_integral(const ForceProfile& p, double w, double g) {
    return modulation_transform(p, w, g, p.T);
}

// X_k = Im iint_{t2<t1} e^{i w (t1-t2)} [fa(t1) fb(t2) + fb(t1) fa(t2)],
// with complex w = omega + i gamma carrying the kernel decay.
double cross_mode_integral(const ForceProfile& a, const ForceProfile& b, complexd w) {
    using Kind = ForceProfile::Kind;
    const double T = a.T;
    if (a.kind == Kind::Fourier && b.kind == Kind::Fourier) {
        complexd acc = 0.0;
        for (int m = -a.n_modes; m <= a.n_modes; ++m)
            for (int n = -b.n_modes; n <= b.n_modes; ++n) {
                complexd p = detail::triangular_product(w, m, n, T);
                acc += (a.coefficient(m) * b.coefficient(n) +
                        b.coefficient(m) * a.coefficient(n)) *
                       p;
            }
        return acc.imag();
    }
    if (a.kind == Kind::Kicks && b.kind == Kind::Kicks) {
        double acc = 0.0;
        for (size_t l = 0; l < a.kick_times.size(); ++l)
            for (size_t q = 0; q < b.kick_times.size(); ++q) {
                double dt = std::abs(a.kick_times[l] - b.kick_times[q]);
                acc += detail::kick_impulse_factor * a.momentum * double(a.kick_units[l]) *
                       detail::kick_impulse_factor * b.momentum * double(b.kick_units[q]) *
                       std::sin(w.real() * dt) * std::exp(-w.imag() * dt);
            }
        return acc;
    }
    // Mixed smooth/kick pair: one delta collapses the double integral, the
    // remaining smooth integral is done by Gauss-Legendre panels, doubled
    // until the result is stable to 1e-10.
    const ForceProfile& smooth = (a.kind == Kind::Fourier) ? a : b;
    const ForceProfile& train = (a.kind == Kind::Fourier) ? b : a;
    std::vector<double> gx, gw;
    detail::gauss_legendre(64, gx, gw);
    auto segment = [&](double lo, double hi, double tl) {
        double acc = 0.0;
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (size_t q = 0; q < gx.size(); ++q) {
            double t = mid + half * gx[q];
            double dt = std::abs(t - tl);
            acc += gw[q] * half * smooth.modulation(t) * std::sin(w.real() * dt) *
                   std::exp(-w.imag() * dt);
        }
        return acc;
    };
    double total = 0.0;
    for (size_t l = 0; l < train.kick_times.size(); ++l) {
        double tl = train.kick_times[l];
        double amp = detail::kick_impulse_factor * train.momentum * double(train.kick_units[l]);
        double value = 0.0;
        for (int panels = 1; panels <= 64; panels *= 2) {
            double v = 0.0;
            for (int p = 0; p < panels; ++p)
                v += segment(T * p / panels, T * (p + 1) / panels, tl);
            if (panels > 1 && std::abs(v - value) < 1e-10) {
                value = v;
                break;
            }
            value = v;
        }
        total += amp * value;
    }
    return total;
}

// Assemble J_ij = 0.5 (ga_i gb_j + ga_j gb_i) sum_k M_ik M_jk alpha_k^2 X_k.
CouplingMatrix contract_modes(const Eigen::VectorXd& ga, const Eigen::VectorXd& gb,
                              const NormalModeBasis& modes, const Eigen::VectorXd& u) {
    const int n = modes.n_ions();
    Eigen::MatrixXd K = modes.modes * u.asDiagonal() * modes.modes.transpose();
    CouplingMatrix J(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            J(i, j) = 0.5 * (ga(i) * gb(j) + ga(j) * gb(i)) * K(i, j);
    return J;
}

}  // namespace

Eigen::VectorXcd closure_residual(const ForceProfile& profile, const NormalModeBasis& modes,
                                  const std::optional<DissipationModel>& dissipation) {
    check_profile(profile, modes);
    Eigen::VectorXd g = mode_gamma(modes, dissipation);
    Eigen::VectorXcd D(modes.n_modes());
    for (int k = 0; k < modes.n_modes(); ++k) {
        double proj = 0.0;   // sum_i gamma_i M_ik
        for (int i = 0; i < modes.n_ions(); ++i) proj += profile.weights(i) * modes.modes(i, k);
        D(k) = proj * modes.length(k) * closure_integral(profile, modes.freq(k), g(k));
    }
    return D;
}

double PhaseKernel::operator()(int i, int j, double t) const {
    double at = std::abs(t);
    Eigen::VectorXd g = mode_gamma(modes, dissipation);
    double G = 0.0;
    for (int k = 0; k < modes.n_modes(); ++k)
        G += modes.modes(i, k) * modes.modes(j, k) * modes.length(k) * modes.length(k) * 0.5 *
             std::sin(modes.freq(k) * at) * std::exp(-g(k) * at);
    return G;
}

PhaseKernel phase_kernel_G(const NormalModeBasis& modes,
                           const std::optional<DissipationModel>& dissipation) {
    return PhaseKernel{modes, dissipation};
}

CouplingMatrix accumulated_coupling(const ForceProfile& profile, const NormalModeBasis& modes,
                                    const std::optional<DissipationModel>& dissipation) {
    check_profile(profile, modes);
    Eigen::VectorXd g = mode_gamma(modes, dissipation);
    Eigen::VectorXd u(modes.n_modes());
    for (int k = 0; k < modes.n_modes(); ++k) {
        complexd w(modes.freq(k), g(k));
        double a2 = modes.length(k) * modes.length(k);
        // X_k for the profile against itself double-counts the triangular
        // integral once, hence the factor 1/2.
        u(k) = 0.5 * a2 * cross_mode_integral(profile, profile, w);
    }
    return contract_modes(profile.weights, profile.weights, modes, u);
}

CouplingMatrix coupling_cross(const ForceProfile& a, const ForceProfile& b,
                              const NormalModeBasis& modes,
                              const std::optional<DissipationModel>& dissipation) {
    check_profile(a, modes);
    check_profile(b, modes);
    if (std::abs(a.T - b.T) > 1e-12)
        throw std::invalid_argument("coupling_cross: profiles must share their duration");
    Eigen::VectorXd g = mode_gamma(modes, dissipation);
    Eigen::VectorXd u(modes.n_modes());
    for (int k = 0; k < modes.n_modes(); ++k) {
        complexd w(modes.freq(k), g(k));
        double a2 = modes.length(k) * modes.length(k);
        u(k) = a2 * cross_mode_integral(a, b, w);
    }
    return contract_modes(a.weights, b.weights, modes, u);
}

double adiabatic_phase(const std::function<double(double)>& F, double omega_c, double omega_r,
                       double T) {
    if (std::abs(F(0.0)) > 1e-9 || std::abs(F(T)) > 1e-9)
        throw std::invalid_argument("adiabatic_phase: force must vanish at both endpoints");
    std::vector<double> gx, gw;
    detail::gauss_legendre(64, gx, gw);
    double prev = 0.0, value = 0.0;
    for (int panels = 1; panels <= 256; panels *= 2) {
        value = 0.0;
        for (int p = 0; p < panels; ++p) {
            double lo = T * p / panels, hi = T * (p + 1) / panels;
            double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (size_t q = 0; q < gx.size(); ++q) {
                double f = F(mid + half * gx[q]);
                value += gw[q] * half * f * f;
            }
        }
        if (panels > 1 && std::abs(value - prev) < 1e-12 * (1.0 + std::abs(value))) break;
        prev = value;
    }
    double wc2 = omega_c * omega_c, wr2 = omega_r * omega_r;
    return 0.5 * (1.0 / wc2 - 1.0 / wr2) * value;
}

Eigen::MatrixXcd real_to_complex_map(int n_modes) {
    const int nc = 2 * n_modes + 1;
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(nc, nc);
    L(n_modes, 0) = 1.0;   // c_0 = a0
    for (int m = 1; m <= n_modes; ++m) {
        L(n_modes + m, m) = 0.5;
        L(n_modes + m, n_modes + m) = complexd(0, -0.5);
        L(n_modes - m, m) = 0.5;
        L(n_modes - m, n_modes + m) = complexd(0, 0.5);
    }
    return L;
}

Eigen::VectorXd fourier_real_params(const ForceProfile& profile) {
    const int nm = profile.n_modes;
    Eigen::VectorXd v(2 * nm + 1);
    v(0) = profile.coefficient(0).real();
    for (int m = 1; m <= nm; ++m) {
        v(m) = 2.0 * profile.coefficient(m).real();
        v(nm + m) = -2.0 * profile.coefficient(m).imag();
    }
    return v;
}

ForceProfile profile_from_params(double T, int n_modes, const Eigen::VectorXd& v,
                                 const Eigen::VectorXd& weights) {
    if (v.size() != 2 * n_modes + 1)
        throw std::invalid_argument("profile_from_params: parameter size mismatch");
    ForceProfile p;
    p.kind = ForceProfile::Kind::Fourier;
    p.T = T;
    p.n_modes = n_modes;
    p.weights = weights;
    p.coeff = real_to_complex_map(n_modes) * v;
    return p;
}

Eigen::MatrixXcd fourier_closure_rows(const Eigen::VectorXd& freq, double T, int n_modes,
                                      const Eigen::VectorXd* gamma) {
    const double nu = 2.0 * std::numbers::pi / T;
    Eigen::MatrixXcd rows(freq.size(), 2 * n_modes + 1);
    for (int k = 0; k < freq.size(); ++k) {
        double g = gamma ? (*gamma)(k) : 0.0;
        for (int m = -n_modes; m <= n_modes; ++m)
            rows(k, m + n_modes) = detail::E1(complexd(freq(k), -g) + nu * double(m), T);
    }
    return rows;
}

std::vector<Eigen::MatrixXd> mode_phase_forms(const NormalModeBasis& modes, double T,
                                              int n_modes,
                                              const std::optional<DissipationModel>& dissipation) {
    Eigen::VectorXd g = mode_gamma(modes, dissipation);
    Eigen::MatrixXcd L = real_to_complex_map(n_modes);
    const int nc = 2 * n_modes + 1;
    std::vector<Eigen::MatrixXd> forms;
    forms.reserve(modes.n_modes());
    for (int k = 0; k < modes.n_modes(); ++k) {
        complexd w(modes.freq(k), g(k));
        Eigen::MatrixXcd P(nc, nc);
        for (int m = -n_modes; m <= n_modes; ++m)
            for (int n = -n_modes; n <= n_modes; ++n)
                P(m + n_modes, n + n_modes) = detail::triangular_product(w, m, n, T);
        Eigen::MatrixXd Q =
            (L.transpose() * P * L).imag() * modes.length(k) * modes.length(k);
        forms.push_back(0.5 * (Q + Q.transpose()));
    }
    return forms;
}

Eigen::MatrixXd closure_nullspace(const Eigen::VectorXd& freq, double T, int n_modes,
                                  int* rank_out) {
    Eigen::MatrixXcd rows = fourier_closure_rows(freq, T, n_modes) * real_to_complex_map(n_modes);
    Eigen::MatrixXd C(2 * freq.size(), 2 * n_modes + 1);
    C << rows.real(), rows.imag();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
    double tol = 1e-10 * svd.singularValues()(0);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol) ++rank;
    if (rank_out) *rank_out = rank;
    return svd.matrixV().rightCols(2 * n_modes + 1 - rank);
}

}  // namespace ionctl
