#include "ionctl/kicks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ionctl/kernel.hpp"

namespace ionctl {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require_two_modes(const NormalModeBasis& modes) {
    if (modes.n_modes() != 2)
        throw std::invalid_argument("kick protocols need a two-mode basis");
}

ForceProfile make_train(double T, const std::vector<double>& times,
                        const std::vector<double>& units, double momentum) {
    ForceProfile p;
    p.kind = ForceProfile::Kind::Kicks;
    p.T = T;
    p.weights = Eigen::VectorXd::Ones(2);
    p.kick_times = times;
    p.kick_units = units;
    p.momentum = momentum;
    return p;
}

// Damped Newton on a 2x2 system; returns true on |g|_inf < 1e-13.
template <typename Fn, typename Jac>
bool newton2(Fn g, Jac jac, Eigen::Vector2d& x) {
    for (int it = 0; it < 100; ++it) {
        Eigen::Vector2d r = g(x);
        if (r.lpNorm<Eigen::Infinity>() < 1e-13) return true;
        Eigen::Matrix2d J = jac(x);
        Eigen::Vector2d step = J.fullPivLu().solve(r);
        double damp = 1.0;
        double rn = r.norm();
        bool ok = false;
        for (int k = 0; k < 30; ++k) {
            Eigen::Vector2d trial = x - damp * step;
            if (g(trial).norm() < rn) {
                x = trial;
                ok = true;
                break;
            }
            damp *= 0.5;
        }
        if (!ok) {
            Eigen::Vector2d rr = g(x);
            return rr.lpNorm<Eigen::Infinity>() < 1e-13;
        }
    }
    return false;
}

struct Protocol1Roots {
    double tau1 = 0.0, tau2 = 0.0;
    bool ok = false;
};

Protocol1Roots protocol1_roots(double gamma, double wc, double wr) {
    auto g = [&](const Eigen::Vector2d& x) {
        return Eigen::Vector2d(gamma * std::sin(wc * x(0)) + std::sin(wc * x(1)),
                               gamma * std::sin(wr * x(0)) + std::sin(wr * x(1)));
    };
    auto jac = [&](const Eigen::Vector2d& x) {
        Eigen::Matrix2d J;
        J << gamma * wc * std::cos(wc * x(0)), wc * std::cos(wc * x(1)),
             gamma * wr * std::cos(wr * x(0)), wr * std::cos(wr * x(1));
        return J;
    };
    Protocol1Roots best;
    for (double f1 : {0.52, 0.535, 0.545, 0.56}) {
        for (double f2 = 0.05; f2 < 0.5; f2 += 0.05) {
            Eigen::Vector2d x(f1 * two_pi, f2 * two_pi);
            if (!newton2(g, jac, x)) continue;
            if (x(0) <= 0 || x(1) <= 0 || x(1) >= x(0)) continue;
            if (x(0) < 0.4 * two_pi || x(0) > 0.7 * two_pi) continue;
            if (!best.ok || x(0) < best.tau1) {
                best = {x(0), x(1), true};
            }
        }
    }
    return best;
}

KickSolution assemble(const std::vector<double>& rel_times, const std::vector<double>& pattern,
                      double n, double momentum, const NormalModeBasis& modes) {
    // shift the centered antisymmetric pattern into [0, T]
    double tmax = *std::max_element(rel_times.begin(), rel_times.end());
    double T = 2.0 * tmax;
    std::vector<double> times, units;
    for (size_t l = 0; l < rel_times.size(); ++l) {
        times.push_back(rel_times[l] + tmax);
        units.push_back(pattern[l] * n);
    }
    KickSolution sol;
    sol.train = make_train(T, times, units, momentum);
    sol.total_time = T;
    sol.closure = closure_residual(sol.train, modes);
    sol.phase_achieved = kick_phase(sol.train, modes, momentum);
    return sol;
}

}  // namespace

double kick_phase(const ForceProfile& train, const NormalModeBasis& modes, double momentum) {
    require_two_modes(modes);
    const double wc = modes.freq(0), wr = modes.freq(1);
    double phi = 0.0;
    for (size_t l = 0; l < train.kick_times.size(); ++l)
        for (size_t m = 0; m < train.kick_times.size(); ++m) {
            double dt = std::abs(train.kick_times[l] - train.kick_times[m]);
            phi += train.kick_units[l] * train.kick_units[m] *
                   (std::sin(wc * dt) / wc - std::sin(wr * dt) / wr);
        }
    return momentum * momentum * phi;
}

KickSolution solve_protocol1(double gamma, double momentum, const NormalModeBasis& modes) {
    require_two_modes(modes);
    if (!(gamma > 0.0) || gamma >= 1.0)
        throw std::invalid_argument("solve_protocol1: gamma must lie in (0,1)");
    const double wc = modes.freq(0), wr = modes.freq(1);
    const double target = std::numbers::pi / 4.0;

    auto base_phase = [&](double gm, Protocol1Roots& roots) {
        roots = protocol1_roots(gm, wc, wr);
        if (!roots.ok) return 0.0;
        std::vector<double> rel = {-roots.tau1, -roots.tau2, roots.tau2, roots.tau1};
        std::vector<double> pat = {gm, 1.0, -1.0, -gm};
        KickSolution unit = assemble(rel, pat, 1.0, momentum, modes);
        return unit.phase_achieved;
    };

    Protocol1Roots roots;
    double phi0 = base_phase(gamma, roots);
    if (!roots.ok)
        throw std::runtime_error("solve_protocol1: no closure root found for this gamma");
    if (std::abs(phi0) < 1e-15)
        throw std::runtime_error("solve_protocol1: degenerate pattern, zero base phase");
    int n = std::max(1, (int)std::ceil(std::sqrt(target / std::abs(phi0)) - 1e-12));

    // retune gamma (re-solving the roots each time) so n^2 |phi0| = pi/4
    double lo = 1e-4, hi = gamma;
    double glo_phase = std::abs(base_phase(lo, roots)) * n * n;
    double ghi_phase = std::abs(phi0) * n * n;
    double gm = gamma;
    if (glo_phase < target && ghi_phase >= target) {
        for (int it = 0; it < 200; ++it) {
            gm = 0.5 * (lo + hi);
            double p = std::abs(base_phase(gm, roots)) * n * n;
            if (std::abs(p - target) < 1e-12) break;
            (p > target ? hi : lo) = gm;
        }
    } else {
        throw std::runtime_error("solve_protocol1: cannot bracket pi/4 by retuning gamma");
    }
    phi0 = base_phase(gm, roots);
    std::vector<double> rel = {-roots.tau1, -roots.tau2, roots.tau2, roots.tau1};
    std::vector<double> pat = {gm, 1.0, -1.0, -gm};
    KickSolution sol = assemble(rel, pat, n, momentum, modes);
    sol.gamma = gm;
    sol.n_repeat = n;
    sol.pulses = 2 * n + 2 * (int)std::lround(gm * n);
    sol.spin_flip = (sol.pulses % 2) != 0;
    return sol;
}

KickSolution solve_protocol2(double T, double momentum, const NormalModeBasis& modes) {
    require_two_modes(modes);
    if (!(T > 0)) throw std::invalid_argument("solve_protocol2: T must be positive");
    const double wc = modes.freq(0), wr = modes.freq(1);
    const double tau1 = 0.5 * T;
    const double target = std::numbers::pi / 4.0;

    auto g = [&](const Eigen::Vector2d& x) {
        return Eigen::Vector2d(
            2 * std::sin(wc * tau1) - 3 * std::sin(wc * x(0)) + 2 * std::sin(wc * x(1)),
            2 * std::sin(wr * tau1) - 3 * std::sin(wr * x(0)) + 2 * std::sin(wr * x(1)));
    };
    auto jac = [&](const Eigen::Vector2d& x) {
        Eigen::Matrix2d J;
        J << -3 * wc * std::cos(wc * x(0)), 2 * wc * std::cos(wc * x(1)),
             -3 * wr * std::cos(wr * x(0)), 2 * wr * std::cos(wr * x(1));
        return J;
    };
    Eigen::Vector2d best;
    bool found = false;
    for (double f2 = 0.1; f2 < 1.0; f2 += 0.1)
        for (double f3 = 0.05; f3 < f2; f3 += 0.1) {
            Eigen::Vector2d x(f2 * tau1, f3 * tau1);
            if (!newton2(g, jac, x)) continue;
            if (!(x(1) > 0 && x(1) < x(0) && x(0) < tau1)) continue;
            if (!found || x(0) < best(0)) {
                best = x;
                found = true;
            }
        }
    if (!found) {
        Eigen::Vector2d x(0.6 * tau1, 0.2 * tau1);
        throw std::runtime_error("solve_protocol2: closure root search failed, residual " +
                                 std::to_string(g(x).norm()));
    }
    double tau2 = best(0), tau3 = best(1);
    std::vector<double> rel = {-tau1, -tau2, -tau3, tau3, tau2, tau1};
    std::vector<double> pat = {-2, 3, -2, 2, -3, 2};
    KickSolution unit = assemble(rel, pat, 1.0, momentum, modes);
    double phi0 = unit.phase_achieved;
    if (std::abs(phi0) < 1e-300)
        throw std::runtime_error("solve_protocol2: zero base phase");
    int n = std::max(1, (int)std::ceil(std::sqrt(target / std::abs(phi0)) - 1e-12));
    // hit pi/4 exactly by trimming the kick momentum
    double kappa = momentum * std::sqrt(target / (n * n * std::abs(phi0)));
    KickSolution sol = assemble(rel, pat, n, kappa, modes);
    sol.gamma = 1.0;
    sol.n_repeat = n;
    sol.pulses = 14 * n;
    sol.spin_flip = false;
    return sol;
}

std::vector<ScanRow> scaling_scan(const std::vector<double>& T_list,
                                  const NormalModeBasis& modes, double momentum) {
    std::vector<ScanRow> rows;
    for (double T : T_list) {
        ScanRow row;
        row.T = T;
        try {
            KickSolution s = solve_protocol2(T, momentum, modes);
            row.tau1 = 0.5 * T;
            row.tau2 = s.train.kick_times[4] - row.tau1;
            row.tau3 = s.train.kick_times[3] - row.tau1;
            row.n = s.n_repeat;
            row.pulses = s.pulses;
            row.ok = true;
        } catch (const std::exception&) {
            row.ok = false;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ionctl
