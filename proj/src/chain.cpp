#include "ionctl/chain.hpp"

#include <algorithm>
#include <cmath>

namespace ionctl {

namespace {

// Gradient of the trap + Coulomb potential in Coulomb-length units.
Eigen::VectorXd potential_gradient(const TrapSetup& setup, const Eigen::VectorXd& u) {
    const int n = setup.n_ions;
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) {
        double gi = (setup.kind == TrapKind::Microtraps)
                        ? u(i) - setup.microtrap_centers.at(i)
                        : u(i);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double d = u(i) - u(j);
            gi -= 1.0 / (d * std::abs(d));   // -sign(d)/d^2
        }
        g(i) = gi;
    }
    return g;
}

}  // namespace

Eigen::MatrixXd chain_hessian(const TrapSetup& setup, const Eigen::VectorXd& u) {
    const int n = setup.n_ions;
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double d3 = std::pow(std::abs(u(i) - u(j)), 3);
            V(i, i) += 2.0 / d3;
            V(i, j) -= 2.0 / d3;
        }
    }
    return V;
}

Eigen::VectorXd equilibrium_positions(const TrapSetup& setup) {
    const int n = setup.n_ions;
    if (n < 1) throw std::invalid_argument("equilibrium_positions: need at least one ion");
    if (setup.kind == TrapKind::Microtraps &&
        static_cast<int>(setup.microtrap_centers.size()) != n)
        throw std::invalid_argument("equilibrium_positions: one microtrap center per ion");

    Eigen::VectorXd u(n);
    if (setup.kind == TrapKind::Microtraps) {
        for (int i = 0; i < n; ++i) u(i) = setup.microtrap_centers[i];
        // nudge apart in case two wells coincide
        std::sort(u.data(), u.data() + n);
        for (int i = 1; i < n; ++i)
            if (u(i) - u(i - 1) < 1e-3) u(i) = u(i - 1) + 1e-3;
    } else {
        for (int i = 0; i < n; ++i) u(i) = -0.5 * (n - 1) + i;
        if (n == 1) u(0) = 0.0;
    }

    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd g = potential_gradient(setup, u);
        if (g.lpNorm<Eigen::Infinity>() < 1e-13) break;
        Eigen::MatrixXd H = chain_hessian(setup, u);
        Eigen::VectorXd step = H.ldlt().solve(g);
        // halve the step until the ordering of the ions is preserved
        double damp = 1.0;
        for (int k = 0; k < 60; ++k) {
            Eigen::VectorXd trial = u - damp * step;
            bool ordered = true;
            for (int i = 1; i < n; ++i)
                if (trial(i) <= trial(i - 1)) { ordered = false; break; }
            if (ordered) { u = trial; break; }
            damp *= 0.5;
        }
    }
    if (potential_gradient(setup, u).lpNorm<Eigen::Infinity>() > 1e-12)
        throw std::runtime_error("equilibrium_positions: Newton iteration did not converge");
    return u;
}

NormalModeBasis normal_modes(const TrapSetup& setup) {
    NormalModeBasis basis;
    basis.equilibrium = equilibrium_positions(setup);
    Eigen::MatrixXd V = chain_hessian(setup, basis.equilibrium);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("normal_modes: eigensolver failed");

    const int n = setup.n_ions;
    basis.freq = es.eigenvalues().cwiseSqrt();   // ascending
    basis.modes = es.eigenvectors();
    basis.length = basis.freq.cwiseInverse().cwiseSqrt();

    // Fix each mode's overall sign: the entry of largest magnitude is
    // positive; ties resolved in favour of the larger ion index.
    for (int k = 0; k < n; ++k) {
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(basis.modes(i, k)) >= std::abs(basis.modes(imax, k)) - 1e-14)
                imax = i;
        if (basis.modes(imax, k) < 0) basis.modes.col(k) *= -1.0;
    }

    for (int k = 1; k < n; ++k)
        if (basis.freq(k) - basis.freq(k - 1) < 1e-6) basis.degenerate_warning = true;
    return basis;
}

NormalModeBasis tuned_two_ion_modes(double stretch_ratio) {
    if (!(stretch_ratio > 1.0) || stretch_ratio > std::sqrt(3.0) + 1e-12)
        throw std::invalid_argument("tuned_two_ion_modes: stretch_ratio must lie in (1, sqrt(3)]");
    NormalModeBasis basis;
    basis.equilibrium.resize(2);
    double half = std::cbrt(0.25);
    basis.equilibrium << -half, half;
    basis.freq.resize(2);
    basis.freq << 1.0, stretch_ratio;
    basis.modes.resize(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    basis.modes << s, -s,
                   s,  s;
    // same sign fix as normal_modes: largest-magnitude entry positive
    for (int k = 0; k < 2; ++k) {
        int imax = std::abs(basis.modes(1, k)) >= std::abs(basis.modes(0, k)) - 1e-14 ? 1 : 0;
        if (basis.modes(imax, k) < 0) basis.modes.col(k) *= -1.0;
    }
    basis.length = basis.freq.cwiseInverse().cwiseSqrt();
    basis.degenerate_warning = stretch_ratio < 1.0 + 1e-6;
    return basis;
}

}  // namespace ionctl
