#include "ionctl/optimizer.hpp"

#include <cmath>
#include <numbers>

#include "ionctl/errors.hpp"
#include "ionctl/kernel.hpp"

namespace ionctl {

namespace {

Eigen::VectorXd two_ion_weights() { return Eigen::VectorXd::Ones(2); }

// L2 Gram of the real Fourier parameters: int_0^T f^2 dt.
Eigen::MatrixXd l2_gram(double T, int nm) {
    Eigen::VectorXd d(2 * nm + 1);
    d(0) = T;
    for (int m = 1; m <= nm; ++m) d(m) = d(nm + m) = 0.5 * T;
    return d.asDiagonal();
}

// Derivative Gram: int_0^T f'^2 dt (constant direction is in its kernel).
Eigen::MatrixXd smoothness_gram(double T, int nm) {
    const double nu = 2.0 * std::numbers::pi / T;
    Eigen::VectorXd d(2 * nm + 1);
    d(0) = 0.0;
    for (int m = 1; m <= nm; ++m) d(m) = d(nm + m) = 0.5 * T * nu * m * nu * m;
    return d.asDiagonal();
}

// Projected two-ion phase form: x^T Gp x = J_12 of the profile Z x.
Eigen::MatrixXd pair_phase_form(const NormalModeBasis& modes, double T, int nm,
                                const Eigen::MatrixXd& Z) {
    std::vector<Eigen::MatrixXd> Q = mode_phase_forms(modes, T, nm);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * nm + 1, 2 * nm + 1);
    for (int k = 0; k < modes.n_modes(); ++k)
        G += modes.modes(0, k) * modes.modes(1, k) * Q[k];
    return Z.transpose() * G * Z;
}

double kappa_of_profile(const ForceProfile& p, const NormalModeBasis& modes,
                        const DissipationModel& diss) {
    Eigen::VectorXi pp(2), mm(2), pm(2), mp(2);
    pp << 1, 1;
    mm << -1, -1;
    pm << 1, -1;
    mp << -1, 1;
    return decay_kappa(p, modes, diss, pp, mm) + decay_kappa(p, modes, diss, pm, mp);
}

}  // namespace

ConstraintBasis build_constraint_basis(double T, const NormalModeBasis& modes, int n_modes) {
    if (n_modes < 3)
        throw std::invalid_argument("build_constraint_basis: need at least 3 Fourier modes");
    int rank = 0;
    ConstraintBasis cb;
    cb.T = T;
    cb.n_modes = n_modes;
    cb.basis = closure_nullspace(modes.freq, T, n_modes, &rank);
    cb.dimension = static_cast<int>(cb.basis.cols());
    cb.degenerate = rank < 2 * modes.n_modes();
    return cb;
}

OptimalForce optimal_force(double T, const NormalModeBasis& modes, int n_modes,
                           Objective objective,
                           const std::optional<KappaPenalty>& kappa_penalty) {
    const double target = std::numbers::pi / 4.0;
    ConstraintBasis cb = build_constraint_basis(T, modes, n_modes);
    const Eigen::MatrixXd& Z = cb.basis;
    const int ny = cb.dimension;
    if (ny < 1) throw std::runtime_error("optimal_force: empty constraint subspace");

    Eigen::MatrixXd Gp = pair_phase_form(modes, T, n_modes, Z);
    Eigen::MatrixXd Np = objective == Objective::Norm
                             ? Eigen::MatrixXd(Z.transpose() * l2_gram(T, n_modes) * Z)
                             : Eigen::MatrixXd(Z.transpose() * smoothness_gram(T, n_modes) * Z);
    if (objective == Objective::Smoothness) {
        // the derivative Gram can touch zero along near-constant directions
        double ridge = 1e-12 * Np.trace() / ny;
        Np += ridge * Eigen::MatrixXd::Identity(ny, ny);
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Gp, Np);
    int imax = 0;
    es.eigenvalues().cwiseAbs().maxCoeff(&imax);
    double mu = es.eigenvalues()(imax);
    if (mu <= 0.0) {
        // the positive-phase branch is required for a +pi/4 gate
        mu = es.eigenvalues().maxCoeff(&imax);
        mu = es.eigenvalues()(imax);
        if (mu <= 1e-15) throw std::runtime_error("optimal_force: no positive phase achievable");
    }
    Eigen::VectorXd x = es.eigenvectors().col(imax);

    OptimalForce out;
    out.mu = mu;

    if (kappa_penalty && kappa_penalty->weight > 0.0) {
        // kappa is quadratic in the force; assemble its reduced form by
        // polarization, then do projected gradient ascent on Gp - w K.
        const Eigen::VectorXd w2 = two_ion_weights();
        auto kappa_of = [&](const Eigen::VectorXd& y) {
            ForceProfile p = profile_from_params(T, n_modes, Z * y, w2);
            return kappa_of_profile(p, modes, kappa_penalty->dissipation);
        };
        Eigen::MatrixXd K(ny, ny);
        for (int p = 0; p < ny; ++p) {
            Eigen::VectorXd ep = Eigen::VectorXd::Unit(ny, p);
            K(p, p) = kappa_of(ep);
            for (int q = p + 1; q < ny; ++q) {
                Eigen::VectorXd eq = Eigen::VectorXd::Unit(ny, q);
                double kp = kappa_of(ep + eq), km = kappa_of(ep - eq);
                K(p, q) = K(q, p) = 0.25 * (kp - km);
            }
        }
        Eigen::MatrixXd B = Gp - kappa_penalty->weight * K;
        auto nnorm = [&](const Eigen::VectorXd& y) { return std::sqrt(y.dot(Np * y)); };
        x /= nnorm(x);
        double step = 0.1;
        double value = x.dot(B * x);
        int it = 0;
        for (; it < 5000; ++it) {
            Eigen::VectorXd grad = 2.0 * (B * x) - 2.0 * value * (Np * x);
            if (grad.norm() < 1e-11) break;
            Eigen::VectorXd trial = x + step * grad;
            trial /= nnorm(trial);
            double tv = trial.dot(B * trial);
            if (tv > value) {
                x = trial;
                value = tv;
                step *= 1.2;
            } else {
                step *= 0.5;
                if (step < 1e-16) break;
            }
        }
        out.ascent_iterations = it;
        out.mu = value;
    }

    double phase = x.dot(Gp * x);
    if (phase <= 0.0) throw std::runtime_error("optimal_force: eigenvector has non-positive phase");
    x *= std::sqrt(target / phase);
    out.profile = profile_from_params(T, n_modes, Z * x, two_ion_weights());
    if (kappa_penalty)
        out.kappa = kappa_of_profile(out.profile, modes, kappa_penalty->dissipation);
    return out;
}

std::vector<IntensityRow> intensity_scan(const std::vector<double>& T_list,
                                         const NormalModeBasis& modes, int n_modes,
                                         Objective objective) {
    std::vector<IntensityRow> rows;
    std::vector<double> gx, gw;
    detail::gauss_legendre(64, gx, gw);
    for (double T : T_list) {
        OptimalForce opt = optimal_force(T, modes, n_modes, objective);
        IntensityRow row;
        row.T = T;
        row.mu = opt.mu;
        Eigen::VectorXd v = fourier_real_params(opt.profile);
        row.l2 = std::sqrt(v.dot(l2_gram(T, n_modes) * v) / T);
        double l1 = 0.0;
        const int panels = 32;
        for (int p = 0; p < panels; ++p) {
            double lo = T * p / panels, hi = T * (p + 1) / panels;
            double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (size_t q = 0; q < gx.size(); ++q)
                l1 += gw[q] * half * std::abs(opt.profile.modulation(mid + half * gx[q]));
        }
        row.l1 = l1 / T;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ionctl
