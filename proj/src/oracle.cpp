#include "ionctl/oracle.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>

#include "ionctl/chain.hpp"
#include "ionctl/kernel.hpp"

namespace ionctl {

namespace ode = boost::numeric::odeint;

namespace {

using dvec = std::vector<double>;

template <typename Rhs>
void integrate_tol(Rhs rhs, dvec& state, double t0, double t1) {
    auto stepper = ode::make_controlled<ode::runge_kutta_fehlberg78<dvec>>(1e-12, 1e-12);
    ode::integrate_adaptive(stepper, rhs, state, t0, t1, (t1 - t0) / 64.0);
}

}  // namespace

BranchResult integrate_branch(const ForceProfile& profile, const NormalModeBasis& modes,
                              const Eigen::VectorXi& spin, const Eigen::VectorXcd& z0) {
    const int nk = modes.n_modes();
    if (spin.size() != modes.n_ions() || z0.size() != nk)
        throw std::invalid_argument("integrate_branch: dimension mismatch");

    // per-mode force amplitude A_k = alpha_k sum_i s_i gamma_i M_ik
    Eigen::VectorXd A(nk);
    for (int k = 0; k < nk; ++k) {
        double a = 0.0;
        for (int i = 0; i < modes.n_ions(); ++i)
            a += spin(i) * profile.weights(i) * modes.modes(i, k);
        A(k) = a * modes.length(k);
    }

    BranchResult out;
    out.z = z0;

    if (profile.kind == ForceProfile::Kind::Kicks) {
        // exact: free rotation between kicks, momentum jump at each kick with
        // the displacement-operator phase Im(delta * conj z)
        double t = 0.0;
        double phase = 0.0;
        Eigen::VectorXcd z = z0;
        for (size_t l = 0; l <= profile.kick_times.size(); ++l) {
            double tl = (l < profile.kick_times.size()) ? profile.kick_times[l] : profile.T;
            for (int k = 0; k < nk; ++k)
                z(k) *= std::exp(complexd(0, -modes.freq(k) * (tl - t)));
            t = tl;
            if (l == profile.kick_times.size()) break;
            double impulse =
                detail::kick_impulse_factor * profile.momentum * profile.kick_units[l];
            for (int k = 0; k < nk; ++k) {
                complexd delta = complexd(0, A(k) * impulse / std::sqrt(2.0));
                phase += std::imag(delta * std::conj(z(k)));
                z(k) += delta;
            }
        }
        out.z = z;
        out.phase = phase;
        return out;
    }

    dvec s(2 * nk + 1);
    for (int k = 0; k < nk; ++k) {
        s[2 * k] = z0(k).real();
        s[2 * k + 1] = z0(k).imag();
    }
    s[2 * nk] = 0.0;
    auto rhs = [&](const dvec& y, dvec& dy, double t) {
        double f = profile.modulation(t);
        double dphi = 0.0;
        for (int k = 0; k < nk; ++k) {
            complexd z(y[2 * k], y[2 * k + 1]);
            double fk = A(k) * f;
            complexd dz = complexd(0, -modes.freq(k)) * z + complexd(0, fk / std::sqrt(2.0));
            dy[2 * k] = dz.real();
            dy[2 * k + 1] = dz.imag();
            dphi += fk * (z + std::conj(z)).real() / (2.0 * std::sqrt(2.0));
        }
        dy[2 * nk] = dphi;
    };
    integrate_tol(rhs, s, 0.0, profile.T);
    for (int k = 0; k < nk; ++k) out.z(k) = complexd(s[2 * k], s[2 * k + 1]);
    out.phase = s[2 * nk];
    return out;
}

PhaseFit branch_phase_fit(const ForceProfile& profile, const NormalModeBasis& modes) {
    const int n = modes.n_ions();
    if (n > 12) throw std::invalid_argument("branch_phase_fit: too many ions for 2^N sweep");
    const int nconf = 1 << n;
    const int npair = n * (n - 1) / 2;
    Eigen::MatrixXd X(nconf, 1 + n + npair);
    Eigen::VectorXd y(nconf);
    Eigen::VectorXcd z0 = Eigen::VectorXcd::Zero(modes.n_modes());
    for (int c = 0; c < nconf; ++c) {
        Eigen::VectorXi s(n);
        for (int i = 0; i < n; ++i) s(i) = (c >> i) & 1 ? -1 : 1;
        y(c) = integrate_branch(profile, modes, s, z0).phase;
        X(c, 0) = 1.0;
        for (int i = 0; i < n; ++i) X(c, 1 + i) = s(i);
        int col = 1 + n;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) X(c, col++) = s(i) * s(j);
    }
    Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    PhaseFit fit;
    fit.constant = beta(0);
    fit.local = beta.segment(1, n);
    fit.J = CouplingMatrix::Zero(n, n);
    int col = 1 + n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            fit.J(i, j) = fit.J(j, i) = beta(col++);
        }
    fit.residual = (X * beta - y).lpNorm<Eigen::Infinity>();
    return fit;
}

MasterMoments integrate_master_moments(double omega, double gamma, double nbar,
                                       const std::function<double(double)>& f_s,
                                       const std::function<double(double)>& f_r, double T) {
    // state: Re/Im beta, kappa, phase, Re/Im h_s, Re/Im h_r
    dvec y(8, 0.0);
    auto rhs = [&](const dvec& v, dvec& dv, double t) {
        complexd rot = std::exp(complexd(0, -omega * t));
        complexd gs = f_s(t) * rot / std::sqrt(2.0);
        complexd gr = f_r(t) * rot / std::sqrt(2.0);
        complexd beta(v[0], v[1]);
        complexd hs(v[4], v[5]), hr(v[6], v[7]);
        complexd dbeta = -gamma * beta + complexd(0, 1) * (std::conj(gr) - std::conj(gs));
        dv[0] = dbeta.real();
        dv[1] = dbeta.imag();
        dv[2] = gamma * (nbar + 0.5) * std::norm(beta);
        dv[3] = std::imag(std::conj(gs) * hs - std::conj(gr) * hr);
        complexd dhs = -gamma * hs + gs;
        complexd dhr = -gamma * hr + gr;
        dv[4] = dhs.real();
        dv[5] = dhs.imag();
        dv[6] = dhr.real();
        dv[7] = dhr.imag();
    };
    integrate_tol(rhs, y, 0.0, T);
    return {complexd(y[0], y[1]), y[2], y[3]};
}

CoulombResult integrate_full_coulomb(const ForceProfile& profile, const TrapSetup& setup,
                                     const Eigen::VectorXi& spin, bool harmonic, int samples) {
    const int n = setup.n_ions;
    if (spin.size() != n || profile.weights.size() != n)
        throw std::invalid_argument("integrate_full_coulomb: dimension mismatch");
    const double rho = setup.coulomb_length_ratio;
    Eigen::VectorXd u = equilibrium_positions(setup);
    Eigen::VectorXd xeq = rho * u;
    Eigen::MatrixXd hess = chain_hessian(setup, u);   // same in alpha units at x = rho u

    auto coulomb_grad = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        if (harmonic) {
            g = hess * (x - xeq);   // V = x^2/2 + quadratic Coulomb expansion about xeq
            return;
        }
        g = x;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                double d = x(i) - x(j);
                g(i) -= rho * rho * rho / (d * std::abs(d));
            }
    };
    auto energy = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& p) {
        double e = 0.5 * p.squaredNorm() + 0.5 * x.squaredNorm();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                e += rho * rho * rho / std::abs(x(i) - x(j));
        return e;
    };

    dvec y(2 * n + 1, 0.0);
    for (int i = 0; i < n; ++i) y[i] = xeq(i);
    Eigen::VectorXd g(n);
    auto rhs = [&](const dvec& v, dvec& dv, double t) {
        Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
        for (int i = 1; i < n; ++i)
            if (x(i) <= x(i - 1))
                throw std::runtime_error("integrate_full_coulomb: ion crossing (model breakdown)");
        coulomb_grad(x, g);
        double f = profile.kind == ForceProfile::Kind::Fourier ? profile.modulation(t) : 0.0;
        double dphi = 0.0;
        for (int i = 0; i < n; ++i) {
            double force = spin(i) * profile.weights(i) * f;
            dv[i] = v[n + i];
            dv[n + i] = -g(i) + force;
            dphi += 0.5 * force * (x(i) - xeq(i));
        }
        dv[2 * n] = dphi;
    };
    if (profile.kind == ForceProfile::Kind::Kicks)
        throw std::invalid_argument("integrate_full_coulomb: smooth profiles only");

    CoulombResult out;
    out.trajectory.resize(samples + 1, n);
    out.times.resize(samples + 1);
    Eigen::VectorXd p0 = Eigen::VectorXd::Zero(n);
    double e0 = energy(xeq, p0);
    for (int sidx = 0; sidx <= samples; ++sidx) {
        double t1 = profile.T * sidx / samples;
        out.times(sidx) = t1;
        out.trajectory.row(sidx) = Eigen::Map<const Eigen::VectorXd>(y.data(), n).transpose();
        if (sidx < samples) {
            double t0 = t1, tn = profile.T * (sidx + 1) / samples;
            integrate_tol(rhs, y, t0, tn);
        }
    }
    Eigen::VectorXd xT = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    Eigen::VectorXd pT = Eigen::Map<const Eigen::VectorXd>(y.data() + n, n);
    out.phase = y[2 * n];
    out.position_defect = (xT - xeq).norm();
    out.momentum_defect = pT.norm();
    out.energy_drift = std::abs(energy(xT, pT) - e0) / std::abs(e0);
    return out;
}

Eigen::VectorXcd plus_state(int n) {
    Eigen::VectorXcd psi(1 << n);
    psi.setConstant(std::pow(2.0, -0.5 * n));
    return psi;
}

Eigen::VectorXcd spin_evolve(const CouplingMatrix& J, double angle,
                             const Eigen::VectorXcd& input) {
    const int n = static_cast<int>(J.rows());
    if (n > 14) throw std::invalid_argument("spin_evolve: N > 14 not supported");
    if (input.size() != (1LL << n))
        throw std::invalid_argument("spin_evolve: state dimension mismatch");
    Eigen::VectorXcd out(input.size());
    Eigen::VectorXd s(n);
    for (long long c = 0; c < input.size(); ++c) {
        for (int i = 0; i < n; ++i) s(i) = (c >> i) & 1 ? -1.0 : 1.0;
        double quad = s.dot(J * s);
        out(c) = input(c) * std::exp(complexd(0, -angle * quad));
    }
    return out;
}

double ghz_overlap(const Eigen::VectorXcd& state) {
    int n = 0;
    while ((1LL << n) < state.size()) ++n;
    double best = 0.0;
    for (int basis = 0; basis < 2; ++basis) {   // 0: x cats, 1: y cats
        complexd ap = 0.0, am = 0.0;
        for (long long c = 0; c < state.size(); ++c) {
            complexd wp = 1.0, wm = 1.0;
            for (int i = 0; i < n; ++i) {
                bool down = (c >> i) & 1;
                if (basis == 0) {
                    if (down) wm *= -1.0;
                } else {
                    if (down) {
                        wp *= complexd(0, -1);
                        wm *= complexd(0, 1);
                    }
                }
            }
            ap += wp * state(c);
            am += wm * state(c);
        }
        double norm = std::pow(2.0, -0.5 * n);
        double overlap = (std::abs(ap) + std::abs(am)) * norm / std::sqrt(2.0);
        best = std::max(best, overlap);
    }
    return best;
}

namespace {

// |out> = S_a |psi> with S_a = 1/2 sum_i sigma^a_i
Eigen::VectorXcd apply_spin(char axis, const Eigen::VectorXcd& psi, int n) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
    for (long long c = 0; c < psi.size(); ++c) {
        for (int i = 0; i < n; ++i) {
            bool down = (c >> i) & 1;
            long long flipped = c ^ (1LL << i);
            switch (axis) {
                case 'z':
                    out(c) += 0.5 * (down ? -1.0 : 1.0) * psi(c);
                    break;
                case 'x':
                    out(flipped) += 0.5 * psi(c);
                    break;
                case 'y':
                    // sigma_y |0> = i|1>, sigma_y |1> = -i|0>
                    out(flipped) += 0.5 * (down ? complexd(0, -1) : complexd(0, 1)) * psi(c);
                    break;
            }
        }
    }
    return out;
}

}  // namespace

double squeezing_metric(const Eigen::VectorXcd& state) {
    int n = 0;
    while ((1LL << n) < state.size()) ++n;
    Eigen::VectorXcd sx = apply_spin('x', state, n);
    Eigen::VectorXcd sy = apply_spin('y', state, n);
    Eigen::VectorXcd sz = apply_spin('z', state, n);
    Eigen::Vector3d mean(std::real(state.dot(sx)), std::real(state.dot(sy)),
                         std::real(state.dot(sz)));
    if (mean.norm() < 1e-9)
        throw std::runtime_error("squeezing_metric: zero mean spin, metric undefined");
    Eigen::Vector3d nvec = mean.normalized();
    // orthonormal frame transverse to the mean spin
    Eigen::Vector3d a = std::abs(nvec(0)) < 0.9 ? Eigen::Vector3d::UnitX()
                                                : Eigen::Vector3d::UnitY();
    Eigen::Vector3d e1 = (a - a.dot(nvec) * nvec).normalized();
    Eigen::Vector3d e2 = nvec.cross(e1);
    std::array<Eigen::VectorXcd, 3> S = {sx, sy, sz};
    auto combo = [&](const Eigen::Vector3d& e) {
        Eigen::VectorXcd v = e(0) * S[0] + e(1) * S[1] + e(2) * S[2];
        return v;
    };
    Eigen::VectorXcd v1 = combo(e1), v2 = combo(e2);
    double m1 = std::real(state.dot(v1)), m2 = std::real(state.dot(v2));
    double c11 = std::real(v1.dot(v1)) - m1 * m1;
    double c22 = std::real(v2.dot(v2)) - m2 * m2;
    double c12 = std::real(v1.dot(v2)) - m1 * m2;  // Re<v1|v2> symmetrizes the product
    double tr = c11 + c22, det = c11 * c22 - c12 * c12;
    double vmin = 0.5 * (tr - std::sqrt(std::max(tr * tr - 4.0 * det, 0.0)));
    return (1 << n) > 0 ? n * vmin / mean.squaredNorm() : 0.0;
}

Eigen::MatrixXcd ising_hamiltonian(char axis, const CouplingMatrix& J, const Eigen::VectorXd& h,
                                   int n) {
    if (n > 12) throw std::invalid_argument("ising_hamiltonian: N > 12 not supported");
    const long long dim = 1LL << n;
    Eigen::MatrixXcd pauli(2, 2);
    switch (axis) {
        case 'x': pauli << 0, 1, 1, 0; break;
        case 'y': pauli << 0, complexd(0, -1), complexd(0, 1), 0; break;
        case 'z': pauli << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("ising_hamiltonian: bad axis");
    }
    auto single = [&](int i) {
        Eigen::MatrixXcd op = Eigen::MatrixXcd::Identity(1, 1);
        // qubit i lives on bit i of the basis index, matching spin_evolve
        for (int q = 0; q < n; ++q) {
            const Eigen::MatrixXcd& factor =
                (q == i) ? pauli : Eigen::MatrixXcd::Identity(2, 2);
            Eigen::MatrixXcd next(op.rows() * 2, op.cols() * 2);
            for (int r = 0; r < 2; ++r)
                for (int cc = 0; cc < 2; ++cc) next.block(r * op.rows(), cc * op.cols(), op.rows(), op.cols()) = factor(r, cc) * op;
            op = next;
        }
        return op;
    };
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<Eigen::MatrixXcd> ops(n);
    for (int i = 0; i < n; ++i) ops[i] = single(i);
    for (int i = 0; i < n; ++i) {
        if (h.size() == n && h(i) != 0.0) H += h(i) * ops[i];
        for (int j = i + 1; j < n; ++j)
            if (J(i, j) != 0.0) H += J(i, j) * ops[i] * ops[j];
    }
    return H;
}

Eigen::VectorXcd evolve_dense(const Eigen::MatrixXcd& H, double t,
                              const Eigen::VectorXcd& state) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    Eigen::VectorXcd phases =
        (complexd(0, -t) * es.eigenvalues().array().cast<complexd>()).exp().matrix();
    return es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().adjoint() * state));
}

}  // namespace ionctl
