#include "ionctl/designer.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "ionctl/kernel.hpp"
#include "ionctl/oracle.hpp"

namespace ionctl {

namespace {

void check_symmetric(const CouplingMatrix& m, const char* who) {
    if (m.rows() != m.cols() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument(std::string(who) + ": matrix must be symmetric");
}

std::vector<std::pair<int, int>> upper_pairs(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    return pairs;
}

// Damped Gauss-Newton (Levenberg) on a residual functor.  Accepted steps
// never increase the residual norm; returns the final parameter vector.
using ResidualFn =
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd&)>;

double levenberg(const ResidualFn& eval, Eigen::VectorXd& x) {
    Eigen::VectorXd r, r_try;
    Eigen::MatrixXd J, J_unused;
    eval(x, r, J);
    double lambda = 1e-3;
    for (int iter = 0; iter < 500; ++iter) {
        if (r.lpNorm<Eigen::Infinity>() < 1e-12) break;
        Eigen::MatrixXd H = J.transpose() * J;
        Eigen::VectorXd g = J.transpose() * r;
        bool accepted = false;
        Eigen::VectorXd step;
        for (int retry = 0; retry < 40; ++retry) {
            Eigen::MatrixXd Hd = H;
            Hd.diagonal().array() += lambda;
            step = Hd.ldlt().solve(-g);
            Eigen::VectorXd x_try = x + step;
            Eigen::MatrixXd J_try;
            eval(x_try, r_try, J_try);
            if (r_try.norm() < r.norm()) {
                x = x_try;
                r = r_try;
                J = J_try;
                lambda *= 0.3;
                accepted = true;
                break;
            }
            lambda *= 3.0;
        }
        if (!accepted) break;
        if (step.lpNorm<Eigen::Infinity>() < 1e-9) break;
    }
    return r.norm();
}

}  // namespace

Eigen::MatrixXd ghz_graph(int n) {
    if (n < 1) throw std::invalid_argument("ghz_graph: need n >= 1");
    Eigen::MatrixXd a = Eigen::MatrixXd::Ones(n, n);
    a.diagonal().setZero();
    return a;
}

Eigen::MatrixXd linear_cluster_graph(int n) {
    if (n < 1) throw std::invalid_argument("linear_cluster_graph: need n >= 1");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = 1.0;
    return a;
}

CouplingMatrix graph_state_target(const Eigen::MatrixXd& adjacency) {
    check_symmetric(adjacency, "graph_state_target");
    const int n = static_cast<int>(adjacency.rows());
    CouplingMatrix out = CouplingMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double a = adjacency(i, j);
            if (std::abs(a) > 1e-12 && std::abs(a - 1.0) > 1e-12)
                throw std::invalid_argument("graph_state_target: entries must be 0 or 1");
            if (i != j) out(i, j) = std::round(a);
            else if (std::abs(a) > 1e-12)
                throw std::invalid_argument("graph_state_target: no self loops");
        }
    return out;
}

std::vector<PairInterval> pairwise_schedule(const CouplingMatrix& target, double T,
                                            const NormalModeBasis& modes) {
    check_symmetric(target, "pairwise_schedule");
    const int n = modes.n_ions();
    if (target.rows() != n)
        throw std::invalid_argument("pairwise_schedule: target size does not match the chain");
    auto pairs = upper_pairs(n);
    const double dt = T / static_cast<double>(pairs.size());
    const int nm = modes.n_modes() + 2;

    Eigen::MatrixXd Z = closure_nullspace(modes.freq, dt, nm);
    std::vector<Eigen::MatrixXd> Q;
    if (Z.cols() > 0) {
        auto forms = mode_phase_forms(modes, dt, nm);
        Q.reserve(forms.size());
        for (const auto& q : forms) Q.push_back(Z.transpose() * q * Z);
    }

    std::vector<PairInterval> schedule;
    schedule.reserve(pairs.size());
    for (size_t p = 0; p < pairs.size(); ++p) {
        auto [i, j] = pairs[p];
        Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
        w(i) = w(j) = 1.0;
        PairInterval iv;
        iv.i = i;
        iv.j = j;
        iv.t0 = dt * static_cast<double>(p);
        double J_t = target(i, j);
        if (J_t == 0.0) {
            iv.profile = profile_from_params(dt, nm, Eigen::VectorXd::Zero(2 * nm + 1), w);
            schedule.push_back(std::move(iv));
            continue;
        }
        std::ostringstream where;
        where << "pairwise_schedule: interval (" << i << "," << j << ")";
        if (Z.cols() == 0)
            throw std::runtime_error(where.str() + " too short for the mode count");
        Eigen::MatrixXd Qp = Eigen::MatrixXd::Zero(Z.cols(), Z.cols());
        for (int k = 0; k < modes.n_modes(); ++k)
            Qp += modes.modes(i, k) * modes.modes(j, k) * Q[k];
        Qp = 0.5 * (Qp + Qp.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Qp);
        // extremal eigenvalue; a wrong sign is absorbed by flipping one weight
        int best = 0;
        for (int q = 1; q < es.eigenvalues().size(); ++q)
            if (std::abs(es.eigenvalues()(q)) > std::abs(es.eigenvalues()(best))) best = q;
        double lam = es.eigenvalues()(best);
        if (std::abs(lam) < 1e-12)
            throw std::runtime_error(where.str() + " has no reachable pair phase");
        Eigen::VectorXd w_signed = w;
        if (J_t / lam < 0.0) w_signed(j) = -1.0;
        Eigen::VectorXd v =
            Z * (std::sqrt(std::abs(J_t / lam)) * es.eigenvectors().col(best));
        iv.profile = profile_from_params(dt, nm, v, w_signed);
        schedule.push_back(std::move(iv));
    }
    return schedule;
}

CouplingMatrix schedule_coupling(const std::vector<PairInterval>& schedule,
                                 const NormalModeBasis& modes) {
    CouplingMatrix J = CouplingMatrix::Zero(modes.n_ions(), modes.n_ions());
    for (const auto& iv : schedule) J += accumulated_coupling(iv.profile, modes);
    return J;
}

EntanglerDesign common_mode_design(const CouplingMatrix& target, double T,
                                   const NormalModeBasis& modes, int N_m,
                                   unsigned long seed) {
    check_symmetric(target, "common_mode_design");
    const int n = modes.n_ions();
    if (target.rows() != n)
        throw std::invalid_argument("common_mode_design: target size does not match the chain");
    auto pairs = upper_pairs(n);
    const int np = static_cast<int>(pairs.size());
    if (np == 0) {
        EntanglerDesign trivial;
        trivial.weights = Eigen::VectorXd::Zero(n);
        trivial.T = T;
        trivial.target = target;
        trivial.profile = profile_from_params(T, 1, Eigen::VectorXd::Zero(3), trivial.weights);
        trivial.achieved = CouplingMatrix::Zero(n, n);
        trivial.delta = trivial.achieved - target;
        trivial.converged = true;
        return trivial;
    }
    if (N_m <= 0) {
        // coefficient budget >= pair equations + weights + slack
        int want = np + n + 4;
        N_m = (want - 1) / 2 + 1;
    }

    Eigen::MatrixXd Z = closure_nullspace(modes.freq, T, N_m);
    const int ny = static_cast<int>(Z.cols());
    if (ny == 0)
        throw std::runtime_error("common_mode_design: closure constraints leave no freedom");
    auto forms = mode_phase_forms(modes, T, N_m);
    const int nk = modes.n_modes();
    std::vector<Eigen::MatrixXd> Q(nk);
    for (int k = 0; k < nk; ++k) Q[k] = Z.transpose() * forms[k] * Z;

    // pair-to-mode weights W(p, k) = M_ik M_jk
    Eigen::MatrixXd W(np, nk);
    Eigen::VectorXd tu(np);
    for (int p = 0; p < np; ++p) {
        auto [i, j] = pairs[p];
        for (int k = 0; k < nk; ++k) W(p, k) = modes.modes(i, k) * modes.modes(j, k);
        tu(p) = target(pairs[p].first, pairs[p].second);
    }

    auto mode_phases = [&](const Eigen::VectorXd& y, Eigen::VectorXd& u,
                           Eigen::MatrixXd& du) {
        u.resize(nk);
        du.resize(nk, ny);
        for (int k = 0; k < nk; ++k) {
            Eigen::VectorXd qy = Q[k] * y;
            u(k) = y.dot(qy);
            du.row(k) = 2.0 * qy.transpose();
        }
    };

    // phase 1: uniform weights, fit the modulation alone
    ResidualFn phase1 = [&](const Eigen::VectorXd& y, Eigen::VectorXd& r,
                            Eigen::MatrixXd& J) {
        Eigen::VectorXd u;
        Eigen::MatrixXd du;
        mode_phases(y, u, du);
        r = W * u - tu;
        J = W * du;
    };

    // phase 2: joint weights + modulation, x = [gamma (n); y (ny)]
    ResidualFn phase2 = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r,
                            Eigen::MatrixXd& J) {
        Eigen::VectorXd g = x.head(n), y = x.tail(ny);
        Eigen::VectorXd u;
        Eigen::MatrixXd du;
        mode_phases(y, u, du);
        Eigen::VectorXd q = W * u;
        Eigen::MatrixXd dq = W * du;
        r.resize(np);
        J = Eigen::MatrixXd::Zero(np, n + ny);
        for (int p = 0; p < np; ++p) {
            auto [i, j] = pairs[p];
            r(p) = g(i) * g(j) * q(p) - tu(p);
            J(p, i) = g(j) * q(p);
            J(p, j) = g(i) * q(p);
            J.block(p, n, 1, ny) = g(i) * g(j) * dq.row(p);
        }
    };

    Eigen::VectorXd best_x;
    double best_resid = std::numeric_limits<double>::infinity();
    for (int start = 0; start < 8; ++start) {
        std::mt19937_64 rng(seed * 1000 + static_cast<unsigned long>(start));
        std::normal_distribution<double> draw(0.0, 1.5);
        Eigen::VectorXd y(ny);
        for (int q = 0; q < ny; ++q) y(q) = draw(rng);
        levenberg(phase1, y);
        Eigen::VectorXd x(n + ny);
        x.head(n).setOnes();
        x.tail(ny) = y;
        double resid = levenberg(phase2, x);
        if (resid < best_resid) {
            best_resid = resid;
            best_x = x;
        }
        if (best_resid < 1e-10) break;
    }

    // gauge-fix: largest weight magnitude 1, absorbed into the modulation
    Eigen::VectorXd g = best_x.head(n), y = best_x.tail(ny);
    double gmax = g.cwiseAbs().maxCoeff();
    if (gmax > 0) {
        g /= gmax;
        y *= gmax;
    }

    EntanglerDesign design;
    design.weights = g;
    design.T = T;
    design.target = target;
    design.profile = profile_from_params(T, N_m, Z * y, g);
    design.achieved = accumulated_coupling(design.profile, modes);
    design.delta = design.achieved - design.target;
    CouplingMatrix off = design.delta;
    off.diagonal().setZero();
    design.residual = off.cwiseAbs().maxCoeff();
    design.converged = design.residual < 1e-8;
    if (n <= 14) {
        design.fidelity_estimate = entangler_fidelity(0.5 * off);
    } else {
        // Gaussian estimate |E e^{-i phi}| ~ exp(-Var phi / 2) over random spins
        double var = 0.0;
        for (int p = 0; p < np; ++p) var += std::pow(off(pairs[p].first, pairs[p].second), 2);
        design.fidelity_estimate = std::exp(-0.5 * var);
    }
    return design;
}

double entangler_fidelity(const CouplingMatrix& delta) {
    const int n = static_cast<int>(delta.rows());
    if (delta.cols() != n) throw std::invalid_argument("entangler_fidelity: square matrix");
    if (n > 20)
        throw std::invalid_argument(
            "entangler_fidelity: N > 20 needs a sampled estimator (not provided)");
    CouplingMatrix sym = 0.5 * (delta + delta.transpose());
    const long long dim = 1LL << n;
    complexd acc = 0.0;
    Eigen::VectorXd s(n);
    for (long long c = 0; c < dim; ++c) {
        for (int i = 0; i < n; ++i) s(i) = (c >> i) & 1 ? -1.0 : 1.0;
        acc += std::exp(complexd(0.0, -s.dot(sym * s)));
    }
    return std::abs(acc) / static_cast<double>(dim);
}

CouplingMatrix cw_effective_coupling(const Eigen::VectorXd& f, double drive_freq,
                                     const NormalModeBasis& modes) {
    const int n = modes.n_ions();
    if (f.size() != n)
        throw std::invalid_argument("cw_effective_coupling: amplitude size mismatch");
    for (int k = 0; k < modes.n_modes(); ++k)
        if (std::abs(std::abs(drive_freq) - modes.freq(k)) < 1e-6)
            throw std::invalid_argument("cw_effective_coupling: drive resonant with a mode");
    const double dc = drive_freq == 0.0 ? 2.0 : 1.0;
    CouplingMatrix J = CouplingMatrix::Zero(n, n);
    for (int k = 0; k < modes.n_modes(); ++k) {
        double denom = 2.0 * (modes.freq(k) * modes.freq(k) - drive_freq * drive_freq);
        J += (dc / denom) * (f.asDiagonal() * modes.modes.col(k) *
                             modes.modes.col(k).transpose() * f.asDiagonal());
    }
    return J;
}

TrotterSchedule trotter_schedule(const CouplingMatrix& Jx, const CouplingMatrix& Jy,
                                 const CouplingMatrix& Jz, const Eigen::VectorXd& hx,
                                 const Eigen::VectorXd& hy, const Eigen::VectorXd& hz,
                                 double T, int n_steps) {
    if (n_steps < 1) throw std::invalid_argument("trotter_schedule: n_steps >= 1");
    const int n = static_cast<int>(Jx.rows());
    struct Axis {
        char name;
        const CouplingMatrix* J;
        const Eigen::VectorXd* h;
    };
    std::vector<Axis> active;
    for (Axis a : {Axis{'x', &Jx, &hx}, Axis{'y', &Jy, &hy}, Axis{'z', &Jz, &hz}})
        if (a.J->cwiseAbs().sum() + a.h->cwiseAbs().sum() > 0.0) active.push_back(a);

    TrotterSchedule sched;
    sched.T = T;
    if (active.empty()) {
        sched.n_steps = 0;
        return sched;
    }
    if (active.size() == 1) {
        // a single commuting term is exact in one segment
        sched.n_steps = 1;
        sched.steps.push_back({active[0].name, T, *active[0].h, *active[0].J});
        sched.error_bound = 0.0;
        return sched;
    }
    sched.n_steps = n_steps;
    const double dt = T / static_cast<double>(n_steps);
    for (int s = 0; s < n_steps; ++s)
        for (const Axis& a : active) sched.steps.push_back({a.name, dt, *a.h, *a.J});

    // first-order bound (T^2 / 2 n) sum_{a<b} ||[H_a, H_b]||
    double comm = 0.0;
    if (n <= 10) {
        std::vector<Eigen::MatrixXcd> H;
        for (const Axis& a : active) H.push_back(ising_hamiltonian(a.name, *a.J, *a.h, n));
        for (size_t a = 0; a < H.size(); ++a)
            for (size_t b = a + 1; b < H.size(); ++b) {
                Eigen::MatrixXcd c = complexd(0, 1) * (H[a] * H[b] - H[b] * H[a]);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c);
                comm += es.eigenvalues().cwiseAbs().maxCoeff();
            }
    } else {
        auto norm1 = [](const Axis& a) {
            double v = a.h->cwiseAbs().sum();
            for (int i = 0; i < a.J->rows(); ++i)
                for (int j = i + 1; j < a.J->cols(); ++j) v += std::abs((*a.J)(i, j));
            return v;
        };
        for (size_t a = 0; a < active.size(); ++a)
            for (size_t b = a + 1; b < active.size(); ++b)
                comm += 2.0 * norm1(active[a]) * norm1(active[b]);
    }
    sched.error_bound = T * T * comm / (2.0 * n_steps);
    return sched;
}

}  // namespace ionctl
