#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ionctl/chain.hpp"
#include "ionctl/designer.hpp"
#include "ionctl/kernel.hpp"
#include "ionctl/oracle.hpp"

using namespace ionctl;
constexpr double pi = std::numbers::pi;

TEST_CASE("graph templates") {
    auto g = ghz_graph(4);
    CHECK(g.rows() == 4);
    CHECK(g.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.sum() == doctest::Approx(12.0));  // complete graph
    auto c = linear_cluster_graph(5);
    CHECK(c.sum() == doctest::Approx(8.0));   // 4 edges, both directions
    CHECK(c(0, 1) == 1.0);
    CHECK(c(0, 2) == 0.0);

    auto t = graph_state_target(g);
    CHECK((t - g).cwiseAbs().maxCoeff() == 0.0);
    Eigen::MatrixXd bad = g;
    bad(0, 1) = 2.0;
    CHECK_THROWS_AS((void)graph_state_target(bad), std::invalid_argument);
    bad = g;
    bad(0, 1) = 0.0;  // asymmetric
    CHECK_THROWS_AS((void)graph_state_target(bad), std::invalid_argument);
}

TEST_CASE("pairwise schedule reproduces an arbitrary 4-ion target") {
    TrapSetup s;
    s.n_ions = 4;
    auto m = normal_modes(s);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    CouplingMatrix target = CouplingMatrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) target(i, j) = target(j, i) = 0.4 * g(rng);
    target(1, 2) = target(2, 1) = 0.0;  // a zero entry must produce zero force

    double T = 3.0 * 2 * pi;
    auto sched = pairwise_schedule(target, T, m);
    CHECK(sched.size() == 6);
    double t_end = 0.0;
    for (const auto& iv : sched) {
        CHECK(iv.t0 == doctest::Approx(t_end).epsilon(1e-12));
        t_end = iv.t0 + iv.profile.T;
        // every interval closes all modes on its own
        CHECK(closure_residual(iv.profile, m).cwiseAbs().maxCoeff() < 1e-8);
        // forces act only on the interval's pair
        for (int i = 0; i < 4; ++i)
            if (i != iv.i && i != iv.j) CHECK(iv.profile.weights(i) == 0.0);
    }
    CHECK(t_end == doctest::Approx(T).epsilon(1e-12));

    CouplingMatrix J = schedule_coupling(sched, m);
    CouplingMatrix diff = J - target;
    diff.diagonal().setZero();
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-7);

    // the (1,2) interval carries no force at all
    for (const auto& iv : sched)
        if ((iv.i == 1 && iv.j == 2))
            CHECK(iv.profile.coeff.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pairwise schedule: two ions, negative target") {
    TrapSetup s;
    auto m = normal_modes(s);
    CouplingMatrix target(2, 2);
    target << 0.0, -pi / 4, -pi / 4, 0.0;
    auto sched = pairwise_schedule(target, 1.5 * 2 * pi, m);
    REQUIRE(sched.size() == 1);
    CouplingMatrix J = schedule_coupling(sched, m);
    CHECK(J(0, 1) == doctest::Approx(-pi / 4).epsilon(1e-9));
}

TEST_CASE("common-modulation design: GHZ(6) and exact state synthesis") {
    TrapSetup s;
    s.n_ions = 6;
    auto m = normal_modes(s);
    CouplingMatrix target = graph_pair_phase * graph_state_target(ghz_graph(6));
    auto d = common_mode_design(target, 2.2 * 2 * pi, m);
    CHECK(d.converged);
    CHECK(d.residual < 1e-8);
    CouplingMatrix off = d.delta;
    off.diagonal().setZero();  // only off-diagonal entries are targeted
    CHECK(off.cwiseAbs().maxCoeff() < 1e-6);
    CHECK(d.fidelity_estimate > 0.999999);

    // independent check: accumulated coupling of the emitted profile
    ForceProfile p = d.profile;
    p.weights = d.weights;
    CouplingMatrix J = accumulated_coupling(p, m);
    CouplingMatrix diff = J - target;
    diff.diagonal().setZero();
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-6);
    CHECK(closure_residual(p, m).cwiseAbs().maxCoeff() < 1e-8);

    // the achieved couplings drive |+>^6 to a GHZ-class state
    CouplingMatrix full = 0.5 * J;  // pair convention -> quadratic form
    auto psi = spin_evolve(full, 1.0, plus_state(6));
    CHECK(ghz_overlap(psi) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("common-modulation design: trivial and error paths") {
    TrapSetup s;
    s.n_ions = 3;
    auto m = normal_modes(s);
    CouplingMatrix zero = CouplingMatrix::Zero(3, 3);
    auto d = common_mode_design(zero, 2 * pi, m);
    CHECK(d.converged);
    CHECK(d.residual < 1e-12);

    CouplingMatrix bad = CouplingMatrix::Zero(3, 2);
    CHECK_THROWS_AS((void)common_mode_design(bad, 2 * pi, m), std::invalid_argument);
}

TEST_CASE("entangler fidelity: literal exponential-sum definition") {
    // single pair, uniform error eps on the full quadratic form:
    // F = |cos(2 eps)| for delta = eps on both off-diagonal entries of 2 ions
    double eps = 0.15;
    CouplingMatrix delta = CouplingMatrix::Zero(2, 2);
    delta(0, 1) = delta(1, 0) = eps;
    // s^T delta s = 2 eps s0 s1 -> F = |E cos(2 eps s0 s1)| = |cos 2 eps|
    CHECK(entangler_fidelity(delta) == doctest::Approx(std::abs(std::cos(2 * eps)))
                                           .epsilon(1e-12));
    CHECK(entangler_fidelity(CouplingMatrix::Zero(3, 3)) == doctest::Approx(1.0));
    // sign symmetry
    CHECK(entangler_fidelity(delta) == doctest::Approx(entangler_fidelity(-delta)));
    // diagonal is a global phase: modulus unchanged
    CouplingMatrix dd = delta;
    dd(0, 0) = 0.4;
    dd(1, 1) = -0.1;
    CHECK(entangler_fidelity(dd) == doctest::Approx(entangler_fidelity(delta)).epsilon(1e-12));
}

TEST_CASE("entangler fidelity equals the exact state overlap") {
    // |<psi_ideal|psi_err>| for spin states evolved under J and J + delta
    int n = 5;
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g;
    CouplingMatrix J = CouplingMatrix::Zero(n, n), delta = CouplingMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            J(i, j) = J(j, i) = 0.3 * g(rng);
            delta(i, j) = delta(j, i) = 0.02 * g(rng);
        }
    auto a = spin_evolve(J, 1.0, plus_state(n));
    auto b = spin_evolve(J + delta, 1.0, plus_state(n));
    double overlap = std::abs(a.dot(b));
    CHECK(entangler_fidelity(delta) == doctest::Approx(overlap).epsilon(1e-12));
}

TEST_CASE("cw effective coupling: symmetry, zero-drive doubling, resonance guard") {
    TrapSetup s;
    s.n_ions = 3;
    auto m = normal_modes(s);
    Eigen::VectorXd f(3);
    f << 0.1, 0.05, 0.08;
    auto J = cw_effective_coupling(f, 0.45, m);
    CHECK((J - J.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((J - cw_effective_coupling(f, -0.45, m)).cwiseAbs().maxCoeff() < 1e-15);

    // static force: the 1 + delta_{Omega,0} factor doubles the kernel sum
    auto J0 = cw_effective_coupling(f, 0.0, m);
    CouplingMatrix half = CouplingMatrix::Zero(3, 3);
    for (int k = 0; k < 3; ++k)
        half += (f.asDiagonal() * m.modes.col(k) * m.modes.col(k).transpose() *
                 f.asDiagonal()) /
                (2.0 * m.freq(k) * m.freq(k));
    CHECK((J0 - 2.0 * half).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS((void)cw_effective_coupling(f, m.freq(1), m), std::invalid_argument);
}

TEST_CASE("cw effective coupling matches the secular phase accumulation rate") {
    TrapSetup s;
    s.n_ions = 3;
    auto m = normal_modes(s);
    Eigen::VectorXd f(3);
    f << 0.1, 0.05, 0.08;
    double Om = 0.45;
    auto Jcw = cw_effective_coupling(f, Om, m);
    // long drive with Omega on the Fourier grid: J(T)/T -> J_cw
    int mh = 45;
    double T = 2 * pi * mh / Om;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * mh + 1);
    v(mh) = 1.0;  // cos(Omega t)
    auto p = profile_from_params(T, mh, v, f);
    auto J = accumulated_coupling(p, m);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            CHECK(J(i, j) / T == doctest::Approx(Jcw(i, j)).epsilon(1e-3));
}

TEST_CASE("trotter schedule: axis cycling, timing and error bound") {
    int n = 4;
    CouplingMatrix Jz = CouplingMatrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) Jz(i, i + 1) = Jz(i + 1, i) = 0.7;
    Eigen::VectorXd hx = Eigen::VectorXd::Constant(n, 0.3);
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    CouplingMatrix zJ = CouplingMatrix::Zero(n, n);

    // transverse-field Ising: x and z axes alternate
    auto sch = trotter_schedule(zJ, zJ, Jz, hx, zero, zero, 2.0, 10);
    CHECK(sch.steps.size() == 20);
    double tx = 0.0, tz = 0.0;
    for (const auto& st : sch.steps) {
        if (st.axis == 'x') tx += st.duration;
        if (st.axis == 'z') tz += st.duration;
    }
    CHECK(tx == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(tz == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sch.error_bound > 0.0);

    // halving the step size halves the first-order Trotter bound
    auto fine = trotter_schedule(zJ, zJ, Jz, hx, zero, zero, 2.0, 20);
    CHECK(fine.error_bound == doctest::Approx(0.5 * sch.error_bound).epsilon(1e-12));

    // single active axis: exact, one segment, zero bound
    auto exact = trotter_schedule(zJ, zJ, Jz, zero, zero, zero, 2.0, 10);
    CHECK(exact.steps.size() == 1);
    CHECK(exact.error_bound == 0.0);

    // the bound really bounds the state error for the dense propagator
    auto Hx = ising_hamiltonian('x', zJ, hx, n);
    auto Hz = ising_hamiltonian('z', Jz, zero, n);
    auto psi0 = plus_state(n);
    auto exact_psi = evolve_dense(Hx + Hz, 2.0, psi0);
    Eigen::VectorXcd psi = psi0;
    for (const auto& st : sch.steps) {
        auto H = ising_hamiltonian(st.axis, st.coupling, st.field, n);
        psi = evolve_dense(H, st.duration, psi);
    }
    CHECK((psi - exact_psi).norm() <= sch.error_bound * (1 + 1e-9));
}
