#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ionctl/chain.hpp"
#include "ionctl/kernel.hpp"
#include "ionctl/optimizer.hpp"
#include "ionctl/oracle.hpp"

using namespace ionctl;
constexpr double pi = std::numbers::pi;

TEST_CASE("branch integrator: free evolution and a single kick") {
    auto m = tuned_two_ion_modes(std::sqrt(3.0));
    ForceProfile idle;
    idle.kind = ForceProfile::Kind::Kicks;
    idle.T = 2.0;
    idle.weights = Eigen::VectorXd::Ones(2);
    idle.momentum = 0.0;
    Eigen::VectorXi s(2);
    s << 1, 1;
    Eigen::VectorXcd z0(2);
    z0 << complexd(0.3, -0.1), complexd(-0.2, 0.4);
    auto br = integrate_branch(idle, m, s, z0);
    for (int k = 0; k < 2; ++k) {
        complexd ref = z0(k) * std::exp(complexd(0, -m.freq(k) * idle.T));
        CHECK(std::abs(br.z(k) - ref) < 1e-12);
    }
    CHECK(br.phase == doctest::Approx(0.0));

    // one kick from rest: pure momentum, no phase
    ForceProfile one = idle;
    one.momentum = 0.8;
    one.kick_times = {1.0};
    one.kick_units = {2.0};
    auto b1 = integrate_branch(one, m, s, Eigen::VectorXcd::Zero(2));
    CHECK(b1.phase == doctest::Approx(0.0));
    // mode displacement i * A_k * impulse / sqrt 2 rotated to T
    double impulse = 2.0 * one.momentum * 2.0;
    for (int k = 0; k < 2; ++k) {
        double A = (m.modes(0, k) + m.modes(1, k)) * m.length(k);
        complexd ref = complexd(0, A * impulse / std::sqrt(2.0)) *
                       std::exp(complexd(0, -m.freq(k) * 1.0));
        CHECK(std::abs(b1.z(k) - ref) < 1e-12);
    }
}

TEST_CASE("branch phase fit is exact for harmonic dynamics") {
    TrapSetup setup;
    setup.n_ions = 3;
    auto m = normal_modes(setup);
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g;
    ForceProfile p;
    p.T = 4.0;
    p.n_modes = 3;
    p.weights = Eigen::VectorXd(3);
    p.weights << 0.8, -0.5, 0.9;
    p.coeff = Eigen::VectorXcd::Zero(7);
    p.coeff(3) = 0.2 * g(rng);
    for (int mm = 1; mm <= 3; ++mm) {
        complexd c(0.2 * g(rng), 0.2 * g(rng));
        p.coeff(3 + mm) = c;
        p.coeff(3 - mm) = std::conj(c);
    }
    auto fit = branch_phase_fit(p, m);
    CHECK(fit.residual < 1e-9);
    CHECK((fit.J - fit.J.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    // phases reconstruct from the fit on a spot-checked branch
    Eigen::VectorXi s(3);
    s << 1, -1, 1;
    auto br = integrate_branch(p, m, s, Eigen::VectorXcd::Zero(3));
    double pred = fit.constant;
    for (int i = 0; i < 3; ++i) {
        pred += fit.local(i) * s(i);
        for (int j = i + 1; j < 3; ++j) pred += fit.J(i, j) * s(i) * s(j);
    }
    CHECK(br.phase == doctest::Approx(pred).epsilon(1e-9));
}

TEST_CASE("spin states: plus state, GHZ overlap, squeezing") {
    auto psi = plus_state(3);
    CHECK(psi.size() == 8);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-14);
    CHECK(std::abs(psi(5) - complexd(std::pow(2.0, -1.5), 0)) < 1e-14);

    // the uniform pi/4 pair coupling turns |+>^N into a GHZ-class state
    int n = 4;
    CouplingMatrix Jp = (pi / 4) * (Eigen::MatrixXd::Ones(n, n) -
                                    Eigen::MatrixXd::Identity(n, n));
    auto ghz = spin_evolve(0.5 * Jp, 1.0, plus_state(n));
    CHECK(ghz_overlap(ghz) == doctest::Approx(1.0).epsilon(1e-12));
        // the product state already has 1/sqrt(2) overlap with the x-basis cat
    CHECK(ghz_overlap(plus_state(n)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));

    // weak uniform twisting squeezes the collective spin below 1
    CouplingMatrix weak = 0.05 * (Eigen::MatrixXd::Ones(n, n) -
                                  Eigen::MatrixXd::Identity(n, n));
    auto sq = spin_evolve(0.5 * weak, 1.0, plus_state(n));
    CHECK(squeezing_metric(sq) < squeezing_metric(plus_state(n)));
    CHECK(squeezing_metric(plus_state(n)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spin_evolve agrees with the dense z-axis propagator") {
    int n = 3;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    CouplingMatrix J = CouplingMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) J(i, j) = J(j, i) = 0.4 * g(rng);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
    auto H = ising_hamiltonian('z', J, h, n);
    // spin_evolve applies the full quadratic form e^{-i angle s^T J s}, which
    // double-counts relative to the H = sum_{i<j} J_ij sz_i sz_j convention
    auto a = spin_evolve(0.5 * J, 0.7, plus_state(n));
    auto b = evolve_dense(H, 0.7, plus_state(n));
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);

    // dense propagator is unitary and reverses
    auto back = evolve_dense(H, -0.7, b);
    CHECK((back - plus_state(n)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(b.norm() - 1.0) < 1e-12);

    // x-axis Hamiltonian is diagonal in the Hadamard frame: |+>^n is an
    // eigenstate of every sx product
    auto Hx = ising_hamiltonian('x', J, h, n);
    auto c = evolve_dense(Hx, 0.3, plus_state(n));
    CHECK(std::abs(std::abs(c.dot(plus_state(n))) - 1.0) < 1e-12);
}

TEST_CASE("master-moment integrator: gamma -> 0 recovers the unitary phase") {
    double T = 4.0, omega = std::sqrt(3.0);
    auto f_s = [](double t) { return 0.4 * std::sin(t); };
    auto f_r = [](double) { return 0.0; };
    auto mm = integrate_master_moments(omega, 1e-10, 0.0, f_s, f_r, T);
    // phase = phi_s - phi_r where phi_b is the accumulated branch phase
    auto traj = coherent_trajectory([&](double t) { return f_s(t); }, omega, 0.0, T, 4);
    CHECK(mm.phase == doctest::Approx(traj.back().phase).epsilon(1e-7));
    CHECK(mm.kappa < 1e-8);
    // beta = z_r - z_s rotated back to the lab frame at T
    complexd zs = traj.back().z * std::exp(complexd(0, omega * T));
    CHECK(std::abs(mm.beta - (-zs)) < 1e-7);
}

TEST_CASE("full-Coulomb integrator: harmonic branch closes and matches the kernel") {
    TrapSetup s;
    auto m = normal_modes(s);
    auto of = optimal_force(1.5 * 2 * pi, m, 8, Objective::Norm);
    Eigen::VectorXi spin(2);
    spin << 1, -1;
    auto harm = integrate_full_coulomb(of.profile, s, spin, true);
    CHECK(harm.position_defect < 1e-10);
    CHECK(harm.momentum_defect < 1e-10);
    auto br = integrate_branch(of.profile, m, spin, Eigen::VectorXcd::Zero(2));
    CHECK(harm.phase == doctest::Approx(br.phase).epsilon(1e-9));

    // the full nonlinear problem deviates only at higher order in the drive
    auto full = integrate_full_coulomb(of.profile, s, spin, false);
    CHECK(full.position_defect < 1e-2);
    CHECK(std::abs(full.phase - harm.phase) < 1e-2);
    CHECK(std::abs(full.phase - harm.phase) > 1e-6);  // the anharmonic defect is resolved
    CHECK(full.energy_drift < 1.0);
    CHECK(full.trajectory.rows() == full.times.size());
}
