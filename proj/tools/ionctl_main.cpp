// ionctl: design and verification front end.  Every run writes its artifacts
// plus a manifest into --out, so a run can be reproduced bit-for-bit from the
// manifest alone.
//
// Exit codes: 0 ok, 1 verification failure, 2 config/usage error,
// 3 infeasible design problem.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>

#include <CLI11.hpp>

#include "ionctl/chain.hpp"
#include "ionctl/designer.hpp"
#include "ionctl/errors.hpp"
#include "ionctl/json_io.hpp"
#include "ionctl/kernel.hpp"
#include "ionctl/kicks.hpp"
#include "ionctl/optimizer.hpp"
#include "ionctl/oracle.hpp"

namespace {

constexpr const char* ionctl_version = "0.1.0";
constexpr double two_pi = 2.0 * std::numbers::pi;

using nlohmann::json;

struct Common {
    std::string out = ".";
    std::string config;
};

std::string path_in(const Common& c, const std::string& name) {
    std::filesystem::create_directories(c.out);
    return (std::filesystem::path(c.out) / name).string();
}

void write_manifest(const Common& c, const std::string& command, const json& inputs,
                    long long seed = 0) {
    json m;
    m["schema_version"] = ionctl::schema_version;
    m["tool"] = "ionctl";
    m["version"] = ionctl_version;
    m["command"] = command;
    m["inputs"] = inputs;
    m["seed"] = seed;
    ionctl::write_json(path_in(c, "manifest.json"), m);
}

ionctl::TrapSetup setup_from_config(const Common& c, int n_ions) {
    ionctl::TrapSetup setup;
    setup.n_ions = n_ions;
    if (c.config.empty()) return setup;
    json cfg = ionctl::read_json(c.config);
    if (!cfg.contains("schema_version"))
        throw CLI::ValidationError("config", "missing schema_version in " + c.config);
    if (cfg.contains("n_ions")) setup.n_ions = cfg["n_ions"].get<int>();
    if (cfg.value("trap", "harmonic") == "microtraps") {
        setup.kind = ionctl::TrapKind::Microtraps;
        setup.microtrap_centers = cfg.at("microtrap_centers").get<std::vector<double>>();
    }
    setup.coulomb_length_ratio = cfg.value("coulomb_length_ratio", 50.0);
    return setup;
}

// Replays a profile through the branch oracle and checks closure + phase fit.
json verify_profile(const ionctl::ForceProfile& profile, const ionctl::NormalModeBasis& modes,
                    bool& ok) {
    json report;
    Eigen::VectorXcd closure = ionctl::closure_residual(profile, modes);
    double closure_max = closure.cwiseAbs().maxCoeff();
    report["closure_max"] = closure_max;
    ionctl::CouplingMatrix J = ionctl::accumulated_coupling(profile, modes);
    double fit_err = 0.0;
    if (modes.n_ions() <= 10) {
        ionctl::PhaseFit fit = ionctl::branch_phase_fit(profile, modes);
        ionctl::CouplingMatrix diff = fit.J - J;
        diff.diagonal().setZero();
        fit_err = diff.cwiseAbs().maxCoeff() + fit.residual;
        report["oracle_fit_error"] = fit_err;
    }
    report["coupling"] = ionctl::matrix_to_json(J);
    ok = closure_max < 1e-8 && fit_err < 1e-6;
    report["pass"] = ok;
    return report;
}

int cmd_modes(const Common& c, int n) {
    ionctl::TrapSetup setup = setup_from_config(c, n);
    ionctl::NormalModeBasis modes = ionctl::normal_modes(setup);
    ionctl::write_json(path_in(c, "modes.json"), ionctl::modes_to_json(modes));
    write_manifest(c, "modes", {{"n_ions", setup.n_ions}});
    return 0;
}

int cmd_design_gate(const Common& c, double T_periods, const std::string& objective, int nm,
                    double kappa_weight, double gamma) {
    ionctl::TrapSetup setup;
    ionctl::NormalModeBasis modes = ionctl::normal_modes(setup);
    ionctl::Objective obj =
        objective == "smooth" ? ionctl::Objective::Smoothness : ionctl::Objective::Norm;
    std::optional<ionctl::KappaPenalty> penalty;
    if (kappa_weight > 0) {
        ionctl::KappaPenalty p;
        p.dissipation.gamma = Eigen::VectorXd::Constant(modes.n_modes(), gamma);
        p.dissipation.occupation = Eigen::VectorXd::Zero(modes.n_modes());
        p.weight = kappa_weight;
        penalty = p;
    }
    ionctl::OptimalForce force = ionctl::optimal_force(T_periods * two_pi, modes, nm, obj, penalty);
    ionctl::write_json(path_in(c, "profile.json"), ionctl::profile_to_json(force.profile));
    ionctl::write_profile_csv(path_in(c, "profile.csv"), force.profile, 400);
    write_manifest(c, "design-gate",
                   {{"T", T_periods},
                    {"objective", objective},
                    {"nm", nm},
                    {"kappa_weight", kappa_weight}});
    bool ok = false;
    json report = verify_profile(force.profile, modes, ok);
    report["mu"] = force.mu;
    report["kappa"] = force.kappa;
    ionctl::write_json(path_in(c, "verify.json"), report);
    return ok ? 0 : 1;
}

int cmd_kick_solve(const Common& c, int protocol, double T_periods, double gamma,
                   double momentum, double stretch) {
    ionctl::NormalModeBasis modes = ionctl::tuned_two_ion_modes(stretch);
    ionctl::KickSolution sol = protocol == 1
                                   ? ionctl::solve_protocol1(gamma, momentum, modes)
                                   : ionctl::solve_protocol2(T_periods * two_pi, momentum, modes);
    ionctl::write_json(path_in(c, "kick.json"), ionctl::kick_solution_to_json(sol));
    write_manifest(c, "kick-solve",
                   {{"protocol", protocol},
                    {"T", T_periods},
                    {"gamma", gamma},
                    {"momentum", momentum},
                    {"stretch", stretch}});
    return 0;
}

int cmd_design_entangler(const Common& c, const std::string& target, int n, double T_periods,
                         long long seed, int nm) {
    ionctl::TrapSetup setup;
    setup.n_ions = n;
    ionctl::NormalModeBasis modes = ionctl::normal_modes(setup);
    ionctl::CouplingMatrix J_target;
    if (target == "ghz")
        J_target = ionctl::graph_pair_phase * ionctl::graph_state_target(ionctl::ghz_graph(n));
    else if (target == "cluster")
        J_target = ionctl::graph_pair_phase *
                   ionctl::graph_state_target(ionctl::linear_cluster_graph(n));
    else
        J_target = ionctl::matrix_from_json(ionctl::read_json(target).at("target"));
    if (J_target.rows() != n)
        throw CLI::ValidationError("--target", "target size does not match --n");
    ionctl::EntanglerDesign design = ionctl::common_mode_design(
        J_target, T_periods * two_pi, modes, nm, static_cast<unsigned long>(seed));
    ionctl::write_json(path_in(c, "design.json"), ionctl::design_to_json(design));
    ionctl::write_profile_csv(path_in(c, "design.csv"), design.profile, 400);
    write_manifest(c, "design-entangler",
                   {{"target", target}, {"n", n}, {"T", T_periods}, {"nm", nm}}, seed);
    if (!design.converged) {
        std::cerr << "design did not converge: residual " << design.residual << "\n";
        return 3;
    }
    std::cout << "residual " << design.residual << " fidelity " << design.fidelity_estimate
              << "\n";
    return 0;
}

int cmd_verify(const Common& c, const std::string& artifact, int n) {
    json j = ionctl::read_json(artifact);
    ionctl::TrapSetup setup;
    ionctl::ForceProfile profile;
    if (j.contains("profile")) {  // entangler design
        ionctl::EntanglerDesign d = ionctl::design_from_json(j);
        profile = d.profile;
    } else if (j.contains("train")) {  // kick solution
        profile = ionctl::profile_from_json(j.at("train"));
    } else {
        profile = ionctl::profile_from_json(j);
    }
    setup.n_ions = static_cast<int>(profile.weights.size());
    if (n > 0) setup.n_ions = n;
    ionctl::NormalModeBasis modes;
    if (j.contains("train"))
        modes = ionctl::tuned_two_ion_modes(std::sqrt(3.0));
    else
        modes = ionctl::normal_modes(setup);
    bool ok = false;
    json report = verify_profile(profile, modes, ok);
    ionctl::write_json(path_in(c, "verify.json"), report);
    write_manifest(c, "verify", {{"artifact", artifact}});
    std::cout << (ok ? "PASS" : "FAIL") << " closure_max=" << report["closure_max"].dump()
              << "\n";
    return ok ? 0 : 1;
}

int cmd_error_report(const Common& c, double gamma, double nbar, double alpha_over_d,
                     double T_periods) {
    ionctl::TrapSetup setup;
    ionctl::NormalModeBasis modes = ionctl::normal_modes(setup);
    double T = T_periods * two_pi;
    ionctl::OptimalForce force = ionctl::optimal_force(T, modes, 8, ionctl::Objective::Norm);
    ionctl::DissipationModel diss;
    diss.gamma = Eigen::VectorXd::Constant(modes.n_modes(), gamma);
    diss.occupation = Eigen::VectorXd::Constant(modes.n_modes(), nbar);
    Eigen::VectorXi s(2), r(2);
    s << 1, 1;
    r << 1, -1;
    double kappa = ionctl::decay_kappa(force.profile, modes, diss, s, r);
    Eigen::VectorXcd beta = ionctl::dissipative_displacement(force.profile, modes, diss, s, r);
    ionctl::AnharmonicEstimate anh =
        ionctl::anharmonic_error(std::numbers::pi / 4.0, T, alpha_over_d);
    json rep;
    rep["schema_version"] = ionctl::schema_version;
    rep["T"] = T;
    rep["kappa"] = kappa;
    rep["uhlmann_fidelity"] =
        ionctl::single_qubit_uhlmann(0.0, kappa, ionctl::complexd(0.5, 0.0));
    json b = json::array();
    for (Eigen::Index k = 0; k < beta.size(); ++k) b.push_back({beta(k).real(), beta(k).imag()});
    rep["residual_displacement"] = b;
    rep["anharmonic_error"] = anh.error;
    rep["anharmonic_speed_limit_T"] = anh.speed_limit_T;
    ionctl::write_json(path_in(c, "error_report.json"), rep);
    write_manifest(c, "error-report",
                   {{"gamma", gamma}, {"nbar", nbar}, {"alpha_over_d", alpha_over_d},
                    {"T", T_periods}});
    return 0;
}

int cmd_scan(const Common& c, const std::string& kind, double t_min, double t_max, int points,
             double momentum) {
    ionctl::TrapSetup setup;
    ionctl::NormalModeBasis modes = ionctl::normal_modes(setup);
    std::vector<double> Ts(points);
    for (int i = 0; i < points; ++i)
        Ts[i] = two_pi * t_min * std::pow(t_max / t_min, double(i) / (points - 1));
    if (kind == "intensity") {
        auto rows = ionctl::intensity_scan(Ts, modes, 8, ionctl::Objective::Norm);
        std::vector<std::vector<double>> table;
        for (const auto& r : rows) table.push_back({r.T, r.l1, r.l2, r.mu});
        ionctl::write_csv(path_in(c, "scan.csv"), {"T", "l1", "l2", "mu"}, table);
    } else if (kind == "pulse") {
        ionctl::NormalModeBasis tuned = ionctl::tuned_two_ion_modes(std::sqrt(3.0));
        auto rows = ionctl::scaling_scan(Ts, tuned, momentum);
        std::vector<std::vector<double>> table;
        for (const auto& r : rows)
            table.push_back({r.T, r.tau1, r.tau2, r.tau3, double(r.n), double(r.pulses)});
        ionctl::write_csv(path_in(c, "scan.csv"), {"T", "tau1", "tau2", "tau3", "n", "N_p"},
                          table);
    } else if (kind == "kappa") {
        ionctl::DissipationModel diss;
        diss.gamma = Eigen::VectorXd::Constant(modes.n_modes(), 1e-3);
        diss.occupation = Eigen::VectorXd::Zero(modes.n_modes());
        Eigen::VectorXi s(2), r(2);
        s << 1, 1;
        r << 1, -1;
        std::vector<std::vector<double>> table;
        for (double T : Ts) {
            auto force = ionctl::optimal_force(T, modes, 8, ionctl::Objective::Norm);
            table.push_back({T, ionctl::decay_kappa(force.profile, modes, diss, s, r)});
        }
        ionctl::write_csv(path_in(c, "scan.csv"), {"T", "kappa"}, table);
    } else {
        throw CLI::ValidationError("--kind", "unknown scan kind: " + kind);
    }
    write_manifest(c, "scan",
                   {{"kind", kind}, {"t_min", t_min}, {"t_max", t_max}, {"points", points}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trapped-ion force-profile design and verification"};
    app.require_subcommand(1);
    Common common;
    app.add_option("-o,--out", common.out, "output directory");
    app.add_option("--config", common.config, "JSON config with the trap setup");

    auto* modes = app.add_subcommand("modes", "normal-mode analysis of the chain");
    int n_ions = 2;
    modes->add_option("--n", n_ions, "ion count");

    auto* gate = app.add_subcommand("design-gate", "two-ion continuous pi/4 gate");
    double T_periods = 1.5, kappa_weight = 0.0, diss_gamma = 1e-3;
    std::string objective = "norm";
    int nm = 8;
    gate->add_option("--T", T_periods, "gate time in trap periods");
    gate->add_option("--objective", objective, "norm|smooth")
        ->check(CLI::IsMember({"norm", "smooth"}));
    gate->add_option("--nm", nm, "Fourier harmonics");
    gate->add_option("--kappa-weight", kappa_weight, "decay penalty weight");
    gate->add_option("--gamma", diss_gamma, "mode decay rate for the penalty");

    auto* kick = app.add_subcommand("kick-solve", "kick-train protocols");
    int protocol = 1;
    double kick_gamma = 1.0, momentum = 1.0, stretch = std::sqrt(3.0);
    kick->add_option("--protocol", protocol, "1|2")->check(CLI::IsMember({1, 2}));
    kick->add_option("--T", T_periods, "gate time in trap periods (protocol 2)");
    kick->add_option("--gamma", kick_gamma, "group tilt (protocol 1)");
    kick->add_option("--momentum", momentum, "photon momentum kappa");
    kick->add_option("--stretch", stretch, "stretch/COM frequency ratio");

    auto* ent = app.add_subcommand("design-entangler", "many-ion Ising synthesis");
    std::string target = "ghz";
    long long seed = 1;
    int ent_nm = 0;
    double ent_T = 2.2;
    ent->add_option("--target", target, "ghz|cluster|<json file>");
    ent->add_option("--n", n_ions, "ion count");
    ent->add_option("--T", ent_T, "program time in trap periods");
    ent->add_option("--seed", seed, "multistart seed");
    ent->add_option("--nm", ent_nm, "Fourier harmonics (0 = automatic)");

    auto* verify = app.add_subcommand("verify", "replay an artifact through the oracle");
    std::string artifact;
    int verify_n = 0;
    verify->add_option("artifact", artifact, "profile/design/kick JSON")->required();
    verify->add_option("--n", verify_n, "override ion count");

    auto* err = app.add_subcommand("error-report", "dissipation and anharmonic error budget");
    double err_gamma = 1e-3, err_nbar = 0.0, alpha_over_d = 0.02;
    err->add_option("--gamma", err_gamma, "mode decay rate");
    err->add_option("--nbar", err_nbar, "thermal occupation");
    err->add_option("--alpha-over-d", alpha_over_d, "Lamb-Dicke ratio");
    err->add_option("--T", T_periods, "gate time in trap periods");

    auto* scan = app.add_subcommand("scan", "parameter scans (CSV)");
    std::string scan_kind = "intensity";
    double t_min = 0.5, t_max = 3.0;
    int points = 12;
    scan->add_option("--kind", scan_kind, "intensity|pulse|kappa");
    scan->add_option("--t-min", t_min, "shortest time, trap periods");
    scan->add_option("--t-max", t_max, "longest time, trap periods");
    scan->add_option("--points", points, "scan points");
    scan->add_option("--momentum", momentum, "photon momentum (pulse scan)");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*modes) return cmd_modes(common, n_ions);
        if (*gate)
            return cmd_design_gate(common, T_periods, objective, nm, kappa_weight, diss_gamma);
        if (*kick)
            return cmd_kick_solve(common, protocol, T_periods, kick_gamma, momentum, stretch);
        if (*ent) return cmd_design_entangler(common, target, n_ions, ent_T, seed, ent_nm);
        if (*verify) return cmd_verify(common, artifact, verify_n);
        if (*err) return cmd_error_report(common, err_gamma, err_nbar, alpha_over_d, T_periods);
        if (*scan) return cmd_scan(common, scan_kind, t_min, t_max, points, momentum);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
