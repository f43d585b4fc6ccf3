#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ionctl/chain.hpp"
#include "ionctl/designer.hpp"
#include "ionctl/errors.hpp"
#include "ionctl/kernel.hpp"
#include "ionctl/kicks.hpp"
#include "ionctl/optimizer.hpp"
#include "ionctl/oracle.hpp"

namespace py = pybind11;
using namespace ionctl;

PYBIND11_MODULE(_ionctl, m) {
    m.doc() = "trapped-ion force-profile design toolkit";

    py::enum_<TrapKind>(m, "TrapKind")
        .value("HarmonicChain", TrapKind::HarmonicChain)
        .value("Microtraps", TrapKind::Microtraps);

    py::class_<TrapSetup>(m, "TrapSetup")
        .def(py::init<>())
        .def_readwrite("n_ions", &TrapSetup::n_ions)
        .def_readwrite("kind", &TrapSetup::kind)
        .def_readwrite("microtrap_centers", &TrapSetup::microtrap_centers)
        .def_readwrite("coulomb_length_ratio", &TrapSetup::coulomb_length_ratio);

    py::class_<NormalModeBasis>(m, "NormalModeBasis")
        .def_readonly("equilibrium", &NormalModeBasis::equilibrium)
        .def_readonly("freq", &NormalModeBasis::freq)
        .def_readonly("modes", &NormalModeBasis::modes)
        .def_readonly("length", &NormalModeBasis::length)
        .def_readonly("degenerate_warning", &NormalModeBasis::degenerate_warning)
        .def_property_readonly("n_ions", &NormalModeBasis::n_ions)
        .def_property_readonly("n_modes", &NormalModeBasis::n_modes);

    py::enum_<ForceProfile::Kind>(m, "ProfileKind")
        .value("Fourier", ForceProfile::Kind::Fourier)
        .value("Kicks", ForceProfile::Kind::Kicks);

    py::class_<ForceProfile>(m, "ForceProfile")
        .def(py::init<>())
        .def_readwrite("kind", &ForceProfile::kind)
        .def_readwrite("T", &ForceProfile::T)
        .def_readwrite("weights", &ForceProfile::weights)
        .def_readwrite("n_modes", &ForceProfile::n_modes)
        .def_readwrite("coeff", &ForceProfile::coeff)
        .def_readwrite("kick_times", &ForceProfile::kick_times)
        .def_readwrite("kick_units", &ForceProfile::kick_units)
        .def_readwrite("momentum", &ForceProfile::momentum)
        .def("modulation", &ForceProfile::modulation);

    py::class_<DissipationModel>(m, "DissipationModel")
        .def(py::init<>())
        .def_readwrite("gamma", &DissipationModel::gamma)
        .def_readwrite("occupation", &DissipationModel::occupation);

    py::class_<KickSolution>(m, "KickSolution")
        .def_readonly("train", &KickSolution::train)
        .def_readonly("gamma", &KickSolution::gamma)
        .def_readonly("n_repeat", &KickSolution::n_repeat)
        .def_readonly("total_time", &KickSolution::total_time)
        .def_readonly("phase_achieved", &KickSolution::phase_achieved)
        .def_readonly("closure", &KickSolution::closure)
        .def_readonly("pulses", &KickSolution::pulses);

    py::class_<EntanglerDesign>(m, "EntanglerDesign")
        .def_readonly("weights", &EntanglerDesign::weights)
        .def_readonly("profile", &EntanglerDesign::profile)
        .def_readonly("T", &EntanglerDesign::T)
        .def_readonly("target", &EntanglerDesign::target)
        .def_readonly("achieved", &EntanglerDesign::achieved)
        .def_readonly("delta", &EntanglerDesign::delta)
        .def_readonly("fidelity_estimate", &EntanglerDesign::fidelity_estimate)
        .def_readonly("converged", &EntanglerDesign::converged)
        .def_readonly("residual", &EntanglerDesign::residual);

    py::class_<OptimalForce>(m, "OptimalForce")
        .def_readonly("profile", &OptimalForce::profile)
        .def_readonly("mu", &OptimalForce::mu)
        .def_readonly("kappa", &OptimalForce::kappa);

    py::class_<PhaseFit>(m, "PhaseFit")
        .def_readonly("constant", &PhaseFit::constant)
        .def_readonly("local", &PhaseFit::local)
        .def_readonly("J", &PhaseFit::J)
        .def_readonly("residual", &PhaseFit::residual);

    py::enum_<Objective>(m, "Objective")
        .value("Norm", Objective::Norm)
        .value("Smoothness", Objective::Smoothness);

    m.def("normal_modes", &normal_modes);
    m.def("tuned_two_ion_modes", &tuned_two_ion_modes);
    m.def("equilibrium_positions", &equilibrium_positions);

    m.def("accumulated_coupling", &accumulated_coupling, py::arg("profile"), py::arg("modes"),
          py::arg("dissipation") = std::nullopt);
    m.def("closure_residual", &closure_residual, py::arg("profile"), py::arg("modes"),
          py::arg("dissipation") = std::nullopt);
    m.def("adiabatic_phase", &adiabatic_phase);
    m.def("profile_from_params", &profile_from_params);
    m.def("fourier_real_params", &fourier_real_params);

    m.def(
        "optimal_force",
        [](double T, const NormalModeBasis& modes, int nm, Objective obj) {
            return optimal_force(T, modes, nm, obj);
        },
        py::arg("T"), py::arg("modes"), py::arg("n_modes") = 8,
        py::arg("objective") = Objective::Norm);

    m.def("kick_phase", &kick_phase);
    m.def("solve_protocol1", &solve_protocol1);
    m.def("solve_protocol2", &solve_protocol2);

    m.def("ghz_graph", &ghz_graph);
    m.def("linear_cluster_graph", &linear_cluster_graph);
    m.def("graph_state_target", &graph_state_target);
    m.def("common_mode_design", &common_mode_design, py::arg("target"), py::arg("T"),
          py::arg("modes"), py::arg("N_m") = 0, py::arg("seed") = 1);
    m.def("entangler_fidelity", &entangler_fidelity);
    m.def("cw_effective_coupling", &cw_effective_coupling);
    m.attr("graph_pair_phase") = graph_pair_phase;

    m.def("decay_kappa", &decay_kappa);
    m.def("dissipative_displacement", &dissipative_displacement);
    m.def("single_qubit_uhlmann", &single_qubit_uhlmann);
    m.def("thermal_nbar", &thermal_nbar, py::arg("kT"), py::arg("omega"),
          py::arg("exact_bose") = false);
    m.def("anharmonic_error", [](double phase, double T, double aod) {
        AnharmonicEstimate e = anharmonic_error(phase, T, aod);
        return py::make_tuple(e.error, e.x_max_bound, e.speed_limit_T);
    });

    m.def("branch_phase_fit", &branch_phase_fit);
    m.def("plus_state", &plus_state);
    m.def("spin_evolve", &spin_evolve);
    m.def("ghz_overlap", &ghz_overlap);
    m.def("squeezing_metric", &squeezing_metric);
}
