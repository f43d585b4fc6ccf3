import math

import numpy as np
import pytest

import ionctl


TWO_PI = 2 * math.pi


def test_normal_modes_two_ions():
    setup = ionctl.TrapSetup()
    setup.n_ions = 2
    modes = ionctl.normal_modes(setup)
    assert modes.freq[0] == pytest.approx(1.0, abs=1e-12)
    assert modes.freq[1] == pytest.approx(math.sqrt(3.0), abs=1e-12)
    assert modes.modes.shape == (2, 2)


def test_optimal_force_round_trip():
    setup = ionctl.TrapSetup()
    modes = ionctl.normal_modes(setup)
    force = ionctl.optimal_force(1.5 * TWO_PI, modes)
    J = ionctl.accumulated_coupling(force.profile, modes)
    assert J[0, 1] == pytest.approx(math.pi / 4, abs=1e-9)
    closure = ionctl.closure_residual(force.profile, modes)
    assert np.max(np.abs(closure)) < 1e-10


def test_kick_protocol_phase():
    modes = ionctl.tuned_two_ion_modes(math.sqrt(3.0))
    sol = ionctl.solve_protocol1(0.9, 1.0, modes)
    assert sol.phase_achieved == pytest.approx(math.pi / 4, abs=1e-9)
    assert np.max(np.abs(sol.closure)) < 1e-9


def test_ghz_design_and_overlap():
    n = 6
    setup = ionctl.TrapSetup()
    setup.n_ions = n
    modes = ionctl.normal_modes(setup)
    target = ionctl.graph_pair_phase * ionctl.graph_state_target(ionctl.ghz_graph(n))
    design = ionctl.common_mode_design(target, 2.2 * TWO_PI, modes)
    assert design.converged
    assert design.residual < 1e-8
    state = ionctl.spin_evolve(0.5 * design.achieved, 1.0, ionctl.plus_state(n))
    assert ionctl.ghz_overlap(state) > 0.999


def test_entangler_fidelity_two_ion():
    delta = np.zeros((2, 2))
    delta[0, 1] = 0.3
    assert ionctl.entangler_fidelity(delta) == pytest.approx(abs(math.cos(0.3)), abs=1e-12)


def test_thermal_nbar():
    assert ionctl.thermal_nbar(10.0, 1.0) == pytest.approx(10.0)
    exact = ionctl.thermal_nbar(10.0, 1.0, exact_bose=True)
    assert exact == pytest.approx(1.0 / (math.exp(0.1) - 1.0), rel=1e-12)
