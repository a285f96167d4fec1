# tests/integration/test_error_budget_runs.py
"""
Full-gate runs with the error terms switched on.

These resolve the fast RF and crosstalk harmonics over the whole gate and take
minutes; deselect them with -m "not slow".
"""

import numpy as np
import pytest

from core.orchestrator import run_scenario
from core.scenarios import get_scenario
from core.schedule import build_schedule
from models.hilbert import SpaceShape
from models.operators import product_state
from schemas.plan import IntegratorConfig
from services.analysis import collective_phase
from services.corrections import stark_budget
from services.hamiltonians import dressed_frame_hamiltonian
from services.propagator import evolve

pytestmark = [pytest.mark.integration, pytest.mark.slow]

SPARSE = IntegratorConfig(output_samples=11)

_runs = {}


def infidelity(name: str, **plan_changes) -> float:
    """1 - F of a named scenario, memoized over the module."""
    key = (name, tuple(sorted(plan_changes.items())))
    if key not in _runs:
        plan = get_scenario(name).plan
        if plan_changes:
            plan = plan.model_copy(update=plan_changes)
        _, summary = run_scenario(plan, cfg=SPARSE, name=name)
        _runs[key] = summary.infidelity
    return _runs[key]


def test_single_flip_fidelity():
    assert 1 - infidelity("fig5-1flip") == pytest.approx(0.995, abs=0.003)


def test_crosstalk_attribution():
    without = get_scenario("fig5-1flip").plan.enabled_terms - {"crosstalk"}
    difference = infidelity("fig5-1flip") - infidelity("fig5-1flip", enabled_terms=without)
    assert difference == pytest.approx(0.002, abs=0.001)


def test_more_flips_refocus_more():
    one = infidelity("fig5-1flip")
    nineteen = infidelity("fig5-19flip")
    ninety_nine = infidelity("fig5-99flip-no-crosstalk")
    assert 1 - nineteen == pytest.approx(0.997, abs=0.002)
    assert 1.5e-4 <= ninety_nine <= 7.5e-4
    assert ninety_nine < nineteen < one


def test_electric_field_after_single_echo():
    assert 2.5e-3 <= infidelity("electric-field") <= 1e-2


@pytest.mark.parametrize("flips, expected", [(19, 3e-3), (99, 3e-4)])
def test_electric_field_with_more_flips(flips, expected):
    terms = get_scenario("electric-field").plan.enabled_terms - {"crosstalk"}
    value = infidelity("electric-field", n_phase_flips=flips, enabled_terms=terms)
    assert expected / 2 <= value <= expected * 2.5


def test_laser_variant_matches_microwave_gate():
    laser = infidelity("laser-variant")
    microwave = infidelity("fig4-baseline")
    assert abs(laser - microwave) < 1e-4


def _spin_coherence(state) -> complex:
    """<+|rho|-> in the eigenbasis of the double-dressed sigma_z (= -S_x) of a single ion."""
    amplitudes = state.as_matrix()
    rho = amplitudes @ amplitudes.conj().T
    plus = np.array([1.0, -1.0]) / np.sqrt(2)
    minus = np.array([1.0, 1.0]) / np.sqrt(2)
    return complex(plus.conj() @ rho @ minus)


def test_phonon_coupled_shift_from_ramsey_phase(reference_params):
    """One extra phonon changes the spin precession rate by twice the phonon-coupled shift."""
    p = reference_params.updated(eta=0.03)
    shape = SpaceShape(1, 6)
    model = dressed_frame_hamiltonian(p, shape, {"xy_residual"})
    t = 2e-4

    coherences = []
    for phonons in (0, 1):
        trajectory = evolve(model, product_state(shape, "u", phonons), t, IntegratorConfig(output_samples=3))
        coherences.append(_spin_coherence(trajectory.final_state))

    measured = -np.angle(coherences[1] / coherences[0]) / (2 * t)
    assert abs(measured) == pytest.approx(abs(stark_budget(p).phonon_coupled_shift), rel=0.1)


def test_single_flip_refocuses_the_fast_rf_shift():
    """Gate plus the counter-rotating RF component: the flip removes the collective sigma_z phase."""
    base = get_scenario("fig5-1flip").plan.model_copy(update={"enabled_terms": frozenset({"gate", "fast_rf"})})
    results = {}
    for flips in (0, 1):
        trajectory, summary = run_scenario(base.model_copy(update={"n_phase_flips": flips}), cfg=SPARSE)
        results[flips] = (summary.final_fidelity, collective_phase(trajectory.final_state))

    (unflipped_fidelity, unflipped_phase), (flipped_fidelity, flipped_phase) = results[0], results[1]
    assert flipped_fidelity > unflipped_fidelity
    assert flipped_fidelity > 0.999
    assert abs(unflipped_phase) > 0.1
    assert abs(flipped_phase) < 0.05 * abs(unflipped_phase)


def test_electric_drive_rotating_wave_form_matches_full_form():
    """Omega_E/4nu is far below 1e-3, so the counter-rotating electric harmonic barely matters."""
    plan = get_scenario("electric-field").plan
    p = plan.params
    assert p.omega_E / (4 * p.nu) < 1e-3
    shape = SpaceShape(2, plan.cutoff())
    schedule = build_schedule(1, plan.gate_time)
    psi0 = product_state(shape, "dd")

    finals = []
    for rwa in (True, False):
        model = dressed_frame_hamiltonian(p, shape, {"gate", "electric"}, electric_rwa=rwa)
        finals.append(evolve(model, psi0, plan.gate_time, SPARSE, schedule).final_state)
    assert abs(finals[0].overlap(finals[1])) == pytest.approx(1.0, abs=1e-6)


def test_electric_runs_converge_in_the_phonon_cutoff():
    plan = get_scenario("electric-field").plan
    wider = int(1.5 * plan.cutoff())
    change = infidelity("electric-field", phonon_cutoff=wider) - infidelity("electric-field")
    assert abs(change) < 1e-4
