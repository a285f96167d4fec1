# tests/unit/test_orchestrator.py

import pytest

from core import orchestrator
from core.exceptions import ArgumentError
from core.orchestrator import build_model, model_key, run_scenario
from models.hilbert import SpaceShape
from schemas.plan import GatePlan, IntegratorConfig, PulseEvent, PulseSchedule

pytestmark = pytest.mark.unit


@pytest.fixture
def idle_plan(reference_params):
    """No terms at all: the state must stay where it started."""
    return GatePlan(params=reference_params, enabled_terms=frozenset(), n_phase_flips=1, phonon_cutoff=4)


def test_empty_plan_keeps_initial_state(idle_plan):
    trajectory, summary = run_scenario(idle_plan, cfg=IntegratorConfig(output_samples=5), name="idle")
    assert len(trajectory) == 5
    assert summary.scenario == "idle"
    assert summary.final_fidelity == pytest.approx(0.5)
    assert summary.peak_mean_phonons == pytest.approx(0.0)
    assert summary.final_purity == pytest.approx(1.0)
    assert summary.n_phase_flips == 1
    assert summary.phonon_cutoff == 4
    assert summary.gate_time == pytest.approx(2e-4)
    assert summary.params["nu"] == pytest.approx(idle_plan.params.nu)


def test_model_key_depends_on_what_builds_the_hamiltonian(reference_params):
    shape = SpaceShape(2, 8)
    one = GatePlan(params=reference_params, enabled_terms={"gate"}, n_phase_flips=1)
    many = GatePlan(params=reference_params, enabled_terms={"gate"}, n_phase_flips=19)
    other = GatePlan(params=reference_params, enabled_terms={"gate", "crosstalk"})
    assert model_key(one, shape) == model_key(many, shape)
    assert model_key(one, shape) != model_key(other, shape)
    assert model_key(one, shape) != model_key(one, SpaceShape(2, 9))


def test_models_are_reused_across_flip_counts(reference_params, mocker):
    spy = mocker.spy(orchestrator, "dressed_frame_hamiltonian")
    shape = SpaceShape(2, 5)
    first = build_model(GatePlan(params=reference_params, enabled_terms={"gate", "xy_residual"}, n_phase_flips=1), shape)
    second = build_model(GatePlan(params=reference_params, enabled_terms={"gate", "xy_residual"}, n_phase_flips=99), shape)
    assert first is second
    assert spy.call_count <= 1


def test_explicit_schedule_overrides_plan(idle_plan):
    schedule = PulseSchedule(events=(PulseEvent(time=idle_plan.gate_time / 4, kind="pi_pulse", axis="x"),))
    _, summary = run_scenario(idle_plan, schedule=schedule, cfg=IntegratorConfig(output_samples=3))
    # |dd> -> |uu>: still half-overlap with the Bell target
    assert summary.final_fidelity == pytest.approx(0.5)
    assert summary.n_phase_flips == 0


def test_schedule_outside_gate_is_rejected(idle_plan):
    schedule = PulseSchedule(events=(PulseEvent(time=2 * idle_plan.gate_time, kind="rf_phase_flip"),))
    with pytest.raises(ArgumentError):
        run_scenario(idle_plan, schedule=schedule)
