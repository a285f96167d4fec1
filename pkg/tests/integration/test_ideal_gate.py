# tests/integration/test_ideal_gate.py
"""Full-gate runs of the gate term alone: cheap enough for every test run."""

import pandas as pd
import pytest

import gate_sim
from core.orchestrator import run_scenario
from core.scenarios import get_scenario
from models.hilbert import SpaceShape
from models.operators import product_state
from schemas.plan import IntegratorConfig
from services.magnus import analytic_propagator

pytestmark = pytest.mark.integration


@pytest.fixture(scope="module")
def baseline():
    plan = get_scenario("fig4-baseline").plan
    trajectory, summary = run_scenario(plan, cfg=IntegratorConfig(output_samples=41), name="fig4-baseline")
    return plan, trajectory, summary


def test_ideal_gate_reaches_bell_state(baseline):
    _, trajectory, summary = baseline
    assert summary.final_fidelity >= 0.9999
    assert summary.final_purity == pytest.approx(1.0, abs=1e-8)
    assert summary.final_mean_phonons < 1e-6
    # |dd> spreads over the sectors -2, 0, 2 with weights 1/4, 1/2, 1/4
    assert summary.peak_mean_phonons == pytest.approx(0.5, rel=1e-3)
    assert trajectory.max_norm_drift() < 1e-8


def test_ideal_gate_matches_closed_form(baseline):
    plan, trajectory, _ = baseline
    shape = SpaceShape(2, plan.cutoff())
    expected = analytic_propagator(plan.params, shape, plan.gate_time).apply(product_state(shape, "dd"))
    assert abs(trajectory.final_state.overlap(expected)) ** 2 > 1 - 1e-8


def test_halving_the_step_leaves_fidelity_unchanged(baseline):
    plan, _, summary = baseline
    _, finer = run_scenario(plan, cfg=IntegratorConfig(output_samples=41, step_factor=200))
    assert abs(finer.final_fidelity - summary.final_fidelity) < 1e-7


def test_larger_cutoff_leaves_fidelity_unchanged(baseline):
    plan, _, summary = baseline
    wider = plan.model_copy(update={"phonon_cutoff": 24})
    _, wide = run_scenario(wider, cfg=IntegratorConfig(output_samples=41))
    assert wide.phonon_cutoff == 24
    assert abs(wide.final_fidelity - summary.final_fidelity) < 1e-6


def test_cli_run_is_reproducible(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    for out in (first, second):
        assert gate_sim.main(["run", "--scenario", "fig4-baseline", "--out", str(out), "--seedless"]) == 0

    assert (first / "trajectory.csv").read_bytes() == (second / "trajectory.csv").read_bytes()
    assert (first / "budget.csv").read_bytes() == (second / "budget.csv").read_bytes()
    table = pd.read_csv(first / "trajectory.csv")
    assert table["fidelity"].iloc[-1] >= 0.9999
    assert table["t_s"].iloc[-1] == pytest.approx(2e-4)
