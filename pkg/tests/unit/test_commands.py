# tests/unit/test_commands.py

import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd
import pytest

import gate_sim
from api.commands import UNEXPECTED_ERROR_EXIT_CODE, cmd_run, cmd_sweep, cmd_validate, forbid_randomness
from core.exceptions import IntegrationError
from models.operators import product_state
from models.hilbert import SpaceShape
from models.trajectory import Trajectory
from schemas.results import ScenarioSummary
from services.analysis import tabulate

pytestmark = pytest.mark.unit


def _fake_result(plan, schedule=None, cfg=None, name="custom", progress=False):
    """Stand-in for run_scenario: fidelity drops by 1e-3 per enabled error term."""
    shape = SpaceShape(2, 4)
    states = [product_state(shape, "dd"), product_state(shape, "uu")]
    trajectory = Trajectory([0.0, plan.gate_time], states, tabulate(states))
    terms = tuple(sorted(plan.enabled_terms))
    summary = ScenarioSummary(
        scenario=name,
        final_fidelity=1.0 - 1e-3 * (len(terms) - 1),
        peak_mean_phonons=1.0,
        final_mean_phonons=0.0,
        final_purity=1.0,
        enabled_terms=terms,
        n_phase_flips=plan.n_phase_flips,
        schedule="test",
        K=plan.K,
        gate_time=plan.gate_time,
        phonon_cutoff=4,
        method="magnus4",
        max_step=1e-8,
        params=plan.params.model_dump(mode="json"),
    )
    return trajectory, summary


@pytest.fixture
def fake_runs(mocker):
    return mocker.patch("api.commands.run_scenario", side_effect=_fake_result)


# --- run ---

def test_run_writes_all_outputs(fake_runs, tmp_path, capsys):
    assert cmd_run(scenario="fig5-1flip", out=str(tmp_path)) == 0
    for name in ("trajectory.csv", "summary.txt", "budget.csv", "run_operations.log"):
        assert (tmp_path / name).exists()
    assert "scenario: fig5-1flip" in (tmp_path / "summary.txt").read_text()
    assert fake_runs.call_args.kwargs["name"] == "fig5-1flip"
    assert "fig5-1flip: F =" in capsys.readouterr().out


def test_run_from_config_file(fake_runs, write_config, tmp_path):
    path = write_config({"scenario": "crosstalk-only", "plan.n_phase_flips": 19, "output.directory": str(tmp_path / "o")})
    assert cmd_run(str(path)) == 0
    plan = fake_runs.call_args.args[0]
    assert plan.n_phase_flips == 19
    assert (tmp_path / "o" / "trajectory.csv").exists()


def test_run_without_config_or_scenario_is_a_configuration_error(capsys):
    assert cmd_run() == 2
    assert "--config" in capsys.readouterr().out


def test_unknown_config_key_exits_with_two(write_config, tmp_path, capsys):
    path = write_config({"plan.bogus": 1})
    assert cmd_run(str(path), out=str(tmp_path)) == 2
    assert "plan.bogus" in capsys.readouterr().out


def test_integration_failure_exits_with_three(mocker, tmp_path):
    mocker.patch("api.commands.run_scenario", side_effect=IntegrationError("state became non-finite"))
    assert cmd_run(scenario="fig4-baseline", out=str(tmp_path)) == 3
    assert "Run failed" in (tmp_path / "run_operations.log").read_text()


def test_seedless_run_rejects_random_draws(mocker, tmp_path):
    def noisy(*args, **kwargs):
        np.random.default_rng(0)
        return _fake_result(*args, **kwargs)

    mocker.patch("api.commands.run_scenario", side_effect=noisy)
    assert cmd_run(scenario="fig4-baseline", out=str(tmp_path)) == 0
    with pytest.raises(AssertionError):
        cmd_run(scenario="fig4-baseline", out=str(tmp_path), seedless=True)


def test_forbid_randomness_is_scoped():
    with forbid_randomness():
        with pytest.raises(AssertionError):
            np.random.default_rng()
    assert np.random.default_rng(1) is not None


# --- sweep ---

def test_sweep_keeps_input_order(fake_runs, write_config, tmp_path):
    path = write_config({"scenario": "fig5-1flip", "sweep.parameter": "plan.n_phase_flips", "sweep.values": [19, 1, 5]})
    assert cmd_sweep(str(path), out=str(tmp_path), jobs=1) == 0
    table = pd.read_csv(tmp_path / "sweep.csv")
    assert list(table["value"]) == [19, 1, 5]
    assert not (tmp_path / "decomposition.csv").exists()


def test_sweep_over_terms_writes_decomposition(fake_runs, write_config, tmp_path):
    path = write_config({
        "scenario": "fig5-1flip",
        "sweep.parameter": "plan.enabled_terms",
        "sweep.values": ["gate,crosstalk,fast_rf", "gate,fast_rf", "gate"],
    })
    assert cmd_sweep(str(path), out=str(tmp_path), jobs=1) == 0
    table = pd.read_csv(tmp_path / "decomposition.csv").set_index("term")
    assert table.loc["crosstalk", "attribution"] == pytest.approx(1e-3)
    assert table.loc["crosstalk,fast_rf", "attribution"] == pytest.approx(2e-3)


def test_failed_sweep_point_leaves_partial_table(mocker, write_config, tmp_path):
    def flaky(plan, **kwargs):
        if plan.n_phase_flips == 5:
            raise IntegrationError("norm check failed")
        return _fake_result(plan, **kwargs)

    mocker.patch("api.commands.run_scenario", side_effect=flaky)
    path = write_config({"sweep.parameter": "plan.n_phase_flips", "sweep.values": [1, 3, 5, 7]})
    assert cmd_sweep(str(path), out=str(tmp_path), jobs=1) == 3
    assert list(pd.read_csv(tmp_path / "sweep.csv")["value"]) == [1, 3]


def test_parallel_sweep_failure_keeps_every_finished_point(mocker, write_config, tmp_path):
    """The first point fails only after the later ones are done; all of those are written."""
    finished = threading.Semaphore(0)

    def late_failure(plan, **kwargs):
        if plan.n_phase_flips == 1:
            for _ in range(3):
                assert finished.acquire(timeout=10)
            raise IntegrationError("norm check failed")
        result = _fake_result(plan, **kwargs)
        finished.release()
        return result

    mocker.patch("api.commands.ProcessPoolExecutor", ThreadPoolExecutor)
    mocker.patch("api.commands.run_scenario", side_effect=late_failure)
    path = write_config({"sweep.parameter": "plan.n_phase_flips", "sweep.values": [1, 3, 5, 7]})
    assert cmd_sweep(str(path), out=str(tmp_path), jobs=4) == 3
    assert sorted(pd.read_csv(tmp_path / "sweep.csv")["value"]) == [3, 5, 7]


def test_unexpected_sweep_error_still_writes_finished_points(mocker, write_config, tmp_path, capsys):
    def broken(plan, **kwargs):
        if plan.n_phase_flips == 5:
            raise RuntimeError("worker lost")
        return _fake_result(plan, **kwargs)

    mocker.patch("api.commands.run_scenario", side_effect=broken)
    path = write_config({"sweep.parameter": "plan.n_phase_flips", "sweep.values": [1, 3, 5, 7]})
    assert cmd_sweep(str(path), out=str(tmp_path), jobs=1) == UNEXPECTED_ERROR_EXIT_CODE
    assert list(pd.read_csv(tmp_path / "sweep.csv")["value"]) == [1, 3]
    assert "RuntimeError: worker lost" in capsys.readouterr().out


def test_unexpected_run_error_maps_to_generic_exit_code(mocker, tmp_path):
    mocker.patch("api.commands.run_scenario", side_effect=MemoryError("propagator too large"))
    assert cmd_run(scenario="fig4-baseline", out=str(tmp_path)) == UNEXPECTED_ERROR_EXIT_CODE == 1
    assert "MemoryError" in (tmp_path / "run_operations.log").read_text()


def test_sweep_needs_a_sweep_section(tmp_path):
    assert cmd_sweep(scenario="fig5-1flip", out=str(tmp_path)) == 2


# --- validate and CLI ---

def test_validate_prints_hierarchy(capsys):
    assert cmd_validate(scenario="fig5-1flip") == 0
    out = capsys.readouterr().out
    assert "frequency hierarchy" in out
    assert "Omega_r/4 << nu" in out
    assert "ion spacing" in out


def test_cli_lists_scenarios(capsys):
    assert gate_sim.main(["run", "--list"]) == 0
    out = capsys.readouterr().out
    assert "fig5-99flip-no-crosstalk" in out
    assert "laser-variant" in out


def test_cli_rejects_zero_jobs(capsys):
    assert gate_sim.main(["sweep", "--scenario", "fig5-1flip", "--jobs", "0"]) == 2


def test_cli_runs_a_scenario(fake_runs, tmp_path):
    assert gate_sim.main(["run", "--scenario", "fig4-baseline", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "summary.txt").exists()
