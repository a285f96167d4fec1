"""
CSV and text writers for run results.

All tables go through pandas with a fixed column order, '.' as decimal separator,
'\\n' line endings and the configured float format, so reruns give identical bodies.
"""

from pathlib import Path
from typing import Iterable, List, Optional

import pandas as pd

from config.settings import settings
from models.trajectory import TRAJECTORY_COLUMNS, Trajectory
from schemas.params import PhysicalParams
from schemas.plan import GatePlan
from schemas.results import NoiseBudget, ScenarioSummary
from services.corrections import coupling_infidelity, stark_budget
from services.noise import noise_budget

SWEEP_COLUMNS = ("value", "final_fidelity", "infidelity", "peak_phonons", "runtime_s", "gate_time_s")
BUDGET_COLUMNS = ("quantity", "value", "unit", "note")


def _write_csv(frame: pd.DataFrame, path: Path, float_format: Optional[str] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=float_format or settings.OUTPUT.FLOAT_FORMAT, lineterminator="\n")
    return path


# --- Trajectory ---

def trajectory_frame(trajectory: Trajectory) -> pd.DataFrame:
    data = {"t_s": trajectory.times}
    data.update({name: trajectory.observable(name) for name in TRAJECTORY_COLUMNS})
    return pd.DataFrame(data, columns=["t_s", *TRAJECTORY_COLUMNS])


def write_trajectory(trajectory: Trajectory, path: Path) -> Path:
    return _write_csv(trajectory_frame(trajectory), path)


# --- Summary ---

def format_summary(summary: ScenarioSummary, plan: GatePlan) -> str:
    lines = [
        f"scenario: {summary.scenario}",
        f"final_fidelity: {summary.final_fidelity:.9f}",
        f"infidelity: {summary.infidelity:.6e}",
        f"peak_mean_phonons: {summary.peak_mean_phonons:.6e}",
        f"final_mean_phonons: {summary.final_mean_phonons:.6e}",
        f"final_spin_purity: {summary.final_purity:.12f}",
        f"enabled_terms: {', '.join(summary.enabled_terms) or 'none'}",
        f"schedule: {summary.schedule}",
        f"n_phase_flips: {summary.n_phase_flips}",
        f"K: {summary.K}",
        f"gate_time_s: {summary.gate_time:.12g}",
        f"phonon_cutoff: {summary.phonon_cutoff}",
        f"initial_state: |{plan.initial_spins}> (x) |{plan.initial_phonons}>",
        f"integrator: {summary.method}, max_step {summary.max_step:.6g} s",
        "",
        "parameters:",
    ]
    lines.extend(f"  {key}: {value}" for key, value in summary.params.items())
    if plan.is_laser:
        lines.append(f"  eta_laser: {plan.eta_laser}")
    return "\n".join(lines) + "\n"


def write_summary(summary: ScenarioSummary, plan: GatePlan, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_summary(summary, plan), encoding="utf-8")
    return path


# --- Budget ---

def budget_frame(p: PhysicalParams, gate_time: float, noise: Optional[NoiseBudget] = None) -> pd.DataFrame:
    """Stark shifts for both readings of the crosstalk detuning, residual couplings and noise."""
    rows: List[dict] = []
    readings = (("delta_omega0", p.delta_omega0), ("nu_minus_omega", p.nu - p.omega_drive))
    for tag, detuning in readings:
        if detuning <= 0:
            continue
        stark = stark_budget(p, detuning=detuning)
        rows.extend([
            {"quantity": f"single_ion_shift[{tag}]", "value": stark.single_ion_shift, "unit": "rad/s",
             "note": "multiplies sum_j sigma_z^j"},
            {"quantity": f"crosstalk_shift[{tag}]", "value": stark.crosstalk_shift, "unit": "rad/s", "note": ""},
        ])
    stark = stark_budget(p)
    rows.extend([
        {"quantity": "fast_rf_shift", "value": stark.fast_rf_shift, "unit": "rad/s", "note": ""},
        {"quantity": "phonon_coupled_shift", "value": stark.phonon_coupled_shift, "unit": "rad/s",
         "note": "multiplies sum_j sigma_z^j (b^dag b + 1/2)"},
        {"quantity": "xy_coupling", "value": stark.xy_coupling, "unit": "rad/s", "note": ""},
        {"quantity": "zz_coupling", "value": stark.zz_coupling, "unit": "rad/s", "note": ""},
        {"quantity": "xy_infidelity", "value": coupling_infidelity(stark.xy_coupling, gate_time), "unit": "1",
         "note": "sin^2(2 J tau)"},
        {"quantity": "zz_infidelity", "value": coupling_infidelity(stark.zz_coupling, gate_time), "unit": "1",
         "note": "sin^2(2 J tau)"},
    ])

    noise = noise or noise_budget(p, gate_time)
    for name in ("s_bb_dressed", "s_rabi_second_order", "s_rabi_r"):
        refocused = name in noise.refocused
        rows.append({"quantity": name, "value": getattr(noise, name), "unit": "1/s",
                     "note": "refocused" if refocused else "included"})
    rows.append({"quantity": "noise_infidelity", "value": noise.total_infidelity, "unit": "1",
                 "note": f"rate x {gate_time:.6g} s"})
    rows.append({"quantity": "external_motional_error", "value": noise.external_motional_error, "unit": "1",
                 "note": "external figure, not recomputed"})
    return pd.DataFrame(rows, columns=list(BUDGET_COLUMNS))


def write_budget(p: PhysicalParams, gate_time: float, path: Path) -> Path:
    return _write_csv(budget_frame(p, gate_time), path)


# --- Sweeps ---

def format_value(value) -> str:
    if isinstance(value, (list, tuple, set, frozenset)):
        return ",".join(sorted(str(v) for v in value)) or "none"
    return str(value)


def sweep_frame(rows: Iterable[dict]) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=list(SWEEP_COLUMNS))


def sweep_row(value, summary: ScenarioSummary, runtime_s: float) -> dict:
    return {
        "value": format_value(value),
        "final_fidelity": summary.final_fidelity,
        "infidelity": summary.infidelity,
        "peak_phonons": summary.peak_mean_phonons,
        "runtime_s": runtime_s,
        "gate_time_s": summary.gate_time,
    }


def write_sweep(rows: Iterable[dict], path: Path) -> Path:
    return _write_csv(sweep_frame(rows), path)


def write_decomposition(frame: pd.DataFrame, path: Path) -> Path:
    return _write_csv(frame, path)
