"""
Observables of joint spin-phonon states and the infidelity attribution table.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Sequence

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar

from core.exceptions import ArgumentError
from models.hilbert import StateVector
from models.operators import bell_spin_vector, double_dressed_pauli
from models.trajectory import TRAJECTORY_COLUMNS
from schemas.results import ScenarioSummary

DD_INDEX = 3
UU_INDEX = 0

DECOMPOSITION_COLUMNS = ("term", "infidelity", "attribution")


def reduced_spin_state(state: StateVector) -> np.ndarray:
    """Spin density matrix with the phonons traced out."""
    amplitudes = state.as_matrix()
    return amplitudes @ amplitudes.conj().T


def phonon_distribution(state: StateVector) -> np.ndarray:
    """P(n) for n = 0..cutoff-1."""
    return np.sum(np.abs(state.as_matrix()) ** 2, axis=0)


def mean_phonons(state: StateVector) -> float:
    distribution = phonon_distribution(state)
    return float(np.dot(np.arange(distribution.size), distribution))


def top_level_population(state: StateVector) -> float:
    """Weight in the highest kept Fock state; large values mean the cutoff is too small."""
    return float(phonon_distribution(state)[-1])


def purity(state: StateVector) -> float:
    """tr(rho_spin^2); 1 when spin and motion are not entangled."""
    rho = reduced_spin_state(state)
    return float(np.real(np.trace(rho @ rho)))


def _require_pair(state: StateVector) -> None:
    if state.shape.n_ions != 2:
        raise ArgumentError(f"Bell-state observables need 2 ions, state has {state.shape.n_ions}")


def bell_fidelity(state: StateVector) -> float:
    """<Psi|rho_spin|Psi> with Psi = (|dd> + i|uu>)/sqrt2."""
    _require_pair(state)
    target = bell_spin_vector()
    value = np.real(np.vdot(target, reduced_spin_state(state) @ target))
    return float(np.clip(value, 0.0, 1.0))


def collective_phase(state: StateVector, bound: float = 0.5) -> float:
    """Angle beta of the rotation exp(-i beta sum_j sigma_z^j / 2) that best explains the Bell error.

    A first-order Stark shift c s(t) sum_j sigma_z^j leaves beta = 2 c int s dt, so a
    refocused gate has beta near zero. The search runs over [-bound, bound].
    """
    _require_pair(state)
    direction = double_dressed_pauli("z", 0, state.shape) + double_dressed_pauli("z", 1, state.shape)
    values, vectors = np.linalg.eigh(direction.matrix)
    components = vectors.conj().T @ state.amplitudes

    def loss(beta: float) -> float:
        rotated = vectors @ (np.exp(0.5j * beta * values) * components)
        return -bell_fidelity(StateVector(state.shape, rotated))

    result = minimize_scalar(loss, bounds=(-bound, bound), method="bounded", options={"xatol": 1e-8})
    return float(result.x)


def observables(state: StateVector) -> Dict[str, float]:
    """One row of the trajectory table. Spin columns are NaN away from 2 ions."""
    row = dict.fromkeys(TRAJECTORY_COLUMNS, float("nan"))
    row["mean_phonons"] = mean_phonons(state)
    if state.shape.n_ions == 2:
        rho = reduced_spin_state(state)
        row.update(
            fidelity=bell_fidelity(state),
            p_dd=float(rho[DD_INDEX, DD_INDEX].real),
            p_uu=float(rho[UU_INDEX, UU_INDEX].real),
            re_rho_dd_uu=float(rho[DD_INDEX, UU_INDEX].real),
            im_rho_dd_uu=float(rho[DD_INDEX, UU_INDEX].imag),
        )
    return row


def tabulate(states: Sequence[StateVector]) -> Dict[str, np.ndarray]:
    rows = [observables(state) for state in states]
    return {name: np.array([row[name] for row in rows]) for name in TRAJECTORY_COLUMNS}


# --- Infidelity attribution ---

def _label(missing: Iterable[str]) -> str:
    missing = sorted(missing)
    return ",".join(missing) if missing else "none"


def infidelity_decomposition(summaries: List[ScenarioSummary]) -> pd.DataFrame:
    """Attribute infidelity to the terms toggled between runs.

    The run with the most terms is the reference. Every other run must use a subset
    of its terms; its row is labeled by the terms it leaves out and attributed
    IF(reference) - IF(run). A final ``residual`` row holds what the single-term
    rows do not explain relative to the run with the fewest terms.
    """
    if not summaries:
        raise ArgumentError("no summaries to decompose")
    full = max(summaries, key=lambda s: len(s.enabled_terms))
    reference = full.term_set()
    for summary in summaries:
        if not summary.term_set() <= reference:
            extra = sorted(summary.term_set() - reference)
            raise ArgumentError(f"run '{summary.scenario}' enables {extra}, which the reference run lacks")

    rows = []
    for summary in summaries:
        if summary is full:
            continue
        missing = reference - summary.term_set()
        rows.append({
            "term": _label(missing),
            "infidelity": summary.infidelity,
            "attribution": full.infidelity - summary.infidelity,
            "_single": len(missing) == 1,
        })

    baseline = min(summaries, key=lambda s: len(s.enabled_terms))
    singles = sum(row["attribution"] for row in rows if row["_single"])
    rows.append({
        "term": "residual",
        "infidelity": full.infidelity,
        "attribution": full.infidelity - baseline.infidelity - singles,
        "_single": False,
    })
    return pd.DataFrame(rows).drop(columns="_single").reindex(columns=list(DECOMPOSITION_COLUMNS))
