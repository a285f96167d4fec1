"""Time-stamped record produced by the propagator."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from models.hilbert import StateVector

# column order used everywhere a trajectory is tabulated
TRAJECTORY_COLUMNS = ("fidelity", "p_dd", "p_uu", "re_rho_dd_uu", "im_rho_dd_uu", "mean_phonons")


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: List[StateVector] = field(repr=False)
    observables: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if len(self.states) != times.shape[0]:
            raise ValueError("one state per recorded time is required")
        for name, values in self.observables.items():
            if np.shape(values) != times.shape:
                raise ValueError(f"observable '{name}' does not match the time grid")
        object.__setattr__(self, "times", times)

    @property
    def final_state(self) -> StateVector:
        return self.states[-1]

    def observable(self, name: str) -> np.ndarray:
        return self.observables[name]

    def final(self, name: str) -> float:
        return float(self.observables[name][-1])

    def max_norm_drift(self) -> float:
        return float(max(abs(state.norm() - 1.0) for state in self.states))

    def __len__(self) -> int:
        return int(self.times.shape[0])
