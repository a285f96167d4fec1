"""Result records: Stark and noise budgets, scenario summaries."""

from __future__ import annotations

from typing import Dict, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator

# external figure for the motional heating error of this gate family; reported, not recomputed
EXTERNAL_MOTIONAL_ERROR = 1e-3


class StarkBudget(BaseModel):
    """Second-order shifts in rad/s.

    single_ion_shift multiplies sum_j sigma_z^j, phonon_coupled_shift multiplies
    sum_j sigma_z^j (b^dag b + 1/2), xy_coupling multiplies sigma_+^1 sigma_-^2 + h.c.
    and zz_coupling multiplies sigma_z^1 sigma_z^2 (double-dressed operators).
    """

    model_config = ConfigDict(frozen=True)

    single_ion_shift: float
    phonon_coupled_shift: float
    xy_coupling: float
    zz_coupling: float
    crosstalk_shift: float = Field(description="Crosstalk part of single_ion_shift")
    fast_rf_shift: float = Field(description="Fast-RF part of single_ion_shift")
    detuning: float = Field(description="Detuning used for the crosstalk part (rad/s)")


class NoiseBudget(BaseModel):
    """Closed-form dephasing estimate for one gate. Rates in 1/s."""

    model_config = ConfigDict(frozen=True)

    s_bb_dressed: float
    s_rabi_second_order: float
    s_rabi_r: float
    gate_time: float
    refocused: Tuple[str, ...] = ("s_rabi_second_order", "s_rabi_r")
    external_motional_error: float = EXTERNAL_MOTIONAL_ERROR

    @field_validator("s_bb_dressed", "s_rabi_second_order", "s_rabi_r")
    @classmethod
    def _nonnegative(cls, v: float) -> float:
        if v < 0:
            raise ValueError("noise rates are nonnegative")
        return v

    @computed_field
    @property
    def total_infidelity(self) -> float:
        """Rate x time summed over the contributions the echo does not remove."""
        rates = {
            "s_bb_dressed": self.s_bb_dressed,
            "s_rabi_second_order": self.s_rabi_second_order,
            "s_rabi_r": self.s_rabi_r,
        }
        return sum(rate for name, rate in rates.items() if name not in self.refocused) * self.gate_time


class ScenarioSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    scenario: str
    final_fidelity: float
    peak_mean_phonons: float
    final_mean_phonons: float
    final_purity: float
    enabled_terms: Tuple[str, ...]
    n_phase_flips: int
    schedule: str
    K: int
    gate_time: float
    phonon_cutoff: int
    method: str
    max_step: float
    params: Dict[str, float | int | str]

    @computed_field
    @property
    def infidelity(self) -> float:
        return 1.0 - self.final_fidelity

    def term_set(self) -> frozenset:
        return frozenset(self.enabled_terms)
