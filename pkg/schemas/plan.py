"""Gate plans, control schedules and integrator settings."""

from __future__ import annotations

import math
from typing import FrozenSet, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from config.settings import settings
from schemas.params import PhysicalParams

MICROWAVE_LABELS: Tuple[str, ...] = ("gate", "crosstalk", "fast_rf", "xy_residual", "zz_residual", "electric")
LASER_LABELS: Tuple[str, ...] = ("gate", "sideband_residual", "phonon_dephasing", "fast_rf")

EventKind = Literal["pi_pulse", "rf_phase_flip"]
Axis = Literal["x", "y", "z"]
IntegrationMethod = Literal["stepwise_exponential", "magnus4", "rk4"]

# relative tolerance of the loop-closure condition on epsilon
CLOSURE_RTOL = 1e-9


class PulseEvent(BaseModel):
    """Instantaneous control event. ``axis`` is read only for pi pulses (dressed S axis)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    time: float = Field(gt=0.0)
    kind: EventKind
    axis: Axis = "x"


class PulseSchedule(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    events: Tuple[PulseEvent, ...] = ()
    gate_time: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _ordered_and_inside(self) -> "PulseSchedule":
        times = [event.time for event in self.events]
        if any(later <= earlier for earlier, later in zip(times, times[1:])):
            raise ValueError("event times must be strictly increasing")
        if self.gate_time is not None and any(t >= self.gate_time for t in times):
            raise ValueError("events must lie inside (0, gate_time)")
        return self

    @property
    def flip_times(self) -> Tuple[float, ...]:
        return tuple(e.time for e in self.events if e.kind == "rf_phase_flip")

    @property
    def n_flips(self) -> int:
        return len(self.flip_times)

    def rf_sign_at(self, t: float) -> int:
        """Sign of Omega_r just after time t."""
        return -1 if sum(1 for f in self.flip_times if f <= t) % 2 else 1

    def describe(self) -> str:
        if not self.events:
            return "none"
        return "; ".join(
            f"{e.kind}@{e.time:.9g}s" + (f"({e.axis})" if e.kind == "pi_pulse" else "")
            for e in self.events
        )


class IntegratorConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_step: Optional[float] = Field(default=None, gt=0.0, description="Seconds; derived from f_max when omitted")
    method: IntegrationMethod = Field(default_factory=lambda: settings.SIMULATION.INTEGRATOR)
    tolerance: float = Field(default_factory=lambda: settings.SIMULATION.TOLERANCE, gt=0.0)
    output_samples: int = Field(default_factory=lambda: settings.SIMULATION.OUTPUT_SAMPLES, ge=2)
    step_factor: float = Field(default_factory=lambda: settings.SIMULATION.STEP_FACTOR, ge=50.0)


class GatePlan(BaseModel):
    """A gate experiment: parameters, loop count, echo count, enabled terms and initial state."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    params: PhysicalParams
    n_phase_flips: int = Field(default=1, ge=0)
    enabled_terms: FrozenSet[str] = frozenset({"gate"})
    initial_spins: str = "dd"
    initial_phonons: int = Field(default=0, ge=0)
    phonon_cutoff: Optional[int] = Field(default=None, ge=2)
    eta_laser: Optional[float] = Field(default=None, gt=0.0, description="Set for the laser realization")
    pi_pulse_axis: Optional[Axis] = Field(default=None, description="Add a mid-gate pi pulse about this axis")

    @field_validator("enabled_terms", mode="before")
    @classmethod
    def _split_terms(cls, v):
        if isinstance(v, str):
            return frozenset(t.strip() for t in v.split(",") if t.strip())
        return frozenset(v)

    @model_validator(mode="after")
    def _known_terms(self) -> "GatePlan":
        allowed = LASER_LABELS if self.is_laser else MICROWAVE_LABELS
        unknown = sorted(set(self.enabled_terms) - set(allowed))
        if unknown:
            raise ValueError(f"unknown term labels {unknown}; allowed {list(allowed)}")
        if self.params.epsilon <= 0:
            raise ValueError("the drive must sit below the secular frequency (epsilon = nu - Omega > 0)")
        if len(self.initial_spins) != 2 or set(self.initial_spins) - {"u", "d"}:
            raise ValueError("initial_spins must be two of 'u'/'d'")
        return self

    @model_validator(mode="after")
    def _closes_the_loop(self) -> "GatePlan":
        """eps = eta nu sqrt(K) for the microwave gate, eps = eta_L Omega sqrt(K) for the laser gate."""
        p = self.params
        if self.is_laser:
            required, rule = self.eta_laser * p.omega_drive * math.sqrt(p.K), "eta_L Omega sqrt(K)"
        else:
            required, rule = p.eta * p.nu * math.sqrt(p.K), "eta nu sqrt(K)"
        if not math.isclose(p.epsilon, required, rel_tol=CLOSURE_RTOL):
            raise ValueError(
                f"epsilon = {p.epsilon:.9g} rad/s does not close K = {p.K} loops; {rule} = {required:.9g} rad/s. "
                "Set plan.K to move the drive onto the closure condition"
            )
        return self

    @property
    def is_laser(self) -> bool:
        return self.eta_laser is not None

    @property
    def K(self) -> int:
        return self.params.K

    @computed_field
    @property
    def epsilon(self) -> float:
        return self.params.epsilon

    @computed_field
    @property
    def gate_time(self) -> float:
        """2 pi K / epsilon, i.e. 2 pi sqrt(K)/(eta nu) on the microwave closure condition."""
        return 2.0 * math.pi * self.params.K / self.params.epsilon

    def cutoff(self) -> int:
        if self.phonon_cutoff is not None:
            return self.phonon_cutoff
        if "electric" in self.enabled_terms and self.params.omega_E > 0:
            return settings.SIMULATION.ELECTRIC_PHONON_CUTOFF
        return settings.SIMULATION.PHONON_CUTOFF
