"""
Physical parameters of the two-ion gradient gate.

All frequencies are angular (rad/s). Values quoted as "2pi x f" elsewhere are
converted once at the configuration boundary (see ``utils.units``).
"""

from __future__ import annotations

import math
from typing import List, Literal

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator
from scipy import constants

from config.settings import settings
from utils.logging import get_logger
from utils.units import khz, mhz

logger = get_logger(__name__)

AMU = constants.physical_constants["atomic mass constant"][0]
BOHR_MAGNETON = constants.physical_constants["Bohr magneton"][0]


class HierarchyLink(BaseModel):
    """One link of the chain eps/4 << Omega_r/4 << nu ~ Omega << 4 omega0."""

    name: str
    ratio: float
    status: Literal["pass", "warn", "matched by construction"]


class PhysicalParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    nu: float = Field(default=khz(500.0), gt=0.0, description="Secular frequency of the common mode (rad/s)")
    eta: float = Field(default=0.01, ge=0.0, description="Effective Lamb-Dicke parameter")
    omega_drive: float = Field(default=khz(495.0), ge=0.0, description="Resonant microwave Rabi frequency (rad/s)")
    omega_r: float = Field(default=khz(99.0), description="Second dressing field Rabi frequency (rad/s)")
    delta_omega0: float = Field(default=mhz(5.0), ge=0.0, description="Qubit splitting difference between the ions (rad/s)")
    omega_E: float = Field(default=0.0, ge=0.0, description="Electric coupling of the RF field to the motion (rad/s)")
    K: int = Field(default=1, ge=1, description="Phase-space loops per gate")
    omega0: float = Field(default_factory=lambda: settings.SIMULATION.NOMINAL_OMEGA0, gt=0.0,
                          description="Nominal qubit splitting, frame validation only (rad/s)")
    rf_source: Literal["rf", "detuned_microwave"] = Field(
        default="rf", description="Physical origin of omega_r; detuned microwave means omega_r = Omega_2/2"
    )
    rf_phase: float = Field(
        default=0.0, description="Phase of the second dressing field against the dressed-state precession (rad)"
    )

    ion_mass: float = Field(default=173.0 * AMU, gt=0.0, description="Ion mass (kg)")
    b_gradient: float = Field(default=65.0, description="Axial magnetic gradient (T/m)")
    g_factor: float = Field(default=1.0, description="Effective g-factor of the qubit transition")
    bohr_magneton: float = Field(default=BOHR_MAGNETON)
    elementary_charge: float = Field(default=constants.e)
    vacuum_permittivity: float = Field(default=constants.epsilon_0)
    hbar: float = Field(default=constants.hbar)

    @computed_field
    @property
    def epsilon(self) -> float:
        """Detuning of the drive from the secular frequency, nu - Omega."""
        return self.nu - self.omega_drive

    @property
    def omega_2(self) -> float:
        """Rabi frequency of the detuned microwave this omega_r stands for."""
        return 2.0 * self.omega_r

    @model_validator(mode="after")
    def _warn_on_hierarchy(self) -> "PhysicalParams":
        slack = settings.SIMULATION.HIERARCHY_SLACK
        failing = [link.name for link in self.hierarchy(slack) if link.status == "warn"]
        if failing:
            logger.warning("Frequency hierarchy not satisfied", links=failing, slack=slack)
        return self

    def hierarchy(self, slack: float | None = None) -> List[HierarchyLink]:
        """Evaluate each link of eps/4 << Omega_r/4 << nu ~ Omega << 4 omega0."""
        slack = settings.SIMULATION.HIERARCHY_SLACK if slack is None else slack
        eps, rf = abs(self.epsilon), abs(self.omega_r)

        def ratio(upper: float, lower: float) -> float:
            return math.inf if lower == 0 else upper / lower

        def status(value: float) -> str:
            return "pass" if value >= slack else "warn"

        links = [
            ("eps/4 << Omega_r/4", ratio(rf, eps)),
            ("Omega_r/4 << nu", ratio(self.nu, rf / 4)),
        ]
        out = [HierarchyLink(name=name, ratio=value, status=status(value)) for name, value in links]
        matched = ratio(self.nu, self.omega_drive)
        out.append(HierarchyLink(
            name="nu ~ Omega",
            ratio=matched,
            status="matched by construction" if 1.0 / slack <= matched <= slack else "warn",
        ))
        last = ratio(4 * self.omega0, self.omega_drive)
        out.append(HierarchyLink(name="Omega << 4 omega0", ratio=last, status=status(last)))
        return out

    def hierarchy_warnings(self, slack: float | None = None) -> List[str]:
        return [link.name for link in self.hierarchy(slack) if link.status == "warn"]

    def updated(self, **changes) -> "PhysicalParams":
        """Validated copy with some fields replaced."""
        data = self.model_dump(exclude={"epsilon"})
        data.update(changes)
        return PhysicalParams(**data)

    @classmethod
    def reference(cls, **overrides) -> "PhysicalParams":
        """Two Yb ions, 65 T/m, nu = 2pi 500 kHz, eta = 0.01, Omega_r = 2pi 99 kHz."""
        return cls(**overrides)
