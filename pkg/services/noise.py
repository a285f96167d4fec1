"""
Closed-form dephasing budget.

Ambient magnetic noise reaches the dressed qubit only at the drive frequency, where
its spectrum is assumed to fall as 1/f^2 from a reference value at 20 kHz. Slow
amplitude noise of the two dressing fields enters at second order; the phase flips
refocus it, so it is reported but left out of the total.
"""

from __future__ import annotations

import math

from core.exceptions import ArgumentError, DressingFieldError
from schemas.params import PhysicalParams
from schemas.results import NoiseBudget

REFERENCE_FREQUENCY = 2.0 * math.pi * 20e3
# relative low-frequency amplitude noise of the dressing fields
RELATIVE_RABI_NOISE = 0.01


def magnetic_noise_residual(s_at_20khz: float, omega_drive: float) -> float:
    """S_BB(Omega) = S_BB(20 kHz) (20 kHz / Omega)^2, omega_drive in rad/s."""
    if omega_drive <= 0:
        raise ArgumentError("omega_drive must be positive")
    return s_at_20khz * (REFERENCE_FREQUENCY / omega_drive) ** 2


def noise_budget(
    p: PhysicalParams,
    gate_time: float,
    s_at_20khz: float = 1.0,
    relative_rabi_noise: float = RELATIVE_RABI_NOISE,
) -> NoiseBudget:
    if gate_time < 0:
        raise ArgumentError("gate_time must be nonnegative")
    if p.omega_r == 0:
        raise DressingFieldError("the second-order Rabi shift divides by Omega_r")
    s_rabi = relative_rabi_noise * p.omega_drive
    return NoiseBudget(
        s_bb_dressed=magnetic_noise_residual(s_at_20khz, p.omega_drive),
        s_rabi_second_order=s_rabi ** 2 / abs(p.omega_r),
        s_rabi_r=relative_rabi_noise * abs(p.omega_r),
        gate_time=gate_time,
    )
