"""
Gate closure conditions, echo schedules and frame close-out.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

from core.exceptions import ArgumentError, NoSolutionError
from schemas.params import PhysicalParams
from schemas.plan import Axis, GatePlan, PulseEvent, PulseSchedule
from utils.logging import get_logger

logger = get_logger(__name__)

# relative tolerance for "already a multiple of 2 pi"
PHASE_RTOL = 1e-12


class GateConditions(NamedTuple):
    epsilon: float
    gate_time: float
    omega_drive: float


class Closeout(NamedTuple):
    extra_time: float
    n_cycles: int


# --- Closure conditions ---

def gate_conditions(eta: float, nu: float, K: int) -> GateConditions:
    """eps = eta nu sqrt(K), tau = 2 pi sqrt(K)/(eta nu), Omega = nu - eps."""
    if K < 1:
        raise ArgumentError(f"K must be at least 1, got {K}")
    if eta <= 0 or nu <= 0:
        raise ArgumentError("eta and nu must be positive")
    epsilon = eta * nu * math.sqrt(K)
    return GateConditions(epsilon, 2.0 * math.pi * math.sqrt(K) / (eta * nu), nu - epsilon)


def laser_gate_conditions(eta_laser: float, nu: float, K: int) -> GateConditions:
    """Solve eps = eta_L Omega sqrt(K) together with Omega = nu - eps."""
    if K < 1:
        raise ArgumentError(f"K must be at least 1, got {K}")
    if eta_laser <= 0 or nu <= 0:
        raise ArgumentError("eta_laser and nu must be positive")
    x = eta_laser * math.sqrt(K)
    epsilon = x * nu / (1.0 + x)
    return GateConditions(epsilon, 2.0 * math.pi * K / epsilon, nu - epsilon)


def closed_loop_params(p: PhysicalParams, K: int, eta_laser: Optional[float] = None) -> PhysicalParams:
    """Copy of ``p`` with K loops and the drive placed on the matching closure condition."""
    if eta_laser is None:
        conditions = gate_conditions(p.eta, p.nu, K)
    else:
        conditions = laser_gate_conditions(eta_laser, p.nu, K)
    return p.updated(K=K, omega_drive=conditions.omega_drive)


# --- Schedules ---

def build_schedule(
    n_flips: int,
    gate_time: float,
    K: int = 1,
    pi_pulse_axis: Optional[Axis] = None,
) -> PulseSchedule:
    """Uniformly spaced phase flips at i tau/(n+1), or a single mid-gate pi pulse.

    An odd flip count leaves Omega_r with equal time in both signs; an even count
    does not and is only warned about. The pi pulse sits at tau/2 and needs an even
    K so that the motion is back at the origin there.
    """
    if n_flips < 0:
        raise ArgumentError("n_flips must be nonnegative")
    if gate_time <= 0:
        raise ArgumentError("gate_time must be positive")

    if pi_pulse_axis is not None:
        if n_flips:
            raise ArgumentError("a mid-gate pi pulse replaces the phase flips; set n_flips to 0")
        if K % 2:
            raise ArgumentError(f"a pi pulse at gate_time/2 needs an even number of loops, K = {K}")
        event = PulseEvent(time=gate_time / 2.0, kind="pi_pulse", axis=pi_pulse_axis)
        return PulseSchedule(events=(event,), gate_time=gate_time)

    if n_flips and n_flips % 2 == 0:
        logger.warning("Even number of phase flips; first-order shifts are not fully refocused", n_flips=n_flips)
    events = tuple(
        PulseEvent(time=i * gate_time / (n_flips + 1), kind="rf_phase_flip") for i in range(1, n_flips + 1)
    )
    return PulseSchedule(events=events, gate_time=gate_time)


def schedule_for(plan: GatePlan) -> PulseSchedule:
    return build_schedule(plan.n_phase_flips, plan.gate_time, plan.K, plan.pi_pulse_axis)


def check_plan(plan: GatePlan, schedule: PulseSchedule) -> None:
    """A pi pulse at gate_time/2 needs an even K; events must fit inside the gate."""
    for event in schedule.events:
        if event.time >= plan.gate_time:
            raise ArgumentError(f"event at {event.time:.6g} s is not inside the gate ({plan.gate_time:.6g} s)")
        if event.kind == "pi_pulse" and math.isclose(event.time, plan.gate_time / 2.0) and plan.K % 2:
            raise ArgumentError(f"a pi pulse at gate_time/2 needs an even number of loops, K = {plan.K}")


# --- Frame close-out ---

def closeout_phase(p: PhysicalParams, gate_time: float, omega_new: float) -> Closeout:
    """Shortest extra drive time that brings the dressed-frame phase back to a multiple of 2 pi.

    The dressed frame accumulates (Omega/2) tau during the gate. A second drive of
    Rabi frequency omega_new, far detuned from the motional sidebands, adds
    (omega_new/2) t_add, and the smallest t_add >= 0 with
    (Omega/2) tau + (omega_new/2) t_add = 2 pi n is returned with n.
    """
    if gate_time < 0:
        raise ArgumentError("gate_time must be nonnegative")
    phase = 0.5 * p.omega_drive * gate_time
    turns = phase / (2.0 * math.pi)
    nearest = round(turns)
    if abs(turns - nearest) <= PHASE_RTOL * max(turns, 1.0):
        return Closeout(0.0, int(nearest))
    if omega_new == 0:
        raise NoSolutionError(f"residual phase {phase % (2.0 * math.pi):.6g} rad cannot be closed with omega_new = 0")
    if omega_new < 0:
        raise ArgumentError("omega_new must be positive")

    coupling = p.eta * p.nu
    if abs(p.nu - omega_new) < 4.0 * coupling:
        logger.warning(
            "Close-out drive is close to the motional sideband",
            detuning=abs(p.nu - omega_new),
            sideband_coupling=coupling,
        )
    n = math.ceil(turns)
    return Closeout((2.0 * math.pi * n - phase) / (0.5 * omega_new), n)
