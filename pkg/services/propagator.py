"""
Numerical propagation of harmonic Hamiltonians.

The state is advanced step by step between breakpoints: every output-grid time and
every schedule event. Within one segment the sign of the second dressing field is
fixed, so its phase grows linearly there. Three steppers are available:

- ``magnus4``: fourth-order commutator-free Magnus step (two exponentials of
  Hamiltonians sampled at the Gauss-Legendre nodes). Unitary. Default.
- ``stepwise_exponential``: exponential of the midpoint Hamiltonian, second order. Unitary.
- ``rk4``: classical Runge-Kutta on the Schroedinger equation. Not unitary; the norm
  check guards it, and it needs small steps against ||H||.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.linalg import expm
from tqdm import tqdm

from config.settings import settings
from core.exceptions import ArgumentError, ConfigurationError, IntegrationError, NormDriftError
from models.hilbert import Operator, SpaceShape, StateVector
from models.operators import collective
from models.trajectory import Trajectory
from schemas.plan import IntegratorConfig, PulseEvent, PulseSchedule
from services.analysis import tabulate
from services.harmonics import HamiltonianModel, RFDrive
from utils.logging import get_logger

logger = get_logger(__name__)

# Gauss-Legendre nodes and commutator-free weights of the fourth-order Magnus step
_SQRT3 = math.sqrt(3.0)
MAGNUS_NODES = (0.5 - _SQRT3 / 6.0, 0.5 + _SQRT3 / 6.0)
MAGNUS_WEIGHTS = ((3.0 - 2.0 * _SQRT3) / 12.0, (3.0 + 2.0 * _SQRT3) / 12.0)

Stepper = Callable[[HamiltonianModel, np.ndarray, float, float, int, Callable[[float], float]], np.ndarray]


def _step_midpoint(model, psi, t, dt, sign, theta):
    mid = t + 0.5 * dt
    return expm(-1j * dt * model.matrix(mid, sign, theta(mid))) @ psi


def _step_magnus4(model, psi, t, dt, sign, theta):
    t1, t2 = t + MAGNUS_NODES[0] * dt, t + MAGNUS_NODES[1] * dt
    h1, h2 = model.matrix(t1, sign, theta(t1)), model.matrix(t2, sign, theta(t2))
    a1, a2 = MAGNUS_WEIGHTS
    psi = expm(-1j * dt * (a2 * h1 + a1 * h2)) @ psi
    return expm(-1j * dt * (a1 * h1 + a2 * h2)) @ psi


def _step_rk4(model, psi, t, dt, sign, theta):
    def rhs(time, vector):
        return -1j * (model.matrix(time, sign, theta(time)) @ vector)

    k1 = rhs(t, psi)
    k2 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k2)
    k4 = rhs(t + dt, psi + dt * k3)
    return psi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


STEPPERS: Dict[str, Stepper] = {
    "stepwise_exponential": _step_midpoint,
    "magnus4": _step_magnus4,
    "rk4": _step_rk4,
}


def pi_pulse(shape: SpaceShape, axis: str = "x") -> Operator:
    """exp(-i (pi/2) sum_j S_axis^j): a simultaneous pi rotation of every ion."""
    return Operator(shape, expm(-0.5j * math.pi * collective(axis, shape).matrix))


def resolve_step(model: HamiltonianModel, t_final: float, cfg: IntegratorConfig) -> float:
    """The step bound to use; an explicit max_step must resolve the fastest harmonic 50 times per period."""
    omega_max = model.max_frequency()
    f_max = omega_max / (2.0 * math.pi)
    if cfg.max_step is not None:
        limit = 1.0 / (settings.SIMULATION.MIN_STEP_FACTOR * f_max) if f_max > 0 else math.inf
        if cfg.max_step > limit:
            raise ConfigurationError(
                f"max_step {cfg.max_step:.3g} s exceeds 1/(50 f_max) = {limit:.3g} s "
                f"with f_max = {f_max:.6g} Hz",
                key="integrator.max_step",
            )
        return cfg.max_step
    rate = max(omega_max, model.norm_bound())
    if rate == 0.0:
        return t_final
    return 2.0 * math.pi / (cfg.step_factor * rate)


def _events_by_time(schedule: PulseSchedule, t_final: float) -> Dict[float, List[PulseEvent]]:
    events: Dict[float, List[PulseEvent]] = {}
    for event in schedule.events:
        if event.time > t_final:
            raise ArgumentError(f"event at {event.time:.6g} s lies after t_final = {t_final:.6g} s")
        events.setdefault(event.time, []).append(event)
    return events


def evolve(
    model: HamiltonianModel,
    psi0: StateVector,
    t_final: float,
    cfg: Optional[IntegratorConfig] = None,
    schedule: Optional[PulseSchedule] = None,
    progress: bool = False,
) -> Trajectory:
    """Propagate psi0 from 0 to t_final, applying the schedule's events on the way.

    Observables are recorded on a uniform grid of ``cfg.output_samples`` times; an
    event that falls on a grid time is applied before that time is recorded.
    """
    cfg = cfg or IntegratorConfig()
    schedule = schedule or PulseSchedule()
    if psi0.shape != model.shape:
        raise ArgumentError(f"state shape {psi0.shape} does not match model shape {model.shape}")
    if abs(psi0.norm() - 1.0) > 1e-10:
        raise ArgumentError(f"initial state is not normalized (norm {psi0.norm():.12g})")
    if t_final <= 0:
        raise ArgumentError("t_final must be positive")

    model.require_hermitian([0.0, t_final / 3.0])
    stepper = STEPPERS[cfg.method]
    max_step = resolve_step(model, t_final, cfg)
    events = _events_by_time(schedule, t_final)
    drive = RFDrive(model.omega_r, schedule.flip_times)
    pulses = {axis: pi_pulse(model.shape, axis).matrix for axis in {e.axis for e in schedule.events if e.kind == "pi_pulse"}}

    grid = np.linspace(0.0, t_final, cfg.output_samples)
    breakpoints = np.unique(np.concatenate([grid, np.array(sorted(events), dtype=float)]))
    on_grid = np.isin(breakpoints, grid)
    logger.debug(
        "Starting propagation",
        method=cfg.method,
        max_step=max_step,
        f_max_hz=model.max_frequency() / (2.0 * math.pi),
        segments=len(breakpoints) - 1,
        events=len(schedule.events),
    )

    psi = np.array(psi0.amplitudes)
    states: List[StateVector] = [psi0]
    segments = zip(breakpoints[:-1], breakpoints[1:], on_grid[1:])
    for start, end, record in tqdm(segments, total=len(breakpoints) - 1, disable=not progress, desc="evolve"):
        sign = drive.sign_at(start)
        theta_start = drive.phase_at(start)

        def theta(t: float, _start=start, _sign=sign, _theta=theta_start) -> float:
            return _theta + _sign * model.omega_r * (t - _start)

        n_steps = max(1, math.ceil((end - start) / max_step))
        dt = (end - start) / n_steps
        for k in range(n_steps):
            psi = stepper(model, psi, start + k * dt, dt, sign, theta)

        for event in events.get(float(end), []):
            if event.kind == "pi_pulse":
                psi = pulses[event.axis] @ psi

        if not np.all(np.isfinite(psi)):
            raise IntegrationError(f"state became non-finite at t = {end:.6g} s")
        if record:
            drift = abs(float(np.linalg.norm(psi)) - 1.0)
            if drift > cfg.tolerance:
                raise NormDriftError(
                    f"norm drifted by {drift:.3g} at t = {end:.6g} s (tolerance {cfg.tolerance:.3g})",
                    time=float(end),
                    drift=drift,
                )
            states.append(StateVector(model.shape, psi))

    return Trajectory(grid, states, tabulate(states))
