"""
Closed-form corrections: second-order shifts, trap geometry and a numerical
second-order effective Hamiltonian used to cross-check them.
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Dict, List

import numpy as np

from core.exceptions import ArgumentError, DressingFieldError
from models.hilbert import Operator
from schemas.params import PhysicalParams
from schemas.results import StarkBudget
from services.frames import FREQUENCY_RTOL, cluster_values
from services.harmonics import HamiltonianModel

# electric field of the RF coil at the ions (V/m), an input of the electric-coupling estimate
COIL_ELECTRIC_FIELD = 2.04e-5


def stark_budget(p: PhysicalParams, detuning: float | None = None) -> StarkBudget:
    """Second-order shifts of the double-dressed qubits.

    ``detuning`` is the Delta of the crosstalk part; it defaults to delta_omega0.
    """
    if p.omega_r == 0:
        raise DressingFieldError("the second dressing field Omega_r vanishes; the shifts diverge")
    if p.omega_drive == 0:
        raise ArgumentError("omega_drive must be nonzero for the fast-RF shift")
    delta = p.delta_omega0 if detuning is None else detuning
    if delta <= 0:
        raise ArgumentError("the crosstalk detuning must be positive")

    g_squared = (p.nu * p.eta / 4.0) ** 2
    crosstalk = -p.omega_r * 3.0 * (p.omega_drive / (4.0 * delta)) ** 2
    fast_rf = -p.omega_r * 0.5 * (p.omega_r / (4.0 * p.omega_drive)) ** 2
    return StarkBudget(
        single_ion_shift=crosstalk + fast_rf,
        phonon_coupled_shift=2.0 * g_squared / p.omega_r,
        xy_coupling=2.0 * g_squared * (p.epsilon / p.omega_r ** 2 - 1.0 / (p.nu + p.omega_drive)),
        zz_coupling=-2.0 * g_squared / (p.nu + p.omega_drive),
        crosstalk_shift=crosstalk,
        fast_rf_shift=fast_rf,
        detuning=delta,
    )


def coupling_infidelity(coupling: float, gate_time: float) -> float:
    """Bell-state infidelity from an unwanted two-qubit coupling J acting for the whole gate."""
    return math.sin(2.0 * coupling * gate_time) ** 2


# --- Trap geometry ---

def ion_spacing(p: PhysicalParams) -> float:
    """Axial distance of two ions, (2 e^2 / (4 pi eps0 M nu^2))^(1/3), in metres."""
    if p.nu <= 0:
        raise ArgumentError("nu must be positive")
    coulomb = p.elementary_charge ** 2 / (4.0 * math.pi * p.vacuum_permittivity)
    return (2.0 * coulomb / (p.ion_mass * p.nu ** 2)) ** (1.0 / 3.0)


def addressing_splitting(p: PhysicalParams) -> float:
    """g mu_B dB/dz dZ / hbar (rad/s). A consistency check; runs use delta_omega0 as given."""
    return p.g_factor * p.bohr_magneton * p.b_gradient * ion_spacing(p) / p.hbar


def lamb_dicke_parameter(p: PhysicalParams, mode_coefficient: float = 1.0 / math.sqrt(2.0)) -> float:
    """g mu_B dB/dz Z / sqrt(2 hbar M nu^3) for a mode with participation Z."""
    return (
        p.g_factor * p.bohr_magneton * p.b_gradient * mode_coefficient
        / math.sqrt(2.0 * p.hbar * p.ion_mass * p.nu ** 3)
    )


def electric_coupling(p: PhysicalParams, field: float = COIL_ELECTRIC_FIELD) -> float:
    """e E z0 / hbar with z0 = sqrt(hbar / 2 M nu) the ground-state extent."""
    ground_extent = math.sqrt(p.hbar / (2.0 * p.ion_mass * p.nu))
    return p.elementary_charge * field * ground_extent / p.hbar


# --- Effective Hamiltonian ---

def effective_hamiltonian(model: HamiltonianModel, sign: int = 1) -> Operator:
    """Time-averaged second-order Hamiltonian sum_f [h_f^dag, h_f] / f.

    Harmonics are grouped by their instantaneous frequency omega + m s Omega_r
    (s fixed); static harmonics are skipped.
    """
    groups: Dict[float, List[np.ndarray]] = defaultdict(list)
    frequencies = []
    items = []
    for _, h in model.harmonics():
        f = h.omega + h.rf_order * sign * model.omega_r
        op = h.op * (sign if h.sign_power else 1)
        frequencies.append(f)
        items.append((f, op))
    if not items:
        return Operator.zero(model.shape)

    scale = max(max(abs(f) for f in frequencies), 1.0)
    tol = FREQUENCY_RTOL * scale
    for center in cluster_values(np.array(frequencies), tol):
        for f, op in items:
            if abs(f - center) <= tol:
                groups[center].append(op)

    total = np.zeros((model.shape.total_dim,) * 2, dtype=complex)
    for f, ops in groups.items():
        if abs(f) <= tol:
            continue
        h = sum(ops)
        total += -(h.conj().T @ h - h @ h.conj().T) / f
    return Operator(model.shape, 0.5 * total)


def shift_coefficient(op: Operator, direction: Operator) -> float:
    """Coefficient c of the best fit op ~ c * direction (Hilbert-Schmidt projection)."""
    norm = np.vdot(direction.matrix, direction.matrix).real
    if norm == 0:
        raise ArgumentError("cannot project onto a zero operator")
    return float(np.vdot(direction.matrix, op.matrix).real / norm)
