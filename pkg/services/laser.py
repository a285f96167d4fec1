"""
Laser realization of the dressed-state gate.

In the laser's rotating frame the interaction is (Omega/2) sum_j (sigma_+^j D + h.c.)
with D = exp(i eta_L (b^dag + b)). Expanding D to second order gives a carrier, a
first sideband and a phonon-dephasing piece. The carrier together with nu b^dag b
is exactly the dressing generator, so only the sideband and dephasing pieces
survive the move to the double-dressed frame.

Sign note: with sigma_+ the raising operator, the first-order piece is
-eta_L (Omega/2) sigma_y (b^dag + b).
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Iterable, List

import numpy as np
from scipy.linalg import expm

from config.settings import settings
from core.exceptions import ArgumentError, TruncationError
from models.hilbert import SpaceShape
from models.operators import ladder, lowering_matrix, number_operator, sigma_plus, with_spin_identity
from schemas.params import PhysicalParams
from schemas.plan import LASER_LABELS
from services.frames import dressing_picture, interaction_picture, to_dressed_basis
from services.hamiltonians import dressing_generator, fast_rf_term, rf_generator
from services.harmonics import Frame, HamiltonianModel, Harmonic, Term


class ExpansionOrder(str, Enum):
    FULL_EXPONENTIAL = "full_exponential"
    LAMB_DICKE_2 = "lamb_dicke_2"


def check_lamb_dicke(eta_laser: float, cutoff: int, slack: float | None = None) -> None:
    """eta_L sqrt(N) must be small against 1 for the second-order expansion."""
    slack = settings.SIMULATION.HIERARCHY_SLACK if slack is None else slack
    if eta_laser * math.sqrt(cutoff) > 1.0 / slack:
        raise TruncationError(
            f"eta_L sqrt(N) = {eta_laser * math.sqrt(cutoff):.3g} exceeds 1/{slack:g}; "
            "the Lamb-Dicke expansion is not valid at this phonon_cutoff",
            key="plan.eta_laser",
        )


def _phonon_displacement(eta_laser: float, cutoff: int) -> np.ndarray:
    b = lowering_matrix(cutoff)
    return expm(1j * eta_laser * (b + b.conj().T))


def laser_hamiltonian(
    p: PhysicalParams,
    shape: SpaceShape,
    eta_laser: float,
    order: ExpansionOrder | str = ExpansionOrder.FULL_EXPONENTIAL,
) -> HamiltonianModel:
    """Laser interaction plus nu b^dag b in the laser's rotating frame (working basis).

    ``full_exponential`` gives terms ``motion`` and ``laser``; ``lamb_dicke_2``
    gives ``motion``, ``carrier``, ``sideband`` and ``dephasing``.
    """
    order = ExpansionOrder(order)
    if eta_laser < 0:
        raise ArgumentError("eta_laser must be nonnegative")
    b, b_dag = ladder(shape)
    position = (b + b_dag).matrix
    identity = np.eye(shape.total_dim, dtype=complex)

    raising = sum((sigma_plus(j, shape).matrix for j in range(shape.n_ions)), np.zeros_like(identity))
    half = p.omega_drive / 2.0

    def hermitian(factor: np.ndarray) -> np.ndarray:
        op = half * raising @ factor
        return op + op.conj().T

    terms = [Term.static("motion", p.nu * number_operator(shape))]
    if order is ExpansionOrder.FULL_EXPONENTIAL:
        displacement = with_spin_identity(_phonon_displacement(eta_laser, shape.phonon_cutoff), shape)
        terms.append(Term.static("laser", hermitian(displacement)))
    else:
        check_lamb_dicke(eta_laser, shape.phonon_cutoff)
        terms.extend([
            Term.static("carrier", hermitian(identity)),
            Term.static("sideband", hermitian(1j * eta_laser * position)),
            Term.static("dephasing", hermitian(-0.5 * eta_laser ** 2 * position @ position)),
        ])
    return to_dressed_basis(HamiltonianModel(shape, tuple(terms), Frame.BARE_ROTATING, p.omega_r))


def _to_double_dressed(model: HamiltonianModel, p: PhysicalParams) -> HamiltonianModel:
    dressed = interaction_picture(model, dressing_generator(p, model.shape), Frame.DRESSED, subtract=False)
    return dressing_picture(dressed, rf_generator(model.shape), p.omega_r, subtract=False)


def _is_gate_harmonic(h: Harmonic, epsilon: float) -> bool:
    return h.rf_order == 0 and abs(abs(h.omega) - epsilon) <= 1e-9 * max(epsilon, 1.0)


def laser_gate_model(
    p: PhysicalParams,
    shape: SpaceShape,
    eta_laser: float,
    include: Iterable[str],
) -> HamiltonianModel:
    """Double-dressed frame terms of the laser gate, built from the second-order expansion.

    Labels: ``gate`` (the resonant sigma_z sideband, coefficient eta_L Omega/4),
    ``sideband_residual`` (everything else from the first sideband), ``phonon_dephasing``
    (the second-order piece) and ``fast_rf``.
    """
    include = frozenset(include)
    unknown = sorted(include - set(LASER_LABELS))
    if unknown:
        raise ArgumentError(f"unknown laser term labels {unknown}; allowed {list(LASER_LABELS)}")

    expansion = laser_hamiltonian(p, shape, eta_laser, ExpansionOrder.LAMB_DICKE_2)
    sideband = _to_double_dressed(expansion.only(["sideband"]), p).term("sideband")
    gate = tuple(h for h in sideband.harmonics if _is_gate_harmonic(h, p.epsilon))
    residual = tuple(h for h in sideband.harmonics if not _is_gate_harmonic(h, p.epsilon))

    available = {
        "gate": lambda: Term("gate", gate),
        "sideband_residual": lambda: Term("sideband_residual", residual),
        "phonon_dephasing": lambda: _to_double_dressed(expansion.only(["dephasing"]), p)
        .term("dephasing").relabeled("phonon_dephasing"),
        "fast_rf": lambda: fast_rf_term(p, shape),
    }
    terms: List[Term] = [available[label]() for label in LASER_LABELS if label in include]
    return HamiltonianModel(shape, tuple(terms), Frame.DOUBLE_DRESSED, p.omega_r)


def laser_gate_coefficient(p: PhysicalParams, eta_laser: float) -> float:
    """eta_L Omega / 4, the laser counterpart of nu eta / 4."""
    return eta_laser * p.omega_drive / 4.0
