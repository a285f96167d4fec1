"""
Exact propagator of the gate term.

With x = (b + b^dag)/sqrt2 and p = i(b^dag - b)/sqrt2 the gate Hamiltonian is
H(t) = sqrt2 L (x cos(eps t) + p sin(eps t)) where L = (nu eta/4) S + Omega_E/2,
S = sum_j sigma_z^j (double-dressed) and the Omega_E part is present only when the
electric drive is on. Commutators of H at different times are proportional to L^2,
which commutes with H, so the Magnus series stops at second order and

    U(t) = exp(-i A) exp(-i F x) exp(-i G p)
    F = sqrt2 L sin(eps t)/eps,  G = sqrt2 L (1 - cos(eps t))/eps,
    A = -(L^2/eps) (t - sin(2 eps t)/(2 eps)).
"""

from __future__ import annotations

import math
from typing import List, Tuple

import numpy as np
from scipy.linalg import expm

from core.exceptions import InvariantViolation, SingularityError
from models.hilbert import Operator, SpaceShape
from models.operators import double_dressed_pauli, lowering_matrix, with_phonon_identity

THIRD_ORDER_RTOL = 1e-12


def _spin_sum(shape: SpaceShape) -> np.ndarray:
    """Collective double-dressed sigma_z on the spin factor alone."""
    total = np.zeros((shape.spin_dim, shape.spin_dim), dtype=complex)
    unit = shape.with_cutoff(2)
    for j in range(shape.n_ions):
        # spin block of sigma_z^j (x) 1 at the smallest cutoff
        total += double_dressed_pauli("z", j, unit).matrix[::2, ::2]
    return total


def _coupling(p, shape: SpaceShape, electric_on: bool) -> np.ndarray:
    """L = (nu eta/4) S + Omega_E/2 on the spin factor."""
    coupling = (p.nu * p.eta / 4.0) * _spin_sum(shape)
    if electric_on:
        coupling = coupling + (p.omega_E / 2.0) * np.eye(shape.spin_dim)
    return coupling


def _require_detuned(p) -> float:
    if p.epsilon == 0:
        raise SingularityError("resonant drive (epsilon = 0): the phase-space loop never closes")
    return p.epsilon


def _quadratures(cutoff: int) -> Tuple[np.ndarray, np.ndarray]:
    b = lowering_matrix(cutoff)
    b_dag = b.conj().T
    return (b + b_dag) / math.sqrt(2.0), 1j * (b_dag - b) / math.sqrt(2.0)


def loop_functions(p, t: float) -> Tuple[float, float, float]:
    """Scalar F, G, A per unit coupling: F = sqrt2 sin/eps, G = sqrt2 (1-cos)/eps, A = -(t - sin2/2eps)/eps."""
    eps = _require_detuned(p)
    f = math.sqrt(2.0) * math.sin(eps * t) / eps
    g = math.sqrt(2.0) * (1.0 - math.cos(eps * t)) / eps
    a = -(t - math.sin(2.0 * eps * t) / (2.0 * eps)) / eps
    return f, g, a


def analytic_propagator(p, shape: SpaceShape, t: float, electric_on: bool = False) -> Operator:
    """U(t) of the gate term (plus the electric drive when ``electric_on``) from t = 0."""
    f, g, a = loop_functions(p, t)
    x, q = _quadratures(shape.phonon_cutoff)
    values, vectors = np.linalg.eigh(_coupling(p, shape, electric_on))

    unitary = np.zeros((shape.total_dim, shape.total_dim), dtype=complex)
    for value, vector in zip(values, vectors.T):
        projector = np.outer(vector, vector.conj())
        phonon = np.exp(-1j * a * value ** 2) * expm(-1j * f * value * x) @ expm(-1j * g * value * q)
        unitary += np.kron(projector, phonon)
    return Operator(shape, unitary).require_unitary("analytic propagator")


def displacement_amplitude(p, sigma_sum: float, t: float, electric_on: bool = False) -> float:
    """|alpha(t)| of the motion in the spin sector where sum_j sigma_z^j = sigma_sum."""
    f, g, _ = loop_functions(p, t)
    coupling = p.nu * p.eta / 4.0 * sigma_sum + (p.omega_E / 2.0 if electric_on else 0.0)
    return abs(coupling) * math.hypot(f, g) / math.sqrt(2.0)


def gate_hamiltonian(p, shape: SpaceShape, t: float, electric_on: bool = False) -> Operator:
    """H(t) = L (b^dag e^{i eps t} + h.c.) on the joint space."""
    b = lowering_matrix(shape.phonon_cutoff)
    phonon = b.conj().T * np.exp(1j * p.epsilon * t)
    return Operator(shape, np.kron(_coupling(p, shape, electric_on), phonon + phonon.conj().T))


def magnus_terms(p, shape: SpaceShape, t: float, electric_on: bool = False) -> Tuple[Operator, Operator]:
    """First and second Magnus terms of the gate term, in closed form.

    first = -i (F x + G p), second = i (L^2/eps) (t - sin(eps t)/eps) (x) 1.
    Raises InvariantViolation if the third-order commutator does not vanish.
    """
    eps = _require_detuned(p)
    f, g, _ = loop_functions(p, t)
    x, q = _quadratures(shape.phonon_cutoff)
    coupling = _coupling(p, shape, electric_on)
    first = -1j * (np.kron(f * coupling, x) + np.kron(g * coupling, q))
    second = 1j * (t - math.sin(eps * t) / eps) / eps * with_phonon_identity(coupling @ coupling, shape)

    first_op, second_op = Operator(shape, first), Operator(shape, second)
    residual = third_order_residual(p, shape, second_op, t, electric_on)
    scale = gate_hamiltonian(p, shape, 0.0, electric_on).norm() * second_op.norm()
    if residual > THIRD_ORDER_RTOL * max(scale, 1e-300):
        raise InvariantViolation(f"third-order Magnus commutator does not vanish ({residual:.3g})")
    return first_op, second_op


def third_order_residual(
    p,
    shape: SpaceShape,
    second: Operator,
    t: float,
    electric_on: bool = False,
    samples: int = 5,
) -> float:
    """max ||[H(t_k), second]|| over sample times in [0, t]."""
    times: List[float] = list(np.linspace(0.0, t, samples))
    return max(gate_hamiltonian(p, shape, tk, electric_on).commutator(second).norm() for tk in times)
