"""
Frame changes on harmonic models.

Every transformation is exact on the harmonic representation: a static generator
H0 = sum_k E_k P_k splits each harmonic into blocks P_k op P_l whose frequency is
shifted by E_k - E_l. The rotating wave approximation is a separate, explicit
filtering step so that what it discards can be inspected.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Dict, List, Tuple

import numpy as np

from core.exceptions import ArgumentError
from models.hilbert import Operator
from models.operators import bare_map, dressed_map
from services.harmonics import Frame, HamiltonianModel, Harmonic, Term

GENERATOR_LABEL = "generator"
PRUNE_RTOL = 1e-12
FREQUENCY_RTOL = 1e-9


def cluster_values(values: np.ndarray, tol: float) -> List[float]:
    """Representatives (means) of groups of sorted values closer than tol."""
    if values.size == 0:
        return []
    ordered = np.sort(values)
    groups = [[ordered[0]]]
    for value in ordered[1:]:
        if value - groups[-1][-1] > tol:
            groups.append([value])
        else:
            groups[-1].append(value)
    return [float(np.mean(group)) for group in groups]


def _spectrum(generator: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    """Eigenvalues snapped onto their clusters, eigenvectors and the clustering tolerance."""
    energies, vectors = np.linalg.eigh(generator)
    tol = FREQUENCY_RTOL * max(float(np.max(np.abs(energies))), 1.0)
    centers = np.array(cluster_values(energies, tol))
    snapped = centers[np.argmin(np.abs(energies[:, None] - centers[None, :]), axis=1)]
    return snapped, vectors, tol


def _split(op: np.ndarray, energies: np.ndarray, vectors: np.ndarray, tol: float) -> List[Tuple[float, np.ndarray]]:
    """Blocks of e^{i H0 t} op e^{-i H0 t}, one per distinct energy difference."""
    in_basis = vectors.conj().T @ op @ vectors
    scale = float(np.max(np.abs(in_basis))) if in_basis.size else 0.0
    if scale == 0.0:
        return []
    weight = np.abs(in_basis) > PRUNE_RTOL * scale
    differences = energies[:, None] - energies[None, :]
    blocks = []
    for shift in cluster_values(differences[weight], tol):
        mask = weight & (np.abs(differences - shift) <= tol)
        blocks.append((shift, vectors @ np.where(mask, in_basis, 0.0) @ vectors.conj().T))
    return blocks


def merge_harmonics(harmonics: List[Harmonic], tol: float) -> Tuple[Harmonic, ...]:
    """Sum harmonics sharing (omega, rf_order, sign_power); drop vanishing ones."""
    buckets: Dict[Tuple[int, int], List[Harmonic]] = defaultdict(list)
    for h in harmonics:
        buckets[(h.rf_order, h.sign_power)].append(h)

    scale = max((float(np.linalg.norm(h.op)) for h in harmonics), default=0.0)
    merged: List[Harmonic] = []
    for (order, power), group in sorted(buckets.items()):
        omegas = np.array([h.omega for h in group])
        for center in cluster_values(omegas, tol):
            members = [h for h in group if abs(h.omega - center) <= tol]
            op = sum(h.op for h in members)
            if np.linalg.norm(op) > PRUNE_RTOL * scale:
                merged.append(Harmonic(op, center, order, power))
    return tuple(merged)


def _conjugate_model(model: HamiltonianModel, generator: np.ndarray, shift) -> List[Term]:
    energies, vectors, tol = _spectrum(generator)
    scale = max(model.max_frequency(), float(np.max(np.abs(energies))), 1.0)
    terms = []
    for term in model.terms:
        pieces: List[Harmonic] = []
        for h in term.harmonics:
            for difference, block in _split(h.op, energies, vectors, tol):
                pieces.append(shift(h, block, difference))
        terms.append(Term(term.label, merge_harmonics(pieces, FREQUENCY_RTOL * scale)))
    return terms


def to_dressed_basis(model: HamiltonianModel) -> HamiltonianModel:
    """Express a bare-basis model in the dressed working basis (no time dependence added)."""
    terms = [
        Term(term.label, tuple(
            Harmonic(dressed_map(Operator(model.shape, h.op)).matrix, h.omega, h.rf_order, h.sign_power)
            for h in term.harmonics
        ))
        for term in model.terms
    ]
    return HamiltonianModel(model.shape, tuple(terms), model.frame, model.omega_r)


def to_bare_basis(model: HamiltonianModel) -> HamiltonianModel:
    terms = [
        Term(term.label, tuple(
            Harmonic(bare_map(Operator(model.shape, h.op)).matrix, h.omega, h.rf_order, h.sign_power)
            for h in term.harmonics
        ))
        for term in model.terms
    ]
    return HamiltonianModel(model.shape, tuple(terms), model.frame, model.omega_r)


def interaction_picture(
    model: HamiltonianModel,
    generator: Operator,
    frame: Frame,
    subtract: bool = True,
) -> HamiltonianModel:
    """Move to the interaction picture of a static Hermitian generator.

    Returns U^dagger H U - H0 with U = exp(-i H0 t). When ``subtract`` is set the
    -H0 part is carried as its own term labeled ``generator``; leave it off when
    transforming a piece that does not contain H0.
    """
    generator.require_hermitian("interaction-picture generator")

    def shift(h: Harmonic, block: np.ndarray, difference: float) -> Harmonic:
        return Harmonic(block, h.omega + difference, h.rf_order, h.sign_power)

    terms = _conjugate_model(model, generator.matrix, shift)
    if subtract:
        terms.append(Term.static(GENERATOR_LABEL, -generator))
    return HamiltonianModel(model.shape, tuple(terms), frame, model.omega_r)


def dressing_picture(
    model: HamiltonianModel,
    generator: Operator,
    omega_r: float,
    subtract: bool = True,
) -> HamiltonianModel:
    """Interaction picture of the sign-following second dressing field s(t) Omega_r G.

    U = exp(-i theta(t) G). G must have eigenvalue differences that are integers,
    which then become the harmonics' rf_order.
    """
    generator.require_hermitian("dressing generator")

    def shift(h: Harmonic, block: np.ndarray, difference: float) -> Harmonic:
        order = round(difference)
        if abs(order - difference) > 1e-9:
            raise ArgumentError(f"dressing generator has a non-integer level spacing {difference:.6g}")
        return Harmonic(block, h.omega, h.rf_order + order, h.sign_power)

    terms = _conjugate_model(model, generator.matrix, shift)
    if subtract:
        terms.append(Term.static(GENERATOR_LABEL, -omega_r * generator, sign_power=1))
    return HamiltonianModel(model.shape, tuple(terms), Frame.DOUBLE_DRESSED, omega_r)


def collapse(model: HamiltonianModel, label: str = "total") -> HamiltonianModel:
    """All terms merged into one, so that cancelling harmonics disappear."""
    harmonics = [h for _, h in model.harmonics()]
    scale = max(model.max_frequency(), 1.0)
    term = Term(label, merge_harmonics(harmonics, FREQUENCY_RTOL * scale))
    return HamiltonianModel(model.shape, (term,), model.frame, model.omega_r)


def rotating_wave(model: HamiltonianModel, threshold: float) -> Tuple[HamiltonianModel, List[Tuple[str, Harmonic]]]:
    """Drop every harmonic faster than ``threshold`` (rad/s).

    Returns the kept model and the dropped (label, harmonic) pairs.
    """
    if threshold <= 0:
        raise ArgumentError("rotating-wave threshold must be positive")
    kept_terms, dropped = [], []
    for term in model.terms:
        kept = []
        for h in term.harmonics:
            if h.frequency(model.omega_r) > threshold:
                dropped.append((term.label, h))
            else:
                kept.append(h)
        if kept:
            kept_terms.append(Term(term.label, tuple(kept)))
    return HamiltonianModel(model.shape, tuple(kept_terms), model.frame, model.omega_r), dropped
