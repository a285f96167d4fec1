"""
Hamiltonian builders for the microwave gradient gate.

Operators are expressed in the dressed working basis (see ``models.operators``).
``dressed_frame_hamiltonian`` is the production model: the frame reached after
the qubit rotating frame, the dressed interaction picture and the frame of the
second dressing field. ``lab_hamiltonian`` exists to validate that chain.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Tuple

import numpy as np

from core.exceptions import ArgumentError
from models.hilbert import Operator, SpaceShape
from models.operators import (
    collective,
    double_dressed_pauli,
    double_dressed_sigma_plus,
    dressed_map,
    ladder,
    number_operator,
    pauli,
    sigma_plus,
)
from schemas.params import PhysicalParams
from schemas.plan import MICROWAVE_LABELS
from services.frames import collapse, dressing_picture, interaction_picture, rotating_wave, to_dressed_basis
from services.harmonics import Frame, HamiltonianModel, Harmonic, Term
from utils.logging import get_logger

logger = get_logger(__name__)


def qubit_frequencies(p: PhysicalParams, n_ions: int) -> np.ndarray:
    """omega0^j, spread symmetrically so that neighbours differ by delta_omega0."""
    offsets = ((n_ions - 1) / 2.0 - np.arange(n_ions)) * p.delta_omega0
    return p.omega0 + offsets


def gate_coupling(p: PhysicalParams) -> float:
    """nu eta / 4."""
    return p.nu * p.eta / 4.0


# --- Frame generators (all in the working basis) ---

def rotating_frame_generator(p: PhysicalParams, shape: SpaceShape) -> Operator:
    """sum_j omega0^j sigma_z^j / 2 with bare sigma_z."""
    total = Operator.zero(shape)
    for j, omega0 in enumerate(qubit_frequencies(p, shape.n_ions)):
        total = total + (omega0 / 2.0) * dressed_map(pauli("z", j, shape))
    return total


def dressing_generator(p: PhysicalParams, shape: SpaceShape) -> Operator:
    """(Omega/2) sum_j S_z^j + nu b^dag b."""
    return (p.omega_drive / 2.0) * collective("z", shape) + p.nu * number_operator(shape)


def rf_generator(shape: SpaceShape) -> Operator:
    """G = -1/2 sum_j S_x^j, i.e. half the collective double-dressed sigma_z."""
    return -0.5 * collective("x", shape)


def _collective_double_dressed_z(shape: SpaceShape) -> Operator:
    total = Operator.zero(shape)
    for j in range(shape.n_ions):
        total = total + double_dressed_pauli("z", j, shape)
    return total


# --- Double-dressed frame terms ---

def gate_term(p: PhysicalParams, shape: SpaceShape) -> Term:
    """(nu eta/4) sum_j sigma_z^j (b^dag e^{i eps t} + h.c.)."""
    _, b_dag = ladder(shape)
    op = gate_coupling(p) * (_collective_double_dressed_z(shape) @ b_dag)
    return Term.with_conjugates("gate", [Harmonic(op.matrix, p.epsilon)])


def zz_residual_term(p: PhysicalParams, shape: SpaceShape) -> Term:
    """Counter-rotating sigma_z sideband at nu + Omega."""
    _, b_dag = ladder(shape)
    op = gate_coupling(p) * (_collective_double_dressed_z(shape) @ b_dag)
    return Term.with_conjugates("zz_residual", [Harmonic(op.matrix, p.nu + p.omega_drive)])


def xy_residual_term(p: PhysicalParams, shape: SpaceShape) -> Term:
    """Spin-flip sidebands: g (b^dag e^{i nu t} + h.c.) [sum_j Q_j e^{i Omega t} + h.c.],
    Q_j = -sigma_+^j e^{i theta} + sigma_-^j e^{-i theta}."""
    _, b_dag = ladder(shape)
    g = gate_coupling(p)
    raising = Operator.zero(shape)
    for j in range(shape.n_ions):
        raising = raising + double_dressed_sigma_plus(j, shape)
    lowering = raising.dag()
    fast, slow = p.nu + p.omega_drive, p.epsilon
    harmonics = [
        Harmonic((-g * (b_dag @ raising)).matrix, fast, 1),
        Harmonic((g * (b_dag @ lowering)).matrix, fast, -1),
        Harmonic((g * (b_dag @ raising)).matrix, slow, 1),
        Harmonic((-g * (b_dag @ lowering)).matrix, slow, -1),
    ]
    return Term.with_conjugates("xy_residual", harmonics)


def fast_rf_term(p: PhysicalParams, shape: SpaceShape) -> Term:
    """-s (Omega_r/2) sum_j (S_+^j e^{i(2 Omega t + 2 phi)} + h.c.), carried into the frame of the second drive.

    phi is ``rf_phase``. The static RF axis is kept at S_x, so the phase shows up on this
    counter-rotating component at twice its value; the other microwave terms are kept
    at phi = 0.
    """
    raising = Operator.zero(shape)
    for j in range(shape.n_ions):
        raising = raising + sigma_plus(j, shape)
    raising = complex(np.exp(2j * p.rf_phase)) * raising
    dressed = HamiltonianModel(
        shape,
        (Term.with_conjugates("fast_rf", [Harmonic((-p.omega_r / 2.0 * raising).matrix, 2.0 * p.omega_drive, 0, 1)]),),
        Frame.DRESSED,
        p.omega_r,
    )
    return dressing_picture(dressed, rf_generator(shape), p.omega_r, subtract=False).term("fast_rf")


def crosstalk_term(p: PhysicalParams, shape: SpaceShape) -> Term:
    """Off-resonant driving of each ion by the other ions' fields.

    Written in the qubit rotating frame as (Omega/2) sigma_+^j e^{i(omega0^j - omega0^k) t} + h.c.
    and carried numerically through the two remaining frame changes.
    """
    offsets = qubit_frequencies(p, shape.n_ions) - p.omega0
    harmonics = []
    for j in range(shape.n_ions):
        raising = dressed_map(sigma_plus(j, shape))
        for k in range(shape.n_ions):
            if k != j:
                harmonics.append(Harmonic((p.omega_drive / 2.0 * raising).matrix, offsets[j] - offsets[k]))
    rotating = HamiltonianModel(
        shape, (Term.with_conjugates("crosstalk", harmonics),), Frame.BARE_ROTATING, p.omega_r
    )
    dressed = interaction_picture(rotating, dressing_generator(p, shape), Frame.DRESSED, subtract=False)
    return dressing_picture(dressed, rf_generator(shape), p.omega_r, subtract=False).term("crosstalk")


def electric_drive(p: PhysicalParams, shape: SpaceShape, rwa: bool = True) -> Term:
    """Motion driven by the electric field of the RF source, s (Omega_E/2)(b^dag e^{i eps t} + h.c.).

    The field flips with the RF phase. Without the rotating wave approximation the
    counter-rotating (Omega_E/2)(b^dag e^{i(nu+Omega)t} + h.c.) is kept as well.
    """
    if p.omega_E < 0:
        raise ArgumentError("omega_E must be nonnegative")
    _, b_dag = ladder(shape)
    op = (p.omega_E / 2.0 * b_dag).matrix
    harmonics = [Harmonic(op, p.epsilon, 0, 1)]
    if not rwa:
        harmonics.append(Harmonic(op, p.nu + p.omega_drive, 0, 1))
    return Term.with_conjugates("electric", harmonics)


_BUILDERS = {
    "gate": gate_term,
    "crosstalk": crosstalk_term,
    "fast_rf": fast_rf_term,
    "xy_residual": xy_residual_term,
    "zz_residual": zz_residual_term,
}


def dressed_frame_hamiltonian(
    p: PhysicalParams,
    shape: SpaceShape,
    include: Iterable[str],
    electric_rwa: bool = True,
) -> HamiltonianModel:
    """The double-dressed frame Hamiltonian restricted to the labels in ``include``."""
    include = frozenset(include)
    unknown = sorted(include - set(MICROWAVE_LABELS))
    if unknown:
        raise ArgumentError(f"unknown term labels {unknown}; allowed {list(MICROWAVE_LABELS)}")

    terms: List[Term] = []
    for label in MICROWAVE_LABELS:
        if label not in include:
            continue
        if label == "electric":
            terms.append(electric_drive(p, shape, rwa=electric_rwa))
        else:
            terms.append(_BUILDERS[label](p, shape))
    model = HamiltonianModel(shape, tuple(terms), Frame.DOUBLE_DRESSED, p.omega_r)
    logger.debug("Built double-dressed Hamiltonian", terms=model.describe(), cutoff=shape.phonon_cutoff)
    return model


# --- Lab frame ---

def lab_hamiltonian(
    p: PhysicalParams,
    shape: SpaceShape,
    rf: bool = False,
    electric: bool = False,
    all_fields_on_all_ions: bool = False,
) -> HamiltonianModel:
    """nu b^dag b + sum_j [omega0^j/2 sigma_z^j + (nu eta/2)(b^dag + b) sigma_z^j + Omega sigma_x^j cos(omega0^j t)].

    Optional extras: the second dressing field Omega_r sum_j sigma_z^j cos(Omega t + phi),
    the electric drive Omega_E (b^dag + b) cos(Omega t + phi) (both flip with the RF
    phase), and every resonant field acting on every ion.
    """
    b, b_dag = ladder(shape)
    position = b + b_dag
    frequencies = qubit_frequencies(p, shape.n_ions)
    sigma_z_sum = collective("z", shape)

    terms = [
        Term.static("motion", p.nu * number_operator(shape)),
        Term.static("qubit", sum(
            ((w / 2.0) * pauli("z", j, shape) for j, w in enumerate(frequencies)), Operator.zero(shape)
        )),
        Term.static("coupling", (p.nu * p.eta / 2.0) * (position @ sigma_z_sum)),
        Term.with_conjugates("drive", [
            Harmonic((p.omega_drive / 2.0 * pauli("x", j, shape)).matrix, w) for j, w in enumerate(frequencies)
        ]),
    ]
    if all_fields_on_all_ions:
        terms.append(Term.with_conjugates("crosstalk", [
            Harmonic((p.omega_drive / 2.0 * pauli("x", j, shape)).matrix, w)
            for k, w in enumerate(frequencies)
            for j in range(shape.n_ions)
            if j != k
        ]))
    rf_phase = complex(np.exp(1j * p.rf_phase))
    if rf:
        terms.append(Term.with_conjugates(
            "rf", [Harmonic((rf_phase * p.omega_r / 2.0 * sigma_z_sum).matrix, p.omega_drive, 0, 1)]
        ))
    if electric:
        terms.append(Term.with_conjugates(
            "electric", [Harmonic((rf_phase * p.omega_E / 2.0 * position).matrix, p.omega_drive, 0, 1)]
        ))
    bare = HamiltonianModel(shape, tuple(terms), Frame.LAB, p.omega_r)
    return to_dressed_basis(bare)


def lab_to_double_dressed(
    p: PhysicalParams,
    shape: SpaceShape,
    threshold: float,
) -> Tuple[HamiltonianModel, List[Tuple[str, Harmonic]]]:
    """Carry the full lab Hamiltonian through the three frame changes, then apply the RWA.

    Returns the kept model (all effects merged into one term) and the dropped harmonics.
    """
    if p.rf_phase:
        raise ArgumentError("the lab chain uses the static RF axis of rf_phase = 0")
    lab = lab_hamiltonian(p, shape, rf=True, electric=True, all_fields_on_all_ions=True)
    rotating = collapse(interaction_picture(lab, rotating_frame_generator(p, shape), Frame.BARE_ROTATING))
    dressed = collapse(interaction_picture(rotating, dressing_generator(p, shape), Frame.DRESSED))
    double = collapse(dressing_picture(dressed, rf_generator(shape), p.omega_r))
    return rotating_wave(double, threshold)


def rwa_bounds(p: PhysicalParams) -> Dict[str, float]:
    """Small parameters of the approximations made on the way to the double-dressed frame."""
    return {
        "Omega/4omega0": p.omega_drive / (4.0 * p.omega0),
        "Omega_r/4Omega": abs(p.omega_r) / (4.0 * p.omega_drive) if p.omega_drive else float("inf"),
        "Omega_E/4nu": p.omega_E / (4.0 * p.nu),
    }
