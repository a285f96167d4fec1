"""
Qubit and phonon operators, basis maps and standard states.

All operators are expressed in the *dressed working basis*: per qubit, index 0
is |u> = (|1>+|0>)/sqrt2 and index 1 is -|d> = (|0>-|1>)/sqrt2. In this basis
the dressed operators S_x, S_y, S_z are the plain Pauli matrices and
``dressed_map`` carries bare operators into it (sigma_x -> S_z, sigma_y -> S_y,
sigma_z -> -S_x). The same rotation relates the dressed and the double-dressed
bases, so ``double_dressed_pauli`` is ``dressed_map`` applied to a Pauli matrix.
The sign of |d> is a per-ion phase that drops out of |dd>.
"""

from __future__ import annotations

import numpy as np
from cachetools import LRUCache, cached

from core.exceptions import ArgumentError, IndexOutOfRange, TruncationError
from models.hilbert import Operator, SpaceShape, StateVector

PAULI_2X2 = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
SIGMA_PLUS_2X2 = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS_2X2 = SIGMA_PLUS_2X2.T.copy()

# per-qubit rotation exp(i pi/4 sigma_y) realising the dressed-basis map
DRESSING_ROTATION = np.array([[1, 1], [-1, 1]], dtype=complex) / np.sqrt(2)

SPIN_LABELS = {"u": 0, "d": 1}


def _check_ion(ion_index: int, shape: SpaceShape) -> None:
    if not 0 <= ion_index < shape.n_ions:
        raise IndexOutOfRange(f"ion_index {ion_index} outside 0..{shape.n_ions - 1}")


def spin_embed(single: np.ndarray, ion_index: int, n_ions: int) -> np.ndarray:
    """Place a 2x2 matrix on one qubit of an n-qubit register (no phonon factor)."""
    factors = [np.eye(2, dtype=complex)] * n_ions
    factors[ion_index] = single
    out = np.ones((1, 1), dtype=complex)
    for factor in factors:
        out = np.kron(out, factor)
    return out


def with_phonon_identity(spin_matrix: np.ndarray, shape: SpaceShape) -> np.ndarray:
    return np.kron(spin_matrix, np.eye(shape.phonon_cutoff, dtype=complex))


def with_spin_identity(phonon_matrix: np.ndarray, shape: SpaceShape) -> np.ndarray:
    return np.kron(np.eye(shape.spin_dim, dtype=complex), phonon_matrix)


@cached(LRUCache(maxsize=256))
def _pauli_matrix(axis: str, ion_index: int, shape: SpaceShape) -> np.ndarray:
    matrix = with_phonon_identity(spin_embed(PAULI_2X2[axis], ion_index, shape.n_ions), shape)
    matrix.setflags(write=False)
    return matrix


def pauli(axis: str, ion_index: int, shape: SpaceShape) -> Operator:
    """Pauli matrix on one qubit, identity on the other qubits and on the phonon factor."""
    if axis not in PAULI_2X2:
        raise ArgumentError(f"axis must be one of x, y, z; got '{axis}'")
    _check_ion(ion_index, shape)
    return Operator(shape, _pauli_matrix(axis, ion_index, shape))


def sigma_plus(ion_index: int, shape: SpaceShape) -> Operator:
    """Raising operator |0><1| in the working index convention (index 0 is the upper state)."""
    _check_ion(ion_index, shape)
    return Operator(shape, with_phonon_identity(spin_embed(SIGMA_PLUS_2X2, ion_index, shape.n_ions), shape))


def sigma_minus(ion_index: int, shape: SpaceShape) -> Operator:
    return sigma_plus(ion_index, shape).dag()


def collective(axis: str, shape: SpaceShape) -> Operator:
    """Sum of one Pauli axis over all ions."""
    total = Operator.zero(shape)
    for j in range(shape.n_ions):
        total = total + pauli(axis, j, shape)
    return total


@cached(LRUCache(maxsize=64))
def _lowering_matrix(cutoff: int) -> np.ndarray:
    matrix = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1).astype(complex)
    matrix.setflags(write=False)
    return matrix


def lowering_matrix(cutoff: int) -> np.ndarray:
    """Truncated annihilation operator on the phonon factor alone."""
    return _lowering_matrix(cutoff)


def ladder(shape: SpaceShape) -> tuple[Operator, Operator]:
    """Truncated (b, b_dagger) on the joint space; b_dagger annihilates the top Fock state."""
    b = with_spin_identity(lowering_matrix(shape.phonon_cutoff), shape)
    return Operator(shape, b), Operator(shape, b.conj().T)


def number_operator(shape: SpaceShape) -> Operator:
    n = np.diag(np.arange(shape.phonon_cutoff, dtype=float)).astype(complex)
    return Operator(shape, with_spin_identity(n, shape))


def _dressing_unitary(shape: SpaceShape) -> np.ndarray:
    rotation = np.ones((1, 1), dtype=complex)
    for _ in range(shape.n_ions):
        rotation = np.kron(rotation, DRESSING_ROTATION)
    return with_phonon_identity(rotation, shape)


def dressed_map(op: Operator) -> Operator:
    """Express a bare-basis operator in the dressed basis.

    Maps sigma_x -> S_z, sigma_y -> S_y, sigma_z -> -S_x on every qubit and leaves
    phonon operators untouched. The map has period four: two applications negate
    sigma_x and sigma_z, four return the original operator. ``bare_map`` is the
    inverse.
    """
    if not isinstance(op, Operator):
        raise ArgumentError("dressed_map expects an Operator")
    w = _dressing_unitary(op.shape)
    return Operator(op.shape, w @ op.matrix @ w.conj().T)


def bare_map(op: Operator) -> Operator:
    """Inverse of ``dressed_map``."""
    if not isinstance(op, Operator):
        raise ArgumentError("bare_map expects an Operator")
    w = _dressing_unitary(op.shape)
    return Operator(op.shape, w.conj().T @ op.matrix @ w)


def double_dressed_pauli(axis: str, ion_index: int, shape: SpaceShape) -> Operator:
    """Double-dressed sigma_axis written in the dressed working basis.

    sigma_z = -S_x, sigma_y = S_y and sigma_x = S_z.
    """
    return dressed_map(pauli(axis, ion_index, shape))


def double_dressed_sigma_plus(ion_index: int, shape: SpaceShape) -> Operator:
    return dressed_map(sigma_plus(ion_index, shape))


# --- States ---

def fock_amplitudes(n: int, cutoff: int) -> np.ndarray:
    if not 0 <= n < cutoff:
        raise TruncationError(f"Fock state |{n}> does not fit phonon_cutoff {cutoff}")
    amplitudes = np.zeros(cutoff, dtype=complex)
    amplitudes[n] = 1.0
    return amplitudes


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """Normalized truncated coherent state on the phonon factor."""
    if abs(alpha) ** 2 > cutoff / 4:
        raise TruncationError(
            f"|alpha|^2 = {abs(alpha) ** 2:.3g} exceeds phonon_cutoff/4 = {cutoff / 4:.3g}; "
            "increase phonon_cutoff"
        )
    ratios = np.ones(cutoff, dtype=complex)
    ratios[1:] = alpha / np.sqrt(np.arange(1, cutoff))
    amplitudes = np.cumprod(ratios)
    return amplitudes / np.linalg.norm(amplitudes)


def spin_vector(spins: str) -> np.ndarray:
    """Product spin state from a string of 'u'/'d' labels, ion 0 first."""
    vector = np.ones(1, dtype=complex)
    for label in spins:
        if label not in SPIN_LABELS:
            raise ArgumentError(f"spin label must be 'u' or 'd', got '{label}'")
        single = np.zeros(2, dtype=complex)
        single[SPIN_LABELS[label]] = 1.0
        vector = np.kron(vector, single)
    return vector


def product_state(shape: SpaceShape, spins: str, phonons: int | np.ndarray = 0) -> StateVector:
    """|spins> (x) |phonons>, phonons being a Fock number or explicit phonon amplitudes."""
    if len(spins) != shape.n_ions:
        raise ArgumentError(f"{len(spins)} spin labels given for {shape.n_ions} ions")
    if isinstance(phonons, (int, np.integer)):
        phonon_part = fock_amplitudes(int(phonons), shape.phonon_cutoff)
    else:
        phonon_part = np.asarray(phonons, dtype=complex)
        if phonon_part.shape != (shape.phonon_cutoff,):
            raise ArgumentError("phonon amplitudes do not match phonon_cutoff")
    return StateVector(shape, np.kron(spin_vector(spins), phonon_part))


def coherent_state(alpha: complex, shape: SpaceShape, spins: str | None = None) -> StateVector:
    """Coherent motional state alpha, spins in |d...d> unless given."""
    spins = spins if spins is not None else "d" * shape.n_ions
    return product_state(shape, spins, coherent_amplitudes(alpha, shape.phonon_cutoff))


def bell_spin_vector() -> np.ndarray:
    """(|dd> + i|uu>)/sqrt2 on two qubits."""
    return (spin_vector("dd") + 1j * spin_vector("uu")) / np.sqrt(2)


def bell_state(shape: SpaceShape) -> StateVector:
    if shape.n_ions != 2:
        raise ArgumentError(f"the Bell target needs 2 ions, shape has {shape.n_ions}")
    return StateVector(shape, np.kron(bell_spin_vector(), fock_amplitudes(0, shape.phonon_cutoff)))
