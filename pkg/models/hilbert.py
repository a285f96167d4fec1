"""
Joint Hilbert space of the qubit register and one truncated motional mode.

Ordering convention: qubit factors first with ion 0 the slowest index, the
phonon factor last. A basis index is therefore
``spin_index * phonon_cutoff + n`` with ``spin_index`` read as a binary
number whose most significant bit is ion 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from core.exceptions import ArgumentError, InvariantViolation

HERMITIAN_RTOL = 1e-12
UNITARY_ATOL = 1e-10


@dataclass(frozen=True)
class SpaceShape:
    n_ions: int
    phonon_cutoff: int

    def __post_init__(self):
        if self.n_ions < 1:
            raise ArgumentError(f"n_ions must be positive, got {self.n_ions}")
        if self.phonon_cutoff < 2:
            raise ArgumentError(f"phonon_cutoff must be at least 2, got {self.phonon_cutoff}")

    @property
    def spin_dim(self) -> int:
        return 2 ** self.n_ions

    @property
    def total_dim(self) -> int:
        return self.spin_dim * self.phonon_cutoff

    def with_cutoff(self, phonon_cutoff: int) -> "SpaceShape":
        return SpaceShape(self.n_ions, phonon_cutoff)


def _freeze(array: np.ndarray) -> np.ndarray:
    array = np.asarray(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex matrix on the joint space. Immutable."""

    shape: SpaceShape
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        matrix = _freeze(self.matrix)
        dim = self.shape.total_dim
        if matrix.shape != (dim, dim):
            raise ArgumentError(f"matrix of shape {matrix.shape} does not fit total_dim {dim}")
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls, shape: SpaceShape) -> "Operator":
        return cls(shape, np.eye(shape.total_dim, dtype=complex))

    @classmethod
    def zero(cls, shape: SpaceShape) -> "Operator":
        return cls(shape, np.zeros((shape.total_dim, shape.total_dim), dtype=complex))

    def _check(self, other: "Operator") -> None:
        if other.shape != self.shape:
            raise ArgumentError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.shape, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.shape, self.matrix - other.matrix)

    def __neg__(self) -> "Operator":
        return Operator(self.shape, -self.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.shape, self.matrix * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.shape, self.matrix @ other.matrix)

    def dag(self) -> "Operator":
        return Operator(self.shape, self.matrix.conj().T)

    def commutator(self, other: "Operator") -> "Operator":
        return self @ other - other @ self

    def norm(self) -> float:
        """Spectral (operator 2-) norm."""
        return float(np.linalg.norm(self.matrix, 2))

    def is_hermitian(self, rtol: float = HERMITIAN_RTOL) -> bool:
        scale = max(np.linalg.norm(self.matrix), 1.0)
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T)) < rtol * scale

    def is_unitary(self, atol: float = UNITARY_ATOL) -> bool:
        eye = np.eye(self.shape.total_dim)
        return float(np.linalg.norm(self.matrix.conj().T @ self.matrix - eye, 2)) < atol

    def require_hermitian(self, label: str = "operator") -> "Operator":
        if not self.is_hermitian():
            raise InvariantViolation(f"{label} is not Hermitian")
        return self

    def require_unitary(self, label: str = "propagator") -> "Operator":
        if not self.is_unitary():
            raise InvariantViolation(f"{label} is not unitary")
        return self

    def apply(self, state: "StateVector") -> "StateVector":
        if state.shape != self.shape:
            raise ArgumentError(f"shape mismatch: {self.shape} vs {state.shape}")
        return StateVector(self.shape, self.matrix @ state.amplitudes)

    def allclose(self, other: "Operator", atol: float = 1e-10) -> bool:
        self._check(other)
        return bool(np.allclose(self.matrix, other.matrix, atol=atol, rtol=0.0))


@dataclass(frozen=True, eq=False)
class StateVector:
    shape: SpaceShape
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amplitudes = _freeze(np.ravel(self.amplitudes))
        if amplitudes.shape != (self.shape.total_dim,):
            raise ArgumentError(
                f"state of length {amplitudes.shape[0]} does not fit total_dim {self.shape.total_dim}"
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.shape, self.amplitudes / self.norm())

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to (spin_dim, phonon_cutoff)."""
        return self.amplitudes.reshape(self.shape.spin_dim, self.shape.phonon_cutoff)

    def with_phase(self, phase: float) -> "StateVector":
        return StateVector(self.shape, self.amplitudes * np.exp(1j * phase))
