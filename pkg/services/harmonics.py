"""
Time-dependent Hamiltonians as finite sums of harmonics.

Every term in every frame is written as

    H(t) = sum_h  op_h * s(t)**p_h * exp(i (omega_h t + m_h theta(t)))

where ``s(t) = +-1`` is the sign history of the second dressing field and
``theta(t) = s(t) Omega_r t`` the phase of its frame. A phase flip negates
``Omega_r`` in every term from the flip on, so ``theta`` jumps with ``s`` while the
double-dressed state itself is continuous. In the dressed frame the same flip
reads as an RF phase flip together with a collective ``S_x`` frame update.

Conjugate harmonics are stored explicitly: a term is Hermitian because its
harmonic list is closed under ``Harmonic.conj``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

import numpy as np

from core.exceptions import ArgumentError, InvariantViolation
from models.hilbert import HERMITIAN_RTOL, Operator, SpaceShape


class Frame(str, Enum):
    LAB = "lab"
    BARE_ROTATING = "bare_rotating"
    DRESSED = "dressed"
    DOUBLE_DRESSED = "double_dressed"


@dataclass(frozen=True, eq=False)
class Harmonic:
    op: np.ndarray = field(repr=False)
    omega: float = 0.0
    rf_order: int = 0
    sign_power: int = 0

    def __post_init__(self):
        op = np.array(self.op, dtype=complex)
        if op.ndim != 2 or op.shape[0] != op.shape[1]:
            raise ArgumentError(f"harmonic operator must be square, got shape {op.shape}")
        if self.sign_power not in (0, 1):
            raise ArgumentError("sign_power is 0 or 1")
        op.setflags(write=False)
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "rf_order", int(self.rf_order))

    @property
    def is_static(self) -> bool:
        return self.omega == 0.0 and self.rf_order == 0

    def coefficient(self, t: float, sign: int = 1, theta: float = 0.0) -> complex:
        factor = sign if self.sign_power else 1
        return factor * np.exp(1j * (self.omega * t + self.rf_order * theta))

    def frequency(self, omega_r: float = 0.0) -> float:
        """Largest instantaneous angular frequency over both signs of the dressing field."""
        return max(abs(self.omega + self.rf_order * omega_r), abs(self.omega - self.rf_order * omega_r))

    def norm(self) -> float:
        return float(np.linalg.norm(self.op, 2))

    def conj(self) -> "Harmonic":
        return Harmonic(self.op.conj().T, -self.omega, -self.rf_order, self.sign_power)


@dataclass(frozen=True, eq=False)
class Term:
    """A labeled physical effect: a Hermitian sum of harmonics."""

    label: str
    harmonics: Tuple[Harmonic, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "harmonics", tuple(self.harmonics))

    @classmethod
    def with_conjugates(cls, label: str, harmonics: Iterable[Harmonic]) -> "Term":
        """Term equal to sum(h + h^dagger) over the given harmonics."""
        out: List[Harmonic] = []
        for harmonic in harmonics:
            out.extend((harmonic, harmonic.conj()))
        return cls(label, tuple(out))

    @classmethod
    def static(cls, label: str, op: Operator | np.ndarray, sign_power: int = 0) -> "Term":
        matrix = op.matrix if isinstance(op, Operator) else op
        return cls(label, (Harmonic(matrix, sign_power=sign_power),))

    def matrix(self, t: float, sign: int = 1, theta: float = 0.0) -> np.ndarray:
        if not self.harmonics:
            raise ArgumentError(f"term '{self.label}' has no harmonics")
        return sum(h.coefficient(t, sign, theta) * h.op for h in self.harmonics)

    def relabeled(self, label: str) -> "Term":
        return Term(label, self.harmonics)


@dataclass(frozen=True, eq=False)
class HamiltonianModel:
    """A time-dependent Hamiltonian made of individually toggleable labeled terms."""

    shape: SpaceShape
    terms: Tuple[Term, ...]
    frame: Frame
    omega_r: float = 0.0

    def __post_init__(self):
        terms = tuple(self.terms)
        labels = [term.label for term in terms]
        duplicates = sorted({label for label in labels if labels.count(label) > 1})
        if duplicates:
            raise ArgumentError(f"duplicate term labels {duplicates}")
        dim = self.shape.total_dim
        harmonics = [h for term in terms for h in term.harmonics]
        for h in harmonics:
            if h.op.shape != (dim, dim):
                raise ArgumentError(f"harmonic of shape {h.op.shape} does not fit total_dim {dim}")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "frame", Frame(self.frame))

        # stacked arrays for evaluation by a single tensordot
        if harmonics:
            ops = np.stack([h.op for h in harmonics])
        else:
            ops = np.zeros((0, dim, dim), dtype=complex)
        ops.setflags(write=False)
        object.__setattr__(self, "_ops", ops)
        object.__setattr__(self, "_omegas", np.array([h.omega for h in harmonics], dtype=float))
        object.__setattr__(self, "_orders", np.array([h.rf_order for h in harmonics], dtype=float))
        object.__setattr__(self, "_signed", np.array([h.sign_power == 1 for h in harmonics], dtype=bool))

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(term.label for term in self.terms)

    @property
    def is_empty(self) -> bool:
        return self._ops.shape[0] == 0

    def harmonics(self) -> Iterator[Tuple[str, Harmonic]]:
        for term in self.terms:
            for h in term.harmonics:
                yield term.label, h

    def term(self, label: str) -> Term:
        for term in self.terms:
            if term.label == label:
                return term
        raise ArgumentError(f"no term labeled '{label}'; have {list(self.labels)}")

    def only(self, labels: Iterable[str]) -> "HamiltonianModel":
        wanted = set(labels)
        missing = wanted - set(self.labels)
        if missing:
            raise ArgumentError(f"unknown term labels {sorted(missing)}")
        return self._with_terms(t for t in self.terms if t.label in wanted)

    def without(self, labels: Iterable[str]) -> "HamiltonianModel":
        unwanted = set(labels)
        return self._with_terms(t for t in self.terms if t.label not in unwanted)

    def plus(self, other: "HamiltonianModel") -> "HamiltonianModel":
        if other.shape != self.shape or other.frame != self.frame:
            raise ArgumentError("models live on different spaces or frames")
        return HamiltonianModel(self.shape, self.terms + other.terms, self.frame, self.omega_r or other.omega_r)

    def _with_terms(self, terms: Iterable[Term]) -> "HamiltonianModel":
        return HamiltonianModel(self.shape, tuple(terms), self.frame, self.omega_r)

    def coefficients(self, t: float, sign: int = 1, theta: float = 0.0) -> np.ndarray:
        phases = np.exp(1j * (self._omegas * t + self._orders * theta))
        return np.where(self._signed, sign * phases, phases)

    def matrix(self, t: float, sign: int = 1, theta: float = 0.0) -> np.ndarray:
        if self.is_empty:
            return np.zeros((self.shape.total_dim,) * 2, dtype=complex)
        return np.tensordot(self.coefficients(t, sign, theta), self._ops, axes=1)

    def evaluate(self, t: float, sign: int = 1, theta: float = 0.0) -> Operator:
        return Operator(self.shape, self.matrix(t, sign, theta))

    def max_frequency(self) -> float:
        """Largest angular frequency among harmonics with nonzero operators."""
        return max(
            (h.frequency(self.omega_r) for _, h in self.harmonics() if np.any(h.op)),
            default=0.0,
        )

    def norm_bound(self) -> float:
        """Upper bound on ||H(t)|| over all t."""
        return float(sum(h.norm() for _, h in self.harmonics()))

    def require_hermitian(self, times: Sequence[float], sign: int = 1, theta_rate: float | None = None) -> None:
        """Check Hermiticity of every term at the given times."""
        rate = self.omega_r if theta_rate is None else theta_rate
        for term in self.terms:
            if not term.harmonics:
                continue
            for t in times:
                matrix = term.matrix(t, sign, sign * rate * t)
                scale = max(np.linalg.norm(matrix), 1.0)
                if np.linalg.norm(matrix - matrix.conj().T) >= HERMITIAN_RTOL * scale:
                    raise InvariantViolation(f"term '{term.label}' is not Hermitian at t={t:.6g}")

    def describe(self) -> Dict[str, int]:
        return {term.label: len(term.harmonics) for term in self.terms}


@dataclass(frozen=True)
class RFDrive:
    """Sign history s(t) and frame phase theta(t) = s(t) Omega_r t of the second dressing field."""

    omega_r: float
    flip_times: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "flip_times", tuple(sorted(self.flip_times)))

    def sign_at(self, t: float) -> int:
        """Sign on the open interval just after t."""
        flips = int(np.searchsorted(self.flip_times, t, side="right"))
        return -1 if flips % 2 else 1

    def phase_at(self, t: float) -> float:
        """Phase on the open interval just after t; it jumps at every flip."""
        return self.sign_at(t) * self.omega_r * t
