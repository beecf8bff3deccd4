"""Dense complex linear algebra for small quantum registers.

Values are validated once, at construction, and then trusted by every
operation. All arrays held by these types are made read-only so instances
can be shared freely.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, NamedTuple, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, InvalidMeasurement, NotUnitary

#: validation tolerance for unitarity, projector algebra and normalisation
TOL = 1e-9
#: tolerance used when comparing two computed quantities
CMP_TOL = 1e-10
#: probabilities at or below this are treated as "outcome never happens"
ZERO_PROB = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def is_unitary(mat: np.ndarray, tol: float = TOL) -> bool:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    if not np.all(np.isfinite(mat)):
        return False
    err = mat.conj().T @ mat - np.eye(mat.shape[0])
    return bool(np.max(np.abs(err), initial=0.0) <= tol)


def is_projector(mat: np.ndarray, tol: float = TOL) -> bool:
    """Hermitian and idempotent, entrywise to ``tol``."""
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    herm = np.max(np.abs(mat - mat.conj().T), initial=0.0)
    idem = np.max(np.abs(mat @ mat - mat), initial=0.0)
    return bool(herm <= tol and idem <= tol)


def projector_onto(dim: int, indices: Iterable[int]) -> np.ndarray:
    """Diagonal projector onto the span of the given basis vectors."""
    p = np.zeros((dim, dim), dtype=complex)
    for i in indices:
        p[i, i] = 1.0
    return p


@dataclass(frozen=True, eq=False)
class StateVector:
    """Column vector of amplitudes.

    ``normalized=False`` marks deliberately sub-normalised vectors such as
    the surviving component of a measure-many automaton.
    """

    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0:
            raise DimensionMismatch("state vector must have positive dimension")
        if not np.all(np.isfinite(amps)):
            raise ValueError("state vector has non-finite amplitudes")
        if self.normalized:
            n2 = float(np.vdot(amps, amps).real)
            if abs(n2 - 1.0) > TOL:
                raise ValueError(f"state vector is not normalised (norm^2 = {n2!r})")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def basis(cls, dim: int, index: int) -> "StateVector":
        v = np.zeros(dim, dtype=complex)
        v[index] = 1.0
        return cls(v)

    def __repr__(self) -> str:
        return f"StateVector(dim={self.dim}, amplitudes={np.round(self.amplitudes, 6)!r})"


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatch(f"operator must be square, got shape {mat.shape}")
        if not is_unitary(mat):
            raise NotUnitary("matrix fails the unitarity check ||U^dag U - I||_max <= 1e-9")
        object.__setattr__(self, "matrix", _frozen(mat))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "UnitaryOperator":
        return cls(np.eye(dim))

    def dagger(self) -> "UnitaryOperator":
        return UnitaryOperator(self.matrix.conj().T)


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """A complete family of mutually orthogonal projectors, one per outcome."""

    outcomes: tuple
    projectors: tuple

    def __post_init__(self) -> None:
        outcomes = tuple(self.outcomes)
        projs = tuple(np.asarray(p, dtype=complex) for p in self.projectors)
        if len(outcomes) != len(projs) or not outcomes:
            raise InvalidMeasurement("need one projector per outcome and at least one outcome")
        if len(set(outcomes)) != len(outcomes):
            raise InvalidMeasurement("duplicate outcome labels")
        dim = projs[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for label, p in zip(outcomes, projs):
            if p.shape != (dim, dim):
                raise InvalidMeasurement(f"projector for {label!r} has shape {p.shape}")
            if not is_projector(p):
                raise InvalidMeasurement(f"operator for outcome {label!r} is not a projector")
            total += p
        if np.max(np.abs(total - np.eye(dim))) > TOL:
            raise InvalidMeasurement("projectors do not sum to the identity")
        for i in range(len(projs)):
            for j in range(i + 1, len(projs)):
                if np.max(np.abs(projs[i] @ projs[j]), initial=0.0) > TOL:
                    raise InvalidMeasurement(
                        f"projectors for {outcomes[i]!r} and {outcomes[j]!r} are not orthogonal")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "projectors", tuple(_frozen(p) for p in projs))

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def projector(self, outcome: Hashable) -> np.ndarray:
        try:
            return self.projectors[self.outcomes.index(outcome)]
        except ValueError:
            raise KeyError(outcome) from None

    @classmethod
    def computational(cls, dim: int) -> "ProjectiveMeasurement":
        return cls(tuple(range(dim)), tuple(projector_onto(dim, [i]) for i in range(dim)))

    @classmethod
    def from_subspaces(cls, dim: int, subspaces: Mapping[Hashable, Sequence[int]]
                       ) -> "ProjectiveMeasurement":
        """Measurement whose outcomes are spans of disjoint sets of basis vectors."""
        return cls(tuple(subspaces), tuple(projector_onto(dim, ix) for ix in subspaces.values()))


class Outcome(NamedTuple):
    probability: float
    #: ``None`` when the outcome has (numerically) zero probability
    post_state: StateVector | None


def apply_unitary(v: StateVector, u: UnitaryOperator) -> StateVector:
    if v.dim != u.dim:
        raise DimensionMismatch(f"state has dim {v.dim}, operator has dim {u.dim}")
    return StateVector(u.matrix @ v.amplitudes, normalized=v.normalized)


def measure(v: StateVector, m: ProjectiveMeasurement) -> dict:
    """Outcome statistics of ``m`` on ``v``: label -> Outcome(p, post-state)."""
    if v.dim != m.dim:
        raise DimensionMismatch(f"state has dim {v.dim}, measurement has dim {m.dim}")
    result = {}
    for label, p in zip(m.outcomes, m.projectors):
        w = p @ v.amplitudes
        prob = float(np.vdot(w, w).real)
        post = StateVector(w / np.sqrt(prob)) if prob > ZERO_PROB else None
        result[label] = Outcome(prob, post)
    return result


Tensorable = Union[StateVector, UnitaryOperator, np.ndarray]


def tensor(a: Tensorable, b: Tensorable) -> Tensorable:
    """Kronecker product; the left factor indexes the most significant digit."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes),
                           normalized=a.normalized and b.normalized)
    if isinstance(a, UnitaryOperator) and isinstance(b, UnitaryOperator):
        return UnitaryOperator(np.kron(a.matrix, b.matrix))
    if isinstance(a, np.ndarray) and isinstance(b, np.ndarray):
        return np.kron(a, b)
    raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_projector(dim: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    q = random_unitary(dim, rng)[:, :rank]
    return q @ q.conj().T
