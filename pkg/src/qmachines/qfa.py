"""One-way quantum finite automata.

Five models are provided, each with exact acceptance semantics:

* :class:`Mo1Qfa` - measure-once
* :class:`Mm1Qfa` - measure-many, with right end-marker
* :class:`KLetterQfa` - unitary chosen by the last k letters
* :class:`QfaCL` - measurement outcome sequence filtered by a control DFA
* :class:`Qfac` - classical states driving the unitaries and the final measurement

Words are plain sequences of alphabet symbols. End-markers are appended by the
semantics and must never be passed in by callers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .dfa import Dfa
from .errors import (DimensionMismatch, InvalidMeasurement, InvalidParameter,
                     UnknownOutcome, UnknownSymbol)
from .linalg import (TOL, ProjectiveMeasurement, StateVector, UnitaryOperator,
                     projector_onto)

#: end-marker appended by MM-1QFA and 1QFACL semantics
END = "$"


def _as_state(psi, dim: int) -> np.ndarray:
    v = psi.amplitudes if isinstance(psi, StateVector) else StateVector(psi).amplitudes
    if v.shape[0] != dim:
        raise DimensionMismatch(f"initial state has dim {v.shape[0]}, expected {dim}")
    return v


def _as_unitaries(unitaries: Mapping, dim: int) -> dict:
    out = {}
    for key, u in unitaries.items():
        mat = u.matrix if isinstance(u, UnitaryOperator) else UnitaryOperator(u).matrix
        if mat.shape[0] != dim:
            raise DimensionMismatch(f"unitary for {key!r} has dim {mat.shape[0]}, expected {dim}")
        out[key] = mat
    return out


def _unitary_for(unitaries: Mapping, key, alphabet) -> np.ndarray:
    try:
        return unitaries[key]
    except KeyError:
        raise UnknownSymbol(f"symbol {key!r} not in alphabet {tuple(alphabet)!r}") from None


def _prob(v: np.ndarray) -> float:
    return float(np.vdot(v, v).real)


# -- MO-1QFA ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Mo1Qfa:
    """Measure-once automaton; ``accepting`` holds basis indices."""

    alphabet: tuple
    initial: np.ndarray
    unitaries: Mapping
    accepting: frozenset
    basis: tuple = ()

    def __post_init__(self) -> None:
        alphabet = tuple(self.alphabet)
        dim = np.asarray(self.initial.amplitudes if isinstance(self.initial, StateVector)
                         else self.initial).reshape(-1).shape[0]
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "initial", _as_state(self.initial, dim))
        if set(self.unitaries) != set(alphabet):
            raise UnknownSymbol("need exactly one unitary per alphabet symbol")
        object.__setattr__(self, "unitaries", _as_unitaries(self.unitaries, dim))
        acc = frozenset(int(i) for i in self.accepting)
        if not all(0 <= i < dim for i in acc):
            raise InvalidParameter("accepting index out of range")
        object.__setattr__(self, "accepting", acc)
        object.__setattr__(self, "basis", tuple(self.basis) or tuple(range(dim)))

    @property
    def dim(self) -> int:
        return self.initial.shape[0]

    @property
    def accept_projector(self) -> np.ndarray:
        return projector_onto(self.dim, self.accepting)

    def final_state(self, word: Iterable) -> np.ndarray:
        v = self.initial
        for a in word:
            v = _unitary_for(self.unitaries, a, self.alphabet) @ v
        return v


def mo_accept_prob(a: Mo1Qfa, word: Iterable) -> float:
    v = a.final_state(word)
    return _prob(v[sorted(a.accepting)])


# -- MM-1QFA ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Mm1Qfa:
    """Measure-many automaton. ``unitaries`` must include the end-marker ``$``."""

    alphabet: tuple
    initial: np.ndarray
    unitaries: Mapping
    accepting: frozenset
    rejecting: frozenset
    basis: tuple = ()

    def __post_init__(self) -> None:
        alphabet = tuple(self.alphabet)
        if END in alphabet:
            raise InvalidParameter(f"{END!r} is reserved for the end-marker")
        init = np.asarray(self.initial.amplitudes if isinstance(self.initial, StateVector)
                          else self.initial)
        dim = init.reshape(-1).shape[0]
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "initial", _as_state(self.initial, dim))
        if set(self.unitaries) != set(alphabet) | {END}:
            raise UnknownSymbol("need one unitary per symbol plus the end-marker '$'")
        object.__setattr__(self, "unitaries", _as_unitaries(self.unitaries, dim))
        acc = frozenset(int(i) for i in self.accepting)
        rej = frozenset(int(i) for i in self.rejecting)
        if acc & rej:
            raise InvalidParameter("accepting and rejecting sets must be disjoint")
        if not all(0 <= i < dim for i in acc | rej):
            raise InvalidParameter("basis index out of range")
        object.__setattr__(self, "accepting", acc)
        object.__setattr__(self, "rejecting", rej)
        object.__setattr__(self, "basis", tuple(self.basis) or tuple(range(dim)))

    @property
    def dim(self) -> int:
        return self.initial.shape[0]

    @property
    def non_halting(self) -> frozenset:
        return frozenset(range(self.dim)) - self.accepting - self.rejecting


class MmResult(NamedTuple):
    accept: float
    reject: float
    #: per processed symbol (input letters then ``$``): (p_accept_k, p_reject_k)
    history: list


def mm_run(a: Mm1Qfa, word: Sequence) -> MmResult:
    """Accumulate halting probabilities; the surviving component stays unnormalised."""
    acc = sorted(a.accepting)
    rej = sorted(a.rejecting)
    non = sorted(a.non_halting)
    v = a.initial
    p_acc = p_rej = 0.0
    history = []
    word = list(word)
    for sym in word:
        if sym not in a.alphabet:
            raise UnknownSymbol(f"symbol {sym!r} not in alphabet {a.alphabet!r}")
    for sym in word + [END]:
        v = a.unitaries[sym] @ v
        pa, pr = _prob(v[acc]), _prob(v[rej])
        history.append((pa, pr))
        p_acc += pa
        p_rej += pr
        survivor = np.zeros_like(v)
        survivor[non] = v[non]
        v = survivor
    return MmResult(p_acc, p_rej, history)


# -- k-letter QFA ----------------------------------------------------------

#: padding symbol (Lambda) filling k-letter windows before the word starts
PAD = None


@dataclass(frozen=True, eq=False)
class KLetterQfa:
    """k-letter automaton. ``unitaries`` is keyed by k-tuples over alphabet+PAD.

    Windows that can never occur (a real letter followed by padding) may be
    omitted; every window reachable by some input must be present.
    """

    k: int
    alphabet: tuple
    initial: np.ndarray
    unitaries: Mapping
    accepting: frozenset
    basis: tuple = ()

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 1:
            raise InvalidParameter("k must be a positive integer")
        alphabet = tuple(self.alphabet)
        if PAD in alphabet:
            raise InvalidParameter("None is reserved for window padding")
        init = np.asarray(self.initial.amplitudes if isinstance(self.initial, StateVector)
                          else self.initial)
        dim = init.reshape(-1).shape[0]
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "initial", _as_state(self.initial, dim))
        unitaries = {tuple(w): u for w, u in self.unitaries.items()}
        for w in unitaries:
            if len(w) != self.k or not all(s is PAD or s in alphabet for s in w):
                raise InvalidParameter(f"bad window {w!r}")
        for w in self.reachable_windows():
            if w not in unitaries:
                raise InvalidParameter(f"no unitary for window {w!r}")
        object.__setattr__(self, "unitaries", _as_unitaries(unitaries, dim))
        acc = frozenset(int(i) for i in self.accepting)
        if not all(0 <= i < dim for i in acc):
            raise InvalidParameter("accepting index out of range")
        object.__setattr__(self, "accepting", acc)
        object.__setattr__(self, "basis", tuple(self.basis) or tuple(range(dim)))

    @property
    def dim(self) -> int:
        return self.initial.shape[0]

    def reachable_windows(self) -> list:
        """Windows of the form PAD^j w with |w| = k - j >= 1."""
        out = []
        for j in range(self.k):
            for w in product(self.alphabet, repeat=self.k - j):
                out.append((PAD,) * j + w)
        return out


def kletter_accept_prob(a: KLetterQfa, word: Sequence) -> float:
    window = [PAD] * a.k
    v = a.initial
    for sym in word:
        if sym not in a.alphabet:
            raise UnknownSymbol(f"symbol {sym!r} not in alphabet {a.alphabet!r}")
        window = window[1:] + [sym]
        v = a.unitaries[tuple(window)] @ v
    return _prob(v[sorted(a.accepting)])


def mo_as_kletter(a: Mo1Qfa) -> KLetterQfa:
    """The 1-letter automaton with the same data as ``a``."""
    return KLetterQfa(1, a.alphabet, a.initial, {(s,): u for s, u in a.unitaries.items()},
                      a.accepting, a.basis)


# -- 1QFACL ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QfaCL:
    """Automaton with control language.

    ``observable`` is measured after every symbol (the end-marker included);
    its outcome labels form the alphabet of the ``control`` DFA.
    """

    alphabet: tuple
    initial: np.ndarray
    unitaries: Mapping
    observable: ProjectiveMeasurement
    control: Dfa
    basis: tuple = ()

    def __post_init__(self) -> None:
        alphabet = tuple(self.alphabet)
        if END in alphabet:
            raise InvalidParameter(f"{END!r} is reserved for the end-marker")
        init = np.asarray(self.initial.amplitudes if isinstance(self.initial, StateVector)
                          else self.initial)
        dim = init.reshape(-1).shape[0]
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "initial", _as_state(self.initial, dim))
        if set(self.unitaries) != set(alphabet) | {END}:
            raise UnknownSymbol("need one unitary per symbol plus the end-marker '$'")
        object.__setattr__(self, "unitaries", _as_unitaries(self.unitaries, dim))
        if not isinstance(self.observable, ProjectiveMeasurement):
            raise InvalidMeasurement("observable must be a ProjectiveMeasurement")
        if self.observable.dim != dim:
            raise DimensionMismatch("observable dimension differs from the state space")
        if set(self.control.alphabet) != set(self.observable.outcomes):
            raise InvalidParameter("control DFA alphabet must equal the outcome set")
        object.__setattr__(self, "basis", tuple(self.basis) or tuple(range(dim)))

    @property
    def dim(self) -> int:
        return self.initial.shape[0]


def qfacl_accept_prob(a: QfaCL, word: Sequence) -> float:
    """Acceptance probability via one unnormalised density operator per control state.

    For each symbol: rho'[d'] = sum over (d, c) with delta(d, c) = d' of
    P(c) U rho[d] U^dag P(c). Linear in |x|, exact by linearity.
    """
    ctrl = a.control
    rho = {d: None for d in ctrl.states}
    rho[ctrl.start] = np.outer(a.initial, a.initial.conj())
    projs = list(zip(a.observable.outcomes, a.observable.projectors))
    for sym in list(word) + [END]:
        if sym != END and sym not in a.alphabet:
            raise UnknownSymbol(f"symbol {sym!r} not in alphabet {a.alphabet!r}")
        u = a.unitaries[sym]
        new = {d: None for d in ctrl.states}
        for d, r in rho.items():
            if r is None:
                continue
            evolved = u @ r @ u.conj().T
            for c, p in projs:
                target = ctrl.delta[(d, c)]
                term = p @ evolved @ p
                new[target] = term if new[target] is None else new[target] + term
        rho = new
    return float(sum(np.trace(r).real for d, r in rho.items()
                     if r is not None and d in ctrl.accepting))


def qfacl_accept_prob_bruteforce(a: QfaCL, word: Sequence) -> float:
    """Sum of ||prod P(y_i) U(x_i) psi0||^2 over all outcome words y in the control language."""
    syms = list(word) + [END]
    for sym in syms[:-1]:
        if sym not in a.alphabet:
            raise UnknownSymbol(f"symbol {sym!r} not in alphabet {a.alphabet!r}")
    total = 0.0
    for ys in product(a.observable.outcomes, repeat=len(syms)):
        if not a.control.accepts(ys):
            continue
        v = a.initial
        for x, y in zip(syms, ys):
            v = a.observable.projector(y) @ (a.unitaries[x] @ v)
        total += _prob(v)
    return total


# -- 1QFAC -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Qfac:
    """Automaton with classical states S and quantum basis Q.

    ``unitaries[(s, sigma)]`` acts on H(Q); ``measurements[s]`` is the
    projective measurement performed when the input ends in state ``s``.
    """

    classical_states: tuple
    alphabet: tuple
    start: Hashable
    initial: np.ndarray
    delta: Mapping
    unitaries: Mapping
    measurements: Mapping
    basis: tuple = ()
    outcomes: tuple = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        states = tuple(self.classical_states)
        alphabet = tuple(self.alphabet)
        init = np.asarray(self.initial.amplitudes if isinstance(self.initial, StateVector)
                          else self.initial)
        dim = init.reshape(-1).shape[0]
        object.__setattr__(self, "classical_states", states)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "initial", _as_state(self.initial, dim))
        # reuse Dfa validation for totality of the classical map
        Dfa(states, alphabet, self.delta, self.start, frozenset())
        object.__setattr__(self, "delta", dict(self.delta))
        if set(self.unitaries) != set(product(states, alphabet)):
            raise InvalidParameter("need a unitary for every (classical state, symbol) pair")
        object.__setattr__(self, "unitaries", _as_unitaries(self.unitaries, dim))
        if set(self.measurements) != set(states):
            raise InvalidMeasurement("need one measurement per classical state")
        outcomes = None
        for s, m in self.measurements.items():
            if not isinstance(m, ProjectiveMeasurement):
                raise InvalidMeasurement(f"measurement for state {s!r} is not projective")
            if m.dim != dim:
                raise DimensionMismatch(f"measurement for state {s!r} has wrong dimension")
            if outcomes is None:
                outcomes = m.outcomes
            elif set(m.outcomes) != set(outcomes):
                raise InvalidMeasurement("all measurements must share the outcome set")
        object.__setattr__(self, "measurements", dict(self.measurements))
        object.__setattr__(self, "outcomes", tuple(self.outcomes) or tuple(outcomes))
        object.__setattr__(self, "basis", tuple(self.basis) or tuple(range(dim)))

    @property
    def dim(self) -> int:
        return self.initial.shape[0]

    @property
    def n_classical(self) -> int:
        return len(self.classical_states)

    def mu(self, word: Iterable) -> Hashable:
        s = self.start
        for a in word:
            s = self._step(s, a)
        return s

    def _step(self, s, a):
        try:
            return self.delta[(s, a)]
        except KeyError:
            raise UnknownSymbol(f"symbol {a!r} not in alphabet {self.alphabet!r}") from None

    def run(self, word: Iterable) -> tuple:
        """Classical state mu(x) and quantum state v(x)|psi0>."""
        s, v = self.start, self.initial
        for a in word:
            u = _unitary_for(self.unitaries, (s, a), self.alphabet)
            v = u @ v
            s = self._step(s, a)
        return s, v


def qfac_outcome_prob(a: Qfac, word: Iterable, outcome: Hashable) -> float:
    if outcome not in a.outcomes:
        raise UnknownOutcome(f"outcome {outcome!r} not in {a.outcomes!r}")
    s, v = a.run(word)
    return _prob(a.measurements[s].projector(outcome) @ v)


def qfac_accept_prob(a: Qfac, word: Iterable) -> float:
    return qfac_outcome_prob(a, word, "a")


# -- lifted form -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LiftedQfac:
    """The same machine on H(S) (x) H(Q); classical state s owns block s."""

    classical_states: tuple
    alphabet: tuple
    block: int
    initial: np.ndarray
    operators: Mapping
    projectors: Mapping

    @property
    def dim(self) -> int:
        return self.initial.shape[0]

    def evolve(self, word: Iterable, phi: np.ndarray | None = None) -> np.ndarray:
        v = self.initial if phi is None else phi
        for a in word:
            try:
                v = self.operators[a] @ v
            except KeyError:
                raise UnknownSymbol(f"symbol {a!r} not in alphabet {self.alphabet!r}") from None
        return v

    def block_norms(self, phi: np.ndarray) -> np.ndarray:
        return np.linalg.norm(phi.reshape(len(self.classical_states), self.block), axis=1)


def lift_qfac(a: Qfac) -> LiftedQfac:
    """M(sigma) = sum_s |delta(s, sigma)><s| (x) U(s, sigma).

    M(sigma) is unitary only when delta(., sigma) permutes S; otherwise it
    merges blocks and is merely norm-preserving on product vectors |s>|psi>.
    """
    states = a.classical_states
    idx = {s: i for i, s in enumerate(states)}
    k, n = len(states), a.dim
    ket = np.zeros(k, dtype=complex)
    ket[idx[a.start]] = 1.0
    ops = {}
    for sym in a.alphabet:
        m = np.zeros((k * n, k * n), dtype=complex)
        for s in states:
            t = a.delta[(s, sym)]
            m[idx[t] * n:(idx[t] + 1) * n, idx[s] * n:(idx[s] + 1) * n] = a.unitaries[(s, sym)]
        ops[sym] = m
    projs = {}
    for g in a.outcomes:
        p = np.zeros((k * n, k * n), dtype=complex)
        for s in states:
            p[idx[s] * n:(idx[s] + 1) * n, idx[s] * n:(idx[s] + 1) * n] = \
                a.measurements[s].projector(g)
        projs[g] = p
    return LiftedQfac(states, a.alphabet, n, np.kron(ket, a.initial), ops, projs)


def lifted_outcome_prob(lq: LiftedQfac, word: Iterable, outcome: Hashable) -> float:
    if outcome not in lq.projectors:
        raise UnknownOutcome(f"outcome {outcome!r} not in {tuple(lq.projectors)!r}")
    return _prob(lq.projectors[outcome] @ lq.evolve(word))


def mo_as_qfac(a: Mo1Qfa) -> Qfac:
    """One-classical-state 1QFAC with the data of an MO-1QFA."""
    acc = sorted(a.accepting)
    rej = sorted(set(range(a.dim)) - set(a.accepting))
    meas = ProjectiveMeasurement.from_subspaces(a.dim, {"a": acc, "r": rej})
    return Qfac(("s",), a.alphabet, "s", a.initial, {("s", x): "s" for x in a.alphabet},
                {("s", x): u for x, u in a.unitaries.items()}, {"s": meas}, a.basis)


def check_probability(p: float, tol: float = TOL) -> bool:
    return -tol <= p <= 1 + tol
