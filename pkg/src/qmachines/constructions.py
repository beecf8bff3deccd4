"""Machine constructions: DFA to 1QFAC, set-operation products, and the
logarithmic-size divisibility automaton with the acceptors built from it."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dfa import BINARY, Dfa, build_l0, build_lz
from .errors import AlphabetMismatch, InvalidParameter, SearchExhausted
from .linalg import ProjectiveMeasurement, projector_onto
from .qfa import Mo1Qfa, Qfac

SETOPS = ("intersect", "union", "dfa_minus_mo", "mo_minus_dfa")


def dfa_to_qfac(d: Dfa) -> Qfac:
    """Zero-error 1QFAC with one quantum basis state and the DFA's classical states."""
    one = np.eye(1)
    proj = np.ones((1, 1))
    zero = np.zeros((1, 1))
    meas = {s: ProjectiveMeasurement(("a", "r"), (proj, zero) if s in d.accepting else (zero, proj))
            for s in d.states}
    return Qfac(d.states, d.alphabet, d.start, np.ones(1), d.delta,
                {(s, a): one for s in d.states for a in d.alphabet}, meas,
                outcomes=("a", "r"))


def compose_setop(d: Dfa, a: Mo1Qfa, op: str) -> Qfac:
    """1QFAC recognising a set combination of L(d) and the language of ``a``.

    The classical part is ``d``; every classical state applies the same
    U(sigma) from ``a``. Only the final measurements differ between ops:

    ========== ======================= =======================
    op         P_{s,a} for s in F       P_{s,a} for s not in F
    ========== ======================= =======================
    intersect  P_acc                   0
    union      I                       P_acc
    dfa_minus_mo  I - P_acc            0
    mo_minus_dfa  0                    I - P_acc
    ========== ======================= =======================
    """
    if op not in SETOPS:
        raise InvalidParameter(f"op must be one of {SETOPS}, got {op!r}")
    if set(d.alphabet) != set(a.alphabet):
        raise AlphabetMismatch(f"DFA alphabet {d.alphabet!r} != QFA alphabet {a.alphabet!r}")
    n = a.dim
    eye = np.eye(n)
    p_acc = projector_onto(n, a.accepting)
    zero = np.zeros((n, n))
    table = {
        "intersect": (p_acc, zero),
        "union": (eye, p_acc),
        "dfa_minus_mo": (eye - p_acc, zero),
        "mo_minus_dfa": (zero, eye - p_acc),
    }[op]
    meas = {}
    for s in d.states:
        pa = table[0] if s in d.accepting else table[1]
        meas[s] = ProjectiveMeasurement(("a", "r"), (pa, eye - pa))
    unitaries = {(s, x): a.unitaries[x] for s in d.states for x in d.alphabet}
    return Qfac(d.states, d.alphabet, d.start, a.initial, d.delta, unitaries, meas,
                basis=a.basis, outcomes=("a", "r"), metadata={"op": op})


def setop_expected(op: str, in_l1: bool, p_mo: float) -> float:
    """Acceptance probability the case table predicts from the two factors."""
    return {
        "intersect": p_mo if in_l1 else 0.0,
        "union": 1.0 if in_l1 else p_mo,
        "dfa_minus_mo": (1.0 - p_mo) if in_l1 else 0.0,
        "mo_minus_dfa": 0.0 if in_l1 else (1.0 - p_mo),
    }[op]


# -- divisibility automaton ------------------------------------------------

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def residue_accept_probs(m: int, multipliers: Sequence[int]) -> np.ndarray:
    """Closed form: acceptance at length n is ((1/d) sum_i cos(2 pi k_i n / m))^2."""
    k = np.asarray(multipliers, dtype=float)
    r = np.arange(m, dtype=float)
    amp = np.cos(2 * np.pi * np.outer(r, k) / m).mean(axis=1)
    return amp ** 2


def _householder_to_e0(v: np.ndarray) -> np.ndarray:
    """Real orthogonal reflection W with W v = e0 (v real, unit)."""
    n = v.shape[0]
    e0 = np.zeros(n)
    e0[0] = 1.0
    u = v - e0
    if np.linalg.norm(u) < 1e-15:
        return np.eye(n)
    u /= np.linalg.norm(u)
    return np.eye(n) - 2 * np.outer(u, u)


def rotation_mo(m: int, multipliers: Sequence[int], alphabet: Sequence = ("a",)) -> Mo1Qfa:
    """MO-1QFA of d planar rotations by 2 pi k_i / m, every symbol acting alike.

    The rotations act on blocks {|i,0>, |i,1>} and the automaton starts in
    the uniform superposition of the |i,0>. The basis is rotated by a real
    reflection taking that superposition to |0>, which becomes the single
    accepting basis state, so acceptance is |<psi0|R^n|psi0>|^2.
    """
    d = len(multipliers)
    rot = np.zeros((2 * d, 2 * d))
    for i, k in enumerate(multipliers):
        th = 2 * np.pi * k / m
        c, s = np.cos(th), np.sin(th)
        rot[2 * i:2 * i + 2, 2 * i:2 * i + 2] = [[c, -s], [s, c]]
    psi = np.zeros(2 * d)
    psi[0::2] = 1 / np.sqrt(d)
    w = _householder_to_e0(psi)
    u = w @ rot @ w.T
    init = np.zeros(2 * d)
    init[0] = 1.0
    basis = tuple(f"b{j}" for j in range(2 * d))
    return Mo1Qfa(tuple(alphabet), init, {x: u for x in alphabet}, frozenset({0}), basis)


@dataclass(frozen=True, eq=False)
class DivisibilityAutomaton:
    m: int
    multipliers: tuple
    automaton: Mo1Qfa
    achieved_eps: float
    attempts: int

    @property
    def d(self) -> int:
        return len(self.multipliers)

    @property
    def provenance(self) -> dict:
        return {"m": self.m, "K": list(self.multipliers), "eps_hat": self.achieved_eps}


#: random multiplier sets tried per size d before doubling d
TRIES_PER_SIZE = 64


def build_divisibility_mo(m: int, eps: float, seed: int = 0,
                          alphabet: Sequence = ("a",)) -> DivisibilityAutomaton:
    """Search multiplier sets K until every nonzero residue accepts with prob < eps.

    Sizes d = 1, 2, 4, ... are tried, each with up to ``TRIES_PER_SIZE``
    random K drawn without replacement from {1..m-1}; the residue sweep is
    exhaustive. At d = m-1 the full set is used, for which the amplitude at
    every nonzero residue is -1/(m-1).
    """
    if not isinstance(m, int) or m < 3 or not is_prime(m):
        raise InvalidParameter(f"m must be an odd prime, got {m!r}")
    if not 0 < eps < 1:
        raise InvalidParameter(f"eps must lie in (0, 1), got {eps!r}")
    rng = np.random.default_rng(seed)
    attempts = 0
    d = 1
    while True:
        d = min(d, m - 1)
        candidates = ([tuple(range(1, m))] if d == m - 1 else
                      (tuple(sorted(int(k) for k in rng.choice(np.arange(1, m), d, replace=False)))
                       for _ in range(TRIES_PER_SIZE)))
        for ks in candidates:
            attempts += 1
            worst = float(residue_accept_probs(m, ks)[1:].max())
            if worst < eps:
                return DivisibilityAutomaton(m, ks, rotation_mo(m, ks, alphabet), worst, attempts)
        if d == m - 1:
            raise SearchExhausted(
                f"no multiplier set reaches eps={eps} for m={m}; the full set gives "
                f"{1 / (m - 1) ** 2:.3g}")
        d *= 2


def build_l0m_qfac(m: int, eps: float, seed: int = 0) -> Qfac:
    """Two classical states: the {0,1}*0 DFA intersected with length divisibility."""
    div = build_divisibility_mo(m, eps, seed, alphabet=BINARY)
    q = compose_setop(build_l0(), div.automaton, "intersect")
    q.metadata.update(provenance=div.provenance, language="L0(m)", lam=0.5)
    return q


def build_lzm_qfac(z: Sequence, m: int, eps: float, seed: int = 0,
                   alphabet: Sequence | None = None) -> Qfac:
    """|z|+1 classical states: the subsequence DFA intersected with divisibility."""
    lz = build_lz(z, alphabet)
    div = build_divisibility_mo(m, eps, seed, alphabet=lz.alphabet)
    q = compose_setop(lz, div.automaton, "intersect")
    q.metadata.update(provenance=div.provenance, language="Lz(m)", lam=0.5)
    return q
