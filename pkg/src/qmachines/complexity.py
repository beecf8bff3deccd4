"""State-complexity checks for 1QFAC.

The asymptotic lower bound kn = Omega(log m) is audited as the concrete
inequality ``m <= (1 + sqrt(2)/eps) ** (2 k n)``, together with the
separation of reachable lifted vectors belonging to different
Myhill-Nerode classes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Hashable

import numpy as np

from .dfa import Dfa, minimize_dfa
from .errors import InvalidParameter, MarginViolated
from .qfa import LiftedQfac, Qfac, lift_qfac

#: default acceptance threshold when a machine carries no ``lam`` metadata
DEFAULT_LAMBDA = 0.5


def sphere_packing_bound(theta: float, n: int) -> float:
    """Upper bound (1 + 2/theta)^(2n) on theta-separated unit vectors in C^n."""
    if not theta > 0:
        raise InvalidParameter(f"theta must be positive, got {theta!r}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidParameter(f"n must be a positive integer, got {n!r}")
    return (1 + 2 / theta) ** (2 * n)


def greedy_packing(theta: float, n: int, trials: int, rng: np.random.Generator) -> int:
    """Size of a greedily built theta-separated set of random unit vectors in C^n."""
    kept = np.zeros((0, n), dtype=complex)
    for _ in range(trials):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        if kept.shape[0] == 0 or np.min(np.linalg.norm(kept - v, axis=1)) >= theta:
            kept = np.vstack([kept, v])
    return kept.shape[0]


def _key(state: Hashable, vec: np.ndarray, digits: int = 12) -> tuple:
    r = np.round(vec, digits) + 0.0  # drop negative zeros
    return state, r.tobytes()


def reachable_configurations(a: Qfac, ref: Dfa, max_len: int) -> dict:
    """Distinct (reference state, classical state, quantum vector) reached by words <= max_len.

    Words leading to numerically identical configurations are merged, so the
    result covers every word of length <= ``max_len`` without enumerating
    them individually. Values map each key to a representative
    ``(word, ref_state, classical_state, vector)``.
    """
    start = (ref.start, a.start)
    seen = {_key(start, a.initial): ((), ref.start, a.start, a.initial)}
    frontier = list(seen.values())
    for _ in range(max_len):
        nxt = []
        for word, r, s, v in frontier:
            for sym in a.alphabet:
                w = a.unitaries[(s, sym)] @ v
                r2, s2 = ref.delta[(r, sym)], a.delta[(s, sym)]
                k = _key((r2, s2), w)
                if k not in seen:
                    seen[k] = (word + (sym,), r2, s2, w)
                    nxt.append(seen[k])
        frontier = nxt
        if not frontier:
            break
    return seen


def margin_sweep(a: Qfac, ref: Dfa, max_len: int) -> dict:
    """Worst acceptance probabilities over members and non-members up to ``max_len``."""
    worst_member, worst_non = 1.0, 0.0
    wm = wn = None
    for word, r, s, v in reachable_configurations(a, ref, max_len).values():
        p = float(np.linalg.norm(a.measurements[s].projector("a") @ v) ** 2)
        if r in ref.accepting:
            if p < worst_member:
                worst_member, wm = p, word
        elif p > worst_non:
            worst_non, wn = p, word
    return {"min_member": worst_member, "min_member_word": wm,
            "max_nonmember": worst_non, "max_nonmember_word": wn}


@dataclass
class AuditReport:
    m: int
    k: int
    n: int
    eps: float
    lam: float
    bound: float
    bound_holds: bool
    max_len: int
    min_member: float
    max_nonmember: float
    n_vectors: int
    min_cross_distance: float
    required_distance: float
    distance_holds: bool

    def to_json(self) -> str:
        d = asdict(self)
        if math.isinf(d["bound"]):
            d["bound"] = "inf"
        if math.isinf(d["min_cross_distance"]):
            d["min_cross_distance"] = "inf"
        return json.dumps(d, indent=2)

    def csv_row(self, header: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        d = asdict(self)
        if header:
            w.writerow(d)
        w.writerow(d.values())
        return buf.getvalue()


def audit_lower_bound(a: Qfac, ref: Dfa, eps: float, lam: float | None = None,
                      max_len: int | None = None) -> AuditReport:
    """Check m <= (1 + sqrt(2)/eps)^(2kn) and the sqrt(2)*eps separation.

    The margin is spot-checked on all words up to ``max_len`` (default twice
    the number of Nerode classes): members must accept with probability at
    least lam + eps and non-members at most lam - eps.
    """
    if not eps > 0:
        raise InvalidParameter("eps must be positive")
    if lam is None:
        lam = float(a.metadata.get("lam", DEFAULT_LAMBDA))
    minimal = minimize_dfa(ref)
    m = len(minimal.states)
    k, n = a.n_classical, a.dim
    if max_len is None:
        max_len = 2 * m
    sweep = margin_sweep(a, minimal, max_len)
    if sweep["min_member"] < lam + eps - 1e-9 or sweep["max_nonmember"] > lam - eps + 1e-9:
        raise MarginViolated(
            f"margin eps={eps} around lam={lam} violated: min member prob "
            f"{sweep['min_member']:.6g} on {sweep['min_member_word']}, max non-member prob "
            f"{sweep['max_nonmember']:.6g} on {sweep['max_nonmember_word']}")
    bound = (1 + math.sqrt(2) / eps) ** (2 * k * n) if 2 * k * n < 2000 else math.inf

    lifted = lift_qfac(a)
    idx = {s: i for i, s in enumerate(a.classical_states)}
    by_class: dict = {}
    for _, r, s, v in reachable_configurations(a, minimal, max_len).values():
        phi = np.zeros(lifted.dim, dtype=complex)
        phi[idx[s] * n:(idx[s] + 1) * n] = v
        by_class.setdefault(r, {})[_key(None, phi)[1]] = phi
    groups = [np.array(list(g.values())) for g in by_class.values()]
    min_dist = math.inf
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            diff = groups[i][:, None, :] - groups[j][None, :, :]
            min_dist = min(min_dist, float(np.min(np.linalg.norm(diff, axis=2))))
    required = math.sqrt(2) * eps
    return AuditReport(m, k, n, eps, lam, bound, m <= bound, max_len,
                       sweep["min_member"], sweep["max_nonmember"],
                       sum(len(g) for g in groups), min_dist, required,
                       min_dist >= required - 1e-9)


# -- inequality checks on the lifted form -------------------------------------

def contraction_ratio(lq: LiftedQfac, phi1: np.ndarray, phi2: np.ndarray, word) -> float:
    """||M(x)phi1 - M(x)phi2|| / ||phi1 - phi2|| (0 when the inputs coincide)."""
    den = np.linalg.norm(phi1 - phi2)
    if den == 0:
        return 0.0
    return float(np.linalg.norm(lq.evolve(word, phi1) - lq.evolve(word, phi2)) / den)


def projection_gap(p: np.ndarray, phi: np.ndarray, chi: np.ndarray) -> tuple:
    """(| ||P phi||^2 - ||P chi||^2 |, ||phi - chi||)."""
    lhs = abs(np.linalg.norm(p @ phi) ** 2 - np.linalg.norm(p @ chi) ** 2)
    return float(lhs), float(np.linalg.norm(phi - chi))
