"""Deterministic finite automata, minimisation and structural detectors.

Also hosts the concrete language families used throughout the package:
``L0(m)`` (words ending in 0 whose length is a positive multiple of m),
``L0`` (words ending in 0), ``L(m)`` (positive multiples of m in length),
``Lz(m)`` (contains z as a subsequence, length a positive multiple of m)
and its four-state instance ``L0(2)``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import InvalidDfa, InvalidParameter, UnknownSymbol

State = Hashable
Symbol = Hashable


@dataclass(frozen=True, eq=False)
class Dfa:
    """A complete DFA. ``delta`` maps ``(state, symbol)`` to a state."""

    states: tuple
    alphabet: tuple
    delta: Mapping
    start: State
    accepting: frozenset

    def __post_init__(self) -> None:
        states = tuple(dict.fromkeys(self.states))
        alphabet = tuple(dict.fromkeys(self.alphabet))
        accepting = frozenset(self.accepting)
        delta = dict(self.delta)
        sset = set(states)
        if self.start not in sset:
            raise InvalidDfa(f"start state {self.start!r} is not a state")
        if not accepting <= sset:
            raise InvalidDfa(f"accepting states {sorted(map(str, accepting - sset))} are not states")
        for s, a in product(states, alphabet):
            if (s, a) not in delta:
                raise InvalidDfa(f"transition missing for ({s!r}, {a!r})")
            if delta[(s, a)] not in sset:
                raise InvalidDfa(f"transition ({s!r}, {a!r}) leads to unknown {delta[(s, a)]!r}")
        extra = set(delta) - set(product(states, alphabet))
        if extra:
            raise InvalidDfa(f"transitions on unknown state/symbol pairs: {sorted(map(str, extra))}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "accepting", accepting)
        object.__setattr__(self, "delta", delta)

    def step(self, state: State, symbol: Symbol) -> State:
        try:
            return self.delta[(state, symbol)]
        except KeyError:
            raise UnknownSymbol(f"symbol {symbol!r} not in alphabet {self.alphabet!r}") from None

    def run_from(self, state: State, word: Iterable[Symbol]) -> State:
        for a in word:
            state = self.step(state, a)
        return state

    def accepts(self, word: Iterable[Symbol]) -> bool:
        return self.run_from(self.start, word) in self.accepting

    def __len__(self) -> int:
        return len(self.states)


def dfa_run(d: Dfa, word: Iterable[Symbol]) -> tuple:
    """Return ``(final_state, accepted)``."""
    final = d.run_from(d.start, word)
    return final, final in d.accepting


def words(alphabet: Sequence[Symbol], max_len: int, min_len: int = 0) -> Iterator[tuple]:
    """All words over ``alphabet`` by increasing length, then lexicographically."""
    for n in range(min_len, max_len + 1):
        yield from product(alphabet, repeat=n)


def reachable_states(d: Dfa) -> list:
    """States reachable from the start, in breadth-first order."""
    seen = {d.start: None}
    queue = deque([d.start])
    while queue:
        s = queue.popleft()
        for a in d.alphabet:
            t = d.delta[(s, a)]
            if t not in seen:
                seen[t] = None
                queue.append(t)
    return list(seen)


def minimize_dfa(d: Dfa) -> Dfa:
    """Minimal DFA for L(d), via Hopcroft partition refinement.

    Unreachable states are dropped first. Each block is named after its
    member that comes first in breadth-first order from the start, so the
    labels of an already-minimal automaton are kept.
    """
    order = reachable_states(d)
    index = {s: i for i, s in enumerate(order)}
    acc = frozenset(s for s in order if s in d.accepting)
    rej = frozenset(order) - acc
    partition = [blk for blk in (acc, rej) if blk]

    inverse = {(t, a): set() for t in order for a in d.alphabet}
    for s in order:
        for a in d.alphabet:
            inverse[(d.delta[(s, a)], a)].add(s)

    work = [min(partition, key=len)] if len(partition) == 2 else []
    while work:
        splitter = work.pop()
        for a in d.alphabet:
            pre = set()
            for t in splitter:
                pre |= inverse[(t, a)]
            if not pre:
                continue
            refined = []
            for blk in partition:
                inside = blk & pre
                outside = blk - pre
                if inside and outside:
                    refined += [inside, outside]
                    if blk in work:
                        work.remove(blk)
                        work += [inside, outside]
                    else:
                        work.append(min(inside, outside, key=len))
                else:
                    refined.append(blk)
            partition = refined

    block_of = {}
    for blk in partition:
        rep = min(blk, key=index.__getitem__)
        for s in blk:
            block_of[s] = rep
    reps = sorted(set(block_of.values()), key=index.__getitem__)
    delta = {(r, a): block_of[d.delta[(r, a)]] for r in reps for a in d.alphabet}
    return Dfa(tuple(reps), d.alphabet, delta, block_of[d.start],
               frozenset(r for r in reps if r in d.accepting))


def nerode_classes(d: Dfa) -> int:
    """Number of Myhill-Nerode classes of L(d)."""
    return len(minimize_dfa(d).states)


# -- pair-graph searches ---------------------------------------------------

def _bfs_word(d: Dfa, sources: tuple, is_target, nonempty: bool) -> tuple | None:
    """Shortest word driving the tuple of states ``sources`` into a target tuple.

    Runs breadth-first search over the product automaton, trying symbols in
    alphabet order, so the returned word is the lexicographically least
    among the shortest ones.
    """
    if not nonempty and is_target(sources):
        return ()
    parent = {sources: None}
    queue = deque([sources])
    while queue:
        cur = queue.popleft()
        for a in d.alphabet:
            nxt = tuple(d.delta[(s, a)] for s in cur)
            if is_target(nxt):
                word = [a]
                node = cur
                while parent[node] is not None:
                    node, sym = parent[node]
                    word.append(sym)
                return tuple(reversed(word))
            if nxt not in parent:
                parent[nxt] = (cur, a)
                queue.append(nxt)
    return None


def distinguishing_word(d: Dfa, p: State, q: State) -> tuple | None:
    """Shortest z such that exactly one of delta*(p,z), delta*(q,z) accepts."""
    return _bfs_word(d, (p, q),
                     lambda st: (st[0] in d.accepting) != (st[1] in d.accepting),
                     nonempty=False)


def distinguishable_pairs(d: Dfa) -> set:
    """Table-filling: the set of unordered distinguishable state pairs."""
    marked = set()
    states = d.states
    for p, q in product(states, states):
        if p != q and (p in d.accepting) != (q in d.accepting):
            marked.add(frozenset((p, q)))
    changed = True
    while changed:
        changed = False
        for i, p in enumerate(states):
            for q in states[i + 1:]:
                key = frozenset((p, q))
                if key in marked:
                    continue
                for a in d.alphabet:
                    pa, qa = d.delta[(p, a)], d.delta[(q, a)]
                    if pa != qa and frozenset((pa, qa)) in marked:
                        marked.add(key)
                        changed = True
                        break
    return marked


@dataclass(frozen=True)
class FConstructionWitness:
    q1: State
    q2: State
    t: tuple
    z: tuple

    def check(self, d: Dfa) -> bool:
        return (self.q1 != self.q2 and len(self.t) > 0 and len(self.z) > 0
                and d.run_from(self.q1, self.z) == self.q2
                and d.run_from(self.q2, self.z) == self.q2
                and d.run_from(self.q1, self.t) == self.q1
                and d.run_from(self.q2, self.t) == self.q2)


@dataclass(frozen=True)
class Fig3Witness:
    """p --x--> q, q --x--> q, q --y--> p, with p, q told apart by z."""

    p: State
    q: State
    x: tuple
    y: tuple
    z: tuple

    def check(self, d: Dfa) -> bool:
        return (self.p != self.q and len(self.x) > 0 and len(self.y) > 0
                and d.run_from(self.p, self.x) == self.q
                and d.run_from(self.q, self.x) == self.q
                and d.run_from(self.q, self.y) == self.p
                and ((d.run_from(self.p, self.z) in d.accepting)
                     != (d.run_from(self.q, self.z) in d.accepting)))


def detect_f_construction(d: Dfa) -> FConstructionWitness | None:
    """Search the minimal DFA of L(d) for an F-construction.

    Ordered pairs are tried in breadth-first state order; the words are the
    shortest ones found by product-automaton search.
    """
    m = minimize_dfa(d)
    for q1, q2 in product(m.states, m.states):
        if q1 == q2:
            continue
        z = _bfs_word(m, (q1, q2), lambda st, q2=q2: st == (q2, q2), nonempty=True)
        if z is None:
            continue
        t = _bfs_word(m, (q1, q2), lambda st, q1=q1, q2=q2: st == (q1, q2), nonempty=True)
        if t is None:
            continue
        return FConstructionWitness(q1, q2, t, z)
    return None


def detect_fig3_construction(d: Dfa) -> Fig3Witness | None:
    """Search the minimal DFA of L(d) for the construction blocking MM-1QFA."""
    m = minimize_dfa(d)
    distinct = distinguishable_pairs(m)
    for p, q in product(m.states, m.states):
        if p == q or frozenset((p, q)) not in distinct:
            continue
        x = _bfs_word(m, (p, q), lambda st, q=q: st == (q, q), nonempty=True)
        if x is None:
            continue
        y = _bfs_word(m, (q,), lambda st, p=p: st == (p,), nonempty=True)
        if y is None:
            continue
        z = distinguishing_word(m, p, q)
        return Fig3Witness(p, q, x, y, z)
    return None


# -- language families -----------------------------------------------------

BINARY = ("0", "1")


def _check_m(m: int) -> None:
    if not isinstance(m, int) or m < 2:
        raise InvalidParameter(f"m must be an integer >= 2, got {m!r}")


def build_l0m(m: int) -> Dfa:
    """The (m+1)-state DFA for {w0 : |w0| = km, k >= 1} over {0,1}."""
    _check_m(m)
    q = [f"q{i}" for i in range(m + 1)]
    delta = {}
    for i in range(m - 1):
        for a in BINARY:
            delta[(q[i], a)] = q[i + 1]
    delta[(q[m - 1], "0")] = q[m]
    delta[(q[m - 1], "1")] = q[0]
    for a in BINARY:
        delta[(q[m], a)] = q[1]
    return Dfa(tuple(q), BINARY, delta, q[0], frozenset({q[m]}))


def build_l0() -> Dfa:
    """Two-state DFA for {0,1}*0."""
    delta = {("q0", "0"): "q1", ("q0", "1"): "q0",
             ("q1", "0"): "q1", ("q1", "1"): "q0"}
    return Dfa(("q0", "q1"), BINARY, delta, "q0", frozenset({"q1"}))


def build_lm(m: int, alphabet: Sequence[Symbol] = BINARY) -> Dfa:
    """Cycle DFA for words whose length is a positive multiple of m.

    State ``c0`` is the start (length 0, rejecting); ``r0`` is length
    divisible by m and nonzero.
    """
    _check_m(m)
    names = ["c0"] + [f"r{i}" for i in range(1, m)] + ["r0"]
    delta = {}
    for a in alphabet:
        delta[("c0", a)] = "r1"
        for i in range(1, m):
            delta[(f"r{i}", a)] = f"r{(i + 1) % m}"
        delta[("r0", a)] = "r1"
    return Dfa(tuple(names), tuple(alphabet), delta, "c0", frozenset({"r0"}))


def build_lz(z: Sequence[Symbol], alphabet: Sequence[Symbol] | None = None) -> Dfa:
    """(|z|+1)-state DFA for words containing z as a (scattered) subsequence."""
    z = tuple(z)
    if not z:
        raise InvalidParameter("z must be nonempty")
    alphabet = _lz_alphabet(z, alphabet)
    n = len(z)
    delta = {}
    for i in range(n + 1):
        for a in alphabet:
            delta[(f"P{i}", a)] = f"P{n}" if i == n else (f"P{i + 1}" if a == z[i] else f"P{i}")
    return Dfa(tuple(f"P{i}" for i in range(n + 1)), alphabet, delta, "P0",
               frozenset({f"P{n}"}))


def _lz_alphabet(z: tuple, alphabet: Sequence[Symbol] | None) -> tuple:
    if alphabet is None:
        return tuple(sorted(set(BINARY) | set(z), key=str))
    alphabet = tuple(alphabet)
    if not set(z) <= set(alphabet):
        raise InvalidParameter(f"z uses symbols outside the alphabet {alphabet!r}")
    return alphabet


def build_lzm(z: Sequence[Symbol], m: int, alphabet: Sequence[Symbol] | None = None) -> Dfa:
    """DFA with states S_ij (i = 0..n matched prefix of z, j = 1..m length mod m).

    Start ``S0,1``; the only accepting state is ``Sn,1``. The alphabet
    defaults to {0,1} together with the symbols of z.
    """
    _check_m(m)
    z = tuple(z)
    if not z:
        raise InvalidParameter("z must be nonempty")
    alphabet = _lz_alphabet(z, alphabet)
    n = len(z)

    def name(i: int, j: int) -> str:
        return f"S{i},{j}"

    delta = {}
    for i in range(n + 1):
        for j in range(1, m + 1):
            nj = (j % m) + 1
            for a in alphabet:
                if i == n:
                    delta[(name(i, j), a)] = name(n, nj)
                elif a == z[i]:
                    delta[(name(i, j), a)] = name(i + 1, nj)
                else:
                    delta[(name(i, j), a)] = name(i, nj)
    states = tuple(name(i, j) for i in range(n + 1) for j in range(1, m + 1))
    return Dfa(states, alphabet, delta, name(0, 1), frozenset({name(n, 1)}))


def build_l0_2() -> Dfa:
    """Four-state DFA for words of even positive length containing a 0."""
    delta = {("q0", "0"): "q2", ("q0", "1"): "q1",
             ("q1", "0"): "q3", ("q1", "1"): "q0",
             ("q2", "0"): "q3", ("q2", "1"): "q3",
             ("q3", "0"): "q2", ("q3", "1"): "q2"}
    return Dfa(("q0", "q1", "q2", "q3"), BINARY, delta, "q0", frozenset({"q3"}))


def is_permutation_dfa(d: Dfa) -> bool:
    return all(len({d.delta[(s, a)] for s in d.states}) == len(d.states) for a in d.alphabet)
