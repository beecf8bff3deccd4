"""Turing machines with deterministic classical control and a quantum tape.

The control reads only the classical tape, so halting never depends on the
quantum contents. The quantum tape is simulated densely over a finite
window of qubits; cells outside the window hold |0>.

Tape conventions
----------------
* classical input ``x`` occupies cells 1..|x|; the classical head starts on cell 0
* quantum input ``psi`` occupies cells 1..n; the quantum head starts on cell 0
* two-qubit gates act on (head, head+1) with the head qubit as control
* qubits are ordered left to right as most to least significant
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (InvalidInput, InvalidMachine, MalformedOutput, NoQuantumOutput,
                     WindowOverflow)
from .linalg import TOL, StateVector

BLANK = "_"
SYMBOLS = ("0", "1", BLANK)
MOVES = {"L": -1, "N": 0, "R": 1}

_S2 = 1 / math.sqrt(2)
GATE_MATRICES = {
    "ID": np.eye(2, dtype=complex),
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "S": np.diag([1, 1j]).astype(complex),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
}
GATES = tuple(GATE_MATRICES)
GATE_ARITY = {g: 1 if GATE_MATRICES[g].shape[0] == 2 else 2 for g in GATES}

DEFAULT_WINDOW_CAP = 20


class Transition(NamedTuple):
    gate: str
    qmove: str
    write: str
    cmove: str
    next: str


@dataclass(frozen=True, eq=False)
class DcqMachine:
    """Control states plus the partial transition map (state, symbol) -> Transition.

    Every non-halting state must be defined on all of 0, 1 and blank; the
    halting state on none of them.
    """

    states: tuple
    delta: Mapping
    start: str = "qs"
    halt: str = "qh"

    def __post_init__(self) -> None:
        states = tuple(dict.fromkeys(self.states))
        if self.start not in states or self.halt not in states:
            raise InvalidMachine("start and halt must be control states")
        if self.start == self.halt:
            raise InvalidMachine("start and halt must be distinct")
        delta = {}
        for key, tr in self.delta.items():
            tr = Transition(*tr)
            q, a = key
            if q not in states or a not in SYMBOLS:
                raise InvalidMachine(f"transition on unknown pair {key!r}")
            if tr.gate not in GATE_MATRICES or tr.qmove not in MOVES or tr.cmove not in MOVES:
                raise InvalidMachine(f"bad transition {key!r} -> {tr!r}")
            if tr.write not in SYMBOLS or tr.next not in states:
                raise InvalidMachine(f"bad transition {key!r} -> {tr!r}")
            delta[(q, a)] = tr
        for q in states:
            for a in SYMBOLS:
                if q == self.halt and (q, a) in delta:
                    raise InvalidMachine("the halting state must have no transitions")
                if q != self.halt and (q, a) not in delta:
                    raise InvalidMachine(f"transition missing for ({q!r}, {a!r})")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "delta", delta)

    def __len__(self) -> int:
        return len(self.states)

    def ordered_states(self) -> list:
        """States as q_0 = start, ..., q_{nu+1} = halt (others in declaration order)."""
        middle = [q for q in self.states if q not in (self.start, self.halt)]
        return [self.start] + middle + [self.halt]


class QuantumWindow:
    """Dense state of the qubits in cells origin .. origin+n-1; |0> elsewhere."""

    def __init__(self, origin: int, state: np.ndarray, cap: int = DEFAULT_WINDOW_CAP):
        state = np.asarray(state, dtype=complex).reshape(-1)
        n = int(round(math.log2(state.shape[0])))
        if 2 ** n != state.shape[0]:
            raise InvalidInput("quantum input dimension must be a power of two")
        if n > cap:
            raise WindowOverflow(f"quantum input needs {n} qubits, cap is {cap}")
        self.origin = origin
        self.n = n
        self.cap = cap
        self.state = state.reshape((2,) * n) if n else state.reshape(())

    def copy(self) -> "QuantumWindow":
        w = QuantumWindow.__new__(QuantumWindow)
        w.origin, w.n, w.cap, w.state = self.origin, self.n, self.cap, self.state.copy()
        return w

    @property
    def end(self) -> int:
        """One past the rightmost cell of the window."""
        return self.origin + self.n

    def vector(self) -> np.ndarray:
        return self.state.reshape(-1)

    def cover(self, lo: int, hi: int) -> None:
        """Grow the window with |0> qubits until it contains cells lo..hi."""
        if self.n == 0:
            self.origin = lo
        new_lo, new_hi = min(lo, self.origin), max(hi, self.end - 1 if self.n else hi)
        n = new_hi - new_lo + 1
        if n == self.n and new_lo == self.origin:
            return
        if n > self.cap:
            raise WindowOverflow(f"quantum window would need {n} qubits, cap is {self.cap}")
        grown = np.zeros((2,) * n, dtype=complex)
        left = self.origin - new_lo if self.n else 0
        idx = (0,) * left + (slice(None),) * self.n + (0,) * (n - left - self.n)
        grown[idx] = self.state if self.n else 1.0
        self.origin, self.n, self.state = new_lo, n, grown

    def apply(self, gate: str, pos: int, matrix: np.ndarray | None = None) -> None:
        """Apply ``gate`` (or an explicit ``matrix``) at cell ``pos`` (and pos+1)."""
        mat = GATE_MATRICES[gate] if matrix is None else matrix
        if matrix is None and gate == "ID":
            return
        if mat.shape[0] == 2:
            self.cover(pos, pos)
            ax = pos - self.origin
            out = np.tensordot(mat, self.state, axes=([1], [ax]))
            self.state = np.moveaxis(out, 0, ax)
        else:
            self.cover(pos, pos + 1)
            ax = pos - self.origin
            out = np.tensordot(mat.reshape(2, 2, 2, 2), self.state, axes=([2, 3], [ax, ax + 1]))
            self.state = np.moveaxis(out, (0, 1), (ax, ax + 1))

    def norm(self) -> float:
        return float(np.linalg.norm(self.state))

    def extract(self, head: int) -> StateVector:
        """Quantum output: cells head+1 .. rightmost window cell.

        Window qubits at or left of the head must carry |0> (amplitude mass
        on any nonzero value below 1e-9), otherwise MalformedOutput.
        """
        if self.n == 0 or self.end - 1 <= head:
            outside = self.vector()
            if self.n:
                mass = 1.0 - abs(outside[0]) ** 2
                if mass > TOL:
                    raise MalformedOutput(f"qubits left of the output carry mass {mass:.3g}")
            return StateVector(np.ones(1))
        k = max(0, head + 1 - self.origin)
        t = self.state
        if k:
            flat = t.reshape(2 ** k, -1)
            mass = float(np.sum(np.abs(flat[1:]) ** 2))
            if mass > TOL:
                raise MalformedOutput(f"qubits left of the output carry mass {mass:.3g}")
            t = flat[0]
        v = np.asarray(t).reshape(-1)
        v = v / np.linalg.norm(v)
        pad = max(0, self.origin - (head + 1))
        if pad:
            z = np.zeros(2 ** pad, dtype=complex)
            z[0] = 1.0
            v = np.kron(z, v)
        return StateVector(v)


@dataclass
class DcqConfiguration:
    """Mutable configuration; only the step functions of this module touch it."""

    tape: dict
    head: int
    window: QuantumWindow
    qhead: int
    control: str
    steps: int = 0

    def copy(self) -> "DcqConfiguration":
        return DcqConfiguration(dict(self.tape), self.head, self.window.copy(), self.qhead,
                                self.control, self.steps)

    def read(self) -> str:
        return self.tape.get(self.head, BLANK)

    def classical_view(self) -> tuple:
        """(control, head, nonblank tape cells) for determinism checks."""
        return (self.control, self.head,
                tuple(sorted((k, v) for k, v in self.tape.items() if v != BLANK)))

    def tape_string(self, lo: int, hi: int) -> str:
        return "".join(self.tape.get(i, BLANK) for i in range(lo, hi + 1))


class Halted(NamedTuple):
    configuration: DcqConfiguration


class TraceEntry(NamedTuple):
    step: int
    control: str
    head: int
    read: str
    gate: str
    qhead: int

    def line(self) -> str:
        return "\t".join(map(str, self))


class DcqOutput(NamedTuple):
    y: str
    quantum: StateVector
    steps: int


@dataclass(frozen=True)
class BudgetExceeded:
    """Returned (not raised) when the budget runs out before halting."""

    steps: int
    configuration: DcqConfiguration = field(repr=False)


def _check_bits(x: str, allow_blank: bool) -> None:
    ok = set(SYMBOLS) if allow_blank else {"0", "1"}
    if not set(x) <= ok:
        raise InvalidInput(f"classical input {x!r} has symbols outside {sorted(ok)}")


def dcq_init(m: DcqMachine, x: str = "", psi: StateVector | np.ndarray | None = None,
             window_cap: int = DEFAULT_WINDOW_CAP, allow_blank: bool = False
             ) -> DcqConfiguration:
    """Initial configuration on input (x, psi); ``psi=None`` is the empty quantum input.

    ``allow_blank`` admits blanks inside x, as needed for inputs ``p_x``.
    """
    _check_bits(x, allow_blank)
    tape = {i + 1: s for i, s in enumerate(x) if s != BLANK}
    if psi is None:
        window = QuantumWindow(1, np.ones(1), window_cap)
    else:
        amps = psi.amplitudes if isinstance(psi, StateVector) else StateVector(psi).amplitudes
        window = QuantumWindow(1, amps, window_cap)
    return DcqConfiguration(tape, 0, window, 0, m.start)


def _step_inplace(c: DcqConfiguration, m: DcqMachine) -> TraceEntry:
    a = c.read()
    tr = m.delta[(c.control, a)]
    entry = TraceEntry(c.steps, c.control, c.head, a, tr.gate, c.qhead)
    c.window.apply(tr.gate, c.qhead)
    c.qhead += MOVES[tr.qmove]
    if tr.write == BLANK:
        c.tape.pop(c.head, None)
    else:
        c.tape[c.head] = tr.write
    c.head += MOVES[tr.cmove]
    c.control = tr.next
    c.steps += 1
    return entry


def dcq_step(c: DcqConfiguration, m: DcqMachine) -> DcqConfiguration | Halted:
    """One transition on a copy of ``c``; Halted if ``c`` is already halted."""
    if c.control == m.halt:
        return Halted(c)
    c2 = c.copy()
    _step_inplace(c2, m)
    return c2


def extract_classical(c: DcqConfiguration) -> str:
    out = []
    i = c.head + 1
    while c.tape.get(i, BLANK) != BLANK:
        s = c.tape[i]
        if s not in ("0", "1"):
            raise MalformedOutput(f"non-bit symbol {s!r} in the classical output")
        out.append(s)
        i += 1
    return "".join(out)


def extract_output(c: DcqConfiguration) -> DcqOutput:
    return DcqOutput(extract_classical(c), c.window.extract(c.qhead), c.steps)


def dcq_execute(m: DcqMachine, c: DcqConfiguration, step_budget: int,
                trace: list | None = None, on_step=None) -> DcqOutput | BudgetExceeded:
    """Run ``c`` in place until halting or until ``step_budget`` steps were taken."""
    if step_budget < 0:
        raise ValueError("step_budget must be non-negative")
    while c.control != m.halt:
        if c.steps >= step_budget:
            return BudgetExceeded(c.steps, c)
        entry = _step_inplace(c, m)
        if trace is not None:
            trace.append(entry)
        if on_step is not None:
            on_step(c)
    return extract_output(c)


def dcq_run(m: DcqMachine, x: str = "", psi=None, step_budget: int = 10_000,
            window_cap: int = DEFAULT_WINDOW_CAP, trace: list | None = None,
            allow_blank: bool = False, on_step=None) -> DcqOutput | BudgetExceeded:
    """Run ``m`` on (x, psi). Pass a list as ``trace`` to collect TraceEntry rows."""
    c = dcq_init(m, x, psi, window_cap, allow_blank)
    return dcq_execute(m, c, step_budget, trace, on_step)


class Decision(NamedTuple):
    verdict: str
    p1: float
    steps: int


def first_qubit_one_prob(v: StateVector) -> float:
    amps = v.amplitudes
    if amps.shape[0] < 2:
        raise NoQuantumOutput("the quantum output register is empty")
    half = amps.shape[0] // 2
    return float(np.sum(np.abs(amps[half:]) ** 2))


def dcq_decide(m: DcqMachine, x: str, step_budget: int = 10_000,
               window_cap: int = DEFAULT_WINDOW_CAP) -> Decision | BudgetExceeded:
    """Measure the first output qubit: accept if P(1) > 2/3, reject if P(0) > 2/3."""
    out = dcq_run(m, x, None, step_budget, window_cap)
    if isinstance(out, BudgetExceeded):
        return out
    p1 = first_qubit_one_prob(out.quantum)
    if p1 > 2 / 3:
        verdict = "accept"
    elif 1 - p1 > 2 / 3:
        verdict = "reject"
    else:
        verdict = "inconclusive"
    return Decision(verdict, p1, out.steps)


def machine_from_table(rows: Sequence, start: str = "qs", halt: str = "qh",
                       states: Sequence | None = None) -> DcqMachine:
    """Build a machine from rows ``(q, a, gate, qmove, write, cmove, next)``."""
    delta = {}
    names = list(states or [])
    for q, a, gate, d, w, d2, nxt in rows:
        delta[(q, a)] = Transition(gate, d, w, d2, nxt)
        for s in (q, nxt):
            if s not in names:
                names.append(s)
    for s in (start, halt):
        if s not in names:
            names.append(s)
    return DcqMachine(tuple(names), delta, start, halt)
