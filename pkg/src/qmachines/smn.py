"""Bit encodings of dcq machines, the translation ``s(p) = delta 111 p`` and
a universal machine T run as a step-counted tape interpreter.

T works over a plain {0, 1, blank} tape. Every primitive action -- reading
the scanned cell, writing it, moving one cell, applying one gate, moving the
quantum head -- costs one step. The interpreter's own control only ever
remembers a bounded amount of information (a few symbols and flags); every
distance that depends on the emulated machine or its input is found by
walking the tape.

Tape layout of an encoded configuration ``w q_i a w'`` (head on ``[_]``)::

    enc(w) _ 1^(nu-i) _ 1^(i+1) [_] delta 111 rev(w') rev(a)

where ``enc`` writes each symbol as a bit pair and ``rev`` writes the pairs
of a string right-to-left, each pair reversed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dcq import (BLANK, MOVES, SYMBOLS, BudgetExceeded, DcqConfiguration, DcqMachine,
                  DcqOutput, QuantumWindow, Transition, _step_inplace, dcq_init,
                  extract_output)
from .errors import EmulationMismatch, InvalidArgument, MalformedEncoding

GATE_CODE = {"ID": "000", "H": "001", "S": "010", "T": "011", "SWAP": "100", "CNOT": "101"}
MOVE_CODE = {"L": "00", "N": "01", "R": "11"}
SYMBOL_CODE = {"0": "00", "1": "11", BLANK: "10"}
_GATE_OF = {v: k for k, v in GATE_CODE.items()}
_MOVE_OF = {v: k for k, v in MOVE_CODE.items()}
_SYMBOL_OF = {v: k for k, v in SYMBOL_CODE.items()}
#: cells of a transition block before the target-state field
FIXED_FIELD = 9


def _lookup(table: dict, key, what: str):
    try:
        return table[key]
    except (KeyError, TypeError):
        raise InvalidArgument(f"cannot encode {what} {key!r}") from None


def _unlook(table: dict, bits, what: str):
    try:
        return table[bits]
    except (KeyError, TypeError):
        raise MalformedEncoding(f"{bits!r} does not encode a {what}") from None


def encode_gate(u: str) -> str:
    return _lookup(GATE_CODE, u, "gate")


def encode_move(d: str) -> str:
    return _lookup(MOVE_CODE, d, "move")


def encode_symbol(a: str) -> str:
    return _lookup(SYMBOL_CODE, a, "symbol")


def encode_state(j: int) -> str:
    if not isinstance(j, int) or j < 0:
        raise InvalidArgument(f"state index must be a non-negative int, got {j!r}")
    return "1" * (j + 1) + "00"


def decode_gate(bits: str) -> str:
    return _unlook(_GATE_OF, bits, "gate")


def decode_move(bits: str) -> str:
    return _unlook(_MOVE_OF, bits, "move")


def decode_symbol(bits: str) -> str:
    return _unlook(_SYMBOL_OF, bits, "symbol")


def decode_state(bits: str) -> int:
    j = len(bits) - 3
    if j < 0 or bits != "1" * (j + 1) + "00":
        raise MalformedEncoding(f"{bits!r} does not encode a state")
    return j


def encode_string(w: str) -> str:
    """Pairwise encoding, left to right."""
    return "".join(encode_symbol(a) for a in w)


def reverse_encode(w: str) -> str:
    """Reverse encoding: symbols right to left, each pair written backwards."""
    return "".join(encode_symbol(a)[::-1] for a in reversed(w))


def decode_string(bits: str) -> str:
    if len(bits) % 2:
        raise MalformedEncoding("odd-length symbol encoding")
    return "".join(decode_symbol(bits[k:k + 2]) for k in range(0, len(bits), 2))


def decode_reversed(bits: str) -> str:
    if len(bits) % 2:
        raise MalformedEncoding("odd-length symbol encoding")
    return "".join(decode_symbol(bits[k:k + 2][::-1]) for k in range(0, len(bits), 2))[::-1]


# -- machine encoding ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EncodedMachine:
    machine: DcqMachine
    order: tuple
    delta_bits: str

    @property
    def nu(self) -> int:
        return len(self.order) - 2

    @property
    def c(self) -> int:
        """Constant with |s(p)| = |p| + c."""
        return len(self.delta_bits) + 3


def encode_transition(tr: Transition, index: dict) -> str:
    return (encode_gate(tr.gate) + encode_move(tr.qmove) + encode_symbol(tr.write)
            + encode_move(tr.cmove) + encode_state(index[tr.next]))


def encode_machine(m: DcqMachine) -> EncodedMachine:
    """delta(q_0,0) delta(q_0,1) delta(q_0,_) ... delta(q_nu,_), q_0 = start."""
    order = tuple(m.ordered_states())
    index = {q: j for j, q in enumerate(order)}
    bits = "".join(encode_transition(m.delta[(q, a)], index)
                   for q in order[:-1] for a in SYMBOLS)
    return EncodedMachine(m, order, bits)


def parse_delta(bits: str, start: int = 0, allow_empty: bool = False) -> tuple:
    """Parse transition blocks from ``start`` until a 111 gate field.

    Returns ``(table, end)`` where ``table`` maps (state index, symbol) to
    (gate, qmove, write, cmove, target index) and ``end`` is the index just
    past the 111 separator.
    """
    pos, blocks = start, []
    while True:
        if bits[pos:pos + 3] == "111":
            end = pos + 3
            break
        if pos + FIXED_FIELD > len(bits):
            raise MalformedEncoding("transition table is not terminated by 111")
        head = bits[pos:pos + FIXED_FIELD]
        gate = decode_gate(head[0:3])
        qmove = decode_move(head[3:5])
        write = decode_symbol(head[5:7])
        cmove = decode_move(head[7:9])
        k = pos + FIXED_FIELD
        while k < len(bits) and bits[k] == "1":
            k += 1
        j = decode_state(bits[pos + FIXED_FIELD:k + 2])
        blocks.append((gate, qmove, write, cmove, j))
        pos = k + 2
    if len(blocks) % 3 or not (blocks or allow_empty):
        raise MalformedEncoding("transition count is not a positive multiple of 3")
    table = {(t // 3, SYMBOLS[t % 3]): blk for t, blk in enumerate(blocks)}
    return table, end


def decode_machine(bits: str) -> DcqMachine:
    """Machine with states q0..q_{nu+1} (start q0, halt q_{nu+1}) from delta bits."""
    table, end = parse_delta(bits + "111" if not bits.endswith("111") else bits)
    nu = len(table) // 3 - 1
    names = [f"q{j}" for j in range(nu + 2)]
    delta = {}
    for (j, a), (g, d, w, d2, t) in table.items():
        if t > nu + 1:
            raise MalformedEncoding(f"target state q{t} out of range")
        delta[(names[j], a)] = Transition(g, d, w, d2, names[t])
    return DcqMachine(tuple(names), delta, names[0], names[-1])


def smn_translate(m: DcqMachine, p: str) -> str:
    """s(p) = delta 111 p."""
    if not set(p) <= {"0", "1"}:
        raise InvalidArgument(f"program {p!r} must be a bitstring")
    return encode_machine(m).delta_bits + "111" + p


# -- configuration encoding ------------------------------------------------

class EncodedConfiguration(NamedTuple):
    tape: str
    head: int


class DecodedConfiguration(NamedTuple):
    w: str
    i: int
    a: str
    w_right: str
    nu: int
    delta_bits: str


def encode_configuration(w: str, i: int, a: str, w_right: str, nu: int,
                         delta_bits: str = "") -> EncodedConfiguration:
    """Tape string and head index of the encoding of ``w q_i a w_right``."""
    if not (isinstance(nu, int) and isinstance(i, int) and 0 <= i <= nu):
        raise InvalidArgument(f"need 0 <= i <= nu, got i={i!r}, nu={nu!r}")
    if a not in SYMBOLS or not set(w) <= set(SYMBOLS) or not set(w_right) <= set(SYMBOLS):
        raise InvalidArgument("configuration symbols must be 0, 1 or _")
    left = encode_string(w) + BLANK + "1" * (nu - i) + BLANK + "1" * (i + 1)
    tape = left + BLANK + delta_bits + "111" + reverse_encode(a + w_right)
    return EncodedConfiguration(tape, len(left))


def decode_configuration(tape, head: int | None = None) -> DecodedConfiguration:
    """Inverse of :func:`encode_configuration`.

    ``tape`` is an EncodedConfiguration, a string with ``head`` index, or a
    sparse dict of cells with ``head``.
    """
    if isinstance(tape, EncodedConfiguration):
        tape, head = tape
    if isinstance(tape, dict):
        keys = [k for k, v in tape.items() if v != BLANK] + [head]
        lo, hi = min(keys), max(keys)
        lo -= 2
        tape, head = "".join(tape.get(k, BLANK) for k in range(lo, hi + 1)), head - lo
    if head is None or not 0 <= head < len(tape) or tape[head] != BLANK:
        raise MalformedEncoding("head must rest on a blank inside the tape")
    k = head - 1
    while k >= 0 and tape[k] == "1":
        k -= 1
    right = head - 1 - k
    if right < 1 or k < 0 or tape[k] != BLANK:
        raise MalformedEncoding("missing state block right of the middle blank")
    mid = k
    k -= 1
    while k >= 0 and tape[k] == "1":
        k -= 1
    left = mid - 1 - k
    if k < 0 or tape[k] != BLANK:
        raise MalformedEncoding("missing blank left of the state block")
    end_w = k
    while k > 0 and tape[k - 1] != BLANK:
        k -= 1
    w_bits = tape[k:end_w]
    nu, i = left + right - 1, right - 1
    _, end = parse_delta(tape, head + 1, allow_empty=True)
    stop = tape.find(BLANK, end)
    r = tape[end:] if stop < 0 else tape[end:stop]
    if len(r) < 2:
        raise MalformedEncoding("no encoded cell right of the separator")
    rest = (tape[stop:] if stop >= 0 else "").strip(BLANK)
    if rest or tape[:k].strip(BLANK):
        raise MalformedEncoding("stray symbols outside the encoded configuration")
    a_w = decode_reversed(r)
    return DecodedConfiguration(decode_string(w_bits), i, a_w[0], a_w[1:], nu,
                                tape[head + 1:end - 3])


# -- the universal machine T -----------------------------------------------

class _OutOfBudget(Exception):
    pass


class _Halt(Exception):
    pass


class _T:
    """Head-local primitives of T; every call costs one step."""

    def __init__(self, tape: dict, window: QuantumWindow, budget: int):
        self.tape = tape
        self.head = 0
        self.window = window
        self.qhead = 0
        self.t = 0
        self.budget = budget

    # primitives
    def _tick(self) -> None:
        self.t += 1
        if self.t > self.budget:
            raise _OutOfBudget

    def read(self) -> str:
        self._tick()
        return self.tape.get(self.head, BLANK)

    def write(self, s: str) -> None:
        self._tick()
        if s == BLANK:
            self.tape.pop(self.head, None)
        else:
            self.tape[self.head] = s

    def L(self, n: int = 1) -> None:
        for _ in range(n):
            self._tick()
            self.head -= 1

    def R(self, n: int = 1) -> None:
        for _ in range(n):
            self._tick()
            self.head += 1

    def gate(self, g: str) -> None:
        self._tick()
        self.window.apply(g, self.qhead)

    def qmove(self, d: str) -> None:
        if d != "N":
            self._tick()
            self.qhead += MOVES[d]

    # walks
    def seek_blank(self, step: int) -> None:
        """Move in direction ``step`` until the scanned cell is blank."""
        move = self.R if step > 0 else self.L
        while self.read() != BLANK:
            move()

    def seek_mark(self, step: int) -> None:
        """Move in direction ``step`` until the scanned cell is not blank."""
        move = self.R if step > 0 else self.L
        while self.read() == BLANK:
            move()

    # shifts of blank-free runs
    def carry_right(self) -> None:
        """Shift the run starting here one cell right; a blank stays here.

        Ends on the new last cell of the run.
        """
        c = self.read()
        self.write(BLANK)
        while True:
            self.R()
            s = self.read()
            self.write(c)
            if s == BLANK:
                return
            c = s

    def shift_left(self, k: int) -> None:
        """Shift the run starting here k cells left (k is 1 or 2).

        Ends on the leftmost of the k cells vacated at the old right end.
        """
        while True:
            s = self.read()
            if s == BLANK:
                break
            self.L(k)
            self.write(s)
            self.R(k + 1)
        for _ in range(k):
            self.L()
            self.write(BLANK)

    def shift_right_from_end(self, k: int) -> None:
        """Shift the run ending here k cells right (k is 1 or 2).

        Ends on the blank just left of the shifted run.
        """
        while True:
            s = self.read()
            if s == BLANK:
                break
            self.R(k)
            self.write(s)
            self.L(k + 1)
        for _ in range(k):
            self.R()
            self.write(BLANK)

    # transition-table navigation
    def to_tail(self) -> str:
        """From a block's first cell to the first cell after its 1-run."""
        self.R(FIXED_FIELD)
        while True:
            s = self.read()
            if s != "1":
                return s
            self.R()

    def skip_block(self) -> None:
        self.to_tail()
        self.R(2)

    def at_separator(self) -> bool:
        """Read three cells; True iff they are 111 (ends on the third)."""
        s1 = self.read()
        self.R()
        s2 = self.read()
        self.R()
        s3 = self.read()
        return s1 == s2 == s3 == "1"

    def find_separator(self) -> None:
        """From a block's first cell, stop on the first cell after 111."""
        while not self.at_separator():
            self.L(2)
            self.skip_block()
        self.R()

    def advance_marker(self, first: bool) -> None:
        """Move the blank-pair marker to the tail of the next state group.

        From the head cell; ends on the second marker cell.
        """
        self.R()
        if not first:
            self.seek_blank(+1)
            self.write("0")
            self.R()
            self.write("0")
            self.R()
        self.skip_block()
        self.skip_block()
        self.to_tail()
        self.write(BLANK)
        self.R()
        self.write(BLANK)

    def back_from_marker(self) -> None:
        """From the second marker cell to the head cell."""
        self.L(2)
        self.seek_blank(-1)

    # reversal and decoding
    def reverse_run(self) -> None:
        """Reverse the run right of the blank under the head.

        The run at [h+1, h+m] ends up reversed at [h+2, h+m+1]; the head
        finishes on h+1.
        """
        while True:
            self.R()
            y = self.read()
            if y == BLANK:
                return
            self.R()
            self.shift_left(1)
            self.R()
            self.write(y)
            self.L(2)
            self.seek_blank(-1)

    def decode_from_right(self) -> None:
        """Decode the pair-encoded run left of the blank under the head.

        Decoded symbols fill leftwards from that blank; the head ends on
        the first decoded symbol.
        """
        while True:
            self.L()
            u2 = self.read()
            self.write(BLANK)
            self.L()
            u1 = self.read()
            self.write(BLANK)
            self.R(2)
            self.write(_SYMBOL_OF[u1 + u2])
            self.L(3)
            if self.read() == BLANK:
                self.R(3)
                return
            self.shift_right_from_end(1)
            self.R()
            self.seek_blank(+1)


class UniversalRun(NamedTuple):
    output: DcqOutput
    t_steps: int
    m_steps: int
    prep_steps: int


def _cells(s: str, offset: int = 1) -> dict:
    return {offset + k: c for k, c in enumerate(s) if c != BLANK}


class _Emulator:
    def __init__(self, t: _T):
        self.t = t

    # Stage 0: s(p) _ x  ->  q0 block [_] delta 111 rev(_ p _ x)
    def prepare(self) -> None:
        t = self.t
        t.R()
        t.seek_blank(+1)                       # B: blank between s(p) and x
        t.R()
        if t.read() != BLANK:
            self._encode_x()
            t.seek_blank(-1)
            t.R()
            t.carry_right()                    # encoded x one cell right
            t.seek_blank(-1)                   # hole at B+1
        t.L()
        t.write("1")                           # the separating blank, encoded
        t.R()
        t.write("0")
        t.L()
        # encode p: first park the encoded "_x" three cells further right
        for _ in range(3):
            t.carry_right()
            t.seek_blank(-1)
            t.R()
        t.L()
        t.seek_mark(-1)
        t.seek_blank(-1)                       # head cell
        t.R()
        t.find_separator()                     # first cell of p
        if t.read() == BLANK:
            t.R(3)
            t.shift_left(2)
        else:
            t.carry_right()                    # p one right; its last bit lands on B
            while True:
                s = t.read()
                t.write(BLANK)
                t.R()
                t.write(s)
                t.R()
                t.write(s)
                t.L(3)
                if t.read() == BLANK:
                    t.R(2)
                    t.shift_left(1)
                    break
                t.R(2)
                t.carry_right()
                t.seek_blank(-1)
                t.L(2)
        # reverse the encoding of p _ x
        t.L()
        t.seek_blank(-1)
        t.reverse_run()
        t.R()
        t.shift_left(2)
        # append the reversed blank for the scanned cell
        t.seek_blank(+1)
        t.write("0")
        t.R()
        t.write("1")
        t.seek_blank(-1)
        # q0 block: one 1 right of the middle blank, nu ones left of it
        t.L()
        t.write("1")
        t.R()
        first = True
        while True:
            t.advance_marker(first)
            first = False
            t.R()
            if t.at_separator():
                t.L(3)
                t.write("0")
                t.L()
                t.write("0")
                t.seek_blank(-1)
                return
            t.seek_blank(-1)
            t.back_from_marker()
            t.L()
            t.seek_blank(-1)
            t.L()
            t.seek_blank(-1)
            t.write("1")
            t.seek_blank(+1)
            t.R()
            t.seek_blank(+1)

    def _encode_x(self) -> None:
        """Duplicate each bit of the blank-free run under the head."""
        t = self.t
        while True:
            s = t.read()
            t.R()
            if t.read() == BLANK:
                t.write(s)
                return
            t.carry_right()
            t.seek_blank(-1)
            t.write(s)
            t.R()

    def step(self) -> bool:
        """Emulate one transition; return True when the emulated machine halts."""
        t = self.t
        # 1: read a from the right end
        t.R()
        t.seek_blank(+1)
        t.L()
        a1 = t.read()
        t.L()
        a2 = t.read()
        a_index = SYMBOLS.index(_SYMBOL_OF[a1 + a2])
        # 2: marker walk to the group of q_i
        t.seek_blank(-1)
        first = True
        while True:
            t.L()
            s = t.read()
            while s == "0":
                t.L()
                s = t.read()
            t.write("0")
            t.L()
            if t.read() != "1":
                break
            t.seek_blank(+1)
            t.advance_marker(first)
            first = False
            t.back_from_marker()
        t.R()
        t.seek_blank(+1)
        t.R()
        if not first:
            t.seek_blank(+1)
            t.write("0")
            t.R()
            t.write("0")
            t.R()
        for _ in range(a_index):
            t.skip_block()
        # 3: gate
        g = t.read()
        t.R()
        g += t.read()
        t.R()
        g += t.read()
        t.R()
        t.gate(_GATE_OF[g])
        # 4: quantum head
        d = t.read()
        t.R()
        d += t.read()
        t.R()
        t.qmove(_MOVE_OF[d])
        # 5: write a' (reversed) over the current cell's pair
        w1 = t.read()
        t.write(BLANK)
        t.R()
        w2 = t.read()
        t.write(BLANK)
        t.R()
        t.seek_blank(+1)
        t.L()
        t.write(w1)
        t.L()
        t.write(w2)
        t.seek_blank(-1)
        t.write(w2)
        t.L()
        t.write(w1)
        t.R(2)
        # 6: classical head move; the d' field stays blanked through stage 7
        d1 = t.read()
        t.write(BLANK)
        t.R()
        d2 = t.read()
        t.write(BLANK)
        dmove = _MOVE_OF[d1 + d2]
        if dmove == "R":
            self._move_right(w1, w2)
        elif dmove == "L":
            self._move_left()
        # 7: state update, consuming the target-state ones right to left
        try:
            while True:
                t.R()
                while t.read() == "1":
                    t.R()
                t.L()
                if t.read() != "1":
                    break
                t.write(BLANK)
                self._bump_state()
        except _Halt:
            t.R(2)                             # from the left separator
            t.seek_blank(+1)
            self._restore_fields(d1, d2)
            self._finish()
            return True
        t.L(2)
        t.seek_blank(-1)
        t.L()
        while t.read() == "1":
            t.L()
        if t.read() == "0":
            t.write(BLANK)
            t.L()
            while t.read() == "0":
                t.write("1")
                t.L()
            t.write("1")
            t.R()
            t.seek_blank(+1)
        t.R()
        t.seek_blank(+1)
        self._restore_fields(d1, d2)
        t.seek_blank(-1)
        return False

    def _restore_fields(self, d1: str, d2: str) -> None:
        """From the head cell: put back the d' bits and the consumed ones."""
        t = self.t
        t.R()
        t.seek_blank(+1)
        t.write(d1)
        t.R()
        t.write(d2)
        t.R()
        while t.read() == "1":
            t.R()
        while t.read() == BLANK:
            t.write("1")
            t.R()

    def _to_head_from_dfield(self) -> None:
        """From the second blanked d' cell (or right of it) back to the head cell."""
        t = self.t
        t.seek_blank(-1)
        t.L()
        t.L()
        t.seek_blank(-1)

    def _bump_state(self) -> None:
        """Turn one more cell of the state block into 1 (moving the middle blank)."""
        t = self.t
        t.L()
        t.seek_blank(-1)                       # second d' cell
        t.L(2)
        t.seek_blank(-1)                       # head cell
        t.L()
        while t.read() == "1":
            t.L()
        if t.read() == "0":
            t.write("1")
        else:
            t.L()
            if t.read() != "1":
                raise _Halt
            t.write(BLANK)
            t.R()
            t.write("1")
        t.seek_blank(+1)
        t.R()
        t.seek_blank(+1)
        t.R()

    def _to_separator(self) -> None:
        """From the head cell to the blank left of the state block."""
        t = self.t
        t.L()
        t.seek_blank(-1)
        t.L()
        t.seek_blank(-1)

    def _from_separator_to_dfield(self) -> None:
        t = self.t
        t.R()
        t.seek_blank(+1)
        t.R()
        t.seek_blank(+1)
        t.R()
        t.seek_blank(+1)
        t.R()

    def _move_right(self, w1: str, w2: str) -> None:
        """d' = R: the current cell's pair leaves the right end and joins w."""
        t = self.t
        t.R()
        while t.read() == "1":
            t.R()
        t.R(2)
        t.find_separator()
        t.R(2)
        if t.read() == BLANK:
            t.L()
            t.write("1")
            t.L()
            t.write("0")
        else:
            t.seek_blank(+1)
            t.L()
            t.write(BLANK)
            t.L()
            t.write(BLANK)
            t.L()
        t.seek_blank(-1)
        self._to_head_from_dfield()
        self._to_separator()
        t.L()
        if t.read() == BLANK:
            t.L()
        else:
            t.seek_blank(-1)
            t.R()
            t.shift_left(2)
        t.write(w1)
        t.R()
        t.write(w2)
        t.R()
        self._from_separator_to_dfield()

    def _move_left(self) -> None:
        """d' = L: the last pair of w moves, reversed, to the right end."""
        t = self.t
        self._to_head_from_dfield()
        self._to_separator()
        t.L()
        if t.read() == BLANK:
            b1, b2 = "1", "0"                  # w is empty: the new cell is blank
            t.R()
        else:
            b2 = t.read()
            t.write(BLANK)
            t.L()
            b1 = t.read()
            t.write(BLANK)
            t.L()
            if t.read() != BLANK:
                t.shift_right_from_end(2)      # close the gap before the separator
                t.R()
                t.seek_blank(+1)
            else:
                t.R(3)
        self._from_separator_to_dfield()
        t.R()
        t.seek_blank(+1)
        t.write(b2)
        t.R()
        t.write(b1)
        t.seek_blank(-1)

    def _finish(self) -> None:
        """Emulated halt: erase everything but the tape encoding and decode it.

        The head ends on the emulated current cell with the emulated right
        part of the tape to its right.
        """
        t = self.t
        t.seek_blank(-1)                       # head cell
        t.R()
        while True:
            s1 = t.read()
            t.write(BLANK)
            t.R()
            s2 = t.read()
            t.write(BLANK)
            t.R()
            s3 = t.read()
            t.write(BLANK)
            t.R()
            if s1 == s2 == s3 == "1":
                break
            for _ in range(FIXED_FIELD - 3):
                t.write(BLANK)
                t.R()
            while t.read() == "1":
                t.write(BLANK)
                t.R()
            t.write(BLANK)
            t.R()
            t.write(BLANK)
            t.R()
        t.L()
        t.seek_mark(-1)                        # last cell of the state block
        while t.read() == "1":
            t.write(BLANK)
            t.L()
        t.L()
        while t.read() == "1":
            t.write(BLANK)
            t.L()
        t.L()
        while t.read() != BLANK:
            t.write(BLANK)
            t.L()
        t.seek_mark(+1)
        t.L()
        t.reverse_run()
        t.R()
        t.seek_blank(+1)
        t.decode_from_right()



def _machine_view(c: DcqConfiguration, index: dict) -> tuple:
    """(w, i, a, w') of a reference configuration, outer blanks trimmed."""
    keys = [k for k, v in c.tape.items() if v != BLANK] + [c.head]
    lo, hi = min(keys), max(keys)
    w = "".join(c.tape.get(k, BLANK) for k in range(lo, c.head)).lstrip(BLANK)
    wr = "".join(c.tape.get(k, BLANK) for k in range(c.head + 1, hi + 1)).rstrip(BLANK)
    return w, index[c.control], c.read(), wr


def universal_emulate(m: DcqMachine, p: str, x: str, psi=None, step_budget: int = 10_000_000,
                      window_cap: int | None = None, verify: bool = False
                      ) -> UniversalRun | BudgetExceeded:
    """Run T on (s(p) _ x, psi) and return its output with the step count.

    ``step_budget`` bounds T's primitive actions. With ``verify`` the tape is
    decoded after every emulated step and compared with a direct run of
    ``m`` (the comparison itself is not counted).
    """
    for name, bits in (("p", p), ("x", x)):
        if not set(bits) <= {"0", "1"}:
            raise InvalidArgument(f"{name}={bits!r} must be a bitstring")
    enc = encode_machine(m)
    index = {q: j for j, q in enumerate(enc.order)}
    kw = {} if window_cap is None else {"window_cap": window_cap}
    ref = dcq_init(m, p + BLANK + x, psi, allow_blank=True, **kw)
    init = dcq_init(m, "", psi, **kw)
    tape = _cells(smn_translate(m, p) + BLANK + x)
    t = _T(tape, init.window, step_budget)
    em = _Emulator(t)
    k = 0
    try:
        em.prepare()
        prep = t.t
        if verify:
            _check(t, ref, index, enc.delta_bits)
        while True:
            halted = em.step()
            k += 1
            if verify:
                _step_inplace(ref, m)
                if halted != (ref.control == m.halt):
                    raise EmulationMismatch(f"halting disagrees after {k} steps")
                if not halted:
                    _check(t, ref, index, enc.delta_bits)
            if halted:
                break
    except _OutOfBudget:
        conf = DcqConfiguration(t.tape, t.head, t.window, t.qhead, "T", t.budget)
        return BudgetExceeded(t.budget, conf)
    final = DcqConfiguration(t.tape, t.head, t.window, t.qhead, m.halt, k)
    out = extract_output(final)
    if verify:
        direct = extract_output(ref)
        if direct.y != out.y:
            raise EmulationMismatch(f"classical outputs differ: {direct.y!r} vs {out.y!r}")
        if direct.quantum.dim != out.quantum.dim or not np.allclose(
                direct.quantum.amplitudes, out.quantum.amplitudes, atol=1e-10):
            raise EmulationMismatch("quantum outputs differ")
    return UniversalRun(out, t.t, k, prep)


def _check(t: _T, ref: DcqConfiguration, index: dict, delta_bits: str) -> None:
    dec = decode_configuration(dict(t.tape), t.head)
    got = (dec.w.lstrip(BLANK), dec.i, dec.a, dec.w_right.rstrip(BLANK))
    want = _machine_view(ref, index)
    if got != want or dec.delta_bits != delta_bits:
        raise EmulationMismatch(f"after {ref.steps} steps T encodes {got}, machine is at {want}")
    if t.qhead != ref.qhead:
        raise EmulationMismatch("quantum heads differ")


def wrap_for_universality(m: DcqMachine) -> DcqMachine:
    """M' that steps over one leading blank, then behaves as M."""
    fresh = "w0"
    while fresh in m.states:
        fresh += "'"
    delta = dict(m.delta)
    for a in SYMBOLS:
        delta[(fresh, a)] = Transition("ID", "N", a, "R", m.start)
    states = (fresh,) + tuple(m.states)
    return DcqMachine(states, delta, fresh, m.halt)


def universality_program(m: DcqMachine) -> str:
    """p = s_{M'}(epsilon) for the wrapper M' of ``m``."""
    return smn_translate(wrap_for_universality(m), "")
