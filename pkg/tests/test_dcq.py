import random
from functools import reduce
from itertools import product

import numpy as np
import pytest

from helpers import hadamard_machine, random_dcq
from qmachines.dcq import (BLANK, GATE_MATRICES, GATES, BudgetExceeded, DcqMachine, Halted,
                           QuantumWindow, Transition, dcq_decide, dcq_execute, dcq_init,
                           dcq_run, dcq_step, first_qubit_one_prob, machine_from_table)
from qmachines.errors import (InvalidInput, InvalidMachine, MalformedOutput, NoQuantumOutput,
                              WindowOverflow)
from qmachines.linalg import StateVector, is_unitary, random_state

S2 = 1 / np.sqrt(2)


def one_step(gate, qmove="N", write=None, cmove="N"):
    return machine_from_table([("qs", a, gate, qmove, a if write is None else write, cmove, "qh")
                               for a in "01_"])


def gate_chain(gates, last_qmove="L"):
    """Apply ``gates`` at the quantum head in sequence, then step the quantum head."""
    names = [f"g{i}" for i in range(len(gates))] + ["qh"]
    names[0] = "qs"
    rows = []
    for i, g in enumerate(gates):
        for a in "01_":
            rows.append((names[i], a, g, last_qmove if i == len(gates) - 1 else "N", a, "N",
                         names[i + 1]))
    return machine_from_table(rows, states=names)


# -- gate set and validation -------------------------------------------------------

def test_gate_matrices_unitary():
    for g in GATES:
        assert is_unitary(GATE_MATRICES[g])
    assert np.allclose(GATE_MATRICES["T"], np.diag([1, np.exp(1j * np.pi / 4)]))


def test_machine_validation():
    with pytest.raises(InvalidMachine):  # missing transitions
        DcqMachine(("qs", "qh"), {("qs", "0"): Transition("ID", "N", "0", "N", "qh")})
    with pytest.raises(InvalidMachine):  # halting state with a transition
        machine_from_table([("qs", a, "ID", "N", a, "N", "qh") for a in "01_"]
                           + [("qh", "0", "ID", "N", "0", "N", "qh")])
    with pytest.raises(InvalidMachine):
        machine_from_table([("qs", a, "XX", "N", a, "N", "qh") for a in "01_"])


# -- dcq_init --------------------------------------------------------------------

def test_init_layouts():
    m = hadamard_machine()
    c = dcq_init(m)
    assert c.tape == {} and c.head == 0 and c.qhead == 0 and c.window.n == 0 and c.steps == 0
    c = dcq_init(m, "01")
    assert c.tape == {1: "0", 2: "1"} and c.head == 0 and c.control == "qs"
    bell = np.array([S2, 0, 0, S2])
    c = dcq_init(m, "", bell)
    assert c.window.origin == 1 and c.window.n == 2
    assert np.allclose(c.window.vector(), bell)


def test_init_errors():
    with pytest.raises(InvalidInput):
        dcq_init(hadamard_machine(), "0_1")
    with pytest.raises(InvalidInput):
        dcq_init(hadamard_machine(), "", np.ones(3) / np.sqrt(3))


# -- the three one-step examples ----------------------------------------------------

def test_single_hadamard_step():
    m = one_step("H")
    c = dcq_step(dcq_init(m), m)
    assert c.window.n == 1 and np.allclose(c.window.vector(), [S2, S2], atol=0)
    assert c.steps == 1 and c.control == "qh"
    assert isinstance(dcq_step(c, m), Halted)


def test_write_and_move():
    m = one_step("ID", write="1", cmove="R")
    c = dcq_step(dcq_init(m), m)
    assert c.tape == {0: "1"} and c.head == 1


def test_cnot_control_one():
    m = one_step("CNOT")
    c = dcq_init(m, "", np.array([0, 0, 1, 0]))  # |1>|0> on cells 1, 2
    c.qhead = 1
    c = dcq_step(c, m)
    assert np.array_equal(c.window.vector(), [0, 0, 0, 1])


def test_two_qubit_gate_grows_window_lazily():
    m = one_step("SWAP")
    c = dcq_step(dcq_init(m, "", np.array([0, 1])), m)  # swap cells 0 and 1
    assert (c.window.origin, c.window.n) == (0, 2)
    assert np.array_equal(c.window.vector(), [0, 0, 1, 0])


def test_step_does_not_mutate_input():
    m = one_step("H", write="1")
    c0 = dcq_init(m)
    dcq_step(c0, m)
    assert c0.steps == 0 and c0.tape == {} and c0.window.n == 0


# -- runs --------------------------------------------------------------------------

def test_hadamard_run():
    out = dcq_run(hadamard_machine())
    assert out.y == "" and out.steps == 1
    assert np.allclose(out.quantum.amplitudes, [S2, S2], atol=1e-15)


def test_hadamard_without_moving_is_malformed():
    # the qubit under the head is not part of the output
    with pytest.raises(MalformedOutput):
        dcq_run(one_step("H"))


def copy_machine() -> DcqMachine:
    """Erase each input bit and write it back from the control state, then return."""
    rows = [("qs", a, "ID", "N", a, "R", "r") for a in "01_"]
    rows += [("r", "0", "ID", "N", "_", "N", "w0"), ("r", "1", "ID", "N", "_", "N", "w1"),
             ("r", "_", "ID", "N", "_", "L", "b")]
    rows += [("w0", a, "ID", "N", "0", "R", "r") for a in "01_"]
    rows += [("w1", a, "ID", "N", "1", "R", "r") for a in "01_"]
    rows += [("b", "0", "ID", "N", "0", "L", "b"), ("b", "1", "ID", "N", "1", "L", "b"),
             ("b", "_", "ID", "N", "_", "N", "qh")]
    return machine_from_table(rows)


def test_copy_machine_exhaustive():
    m = copy_machine()
    for bits in product("01", repeat=3):
        x = "".join(bits)
        out = dcq_run(m, x)
        assert out.y == x and out.quantum.dim == 1


def test_loop_exceeds_any_budget():
    rows = [("qs", a, "H", "N", a, "N", "q1") for a in "01_"]
    rows += [("q1", a, "ID", "N", a, "N", "qs") for a in "01_"]
    m = machine_from_table(rows)
    for budget in (0, 1, 10, 1000):
        out = dcq_run(m, "", step_budget=budget)
        assert isinstance(out, BudgetExceeded) and out.steps == budget


def test_classical_output_reads_right_of_head():
    m = one_step("ID", cmove="L")  # head moves to -1; cell 0 is blank so y is empty
    assert dcq_run(m, "01").y == ""
    m = one_step("ID")
    assert dcq_run(m, "01").y == "01"


def test_window_cap():
    rows = [("qs", a, "H", "R", a, "N", "qs") for a in "01_"]
    m = machine_from_table(rows)
    with pytest.raises(WindowOverflow):
        dcq_run(m, "", step_budget=100, window_cap=5)


# -- decisions ---------------------------------------------------------------------

def test_decide_examples():
    ones = dcq_decide(gate_chain(["H", "S", "S", "H"]), "")
    assert ones.verdict == "accept" and ones.p1 == pytest.approx(1.0, abs=1e-12)
    half = dcq_decide(gate_chain(["H"]), "")
    assert half.verdict == "inconclusive" and half.p1 == pytest.approx(0.5, abs=1e-12)
    t = dcq_decide(gate_chain(["T"]), "")
    assert t.verdict == "reject" and t.p1 == 0.0


def test_decide_needs_output_qubit():
    with pytest.raises(NoQuantumOutput):
        dcq_decide(one_step("ID"), "")
    with pytest.raises(NoQuantumOutput):
        first_qubit_one_prob(StateVector([1]))


# -- invariants --------------------------------------------------------------------

def _classical_trace(m, x, psi, budget):
    trace = []
    views = []
    out = dcq_run(m, x, psi, step_budget=budget, trace=trace,
                  on_step=lambda c: views.append(c.classical_view()))
    return trace, views, out


def test_control_determinism():
    rng = random.Random(0)
    nrng = np.random.default_rng(0)
    checked = 0
    while checked < 30:
        m = random_dcq(rng, rng.randint(2, 5))
        x = "".join(rng.choice("01") for _ in range(rng.randint(0, 4)))
        q = rng.randint(1, 2)
        try:
            t1, v1, _ = _classical_trace(m, x, random_state(2 ** q, nrng), 200)
            t2, v2, _ = _classical_trace(m, x, random_state(2 ** q, nrng), 200)
        except (MalformedOutput, WindowOverflow):
            continue
        assert t1 == t2 and v1 == v2
        checked += 1


def bouncing_machine(rng: random.Random) -> DcqMachine:
    """Never halts; both heads oscillate over a few cells applying random gates."""
    names = ["qs", "a", "b", "c"]
    moves = ["R", "R", "L", "L"]
    rows = [(q, s, rng.choice(GATES), moves[i], rng.choice("01_"), moves[i], names[(i + 1) % 4])
            for i, q in enumerate(names) for s in "01_"]
    return machine_from_table(rows, states=names + ["qh"])


def test_window_norm_over_many_steps():
    rng = random.Random(1)
    m = bouncing_machine(rng)
    norms = []
    out = dcq_run(m, "0110", random_state(4, np.random.default_rng(1)), step_budget=10_000,
                  on_step=lambda c: norms.append(c.window.norm()))
    assert isinstance(out, BudgetExceeded) and len(norms) == 10_000
    assert max(abs(n - 1) for n in norms) <= 1e-9


def _full_operator(gate, pos, origin, n):
    """Dense I (x) ... (x) G (x) ... (x) I on the window (independent of tensordot)."""
    g = GATE_MATRICES[gate]
    k = pos - origin
    span = 1 if g.shape[0] == 2 else 2
    factors = [np.eye(2 ** k), g, np.eye(2 ** (n - k - span))]
    return reduce(np.kron, factors)


def test_gate_locality_against_kron_oracle():
    rng = np.random.default_rng(4)
    for gate in GATES:
        for pos in range(1, 4 if gate in ("SWAP", "CNOT") else 5):
            v = random_state(16, rng)
            w = QuantumWindow(1, v)
            w.apply(gate, pos)
            want = _full_operator(gate, pos, 1, 4) @ v
            assert np.max(np.abs(w.vector() - want)) <= 1e-12


def test_reverse_gates_restore_window():
    rng = random.Random(2)
    m = bouncing_machine(rng)
    psi = random_state(4, np.random.default_rng(2))
    c = dcq_init(m, "10", psi)
    applied = []
    dcq_execute(m, c, 1000, on_step=None, trace=applied)
    for e in reversed(applied):
        if e.gate != "ID":
            c.window.apply(e.gate, e.qhead, GATE_MATRICES[e.gate].conj().T)
    start = QuantumWindow(1, psi)
    start.cover(c.window.origin, c.window.end - 1)
    assert np.max(np.abs(c.window.vector() - start.vector())) <= 1e-8
