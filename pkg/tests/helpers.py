"""Random instance generators and reference corpora shared by the tests."""
from __future__ import annotations

import random
from itertools import product

import numpy as np

from qmachines.dcq import (GATES, BudgetExceeded, dcq_run, machine_from_table)
from qmachines.dfa import Dfa
from qmachines.errors import MalformedOutput, WindowOverflow
from qmachines.linalg import ProjectiveMeasurement, random_projector, random_state, random_unitary
from qmachines.qfa import Mo1Qfa, Qfac

BIN = ("0", "1")


def random_dfa(rng: np.random.Generator, n: int, alphabet=BIN) -> Dfa:
    states = tuple(f"d{i}" for i in range(n))
    delta = {(s, a): states[rng.integers(n)] for s in states for a in alphabet}
    acc = frozenset(s for s in states if rng.random() < 0.5)
    return Dfa(states, alphabet, delta, states[0], acc)


def random_mo(rng: np.random.Generator, dim: int, alphabet=BIN) -> Mo1Qfa:
    acc = frozenset(int(i) for i in np.flatnonzero(rng.random(dim) < 0.5))
    return Mo1Qfa(alphabet, random_state(dim, rng),
                  {a: random_unitary(dim, rng) for a in alphabet}, acc)


def random_measurement(rng: np.random.Generator, dim: int) -> ProjectiveMeasurement:
    """Two-outcome measurement {a, r} in a random basis."""
    u = random_unitary(dim, rng)
    k = int(rng.integers(0, dim + 1))
    pa = u[:, :k] @ u[:, :k].conj().T
    return ProjectiveMeasurement(("a", "r"), (pa, np.eye(dim) - pa))


def random_qfac(rng: np.random.Generator, k: int, n: int, alphabet=BIN) -> Qfac:
    states = tuple(f"s{i}" for i in range(k))
    delta = {(s, a): states[rng.integers(k)] for s in states for a in alphabet}
    unitaries = {(s, a): random_unitary(n, rng) for s in states for a in alphabet}
    meas = {s: random_measurement(rng, n) for s in states}
    return Qfac(states, alphabet, states[0], random_state(n, rng), delta, unitaries, meas)


def all_words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from product(alphabet, repeat=n)


# -- dcq corpus -----------------------------------------------------------------

def hadamard_machine():
    """Apply H at the quantum head, step the quantum head left, halt."""
    return machine_from_table([("qs", a, "H", "L", a, "N", "qh") for a in "01_"])


def writer_machine():
    """Three states: write 1 on the start cell, step left, halt."""
    rows = [("qs", a, "ID", "N", a, "R", "q1") for a in "01_"]
    rows += [("q1", a, "ID", "N", "1", "L", "qh") for a in "01_"]
    return machine_from_table(rows)


def cnot_machine():
    """SWAP then CNOT at the quantum head, then step the quantum head left."""
    rows = [("qs", a, "SWAP", "N", a, "N", "q1") for a in "01_"]
    rows += [("q1", a, "CNOT", "L", a, "N", "qh") for a in "01_"]
    return machine_from_table(rows)


def flip_machine():
    """Walk right over the input complementing bits; return to the start and halt."""
    rows = [("qs", a, "ID", "N", a, "R", "f") for a in "01_"]
    rows += [("f", "0", "T", "N", "1", "R", "f"), ("f", "1", "S", "N", "0", "R", "f"),
             ("f", "_", "ID", "N", "_", "L", "b")]
    rows += [("b", "0", "ID", "N", "0", "L", "b"), ("b", "1", "ID", "N", "1", "L", "b"),
             ("b", "_", "H", "L", "_", "N", "qh")]
    return machine_from_table(rows)


def random_dcq(rng: random.Random, n_states: int):
    states = ["qs"] + [f"s{i}" for i in range(n_states - 2)] + ["qh"]
    rows = [(q, a, rng.choice(GATES), rng.choice("LNR"), rng.choice("01_"), rng.choice("LNR"),
             rng.choice(states)) for q in states[:-1] for a in "01_"]
    return machine_from_table(rows, states=states)


def _well_formed(m, p, x, psi, budget=60) -> bool:
    try:
        out = dcq_run(m, p + "_" + x, psi, step_budget=budget, allow_blank=True)
    except (MalformedOutput, WindowOverflow):
        return False
    return not isinstance(out, BudgetExceeded)


def smn_corpus(n_random: int = 24, inputs_per_machine: int = 4, seed: int = 2024):
    """Cases (machine, p, x, psi) with |Q| <= 5, |p|+|x| <= 6, psi of at most 2 qubits.

    Four hand-built machines plus ``n_random`` seeded random machines; each
    contributes ``inputs_per_machine`` inputs on which the direct run halts
    with a well-formed output.
    """
    rng = random.Random(seed)
    nrng = np.random.default_rng(seed)
    machines = [hadamard_machine(), writer_machine(), cnot_machine(), flip_machine()]
    while len(machines) < 4 + n_random:
        m = random_dcq(rng, rng.randint(2, 5))
        # keep machines that halt on at least the empty input
        if _well_formed(m, "", "", None):
            machines.append(m)
    cases = []
    for m in machines:
        found = tries = 0
        while found < inputs_per_machine and tries < 400:
            tries += 1
            total = rng.randint(0, 6)
            pl = rng.randint(0, total)
            p = "".join(rng.choice("01") for _ in range(pl))
            x = "".join(rng.choice("01") for _ in range(total - pl))
            q = rng.randint(0, 2)
            psi = None if q == 0 else random_state(2 ** q, nrng)
            if _well_formed(m, p, x, psi):
                cases.append((m, p, x, psi))
                found += 1
    return machines, cases
