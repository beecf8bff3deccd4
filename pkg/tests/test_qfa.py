import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import BIN, all_words, random_mo, random_qfac
from qmachines.constructions import dfa_to_qfac, rotation_mo
from qmachines.dfa import Dfa, build_l0m
from qmachines.errors import InvalidParameter, UnknownOutcome, UnknownSymbol
from qmachines.linalg import ProjectiveMeasurement, random_state, random_unitary
from qmachines.qfa import (END, PAD, KLetterQfa, Mm1Qfa, Mo1Qfa, QfaCL, kletter_accept_prob,
                           lift_qfac, lifted_outcome_prob, mm_run, mo_accept_prob, mo_as_kletter,
                           mo_as_qfac, qfac_accept_prob, qfac_outcome_prob, qfacl_accept_prob,
                           qfacl_accept_prob_bruteforce)

seeds = st.integers(0, 2**32 - 1)
S2 = 1 / np.sqrt(2)


# -- MO-1QFA ------------------------------------------------------------------

def test_all_accepting_mo_accepts_everything():
    a = random_mo(np.random.default_rng(0), 3)
    full = Mo1Qfa(a.alphabet, a.initial, a.unitaries, {0, 1, 2})
    for w in all_words(BIN, 4):
        assert mo_accept_prob(full, w) == pytest.approx(1.0, abs=1e-12)


def test_rotation_by_third_of_a_turn():
    a = rotation_mo(3, [1])
    assert mo_accept_prob(a, "a") == pytest.approx(np.cos(2 * np.pi / 3) ** 2, abs=1e-12)
    assert mo_accept_prob(a, "a") == pytest.approx(0.25, abs=1e-12)
    u = np.linalg.matrix_power(a.unitaries["a"], 3)
    assert mo_accept_prob(a, "aaa") == pytest.approx(abs((u @ a.initial)[0]) ** 2, abs=1e-12)
    assert mo_accept_prob(a, "aaa") == pytest.approx(1.0, abs=1e-12)


def test_mo_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        mo_accept_prob(rotation_mo(3, [1]), "b")


# -- MM-1QFA ------------------------------------------------------------------

def _mm_branch_oracle(a: Mm1Qfa, word) -> tuple:
    """Explicit measurement tree: each step splits into accept / reject / continue."""
    def rec(v, weight, rest):
        if not rest:
            return 0.0, 0.0
        w = a.unitaries[rest[0]] @ v
        pa = sum(abs(w[i]) ** 2 for i in a.accepting)
        pr = sum(abs(w[i]) ** 2 for i in a.rejecting)
        non = [i for i in range(a.dim) if i not in a.accepting | a.rejecting]
        pn = sum(abs(w[i]) ** 2 for i in non)
        acc, rej = weight * pa, weight * pr
        if pn > 1e-15:
            post = np.zeros_like(w)
            post[non] = w[non] / np.sqrt(pn)
            sa, sr = rec(post, weight * pn, rest[1:])
            acc, rej = acc + sa, rej + sr
        return acc, rej
    return rec(a.initial, 1.0, list(word) + [END])


def test_mm_single_branch_to_accept():
    swap = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    a = Mm1Qfa(("a",), [1, 0, 0], {"a": np.eye(3), END: swap}, {1}, {2})
    r = mm_run(a, "aaa")
    assert r.accept == pytest.approx(1.0) and r.reject == pytest.approx(0.0)


def test_mm_halts_on_first_symbol():
    a = Mm1Qfa(("a",), [1, 0], {"a": np.eye(2), END: np.eye(2)}, {0, 1}, set())
    r = mm_run(a, "aa")
    assert r.accept == pytest.approx(1.0)
    assert r.history[0] == pytest.approx((1.0, 0.0)) and r.history[1] == (0.0, 0.0)


def test_mm_hadamard_like_matches_branch_tree():
    h3 = np.array([[S2, S2, 0], [S2, -S2, 0], [0, 0, 1]])
    rng = np.random.default_rng(5)
    a = Mm1Qfa(("a",), [1, 0, 0], {"a": h3, END: random_unitary(3, rng)}, {1}, {2})
    r = mm_run(a, "a")
    assert (r.accept, r.reject) == pytest.approx(_mm_branch_oracle(a, "a"), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_mm_random_matches_branch_tree(seed):
    rng = np.random.default_rng(seed)
    dim = 4
    a = Mm1Qfa(BIN, random_state(dim, rng), {s: random_unitary(dim, rng) for s in BIN + (END,)},
               {0}, {1})
    for w in all_words(BIN, 3):
        r = mm_run(a, w)
        assert (r.accept, r.reject) == pytest.approx(_mm_branch_oracle(a, w), abs=1e-10)
        assert r.accept + r.reject <= 1 + 1e-9


def test_mm_rejects_reserved_end_marker():
    with pytest.raises(InvalidParameter):
        Mm1Qfa((END,), [1], {END: np.eye(1)}, set(), set())


# -- k-letter -------------------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(seeds)
def test_one_letter_equals_mo(seed):
    rng = np.random.default_rng(seed)
    a = random_mo(rng, 3)
    w = tuple(rng.choice(BIN, size=rng.integers(0, 8)))
    assert abs(kletter_accept_prob(mo_as_kletter(a), w) - mo_accept_prob(a, w)) <= 1e-12


def test_two_letter_padding_window():
    rng = np.random.default_rng(2)
    us = {w: random_unitary(2, rng) for w in [(PAD, "a"), ("a", "a")]}
    a = KLetterQfa(2, ("a",), [1, 0], us, {1})
    expected = abs((us[(PAD, "a")] @ np.array([1, 0]))[1]) ** 2
    assert kletter_accept_prob(a, "a") == pytest.approx(expected, abs=1e-12)


def two_letter_ends_in_b() -> KLetterQfa:
    """The basis state tracks the last letter: flip exactly when the letter changes."""
    x, i = np.array([[0, 1], [1, 0]]), np.eye(2)
    us = {(PAD, "a"): i, (PAD, "b"): x, ("a", "a"): i, ("b", "b"): i, ("a", "b"): x, ("b", "a"): x}
    return KLetterQfa(2, ("a", "b"), [1, 0], us, {1})


def test_two_letter_recognises_words_ending_in_b():
    a = two_letter_ends_in_b()
    assert kletter_accept_prob(a, "ab") == 1.0 and kletter_accept_prob(a, "ba") == 0.0
    for w in all_words(("a", "b"), 6):
        assert kletter_accept_prob(a, w) == (1.0 if w and w[-1] == "b" else 0.0)


def test_kletter_requires_reachable_windows():
    with pytest.raises(InvalidParameter):
        KLetterQfa(2, ("a",), [1], {(PAD, "a"): np.eye(1)}, set())


# -- 1QFACL -----------------------------------------------------------------------

def _control(states, outcomes, delta, acc) -> Dfa:
    return Dfa(states, outcomes, delta, states[0], acc)


def _qubit_cl(rng, control):
    return QfaCL(BIN, random_state(2, rng), {s: random_unitary(2, rng) for s in BIN + (END,)},
                 ProjectiveMeasurement.computational(2), control)


def test_qfacl_trivial_control_languages():
    rng = np.random.default_rng(7)
    everything = _control(("d",), (0, 1), {("d", 0): "d", ("d", 1): "d"}, {"d"})
    nothing = _control(("d",), (0, 1), {("d", 0): "d", ("d", 1): "d"}, set())
    a, b = _qubit_cl(rng, everything), _qubit_cl(rng, nothing)
    for w in all_words(BIN, 4):
        assert qfacl_accept_prob(a, w) == pytest.approx(1.0, abs=1e-12)
        assert qfacl_accept_prob(b, w) == 0.0


def test_qfacl_last_outcome_one_matches_bruteforce():
    rng = np.random.default_rng(8)
    last1 = _control(("n", "y"), (0, 1), {(s, 0): "n" for s in "ny"} | {(s, 1): "y" for s in "ny"},
                     {"y"})
    a = _qubit_cl(rng, last1)
    for w in all_words(BIN, 6):
        assert abs(qfacl_accept_prob(a, w) - qfacl_accept_prob_bruteforce(a, w)) <= 1e-9


# -- 1QFAC and the lifted form -------------------------------------------------------

def test_one_state_qfac_is_mo():
    a = random_mo(np.random.default_rng(9), 4)
    q = mo_as_qfac(a)
    for w in all_words(BIN, 5):
        assert qfac_accept_prob(q, w) == pytest.approx(mo_accept_prob(a, w), abs=1e-12)


def test_empty_word_uses_initial_state():
    q = random_qfac(np.random.default_rng(10), 3, 3)
    p = q.measurements[q.start].projector("a")
    assert qfac_accept_prob(q, "") == pytest.approx(np.linalg.norm(p @ q.initial) ** 2, abs=1e-12)


def test_zero_error_l0m():
    assert qfac_accept_prob(dfa_to_qfac(build_l0m(3)), "010") == 1.0


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_outcomes_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    q = random_qfac(rng, int(rng.integers(1, 5)), int(rng.integers(1, 4)))
    for w in all_words(BIN, 3):
        assert sum(qfac_outcome_prob(q, w, g) for g in q.outcomes) == pytest.approx(1, abs=1e-9)


def test_qfac_errors():
    q = random_qfac(np.random.default_rng(11), 2, 2)
    with pytest.raises(UnknownOutcome):
        qfac_outcome_prob(q, "0", "zzz")
    with pytest.raises(UnknownSymbol):
        qfac_accept_prob(q, "2")


def test_single_block_lift_is_identical():
    q = mo_as_qfac(random_mo(np.random.default_rng(12), 3))
    lq = lift_qfac(q)
    for s in BIN:
        assert np.array_equal(lq.operators[s], q.unitaries[("s", s)])


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_lifted_matches_direct_and_has_product_form(seed):
    rng = np.random.default_rng(seed)
    q = random_qfac(rng, int(rng.integers(1, 5)), int(rng.integers(1, 4)))
    lq = lift_qfac(q)
    for w in all_words(BIN, 4):
        for g in q.outcomes:
            assert abs(lifted_outcome_prob(lq, w, g) - qfac_outcome_prob(q, w, g)) <= 1e-10
        phi = lq.evolve(w)
        norms = lq.block_norms(phi)
        assert np.count_nonzero(norms > 1e-12) == 1
        assert abs(np.linalg.norm(phi) - 1) <= 1e-9
        s, v = q.run(w)
        assert np.allclose(phi.reshape(q.n_classical, q.dim)[q.classical_states.index(s)], v)
