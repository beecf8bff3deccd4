import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import BIN, all_words, random_dfa, random_mo
from qmachines.constructions import (SETOPS, build_divisibility_mo, build_l0m_qfac,
                                     build_lzm_qfac, compose_setop, dfa_to_qfac, is_prime,
                                     residue_accept_probs, rotation_mo, setop_expected)
from qmachines.dfa import Dfa, build_l0m, build_lzm
from qmachines.errors import AlphabetMismatch, InvalidParameter, SearchExhausted
from qmachines.qfa import mo_accept_prob, qfac_accept_prob

seeds = st.integers(0, 2**32 - 1)


def test_dfa_to_qfac_zero_error():
    d = build_l0m(3)
    q = dfa_to_qfac(d)
    assert q.dim == 1 and q.n_classical == len(d.states)
    for w in all_words(BIN, 8):
        assert qfac_accept_prob(q, w) == (1.0 if d.accepts(w) else 0.0)


@pytest.mark.parametrize("accepting,value", [(set(), 0.0), ({"s"}, 1.0)])
def test_dfa_to_qfac_trivial_languages(accepting, value):
    d = Dfa(("s",), BIN, {("s", "0"): "s", ("s", "1"): "s"}, "s", accepting)
    for w in all_words(BIN, 4):
        assert qfac_accept_prob(dfa_to_qfac(d), w) == value


def test_setop_table_cases():
    rng = np.random.default_rng(0)
    d, a = build_l0m(2), random_mo(rng, 3)
    inter = compose_setop(d, a, "intersect")
    union = compose_setop(d, a, "union")
    assert qfac_accept_prob(inter, "11") == 0.0  # not in L1
    assert qfac_accept_prob(inter, "10") == pytest.approx(mo_accept_prob(a, "10"), abs=1e-10)
    assert qfac_accept_prob(union, "10") == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_setops_agree_with_factors(seed):
    rng = np.random.default_rng(seed)
    d, a = random_dfa(rng, int(rng.integers(1, 5))), random_mo(rng, int(rng.integers(1, 4)))
    for op in SETOPS:
        q = compose_setop(d, a, op)
        assert (q.n_classical, q.dim) == (len(d.states), a.dim)
        for w in all_words(BIN, 5):
            want = setop_expected(op, d.accepts(w), mo_accept_prob(a, w))
            assert abs(qfac_accept_prob(q, w) - want) <= 1e-10


def test_setop_errors():
    a = rotation_mo(3, [1])
    with pytest.raises(AlphabetMismatch):
        compose_setop(build_l0m(2), a, "intersect")
    with pytest.raises(InvalidParameter):
        compose_setop(build_l0m(2), random_mo(np.random.default_rng(1), 2), "xor")


def test_residue_closed_form_m3():
    probs = residue_accept_probs(3, [1])
    assert probs == pytest.approx([1.0, 0.25, 0.25], abs=1e-12)
    a = rotation_mo(3, [1])
    for n in range(9):
        assert mo_accept_prob(a, "a" * n) == pytest.approx(probs[n % 3], abs=1e-12)


@pytest.mark.parametrize("m", [5, 7, 11, 13])
def test_divisibility_depends_only_on_length_mod_m(m):
    div = build_divisibility_mo(m, 0.2, seed=1)
    a = div.automaton
    assert div.achieved_eps < 0.2 and a.dim == 2 * div.d
    for n in range(3 * m + 1):
        p = mo_accept_prob(a, "a" * n)
        if n % m == 0:
            assert p == pytest.approx(1.0, abs=1e-9)
        else:
            assert p <= div.achieved_eps + 1e-9
        assert p == pytest.approx(residue_accept_probs(m, div.multipliers)[n % m], abs=1e-9)


def test_divisibility_m7_residue_sweep_oracle():
    div = build_divisibility_mo(7, 0.2)
    # independent oracle: power the rotation matrix directly
    a = div.automaton
    worst = max(abs((np.linalg.matrix_power(a.unitaries["a"], r) @ a.initial)[0]) ** 2
                for r in range(1, 7))
    assert worst < 0.2 and worst == pytest.approx(div.achieved_eps, abs=1e-12)
    assert div.provenance == {"m": 7, "K": list(div.multipliers), "eps_hat": div.achieved_eps}


def test_divisibility_floor_of_full_multiplier_set():
    # with K = {1..m-1} every nonzero residue has amplitude -1/(m-1)
    assert residue_accept_probs(3, [1, 2])[1:] == pytest.approx([0.25, 0.25])
    with pytest.raises(SearchExhausted):
        build_divisibility_mo(3, 0.2)
    assert build_divisibility_mo(3, 0.3).achieved_eps == pytest.approx(0.25)


def test_divisibility_errors():
    for bad in (4, 2, 9):
        with pytest.raises(InvalidParameter):
            build_divisibility_mo(bad, 0.2)
    with pytest.raises(InvalidParameter):
        build_divisibility_mo(7, 1.5)
    assert is_prime(13) and not is_prime(1)


def test_l0m_qfac_m7():
    q = build_l0m_qfac(7, 0.2)
    d = build_l0m(7)
    assert q.n_classical == 2
    for w in all_words(BIN, 14):
        p = qfac_accept_prob(q, w)
        if d.accepts(w):
            assert p == pytest.approx(1.0, abs=1e-9)
        else:
            assert p < 0.2


def test_lzm_qfac_class_count():
    for z in ("0", "01", "110"):
        q = build_lzm_qfac(z, 5, 0.2)
        d = build_lzm(z, 5)
        assert q.n_classical == len(z) + 1
        for w in all_words(BIN, 10):
            p = qfac_accept_prob(q, w)
            assert p == pytest.approx(1.0, abs=1e-9) if d.accepts(w) else p < 0.2
