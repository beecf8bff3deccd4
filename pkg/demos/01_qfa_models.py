"""Walk through the automaton models on small inputs.

Run with ``python3 demos/01_qfa_models.py``.
"""
import numpy as np

from qmachines.constructions import compose_setop, dfa_to_qfac, rotation_mo
from qmachines.dfa import build_l0, build_l0m, minimize_dfa
from qmachines.qfa import (lift_qfac, lifted_outcome_prob, mo_accept_prob, qfac_accept_prob)


def main() -> None:
    # An MO-1QFA rotating by a third of a turn per symbol accepts a^n with
    # probability cos^2(2 pi n / 3).
    rot = rotation_mo(3, [1])
    print("rotation MO-1QFA, a^n for n = 0..6:")
    for n in range(7):
        print(f"  n={n}  p={mo_accept_prob(rot, 'a' * n):.6f}")

    # Every DFA is a 1QFAC with a one-dimensional quantum part and no error.
    d = build_l0m(3)
    q = dfa_to_qfac(d)
    print(f"\nL0(3): {len(d.states)} DFA states, minimal {len(minimize_dfa(d).states)}")
    for w in ("000", "0010", "010", "111000"):
        print(f"  {w:>6}  dfa={d.accepts(w)!s:5}  qfac={qfac_accept_prob(q, w):.1f}")

    # Combining a DFA with an MO-1QFA: intersect '... ends in 0' with the
    # rotation language over {0, 1}.
    mo = rotation_mo(3, [1], alphabet=("0", "1"))
    inter = compose_setop(build_l0(), mo, "intersect")
    lifted = lift_qfac(inter)
    print("\nintersection of L0 with the rotation automaton (direct vs lifted):")
    for w in ("", "0", "100", "110", "000000"):
        print(f"  {w!r:>9}  {qfac_accept_prob(inter, w):.6f}  "
              f"{lifted_outcome_prob(lifted, w, 'a'):.6f}")
    print(f"\nlifted dimension k*n = {lifted.dim}; "
          f"M('0') unitary: {np.allclose(lifted.operators['0'].conj().T @ lifted.operators['0'], np.eye(lifted.dim))}")


if __name__ == "__main__":
    main()
