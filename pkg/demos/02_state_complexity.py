"""State counts for L0(m): DFA, 1QFAC, and the audited lower bound.

Run with ``python3 demos/02_state_complexity.py [m ...]``.
"""
import sys

from qmachines.cli import EXPERIMENT_COLUMNS, state_complexity_row
from qmachines.complexity import audit_lower_bound
from qmachines.constructions import build_l0m_qfac
from qmachines.dfa import build_l0m


def main(ms) -> None:
    eps = 0.2
    print("  ".join(EXPERIMENT_COLUMNS[:5]))
    for m in ms:
        row = state_complexity_row(m, eps)
        print("  ".join(str(row[c]) if not isinstance(row[c], float) else f"{row[c]:.4f}"
                        for c in EXPERIMENT_COLUMNS[:5]))
        print(f"    x-loop/y-return witness: {row['fig3_witness']}")
        print(f"    F-construction witness in Lz(m), z=0: {row['lzm_f_witness']}")
        r = audit_lower_bound(build_l0m_qfac(m, eps), build_l0m(m), eps)
        print(f"    audit: m={r.m} <= {r.bound:.3g} ({r.bound_holds}); "
              f"min cross distance {r.min_cross_distance:.4f} >= {r.required_distance:.4f} "
              f"({r.distance_holds}) over {r.n_vectors} lifted vectors")


if __name__ == "__main__":
    main([int(a) for a in sys.argv[1:]] or [7, 11, 13])
