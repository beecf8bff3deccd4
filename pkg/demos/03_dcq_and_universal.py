"""A dcq machine run directly and through the universal machine.

Run with ``python3 demos/03_dcq_and_universal.py``.
"""
import numpy as np

from qmachines.dcq import dcq_decide, dcq_run, machine_from_table
from qmachines.smn import (encode_machine, smn_translate, universal_emulate,
                           universality_program, wrap_for_universality)


def flip_machine():
    """Complement the input, applying T or S at the quantum head on each bit, then H."""
    rows = [("qs", a, "ID", "N", a, "R", "f") for a in "01_"]
    rows += [("f", "0", "T", "N", "1", "R", "f"), ("f", "1", "S", "N", "0", "R", "f"),
             ("f", "_", "ID", "N", "_", "L", "b")]
    rows += [("b", "0", "ID", "N", "0", "L", "b"), ("b", "1", "ID", "N", "1", "L", "b"),
             ("b", "_", "H", "L", "_", "N", "qh")]
    return machine_from_table(rows)


def main() -> None:
    m = flip_machine()
    psi = np.array([0.6, 0.8])
    out = dcq_run(m, "0110", psi)
    print(f"direct run on x=0110: y={out.y} steps={out.steps}")
    print(f"  quantum output {np.round(out.quantum.amplitudes, 6)}")
    print(f"  decision on (0110, empty quantum input): {dcq_decide(m, '0110')}")

    enc = encode_machine(m)
    print(f"\nencoded transition table: {len(enc.delta_bits)} bits")
    for p in ("", "1", "0101"):
        s = smn_translate(m, p)
        print(f"  |s(p)| - |p| = {len(s) - len(p)} for p={p!r}")

    run = universal_emulate(m, "01", "10", psi, verify=True)
    direct = dcq_run(m, "01_10", psi, allow_blank=True)
    print(f"\nuniversal run on s(01) _ 10: y={run.output.y} (direct {direct.y}), "
          f"{run.m_steps} emulated steps in {run.t_steps} micro-steps")

    w = wrap_for_universality(m)
    p = universality_program(m)
    u = universal_emulate(w, "", "0110", psi)
    print(f"\nprogram for the wrapper: {len(p)} bits, {len(w.states)} states "
          f"(machine has {len(m.states)}); output y={u.output.y}, "
          f"same quantum output: {np.allclose(u.output.quantum.amplitudes, out.quantum.amplitudes)}")


if __name__ == "__main__":
    main()
