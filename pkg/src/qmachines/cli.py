"""Command-line interface: ``qmachines <group> <command> ...``.

Exit status is 0 on success, 1 on a domain error (any
:class:`~qmachines.errors.QMachinesError`) and 2 on malformed input:
unreadable files, invalid JSON, documents of the wrong shape, bad flags.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Sequence

from . import serialize as ser
from .complexity import audit_lower_bound, margin_sweep
from .constructions import (build_divisibility_mo, build_l0m_qfac, build_lzm_qfac,
                            compose_setop)
from .dcq import (DEFAULT_WINDOW_CAP, BudgetExceeded, DcqOutput, dcq_decide, dcq_run)
from .dfa import (build_l0, build_l0_2, build_l0m, build_lm, build_lz, build_lzm,
                  detect_f_construction, detect_fig3_construction, minimize_dfa,
                  nerode_classes, words)
from .errors import QMachinesError
from .qfa import (KLetterQfa, Mm1Qfa, Mo1Qfa, Qfac, QfaCL, kletter_accept_prob, mm_run,
                  mo_accept_prob, qfac_outcome_prob, qfacl_accept_prob)
from .smn import encode_machine, smn_translate, universal_emulate

#: CLI names of the set operations, mapped to :data:`constructions.SETOPS`
COMPOSE_OPS = {"intersect": "intersect", "union": "union",
               "diff-dm": "dfa_minus_mo", "diff-md": "mo_minus_dfa"}

QFA_MODELS = ("mo1qfa", "mm1qfa", "kletter", "qfacl", "qfac")


class UsageError(Exception):
    """Malformed command-line input (exit status 2)."""


def fmt(x: float) -> str:
    return f"{x:.12f}"


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise ser.SchemaError(f"{path}: invalid JSON: {e}") from None


def _load(path: str, model: str | None = None):
    return ser.from_json(_read_json(path), model)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _emit_doc(doc: dict, out: str | None) -> None:
    _emit(json.dumps(doc, indent=2), out)


def _word(text: str) -> tuple:
    """A word from the command line: a plain string, or a JSON list of symbols."""
    if text.startswith("["):
        try:
            syms = json.loads(text)
        except json.JSONDecodeError as e:
            raise UsageError(f"bad JSON word {text!r}: {e}") from None
        if not isinstance(syms, list):
            raise UsageError("a JSON word must be a list of symbols")
        return tuple(ser._label(s) for s in syms)
    return tuple(text)


def _word_str(w: Sequence) -> str:
    return "".join(map(str, w))


def _bits(text: str, name: str) -> str:
    if not set(text) <= {"0", "1"}:
        raise UsageError(f"--{name} must be a bitstring, got {text!r}")
    return text


# -- qfa -----------------------------------------------------------------------

def _qfa_probs(a, word: tuple) -> dict:
    """Outcome probabilities of one word, keyed by label."""
    if isinstance(a, Mo1Qfa):
        return {"accept": mo_accept_prob(a, word)}
    if isinstance(a, Mm1Qfa):
        r = mm_run(a, word)
        return {"accept": r.accept, "reject": r.reject}
    if isinstance(a, KLetterQfa):
        return {"accept": kletter_accept_prob(a, word)}
    if isinstance(a, QfaCL):
        return {"accept": qfacl_accept_prob(a, word)}
    if isinstance(a, Qfac):
        if "a" in a.outcomes:
            return {"accept": qfac_outcome_prob(a, word, "a")}
        return {str(g): qfac_outcome_prob(a, word, g) for g in a.outcomes}
    raise UsageError(f"not a QFA document: {type(a).__name__}")


def _load_qfa(path: str, model: str | None):
    a = _load(path, model)
    if not isinstance(a, (Mo1Qfa, Mm1Qfa, KLetterQfa, QfaCL, Qfac)):
        raise UsageError(f"{path} does not describe a quantum finite automaton")
    return a


def cmd_qfa_run(args) -> None:
    a = _load_qfa(args.machine, args.model)
    word = _word(args.input)
    probs = _qfa_probs(a, word)
    if args.json:
        _emit(json.dumps({"word": ser._plain(list(word)), **probs}), None)
    elif list(probs) == ["accept"]:
        _emit(fmt(probs["accept"]), None)
    else:
        _emit("\n".join(f"{k}\t{fmt(v)}" for k, v in probs.items()), None)


def cmd_qfa_sweep(args) -> None:
    a = _load_qfa(args.machine, args.model)
    if args.maxlen < 0:
        raise UsageError("--maxlen must be non-negative")
    rows = [(w, _qfa_probs(a, w)) for w in words(a.alphabet, args.maxlen)]
    labels = list(rows[0][1]) if rows else ["accept"]
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh)
            wr.writerow(["word", *labels])
            for w, p in rows:
                wr.writerow([_word_str(w), *(fmt(p[k]) for k in labels)])
    if args.json:
        _emit(json.dumps([{"word": ser._plain(list(w)), **p} for w, p in rows]), None)
    elif not args.csv:
        _emit("\n".join(f"{_word_str(w) or 'ε'}\t" + "\t".join(fmt(p[k]) for k in labels)
                        for w, p in rows), None)


# -- dfa -----------------------------------------------------------------------

def _load_dfa(path: str):
    return _load(path, "dfa")


def cmd_dfa_minimize(args) -> None:
    m = minimize_dfa(_load_dfa(args.dfa))
    if args.json:
        _emit_doc(ser.dfa_to_json(m), None)
        return
    lines = [f"{len(m.states)} states", f"start {m.start}",
             "accepting " + " ".join(str(s) for s in m.states if s in m.accepting)]
    lines += [f"{s} {a} {m.delta[(s, a)]}" for s in m.states for a in m.alphabet]
    _emit("\n".join(lines), None)


def cmd_dfa_nerode(args) -> None:
    n = nerode_classes(_load_dfa(args.dfa))
    _emit(json.dumps({"classes": n}) if args.json else str(n), None)


def cmd_dfa_fcheck(args) -> None:
    w = detect_f_construction(_load_dfa(args.dfa))
    if args.json:
        doc = None if w is None else {"q1": w.q1, "q2": w.q2, "t": list(w.t), "z": list(w.z)}
        _emit(json.dumps({"witness": ser._plain(doc)}), None)
    else:
        _emit("none" if w is None else
              f"{w.q1} {w.q2} z={_word_str(w.z)} t={_word_str(w.t)}", None)


def cmd_dfa_fig3check(args) -> None:
    w = detect_fig3_construction(_load_dfa(args.dfa))
    if args.json:
        doc = None if w is None else {"p": w.p, "q": w.q, "x": list(w.x), "y": list(w.y),
                                      "z": list(w.z)}
        _emit(json.dumps({"witness": ser._plain(doc)}), None)
    else:
        _emit("none" if w is None else
              f"{w.p} {w.q} x={_word_str(w.x)} y={_word_str(w.y)} z={_word_str(w.z)}", None)


# -- build / compose / audit ---------------------------------------------------------

def cmd_build(args) -> None:
    kind = args.language
    if kind == "l0m":
        doc = ser.dfa_to_json(build_l0m(args.m))
    elif kind == "lm":
        doc = ser.dfa_to_json(build_lm(args.m))
    elif kind == "l0":
        doc = ser.dfa_to_json(build_l0())
    elif kind == "l0_2":
        doc = ser.dfa_to_json(build_l0_2())
    elif kind == "lz":
        doc = ser.dfa_to_json(build_lz(tuple(args.z)))
    elif kind == "lzm":
        doc = ser.dfa_to_json(build_lzm(tuple(args.z), args.m))
    elif kind == "qfac-l0m":
        doc = ser.qfac_to_json(build_l0m_qfac(args.m, args.eps, args.seed))
    elif kind == "qfac-lzm":
        doc = ser.qfac_to_json(build_lzm_qfac(tuple(args.z), args.m, args.eps, args.seed))
    elif kind == "divisibility":
        div = build_divisibility_mo(args.m, args.eps, args.seed, tuple(args.alphabet))
        doc = {**ser.mo1qfa_to_json(div.automaton), "provenance": div.provenance}
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(kind)
    _emit_doc(doc, args.out)


_BUILD_NEEDS = {"l0m": ("m",), "lm": ("m",), "lz": ("z",), "lzm": ("z", "m"),
                "qfac-l0m": ("m", "eps"), "qfac-lzm": ("z", "m", "eps"),
                "divisibility": ("m", "eps")}


def cmd_compose(args) -> None:
    d = _load_dfa(args.dfa)
    a = _load(args.mo, "mo1qfa")
    _emit_doc(ser.qfac_to_json(compose_setop(d, a, COMPOSE_OPS[args.op])), args.out)


def cmd_audit_bound(args) -> None:
    a = _load(args.qfac, "qfac")
    d = _load_dfa(args.dfa)
    report = audit_lower_bound(a, d, args.eps, args.lam, args.max_len)
    _emit(report.to_json(), args.out)


# -- dcq -----------------------------------------------------------------------

def _load_dcq(path: str):
    return _load(path, "dcq")


def _qin(path: str | None):
    return None if path is None else ser.state_from_json(_read_json(path))


def _output_doc(out: DcqOutput) -> dict:
    return {"y": out.y, "quantum": ser.vector_to_json(out.quantum.amplitudes),
            "steps": out.steps}


def _output_lines(out: DcqOutput, prefix: str = "") -> list:
    amps = " ".join(f"{fmt(z.real)}{z.imag:+.12f}j" for z in out.quantum.amplitudes)
    return [f"{prefix}y\t{out.y or 'ε'}", f"{prefix}quantum\t{amps}", f"{prefix}steps\t{out.steps}"]


def _budget_report(b: BudgetExceeded, json_out: bool) -> None:
    if json_out:
        _emit(json.dumps({"status": "budget-exceeded", "steps": b.steps}), None)
    else:
        _emit(f"budget exceeded after {b.steps} steps (no halt)", None)


def cmd_dcq_run(args) -> None:
    m = _load_dcq(args.machine)
    out = dcq_run(m, _bits(args.x, "x"), _qin(args.qin), args.budget, args.window_cap)
    if isinstance(out, BudgetExceeded):
        _budget_report(out, args.json)
    elif args.json:
        _emit(json.dumps({"status": "halted", **_output_doc(out)}), None)
    else:
        _emit("\n".join(_output_lines(out)), None)


def cmd_dcq_decide(args) -> None:
    m = _load_dcq(args.machine)
    dec = dcq_decide(m, _bits(args.x, "x"), args.budget, args.window_cap)
    if isinstance(dec, BudgetExceeded):
        _budget_report(dec, args.json)
    elif args.json:
        _emit(json.dumps(dec._asdict()), None)
    else:
        _emit(f"{dec.verdict}\tp1={fmt(dec.p1)}\tsteps={dec.steps}", None)


def cmd_dcq_trace(args) -> None:
    m = _load_dcq(args.machine)
    trace: list = []
    out = dcq_run(m, _bits(args.x, "x"), _qin(args.qin), args.budget, args.window_cap,
                  trace=trace)
    text = "\n".join(e.line() for e in trace)
    _emit(text, args.out)
    if isinstance(out, BudgetExceeded):
        print(f"budget exceeded after {out.steps} steps (no halt)", file=sys.stderr)


def cmd_dcq_encode(args) -> None:
    m = _load_dcq(args.machine)
    p = _bits(args.p, "p")
    s = smn_translate(m, p)
    if args.json:
        enc = encode_machine(m)
        _emit(json.dumps({"s": s, "c": enc.c, "order": list(enc.order)}), None)
    else:
        _emit(s, None)


def cmd_dcq_universal(args) -> None:
    m = _load_dcq(args.machine)
    p, x = _bits(args.p, "p"), _bits(args.x, "x")
    psi = _qin(args.qin)
    direct = dcq_run(m, p + "_" + x, psi, args.budget, args.window_cap, allow_blank=True)
    run = universal_emulate(m, p, x, psi, args.t_budget, args.window_cap)
    if isinstance(direct, BudgetExceeded) or isinstance(run, BudgetExceeded):
        _emit(json.dumps({"status": "budget-exceeded",
                          "direct_halted": not isinstance(direct, BudgetExceeded),
                          "universal_halted": not isinstance(run, BudgetExceeded)})
              if args.json else "budget exceeded before both runs halted", None)
        return
    same = (direct.y == run.output.y and direct.quantum.dim == run.output.quantum.dim
            and float(abs(direct.quantum.amplitudes - run.output.quantum.amplitudes).max())
            <= 1e-10)
    if args.json:
        _emit(json.dumps({"direct": _output_doc(direct), "universal": _output_doc(run.output),
                          "t_steps": run.t_steps, "k": run.m_steps, "match": same}), None)
    else:
        lines = _output_lines(direct, "direct ") + _output_lines(run.output, "universal ")
        lines += [f"t_steps\t{run.t_steps}", f"k\t{direct.steps}",
                  f"match\t{'yes' if same else 'no'}"]
        _emit("\n".join(lines), None)


# -- experiment ----------------------------------------------------------------

EXPERIMENT_COLUMNS = ("m", "dfa_states", "qfac_classical", "qfac_quantum", "achieved_eps",
                      "bound_holds", "max_nonmember_2m", "min_member_2m", "distance_holds",
                      "fig3_witness", "lzm_f_witness")


def state_complexity_row(m: int, eps: float, seed: int = 0) -> dict:
    """One row of the state-complexity table for L0(m).

    The error is re-measured over every word of length <= 2m; the x-loop/y-return
    witness is searched in the minimal DFA of L0(m) and the F-construction
    in that of Lz(m) with z = "0".
    """
    d = build_l0m(m)
    q = build_l0m_qfac(m, eps, seed)
    minimal = minimize_dfa(d)
    sweep = margin_sweep(q, minimal, 2 * m)
    report = audit_lower_bound(q, d, eps)
    fig3 = detect_fig3_construction(d)
    fw = detect_f_construction(build_lzm(("0",), m))
    return {
        "m": m,
        "dfa_states": len(minimal.states),
        "qfac_classical": q.n_classical,
        "qfac_quantum": q.dim,
        "achieved_eps": q.metadata["provenance"]["eps_hat"],
        "bound_holds": report.bound_holds,
        "max_nonmember_2m": sweep["max_nonmember"],
        "min_member_2m": sweep["min_member"],
        "distance_holds": report.distance_holds,
        "fig3_witness": "" if fig3 is None else
        f"{fig3.p} {fig3.q} x={_word_str(fig3.x)} y={_word_str(fig3.y)} z={_word_str(fig3.z)}",
        "lzm_f_witness": "" if fw is None else
        f"{fw.q1} {fw.q2} z={_word_str(fw.z)} t={_word_str(fw.t)}",
    }


def cmd_experiment_state_complexity(args) -> None:
    try:
        ms = [int(v) for v in args.m.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--m must be a comma-separated list of integers, got {args.m!r}") from None
    rows = [state_complexity_row(m, args.eps, args.seed) for m in ms]
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            wr = csv.DictWriter(fh, fieldnames=EXPERIMENT_COLUMNS)
            wr.writeheader()
            wr.writerows(rows)
    if args.json:
        _emit(json.dumps(rows, indent=2), None)
    elif not args.csv:
        wr = csv.DictWriter(sys.stdout, fieldnames=EXPERIMENT_COLUMNS, lineterminator="\n")
        wr.writeheader()
        wr.writerows(rows)


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qmachines",
                                 description="Quantum automata and dcq Turing machine toolkit")
    groups = ap.add_subparsers(dest="group", required=True)

    def leaf(parent, name, func, help_):
        p = parent.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    qfa = groups.add_parser("qfa", help="run quantum finite automata").add_subparsers(
        dest="cmd", required=True)
    p = leaf(qfa, "run", cmd_qfa_run, "acceptance probability of one word")
    p.add_argument("--model", choices=QFA_MODELS)
    p.add_argument("machine")
    p.add_argument("--input", required=True, help="word, or a JSON list of symbols")
    p = leaf(qfa, "sweep", cmd_qfa_sweep, "probabilities of all words up to a length")
    p.add_argument("--model", choices=QFA_MODELS)
    p.add_argument("machine")
    p.add_argument("--maxlen", type=int, required=True)
    p.add_argument("--csv")

    dfa = groups.add_parser("dfa", help="DFA analyses").add_subparsers(dest="cmd", required=True)
    for name, func, help_ in (("minimize", cmd_dfa_minimize, "minimal DFA"),
                              ("nerode", cmd_dfa_nerode, "number of Myhill-Nerode classes"),
                              ("fcheck", cmd_dfa_fcheck, "search for an F-construction"),
                              ("fig3check", cmd_dfa_fig3check, "search for the x-loop/y-return pattern blocking MM-1QFAs")):
        leaf(dfa, name, func, help_).add_argument("dfa")

    p = groups.add_parser("build", help="emit a machine document")
    p.set_defaults(func=cmd_build)
    p.add_argument("language", choices=("l0m", "lm", "l0", "l0_2", "lz", "lzm", "qfac-l0m",
                                        "qfac-lzm", "divisibility"))
    p.add_argument("--m", type=int)
    p.add_argument("--z")
    p.add_argument("--eps", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alphabet", default="a", help="divisibility alphabet (single characters)")
    p.add_argument("--out")

    p = groups.add_parser("compose", help="set operation of a DFA and an MO-1QFA")
    p.set_defaults(func=cmd_compose)
    p.add_argument("--op", choices=tuple(COMPOSE_OPS), required=True)
    p.add_argument("dfa")
    p.add_argument("mo")
    p.add_argument("--out")

    audit = groups.add_parser("audit", help="state-complexity audits").add_subparsers(
        dest="cmd", required=True)
    p = audit.add_parser("bound", help="check m <= (1 + sqrt2/eps)^(2kn)")
    p.set_defaults(func=cmd_audit_bound)
    p.add_argument("qfac")
    p.add_argument("dfa")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--lam", type=float)
    p.add_argument("--max-len", type=int)
    p.add_argument("--out")

    dcq = groups.add_parser("dcq", help="dcq Turing machines").add_subparsers(
        dest="cmd", required=True)

    def dcq_leaf(name, func, help_, qin=True):
        p = leaf(dcq, name, func, help_)
        p.add_argument("machine")
        p.add_argument("--budget", type=int, default=10_000, help="step budget")
        p.add_argument("--window-cap", type=int, default=DEFAULT_WINDOW_CAP)
        if qin:
            p.add_argument("--qin", help="quantum input state document")
        return p

    dcq_leaf("run", cmd_dcq_run, "run to halting").add_argument("--x", default="")
    dcq_leaf("decide", cmd_dcq_decide, "measure the first output qubit",
             qin=False).add_argument("--x", default="")
    p = dcq_leaf("trace", cmd_dcq_trace, "tab-separated step trace")
    p.add_argument("--x", default="")
    p.add_argument("--out")
    p = leaf(dcq, "encode", cmd_dcq_encode, "print s(p)")
    p.add_argument("machine")
    p.add_argument("--p", default="")
    p = dcq_leaf("universal", cmd_dcq_universal, "compare T(s(p)_x) with M(p_x)")
    p.add_argument("--p", default="")
    p.add_argument("--x", default="")
    p.add_argument("--t-budget", type=int, default=10_000_000,
                   help="budget for the universal machine's primitive actions")

    exp = groups.add_parser("experiment", help="experiment tables").add_subparsers(
        dest="cmd", required=True)
    p = leaf(exp, "state-complexity", cmd_experiment_state_complexity, "L0(m) table")
    p.add_argument("--m", default="7,11,13")
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.func is cmd_build:
        missing = [f"--{k}" for k in _BUILD_NEEDS.get(args.language, ())
                   if getattr(args, k) is None]
        if missing:
            print(f"error: build {args.language} needs {' '.join(missing)}", file=sys.stderr)
            return 2
    if not hasattr(args, "json"):
        args.json = False
    try:
        args.func(args)
    except QMachinesError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except (UsageError, ser.SchemaError, ValueError, OSError) as e:
        print(f"error: malformed input: {e}", file=sys.stderr)
        return 2
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    run()
