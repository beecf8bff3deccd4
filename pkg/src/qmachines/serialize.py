"""JSON documents for every machine type.

Complex numbers are written as ``[re, im]`` pairs and matrices as nested
row-major lists of such pairs. Every document carries a ``"model"`` field
naming its type; DFA and dcq documents also load without it.

Loaders raise :class:`SchemaError` for structurally malformed documents.
Semantic problems (a non-unitary matrix, a partial DFA) surface as the
domain errors raised by the constructors themselves.
"""
from __future__ import annotations

import json
from typing import Any

import numpy as np

from .dcq import DcqMachine, Transition
from .dfa import Dfa
from .linalg import ProjectiveMeasurement, StateVector
from .qfa import KLetterQfa, Mm1Qfa, Mo1Qfa, Qfac, QfaCL

MODELS = ("dfa", "mo1qfa", "mm1qfa", "kletter", "qfacl", "qfac", "dcq", "state")


class SchemaError(ValueError):
    """A JSON document does not have the expected shape."""


# -- scalars and matrices ---------------------------------------------------

def complex_to_json(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(v: Any) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if (isinstance(v, list) and len(v) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
        return complex(v[0], v[1])
    raise SchemaError(f"expected a number or a [re, im] pair, got {v!r}")


def vector_to_json(v: np.ndarray) -> list:
    return [complex_to_json(z) for z in np.asarray(v).reshape(-1)]


def vector_from_json(v: Any) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise SchemaError("expected a non-empty list of amplitudes")
    return np.array([complex_from_json(z) for z in v], dtype=complex)


def matrix_to_json(m: np.ndarray) -> list:
    return [vector_to_json(row) for row in np.asarray(m)]


def matrix_from_json(m: Any) -> np.ndarray:
    if not isinstance(m, list) or not m:
        raise SchemaError("expected a non-empty list of matrix rows")
    rows = [vector_from_json(r) for r in m]
    if any(r.shape[0] != len(rows) for r in rows):
        raise SchemaError("matrix must be square")
    return np.array(rows)


def _label(x: Any) -> Any:
    """JSON arrays become tuples so that labels stay hashable."""
    if isinstance(x, list):
        return tuple(_label(i) for i in x)
    if isinstance(x, dict):
        raise SchemaError(f"objects cannot be used as labels: {x!r}")
    return x


def _plain(x: Any) -> Any:
    """Tuples, frozensets and numpy scalars to JSON-friendly values."""
    if isinstance(x, (tuple, list, frozenset, set)):
        return [_plain(i) for i in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, np.generic):
        return x.item()
    return x


def _field(doc: dict, name: str, kind: type | tuple | None = None) -> Any:
    if name not in doc:
        raise SchemaError(f"missing field {name!r}")
    v = doc[name]
    if kind is not None and not isinstance(v, kind):
        raise SchemaError(f"field {name!r} has the wrong type")
    return v


def _check_model(doc: Any, model: str, optional: bool = False) -> dict:
    if not isinstance(doc, dict):
        raise SchemaError("document must be a JSON object")
    got = doc.get("model")
    if got is None and optional:
        return doc
    if got != model:
        raise SchemaError(f"expected model {model!r}, got {got!r}")
    return doc


def _measurement_to_json(m: ProjectiveMeasurement) -> dict:
    return {"outcomes": _plain(list(m.outcomes)),
            "projectors": [matrix_to_json(p) for p in m.projectors]}


def _measurement_from_json(doc: Any) -> ProjectiveMeasurement:
    if not isinstance(doc, dict):
        raise SchemaError("measurement must be an object")
    outcomes = [_label(o) for o in _field(doc, "outcomes", list)]
    projs = [matrix_from_json(p) for p in _field(doc, "projectors", list)]
    return ProjectiveMeasurement(tuple(outcomes), tuple(projs))


# -- DFA -----------------------------------------------------------------------

def dfa_to_json(d: Dfa) -> dict:
    return {
        "model": "dfa",
        "states": _plain(list(d.states)),
        "alphabet": _plain(list(d.alphabet)),
        "start": _plain(d.start),
        "accepting": _plain([s for s in d.states if s in d.accepting]),
        "delta": [[_plain(s), _plain(a), _plain(d.delta[(s, a)])]
                  for s in d.states for a in d.alphabet],
    }


def dfa_from_json(doc: Any) -> Dfa:
    doc = _check_model(doc, "dfa", optional=True)
    delta = {}
    for row in _field(doc, "delta", list):
        if not isinstance(row, list) or len(row) != 3:
            raise SchemaError(f"DFA transition must be [state, symbol, state], got {row!r}")
        s, a, t = map(_label, row)
        delta[(s, a)] = t
    return Dfa(tuple(_label(s) for s in _field(doc, "states", list)),
               tuple(_label(a) for a in _field(doc, "alphabet", list)),
               delta, _label(_field(doc, "start")),
               frozenset(_label(s) for s in _field(doc, "accepting", list)))


# -- QFA models ----------------------------------------------------------------

def _sym_unitaries_to_json(unitaries: dict) -> list:
    return [[_plain(a), matrix_to_json(u)] for a, u in unitaries.items()]


def _sym_unitaries_from_json(rows: Any) -> dict:
    if not isinstance(rows, list):
        raise SchemaError("unitaries must be a list of [symbol, matrix] rows")
    out = {}
    for row in rows:
        if not isinstance(row, list) or len(row) != 2:
            raise SchemaError("unitary row must be [symbol, matrix]")
        out[_label(row[0])] = matrix_from_json(row[1])
    return out


def _common(a) -> dict:
    return {"alphabet": _plain(list(a.alphabet)), "basis": _plain(list(a.basis)),
            "initial": vector_to_json(a.initial)}


def mo1qfa_to_json(a: Mo1Qfa) -> dict:
    return {"model": "mo1qfa", **_common(a),
            "unitaries": _sym_unitaries_to_json(a.unitaries),
            "accepting": sorted(a.accepting)}


def mm1qfa_to_json(a: Mm1Qfa) -> dict:
    return {"model": "mm1qfa", **_common(a),
            "unitaries": _sym_unitaries_to_json(a.unitaries),
            "accepting": sorted(a.accepting), "rejecting": sorted(a.rejecting)}


def kletter_to_json(a: KLetterQfa) -> dict:
    return {"model": "kletter", "k": a.k, **_common(a),
            "unitaries": [[_plain(list(w)), matrix_to_json(u)] for w, u in a.unitaries.items()],
            "accepting": sorted(a.accepting)}


def qfacl_to_json(a: QfaCL) -> dict:
    return {"model": "qfacl", **_common(a),
            "unitaries": _sym_unitaries_to_json(a.unitaries),
            "observable": _measurement_to_json(a.observable),
            "control": dfa_to_json(a.control)}


def qfac_to_json(a: Qfac) -> dict:
    states = a.classical_states
    return {
        "model": "qfac",
        "classical_states": _plain(list(states)),
        "alphabet": _plain(list(a.alphabet)),
        "start": _plain(a.start),
        "basis": _plain(list(a.basis)),
        "outcomes": _plain(list(a.outcomes)),
        "initial": vector_to_json(a.initial),
        "delta": [[_plain(s), _plain(x), _plain(a.delta[(s, x)])]
                  for s in states for x in a.alphabet],
        "unitaries": [[_plain(s), _plain(x), matrix_to_json(a.unitaries[(s, x)])]
                      for s in states for x in a.alphabet],
        "measurements": [[_plain(s), _measurement_to_json(a.measurements[s])] for s in states],
        "metadata": _plain(a.metadata),
    }


def _indices(doc: dict, name: str) -> frozenset:
    v = _field(doc, name, list)
    if not all(isinstance(i, int) and not isinstance(i, bool) for i in v):
        raise SchemaError(f"{name!r} must list basis indices")
    return frozenset(v)


def _basis(doc: dict) -> tuple:
    return tuple(_label(b) for b in doc.get("basis", []))


def mo1qfa_from_json(doc: Any) -> Mo1Qfa:
    doc = _check_model(doc, "mo1qfa")
    return Mo1Qfa(tuple(_label(a) for a in _field(doc, "alphabet", list)),
                  vector_from_json(_field(doc, "initial")),
                  _sym_unitaries_from_json(_field(doc, "unitaries")),
                  _indices(doc, "accepting"), _basis(doc))


def mm1qfa_from_json(doc: Any) -> Mm1Qfa:
    doc = _check_model(doc, "mm1qfa")
    return Mm1Qfa(tuple(_label(a) for a in _field(doc, "alphabet", list)),
                  vector_from_json(_field(doc, "initial")),
                  _sym_unitaries_from_json(_field(doc, "unitaries")),
                  _indices(doc, "accepting"), _indices(doc, "rejecting"), _basis(doc))


def kletter_from_json(doc: Any) -> KLetterQfa:
    doc = _check_model(doc, "kletter")
    k = _field(doc, "k", int)
    unitaries = {}
    for row in _field(doc, "unitaries", list):
        if not isinstance(row, list) or len(row) != 2 or not isinstance(row[0], list):
            raise SchemaError("k-letter unitary row must be [window, matrix]")
        unitaries[tuple(_label(s) for s in row[0])] = matrix_from_json(row[1])
    return KLetterQfa(k, tuple(_label(a) for a in _field(doc, "alphabet", list)),
                      vector_from_json(_field(doc, "initial")), unitaries,
                      _indices(doc, "accepting"), _basis(doc))


def qfacl_from_json(doc: Any) -> QfaCL:
    doc = _check_model(doc, "qfacl")
    return QfaCL(tuple(_label(a) for a in _field(doc, "alphabet", list)),
                 vector_from_json(_field(doc, "initial")),
                 _sym_unitaries_from_json(_field(doc, "unitaries")),
                 _measurement_from_json(_field(doc, "observable")),
                 dfa_from_json(_field(doc, "control")), _basis(doc))


def qfac_from_json(doc: Any) -> Qfac:
    doc = _check_model(doc, "qfac")
    delta, unitaries, meas = {}, {}, {}
    for row in _field(doc, "delta", list):
        if not isinstance(row, list) or len(row) != 3:
            raise SchemaError("qfac transition must be [state, symbol, state]")
        s, a, t = map(_label, row)
        delta[(s, a)] = t
    for row in _field(doc, "unitaries", list):
        if not isinstance(row, list) or len(row) != 3:
            raise SchemaError("qfac unitary row must be [state, symbol, matrix]")
        unitaries[(_label(row[0]), _label(row[1]))] = matrix_from_json(row[2])
    for row in _field(doc, "measurements", list):
        if not isinstance(row, list) or len(row) != 2:
            raise SchemaError("qfac measurement row must be [state, measurement]")
        meas[_label(row[0])] = _measurement_from_json(row[1])
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise SchemaError("metadata must be an object")
    return Qfac(tuple(_label(s) for s in _field(doc, "classical_states", list)),
                tuple(_label(a) for a in _field(doc, "alphabet", list)),
                _label(_field(doc, "start")), vector_from_json(_field(doc, "initial")),
                delta, unitaries, meas, _basis(doc),
                tuple(_label(o) for o in doc.get("outcomes", [])), dict(metadata))


# -- dcq machines and quantum inputs ---------------------------------------------

def dcq_to_json(m: DcqMachine) -> dict:
    return {"model": "dcq", "states": list(m.states), "start": m.start, "halt": m.halt,
            "delta": [[q, a, *tr] for (q, a), tr in m.delta.items()]}


def dcq_from_json(doc: Any) -> DcqMachine:
    doc = _check_model(doc, "dcq", optional=True)
    delta = {}
    for row in _field(doc, "delta", list):
        if not isinstance(row, list) or len(row) != 7 or not all(isinstance(v, str) for v in row):
            raise SchemaError(f"dcq transition must be 7 strings, got {row!r}")
        delta[(row[0], row[1])] = Transition(*row[2:])
    states = _field(doc, "states", list)
    if not all(isinstance(s, str) for s in states):
        raise SchemaError("dcq states must be strings")
    return DcqMachine(tuple(states), delta, _field(doc, "start", str), _field(doc, "halt", str))


def state_to_json(v) -> dict:
    amps = v.amplitudes if isinstance(v, StateVector) else np.asarray(v)
    return {"model": "state", "amplitudes": vector_to_json(amps)}


def state_from_json(doc: Any) -> StateVector:
    """A quantum input: ``{"amplitudes": [...]}`` or a bare amplitude list."""
    if isinstance(doc, dict):
        doc = _field(doc, "amplitudes")
    return StateVector(vector_from_json(doc))


# -- dispatch ------------------------------------------------------------------

_DUMP = {Dfa: dfa_to_json, Mo1Qfa: mo1qfa_to_json, Mm1Qfa: mm1qfa_to_json,
         KLetterQfa: kletter_to_json, QfaCL: qfacl_to_json, Qfac: qfac_to_json,
         DcqMachine: dcq_to_json, StateVector: state_to_json}
_LOAD = {"dfa": dfa_from_json, "mo1qfa": mo1qfa_from_json, "mm1qfa": mm1qfa_from_json,
         "kletter": kletter_from_json, "qfacl": qfacl_from_json, "qfac": qfac_from_json,
         "dcq": dcq_from_json, "state": state_from_json}


def to_json(obj) -> dict:
    try:
        return _DUMP[type(obj)](obj)
    except KeyError:
        raise TypeError(f"cannot serialise {type(obj).__name__}") from None


def from_json(doc: Any, model: str | None = None):
    """Load any document; ``model`` overrides or supplies the discriminator."""
    if model is None:
        if not isinstance(doc, dict) or "model" not in doc:
            raise SchemaError("document has no 'model' field")
        model = doc["model"]
    if model not in _LOAD:
        raise SchemaError(f"unknown model {model!r}; expected one of {MODELS}")
    if isinstance(doc, dict) and doc.get("model") not in (None, model):
        raise SchemaError(f"document is a {doc['model']!r}, not a {model!r}")
    if isinstance(doc, dict) and "model" not in doc:
        doc = {**doc, "model": model}
    return _LOAD[model](doc)


def dumps(obj, indent: int | None = 2) -> str:
    return json.dumps(to_json(obj), indent=indent)


def loads(text: str, model: str | None = None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e}") from None
    return from_json(doc, model)
