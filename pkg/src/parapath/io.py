"""JSON interchange for instances and tables.

Every rational travels as a canonical string ("p/q", or "p" when the
denominator is 1). Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import json
from typing import Any

from .core import Affine, AffineMap, Dag, GppInstance, PiecewiseAffine, Quadratic
from .errors import DanglingEdge, DimensionMismatch, GppError
from .pgpp import PgppTable, TableEntry
from .piecewise import PLFunction
from .rational import fmt, rational


class FormatError(GppError):
    """Malformed or unsupported document."""


_INSTANCE_KEYS = {"kind", "k", "vertices", "source", "target", "edges", "L", "x0"}
_OPTIONAL_INSTANCE_KEYS = {"meta"}
_EDGE_KEYS = {"id", "from", "to", "weight"}
_WEIGHT_KEYS = {
    "affine": {"type", "a", "b"},
    "piecewise": {"type", "breakpoints", "pieces"},
    "quadratic": {"type", "a", "b", "c"},
    "matrix": {"type", "A", "b"},
}
_TABLE_KEYS = {"objective_sign", "entries"}
_ENTRY_LINE_KEYS = {"x_lo", "x_hi", "slope", "intercept", "path"}
_ENTRY_PL_KEYS = {"x_lo", "x_hi", "breakpoints", "pieces", "path"}


def _keys(obj: Any, required: set, optional: set = frozenset(), where: str = "") -> None:
    if not isinstance(obj, dict):
        raise FormatError(f"{where or 'document'}: expected an object")
    missing = required - obj.keys()
    unknown = obj.keys() - required - optional
    if missing:
        raise FormatError(f"{where or 'document'}: missing {sorted(missing)}")
    if unknown:
        raise FormatError(f"{where or 'document'}: unknown fields {sorted(unknown)}")


def _q(value, where: str):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise FormatError(f"{where}: rationals are strings like '3' or '-2/5'")
    try:
        return rational(value)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: {exc}") from exc


def _pl_to_json(f: PLFunction) -> dict:
    return {
        "breakpoints": [fmt(b) for b in f.breakpoints],
        "pieces": [[fmt(s), fmt(c)] for s, c in f.pieces],
    }


def _pl_from_json(obj: dict, where: str) -> PLFunction:
    bps = [_q(b, where) for b in obj["breakpoints"]]
    pieces = obj["pieces"]
    if not isinstance(pieces, list) or any(not isinstance(p, list) or len(p) != 2 for p in pieces):
        raise FormatError(f"{where}: pieces must be [slope, intercept] pairs")
    try:
        return PLFunction(tuple(bps), tuple((_q(s, where), _q(c, where)) for s, c in pieces))
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def weight_to_json(w) -> dict:
    if isinstance(w, Affine):
        return {"type": "affine", "a": fmt(w.a), "b": fmt(w.b)}
    if isinstance(w, PiecewiseAffine):
        return {"type": "piecewise", **_pl_to_json(w.f)}
    if isinstance(w, Quadratic):
        return {"type": "quadratic", "a": fmt(w.a), "b": fmt(w.b), "c": fmt(w.c)}
    if isinstance(w, AffineMap):
        return {
            "type": "matrix",
            "A": [[fmt(v) for v in row] for row in w.matrix],
            "b": [fmt(v) for v in w.offset],
        }
    raise TypeError(f"unsupported weight {w!r}")


def weight_from_json(obj: Any, where: str):
    if not isinstance(obj, dict) or obj.get("type") not in _WEIGHT_KEYS:
        raise FormatError(f"{where}: weight type must be one of {sorted(_WEIGHT_KEYS)}")
    kind = obj["type"]
    _keys(obj, _WEIGHT_KEYS[kind], where=where)
    if kind == "affine":
        return Affine(_q(obj["a"], where), _q(obj["b"], where))
    if kind == "piecewise":
        return PiecewiseAffine(_pl_from_json(obj, where))
    if kind == "quadratic":
        return Quadratic(_q(obj["a"], where), _q(obj["b"], where), _q(obj["c"], where))
    matrix = obj["A"]
    if not isinstance(matrix, list) or not all(isinstance(r, list) for r in matrix):
        raise FormatError(f"{where}: A must be a list of rows")
    return AffineMap(
        tuple(tuple(_q(v, where) for v in row) for row in matrix),
        tuple(_q(v, where) for v in obj["b"]),
    )


def _meta_to_json(meta) -> dict:
    out = {}
    for key, value in meta.items():
        if isinstance(value, (list, tuple)):
            out[key] = [v if isinstance(v, str) else fmt(v) for v in value]
        elif isinstance(value, str):
            out[key] = value
        else:
            out[key] = fmt(value)
    return out


def instance_to_json(inst: GppInstance) -> dict:
    names = [f"v{i}" for i in range(inst.dag.vertex_count)]
    doc = {
        "kind": inst.kind,
        "k": inst.k,
        "vertices": names,
        "source": names[inst.dag.source],
        "target": names[inst.dag.target],
        "edges": [
            {"id": eid, "from": names[u], "to": names[v], "weight": weight_to_json(w)}
            for eid, ((u, v), w) in enumerate(zip(inst.dag.edges, inst.weights))
        ],
        "L": [fmt(v) for v in inst.liquidation],
        "x0": None if inst.x0 is None else [fmt(v) for v in inst.x0],
    }
    if inst.meta:
        doc["meta"] = _meta_to_json(inst.meta)
    return doc


def instance_from_json(doc: Any) -> GppInstance:
    _keys(doc, _INSTANCE_KEYS, _OPTIONAL_INSTANCE_KEYS)
    if doc["kind"] not in ("scalar", "vector"):
        raise FormatError("kind must be 'scalar' or 'vector'")
    k = doc["k"]
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise FormatError("k must be a positive integer")
    if (doc["kind"] == "scalar") != (k == 1):
        raise DimensionMismatch(f"kind {doc['kind']!r} disagrees with k = {k}", "k")
    names = doc["vertices"]
    if not isinstance(names, list) or len(set(names)) != len(names):
        raise FormatError("vertices must be a list of distinct names")
    index = {name: i for i, name in enumerate(names)}

    def vid(name, where):
        if name not in index:
            raise DanglingEdge(f"{where}: unknown vertex {name!r}", name)
        return index[name]

    edges_doc = doc["edges"]
    if not isinstance(edges_doc, list):
        raise FormatError("edges must be a list")
    edges, weights = [], []
    for pos, e in enumerate(edges_doc):
        where = f"edges[{pos}]"
        _keys(e, _EDGE_KEYS, where=where)
        if e["id"] != pos:
            raise FormatError(f"{where}: edge ids must be dense and in order, got {e['id']!r}")
        edges.append((vid(e["from"], where), vid(e["to"], where)))
        weights.append(weight_from_json(e["weight"], where))
    L = doc["L"]
    if not isinstance(L, list):
        raise FormatError("L must be a list")
    if len(L) != k:
        raise DimensionMismatch(f"L has {len(L)} entries, k = {k}", "L")
    x0 = doc["x0"]
    if x0 is not None and not isinstance(x0, list):
        raise FormatError("x0 must be a list or null")
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise FormatError("meta must be an object")
    dag = Dag(len(names), vid(doc["source"], "source"), vid(doc["target"], "target"), tuple(edges))
    return GppInstance(
        dag,
        tuple(weights),
        tuple(_q(v, "L") for v in L),
        None if x0 is None else tuple(_q(v, "x0") for v in x0),
        meta,
    )


def _bound_to_json(x, inf: str) -> str:
    return inf if x is None else fmt(x)


def _bound_from_json(value, inf: str, where: str):
    return None if value == inf else _q(value, where)


def table_to_json(table: PgppTable) -> dict:
    entries = []
    for e in table.entries:
        doc = {"x_lo": _bound_to_json(e.x_lo, "-inf"), "x_hi": _bound_to_json(e.x_hi, "+inf")}
        if len(e.pieces) == 1:
            doc["slope"], doc["intercept"] = fmt(e.pieces[0][0]), fmt(e.pieces[0][1])
        else:
            doc["breakpoints"] = [fmt(b) for b in e.breakpoints]
            doc["pieces"] = [[fmt(s), fmt(c)] for s, c in e.pieces]
        doc["path"] = list(e.path)
        entries.append(doc)
    return {"objective_sign": table.objective_sign, "entries": entries}


def table_from_json(doc: Any) -> PgppTable:
    _keys(doc, _TABLE_KEYS)
    entries = []
    if not isinstance(doc["entries"], list):
        raise FormatError("entries must be a list")
    for pos, e in enumerate(doc["entries"]):
        where = f"entries[{pos}]"
        if isinstance(e, dict) and "slope" in e:
            _keys(e, _ENTRY_LINE_KEYS, where=where)
            pieces = ((_q(e["slope"], where), _q(e["intercept"], where)),)
            bps: tuple = ()
        else:
            _keys(e, _ENTRY_PL_KEYS, where=where)
            bps = tuple(_q(b, where) for b in e["breakpoints"])
            pieces = tuple((_q(s, where), _q(c, where)) for s, c in e["pieces"])
            if len(pieces) != len(bps) + 1:
                raise FormatError(f"{where}: pieces/breakpoints length mismatch")
        path = e["path"]
        if not isinstance(path, list) or not all(isinstance(i, int) for i in path):
            raise FormatError(f"{where}: path must be a list of edge ids")
        entries.append(
            TableEntry(
                _bound_from_json(e["x_lo"], "-inf", where),
                _bound_from_json(e["x_hi"], "+inf", where),
                pieces,
                tuple(path),
                bps,
            )
        )
    try:
        return PgppTable(tuple(entries), doc["objective_sign"])
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"
