"""Preprocessing: the optimal-path table over every start value x0.

For affine weights the optimal composed value at a vertex, as a function
of x0, is an envelope of lines. It is built vertex by vertex in
topological order: an incoming edge ``x -> a*x + b`` maps the predecessor's
lower envelope onto candidates for the new lower envelope when ``a >= 0``
and the predecessor's upper envelope when ``a < 0`` (an affine image of an
interval attains its extremes at the interval's ends). Every piece records
where it came from, so witness paths are recovered by pointer walking.

Instances with piecewise-affine weights have no such shortcut (the
problem is NP-hard); the table is then built by composing every path's
cost function and folding the envelope, subject to a path cap.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .core import Affine, GppInstance, PiecewiseAffine, validate_instance
from .errors import DimensionMismatch, NonAffineWeight, TooManyPaths, ZeroLiquidation
from .piecewise import AnnotatedPL, PLFunction, _assemble, compose, fold_envelope
from .rational import rational

LOWER, UPPER = "lower", "upper"
DEFAULT_CAP = 2**16


@dataclass(frozen=True)
class EnvelopePair:
    vertex: int
    lower: AnnotatedPL
    upper: AnnotatedPL


@dataclass(frozen=True)
class TableEntry:
    """Optimal path on ``[x_lo, x_hi)`` (``None`` for an infinite end).

    ``pieces`` lists the optimal value's affine pieces on the interval,
    split at the interior ``breakpoints``; for affine instances there is
    always exactly one.
    """

    x_lo: Optional[object]
    x_hi: Optional[object]
    pieces: tuple
    path: tuple
    breakpoints: tuple = ()

    @property
    def slope(self):
        return self._line()[0]

    @property
    def intercept(self):
        return self._line()[1]

    def _line(self):
        if len(self.pieces) != 1:
            raise ValueError("entry is piecewise; use value() or pieces")
        return self.pieces[0]

    def value(self, x):
        s, c = self.pieces[bisect_right(self.breakpoints, x)]
        return s * x + c


@dataclass(frozen=True)
class PgppTable:
    entries: tuple
    objective_sign: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.objective_sign not in (1, -1):
            raise ValueError("objective_sign must be +1 or -1")
        if not self.entries:
            raise ValueError("a table needs at least one entry")
        if self.entries[0].x_lo is not None or self.entries[-1].x_hi is not None:
            raise ValueError("entries must cover the whole line")
        for a, b in zip(self.entries, self.entries[1:]):
            if a.x_hi is None or a.x_hi != b.x_lo:
                raise ValueError("entries must be contiguous")
            if a.x_lo is not None and not a.x_lo < a.x_hi:
                raise ValueError("entries must be nonempty")

    def __len__(self) -> int:
        return len(self.entries)

    @cached_property
    def starts(self) -> tuple:
        return tuple(e.x_lo for e in self.entries[1:])

    def as_function(self) -> PLFunction:
        """The optimal value over all x0 as one canonical PL function."""
        segs = []
        for e in self.entries:
            for lo, (s, c) in zip((e.x_lo,) + e.breakpoints, e.pieces):
                segs.append((lo, s, c, None))
        return _assemble(segs)[0]


def _require_scalar_sign(inst: GppInstance) -> int:
    if inst.k != 1:
        raise DimensionMismatch("tables are built for scalar instances only", inst.k)
    L = inst.liquidation[0]
    if L == 0:
        raise ZeroLiquidation("L = 0: every path is optimal everywhere", "L")
    return 1 if L > 0 else -1


def build_envelopes(inst: GppInstance) -> dict:
    """Lower/upper envelopes of source-to-v path values for every useful vertex v."""
    if inst.k != 1:
        raise DimensionMismatch("envelopes are built for scalar instances only", inst.k)
    for eid, w in enumerate(inst.weights):
        if not isinstance(w, Affine):
            raise NonAffineWeight(f"edge {eid} has a non-affine weight", eid)
    validate_instance(inst)
    dag = inst.dag
    useful = dag.useful_vertices
    envs: dict = {}
    ident = PLFunction.identity()
    for v in dag.topological_order:
        if v not in useful:
            continue
        if v == dag.source:
            envs[v] = EnvelopePair(v, AnnotatedPL(ident, (None,)), AnnotatedPL(ident, (None,)))
            continue
        lows, ups = [], []
        for eid in dag.in_edges[v]:
            u = dag.edges[eid][0]
            if u not in useful:
                continue
            w = inst.weights[eid]
            pred = envs[u]
            src_lo, tag_lo, src_up, tag_up = (
                (pred.lower, LOWER, pred.upper, UPPER)
                if w.a >= 0
                else (pred.upper, UPPER, pred.lower, LOWER)
            )
            lows.append(_tagged_image(src_lo, w, eid, tag_lo))
            ups.append(_tagged_image(src_up, w, eid, tag_up))
        envs[v] = EnvelopePair(v, fold_envelope(lows, True), fold_envelope(ups, False))
    return envs


def _tagged_image(env: AnnotatedPL, w: Affine, eid: int, which: str) -> AnnotatedPL:
    img = env.affine_image(w.a, w.b)
    tags = tuple((eid, j, which) for j in range(len(img.witnesses)))
    return AnnotatedPL(img.fn, tags, img.cuts)


def witness_path(inst: GppInstance, envs: dict, vertex: int, which: str, piece: int) -> tuple:
    """Recover the path behind one envelope cell by following provenance tags."""
    path = []
    while True:
        env = envs[vertex].lower if which == LOWER else envs[vertex].upper
        tag = env.witnesses[piece]
        if tag is None:
            break
        eid, piece, which = tag
        path.append(eid)
        vertex = inst.dag.edges[eid][0]
    return tuple(reversed(path))


def _table_from_runs(env: AnnotatedPL, paths: list, sign: int) -> PgppTable:
    # paths[i] is the witness path of cell i; consecutive cells with the
    # same witness collapse into one entry.
    entries = []
    cur = None
    for (lo, hi, s, c, _), path in zip(env.cells(), paths):
        if cur is not None and cur["path"] == path:
            if cur["pieces"][-1] != (s, c):
                cur["bps"].append(lo)
                cur["pieces"].append((s, c))
            cur["hi"] = hi
            continue
        if cur is not None:
            entries.append(cur)
        cur = {"lo": lo, "hi": hi, "pieces": [(s, c)], "bps": [], "path": path}
    entries.append(cur)
    return PgppTable(
        tuple(
            TableEntry(e["lo"], e["hi"], tuple(e["pieces"]), e["path"], tuple(e["bps"]))
            for e in entries
        ),
        sign,
    )


def build_table(inst: GppInstance, cap: int = DEFAULT_CAP) -> PgppTable:
    """Table mapping every x0 to an optimal path (shortest for L < 0, longest for L > 0).

    ``cap`` only applies to instances with piecewise-affine weights.
    """
    sign = _require_scalar_sign(inst)
    if inst.is_affine:
        envs = build_envelopes(inst)
        which = LOWER if sign < 0 else UPPER
        t = inst.dag.target
        env = envs[t].lower if sign < 0 else envs[t].upper
        paths = [witness_path(inst, envs, t, which, j) for j in range(len(env.witnesses))]
        return _table_from_runs(env, paths, sign)
    env = piecewise_envelope(inst, cap)
    return _table_from_runs(env, list(env.witnesses), sign)


def piecewise_envelope(inst: GppInstance, cap: int = DEFAULT_CAP) -> AnnotatedPL:
    """Envelope for piecewise-affine weights, tagged with witness paths.

    Path cost functions are composed incrementally along a topological
    sweep, sharing prefixes, then folded pairwise.
    """
    sign = _require_scalar_sign(inst)
    for eid, w in enumerate(inst.weights):
        if not isinstance(w, (Affine, PiecewiseAffine)):
            raise NonAffineWeight(f"edge {eid} cannot enter envelope algebra", eid)
    validate_instance(inst)
    dag = inst.dag
    useful = dag.useful_vertices
    pending_out = {v: sum(1 for e in dag.out_edges[v] if dag.edges[e][1] in useful) for v in useful}
    prefixes: dict = {dag.source: [((), PLFunction.identity())]}
    for v in dag.topological_order:
        if v not in useful or v == dag.source:
            continue
        acc = []
        for eid in dag.in_edges[v]:
            u = dag.edges[eid][0]
            if u not in useful:
                continue
            wfn = inst.weights[eid].as_pl()
            for path, fn in prefixes[u]:
                acc.append((path + (eid,), compose(wfn, fn)))
                if len(acc) > cap:
                    raise TooManyPaths(cap)
            pending_out[u] -= 1
            if pending_out[u] == 0 and u != dag.target:
                del prefixes[u]
        prefixes[v] = acc
    finals = sorted(prefixes[dag.target], key=lambda pf: pf[0])
    family = [AnnotatedPL.uniform(fn, path) for path, fn in finals]
    return fold_envelope(family, lower=sign < 0)


def query(table: PgppTable, x0) -> tuple:
    """``(path, value)`` for the entry containing ``x0``, by binary search.

    ``value`` is the optimal composed value at x0 (not multiplied by L).
    """
    x = rational(x0)
    entry = table.entries[bisect_right(table.starts, x)]
    return entry.path, entry.value(x)
