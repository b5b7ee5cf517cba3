"""Brute-force ground truth by exhaustive path enumeration.

Nothing here prunes or reasons about structure: every answer comes from
listing all source-target paths and evaluating them directly. These
functions are the reference the solver and the preprocessor are tested
against, so they deliberately share no code with either.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _cartesian
from typing import Sequence

from .core import Affine, Dag, GppInstance, PiecewiseAffine, path_cost
from .errors import (
    DimensionMismatch,
    NonAffineWeight,
    TooManyPaths,
    UnreachableTarget,
    ZeroLiquidation,
)
from .piecewise import (
    AnnotatedPL,
    PLFunction,
    annotated_max,
    annotated_min,
    compose,
    lower_envelope,
    upper_envelope,
)
from .rational import Q, rational

DEFAULT_CAP = 2**16


@dataclass(frozen=True)
class PathEnumeration:
    paths: tuple
    cap: int

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)


def enumerate_paths(dag: Dag, cap: int = DEFAULT_CAP) -> PathEnumeration:
    """All source-target paths, in lexicographic edge-id order."""
    found: list = []
    prefix: list = []

    def visit(u: int) -> None:
        if u == dag.target:
            if len(found) >= cap:
                raise TooManyPaths(cap)
            found.append(tuple(prefix))
            return
        for eid in dag.out_edges[u]:
            prefix.append(eid)
            visit(dag.edges[eid][1])
            prefix.pop()

    visit(dag.source)
    return PathEnumeration(tuple(found), cap)


def best_path(inst: GppInstance, x0=None, cap: int = DEFAULT_CAP) -> tuple:
    """Exact maximiser of ``path_cost``; ties go to the lexicographically smallest path."""
    best = None
    for path in enumerate_paths(inst.dag, cap):
        cost = path_cost(inst, path, x0)
        if best is None or cost > best[1]:
            best = (path, cost)
    if best is None:
        raise UnreachableTarget("no source-target path", inst.dag.target)
    return best


def _scalar_sign(inst: GppInstance) -> int:
    if inst.k != 1:
        raise DimensionMismatch("envelopes are defined for scalar instances only", inst.k)
    L = inst.liquidation[0]
    if L == 0:
        raise ZeroLiquidation("L = 0 makes every path optimal", "L")
    return 1 if L > 0 else -1


def all_path_lines(inst: GppInstance, cap: int = DEFAULT_CAP) -> list:
    """One ``(slope, intercept, path)`` per path, by forward composition."""
    if inst.k != 1 or not inst.is_affine:
        raise NonAffineWeight("all_path_lines needs a scalar instance with affine weights")
    lines = []
    for path in enumerate_paths(inst.dag, cap):
        slope, intercept = Q(1), Q(0)
        for eid in path:
            w = inst.weights[eid]
            slope, intercept = w.a * slope, w.a * intercept + w.b
        lines.append((slope, intercept, path))
    return lines


def path_function(inst: GppInstance, path: Sequence[int]) -> PLFunction:
    """The composed cost function of one path as a PL function of x0."""
    inst.dag.check_path(path)
    fn = PLFunction.identity()
    for eid in path:
        w = inst.weights[eid]
        if not isinstance(w, (Affine, PiecewiseAffine)):
            raise NonAffineWeight(f"edge {eid} is not piecewise affine", eid)
        fn = compose(w.as_pl(), fn)
    return fn


def oracle_envelope(inst: GppInstance, cap: int = DEFAULT_CAP) -> AnnotatedPL:
    """Optimal composed value as a function of x0, tagged with witness paths.

    Lower envelope when L < 0 (shortest), upper envelope when L > 0.
    """
    sign = _scalar_sign(inst)
    if inst.is_affine:
        lines = all_path_lines(inst, cap)
        env = (lower_envelope if sign < 0 else upper_envelope)([(s, c) for s, c, _ in lines])
        return AnnotatedPL(env.fn, tuple(lines[i][2] for i in env.witnesses), env.cuts)
    op = annotated_min if sign < 0 else annotated_max
    acc = None
    for path in enumerate_paths(inst.dag, cap):
        fn = path_function(inst, path)
        cur = AnnotatedPL.uniform(fn, path)
        acc = cur if acc is None else op(acc, cur)
    return acc


def round_limited_extremes(inst: GppInstance, x0, max_edges: int) -> tuple:
    """Per-vertex (min, max) composed value over source walks of <= max_edges edges.

    Unreached vertices get ``None``.
    """
    dag = inst.dag
    x = rational(x0[0] if isinstance(x0, (tuple, list)) else x0)
    lo: list = [None] * dag.vertex_count
    hi: list = [None] * dag.vertex_count

    def visit(u: int, y, depth: int) -> None:
        if lo[u] is None or y < lo[u]:
            lo[u] = y
        if hi[u] is None or y > hi[u]:
            hi[u] = y
        if depth == max_edges:
            return
        for eid in dag.out_edges[u]:
            visit(dag.edges[eid][1], inst.weights[eid](y), depth + 1)

    visit(dag.source, x, 0)
    return lo, hi


def best_path_budgeted(inst: GppInstance, x0, durations, budget: int, cap: int = DEFAULT_CAP):
    """Best path whose total duration is at most ``budget``, or ``None``."""
    best = None
    for path in enumerate_paths(inst.dag, cap):
        if sum(durations[e] for e in path) > budget:
            continue
        cost = path_cost(inst, path, x0)
        if best is None or cost > best[1]:
            best = (path, cost)
    return best


def has_equal_sum_partition(elements: Sequence[int]) -> bool:
    """Direct check over all 2^n sign patterns."""
    return any(
        sum(a if bit else -a for a, bit in zip(elements, bits)) == 0
        for bits in _cartesian((0, 1), repeat=len(elements))
    )


def has_equal_product_partition(elements: Sequence[int]) -> bool:
    """Direct check over all 2^n splits, in integers (no division)."""
    for bits in _cartesian((0, 1), repeat=len(elements)):
        left = right = 1
        for a, bit in zip(elements, bits):
            if bit:
                left *= a
            else:
                right *= a
        if left == right:
            return True
    return False
