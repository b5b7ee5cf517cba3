"""Bellman-Ford style solver for scalar GPP with affine edge weights.

The relaxation keeps, for every vertex, both the largest and the smallest
value reachable from the source. An edge with a non-negative slope maps
max to max and min to min; a negative slope swaps them. Rounds are
synchronous (each round reads the previous round's values), so after
round ``k`` the state is exactly the extremes over paths with at most
``k`` edges. That is what makes the round cap double as a time budget.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping

from .core import Affine, Dag, GppInstance, validate_instance
from .errors import DimensionMismatch, NoFeasiblePath, NonAffineWeight
from .rational import rational

MAX, MIN = "max", "min"


@dataclass(frozen=True)
class RelaxState:
    """Values and parent pointers after one round.

    ``None`` in ``r_max``/``r_min`` stands for -inf/+inf. A pointer is
    ``(edge id, tree of the predecessor, round it was set in)``.
    """

    r_max: tuple
    r_min: tuple
    p_max: tuple
    p_min: tuple


def _check_solvable(inst: GppInstance) -> None:
    if inst.k != 1:
        raise DimensionMismatch("the linear solver handles scalar instances only", inst.k)
    for eid, w in enumerate(inst.weights):
        if not isinstance(w, Affine):
            raise NonAffineWeight(f"edge {eid} has a non-affine weight", eid)
    validate_instance(inst)


def _start_value(inst: GppInstance, x0):
    if x0 is None:
        if inst.x0 is None:
            raise DimensionMismatch("no x0 given and the instance has none", "x0")
        return inst.x0[0]
    if isinstance(x0, (tuple, list)):
        if len(x0) != 1:
            raise DimensionMismatch(f"scalar x0 expected, got {len(x0)} entries", "x0")
        return rational(x0[0])
    return rational(x0)


def relax(dag: Dag, weights, x0, rounds: int) -> list:
    """Run ``rounds`` synchronous relaxation rounds; return every intermediate state."""
    n = dag.vertex_count
    s = dag.source
    r_max: list = [None] * n
    r_min: list = [None] * n
    p_max: list = [None] * n
    p_min: list = [None] * n
    r_max[s] = r_min[s] = rational(x0)
    states = [RelaxState(tuple(r_max), tuple(r_min), tuple(p_max), tuple(p_min))]
    for k in range(1, rounds + 1):
        old_max, old_min = states[-1].r_max, states[-1].r_min
        for eid, (u, v) in enumerate(dag.edges):
            if old_max[u] is None:
                continue
            w = weights[eid]
            if w.a >= 0:
                hi_tree, hi_val, lo_tree, lo_val = MAX, old_max[u], MIN, old_min[u]
            else:
                hi_tree, hi_val, lo_tree, lo_val = MIN, old_min[u], MAX, old_max[u]
            cand = w(hi_val)
            if r_max[v] is None or r_max[v] < cand:
                r_max[v] = cand
                p_max[v] = (eid, hi_tree, k)
            cand = w(lo_val)
            if r_min[v] is None or r_min[v] > cand:
                r_min[v] = cand
                p_min[v] = (eid, lo_tree, k)
        states.append(RelaxState(tuple(r_max), tuple(r_min), tuple(p_max), tuple(p_min)))
        if r_max == list(old_max) and r_min == list(old_min):
            break
    return states


def _trace(dag: Dag, states: list, vertex: int, tree: str) -> tuple:
    # Walk pointers back in time: a pointer set in round k was computed
    # from the predecessor's state after round k-1.
    path = []
    k = len(states) - 1
    while vertex != dag.source:
        st = states[k]
        eid, prev_tree, set_round = (st.p_max if tree == MAX else st.p_min)[vertex]
        path.append(eid)
        vertex = dag.edges[eid][0]
        tree = prev_tree
        k = set_round - 1
    return tuple(reversed(path))


def _pick(dag: Dag, states: list, L) -> tuple:
    last = states[-1]
    t = dag.target
    if L > 0:
        tree, value = MAX, last.r_max[t]
    elif L < 0:
        tree, value = MIN, last.r_min[t]
    else:
        warnings.warn("L = 0: every path has cost 0, returning an arbitrary one", stacklevel=3)
        tree, value = MAX, last.r_max[t]
    return _trace(dag, states, t, tree), L * value


def solve_scalar_linear(inst: GppInstance, x0=None) -> tuple:
    """Optimal ``(path, cost)`` at ``x0`` in O(n * m) exact operations."""
    _check_solvable(inst)
    x0 = _start_value(inst, x0)
    dag = inst.dag
    states = relax(dag, inst.weights, x0, dag.vertex_count - 1)
    return _pick(dag, states, inst.liquidation[0])


def expand_durations(inst: GppInstance, durations: Mapping[int, int]) -> tuple:
    """Replace each edge by a chain of ``duration`` edges.

    The first chain edge carries the original weight, the rest are the
    identity. Returns ``(dag, weights, origin)`` where ``origin[j]`` is the
    original edge id for chain heads and ``None`` otherwise.
    """
    dag = inst.dag
    next_vertex = dag.vertex_count
    edges, weights, origin = [], [], []
    identity = Affine(1, 0)
    for eid, (u, v) in enumerate(dag.edges):
        if eid not in durations:
            raise DimensionMismatch(f"edge {eid} has no duration", eid)
        d = durations[eid]
        if int(d) != d or d < 1:
            raise ValueError(f"edge {eid}: duration must be a positive integer, got {d!r}")
        d = int(d)
        prev = u
        for step in range(d):
            nxt = v if step == d - 1 else next_vertex
            if step != d - 1:
                next_vertex += 1
            edges.append((prev, nxt))
            weights.append(inst.weights[eid] if step == 0 else identity)
            origin.append(eid if step == 0 else None)
            prev = nxt
    exp = Dag(next_vertex, dag.source, dag.target, tuple(edges))
    return exp, tuple(weights), tuple(origin)


def solve_scalar_linear_budgeted(
    inst: GppInstance, x0, durations: Mapping[int, int], budget: int
) -> tuple:
    """Optimal ``(path, cost)`` among paths with total duration <= ``budget``."""
    _check_solvable(inst)
    if int(budget) != budget or budget < 1:
        raise ValueError(f"budget must be a positive integer, got {budget!r}")
    x0 = _start_value(inst, x0)
    exp, weights, origin = expand_durations(inst, durations)
    rounds = min(int(budget), exp.vertex_count - 1)
    states = relax(exp, weights, x0, rounds)
    if states[-1].r_max[exp.target] is None:
        raise NoFeasiblePath(f"no path fits within budget {budget}", budget)
    path, cost = _pick(exp, states, inst.liquidation[0])
    return tuple(origin[e] for e in path if origin[e] is not None), cost
