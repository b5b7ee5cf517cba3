"""Generators for the hardness and lower-bound constructions.

All three families live on the layered multigraph ``G_n``: vertices
``v_0..v_n`` with two parallel edges per layer. Edge ``2i`` (label 0) and
edge ``2i + 1`` (label 1) join ``v_i`` to ``v_{i+1}``, so a path is a bit
string read from the source and its cost composes innermost-first.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

from .core import Affine, AffineMap, Dag, GppInstance, PiecewiseAffine, Quadratic
from .errors import EmptySet, NonPositiveElement
from .piecewise import PLFunction
from .rational import Q, ceil, rational

# Piecewise weights of the exponential lower-bound family:
# f0(x) = |1 - 3x| and f1(x) = |2 - 3x|.
F0 = PLFunction((Q(1, 3),), ((-3, 1), (3, -1)))
F1 = PLFunction((Q(2, 3),), ((-3, 2), (3, -2)))
ABS = PLFunction((0,), ((-1, 0), (1, 0)))


def make_gn(n: int, f0, f1) -> tuple:
    """``(dag, weights)`` of ``G_n`` with ``f0``/``f1`` on every layer."""
    if n < 1:
        raise ValueError("G_n needs n >= 1")
    edges = []
    weights = []
    for i in range(n):
        edges += [(i, i + 1), (i, i + 1)]
        weights += [f0, f1]
    return Dag(n + 1, 0, n, tuple(edges)), tuple(weights)


def sigma_path(sigma: Sequence[int]) -> tuple:
    """Edge ids of the ``G_n`` path spelled by the bit string ``sigma``."""
    if not sigma:
        raise ValueError("sigma must be nonempty")
    return tuple(2 * i + int(b) for i, b in enumerate(sigma))


def path_sigma(path: Sequence[int]) -> tuple:
    return tuple(eid - 2 * i for i, eid in enumerate(path))


def all_sigmas(n: int):
    return product((0, 1), repeat=n)


def set_partition_gadget(elements, epsilon=0, delta=0, last_edge: str = "abs") -> GppInstance:
    """Shortest-path instance whose optimum at x0 = 0 is 0 iff ``elements`` splits into equal sums.

    Elements are scaled by ``ceil(delta + 1)`` so every nonzero path cost
    exceeds ``delta``. Layer ``i`` carries ``x + a_i`` (label 0) and
    ``x - a_i`` (label 1); a single final edge carries ``|x|`` or ``x^2``.
    """
    elements = [int(a) for a in elements]
    if not elements:
        raise EmptySet("the set must be nonempty")
    if any(a == 0 for a in elements):
        raise ValueError("elements must be nonzero")
    delta, epsilon = rational(delta), rational(epsilon)
    if delta < 0 or epsilon < 0:
        raise ValueError("epsilon and delta must be non-negative")
    if last_edge not in ("abs", "square"):
        raise ValueError("last_edge must be 'abs' or 'square'")
    scale = ceil(delta + 1)
    scaled = [scale * a for a in elements]
    n = len(scaled)
    edges, weights = [], []
    for i, a in enumerate(scaled):
        edges += [(i, i + 1), (i, i + 1)]
        weights += [Affine(1, a), Affine(1, -a)]
    edges.append((n, n + 1))
    weights.append(PiecewiseAffine(ABS) if last_edge == "abs" else Quadratic(1, 0, 0))
    meta = {
        "family": "set-partition",
        "elements": elements,
        "scale": scale,
        "epsilon": epsilon,
        "delta": delta,
        "last_edge": last_edge,
    }
    return GppInstance(Dag(n + 2, 0, n + 1, tuple(edges)), tuple(weights), (-1,), (0,), meta)


def product_partition_gadget(elements) -> GppInstance:
    """Two-parameter instance whose best cost is -2 iff ``elements`` splits into equal products.

    Layer ``i`` carries ``diag(a_i, 1/a_i)`` (label 0) and ``diag(1/a_i, a_i)``
    (label 1). With ``x0 = (-1, -1)`` and ``L = (1, 1)`` a path's cost is
    ``-(a + 1/a)`` for ``a`` the ratio of the two side products.
    """
    elements = [int(a) for a in elements]
    if not elements:
        raise EmptySet("the set must be nonempty")
    for a in elements:
        if a < 1:
            raise NonPositiveElement(f"element {a} is not a positive integer", a)
    edges, weights = [], []
    for i, a in enumerate(elements):
        inv = Q(1, a)
        edges += [(i, i + 1), (i, i + 1)]
        weights += [AffineMap.diagonal(a, inv), AffineMap.diagonal(inv, a)]
    n = len(elements)
    meta = {"family": "product-partition", "elements": elements}
    return GppInstance(Dag(n + 1, 0, n, tuple(edges)), tuple(weights), (1, 1), (-1, -1), meta)


@dataclass(frozen=True)
class AlphaCertificate:
    """For each bit string, the start value where exactly that path costs zero."""

    n: int
    values: Mapping

    def __getitem__(self, sigma):
        return self.values[tuple(sigma)]


def alpha(n: int) -> AlphaCertificate:
    """Exact zero locations for the lower-bound family.

    ``alpha_1`` solves ``f0(x) = 0`` on ``[0, 1/3]`` and ``f1(x) = 0`` on
    ``[2/3, 1]``; each further bit prepends one inverse branch:
    ``x = (1 - y) / 3`` for a leading 0 and ``x = (2 + y) / 3`` for a 1.
    """
    if n < 1:
        raise ValueError("n must be positive")
    level = {(): Q(0)}
    for _ in range(n):
        nxt = {}
        for tail, y in level.items():
            nxt[(0,) + tail] = (1 - y) / 3
            nxt[(1,) + tail] = (2 + y) / 3
        level = nxt
    return AlphaCertificate(n, dict(sorted(level.items())))


def lowerbound_instance(n: int) -> GppInstance:
    """``G_n`` with ``f0 = |1 - 3x|``, ``f1 = |2 - 3x|`` and ``L = -1``; no x0."""
    dag, weights = make_gn(n, PiecewiseAffine(F0), PiecewiseAffine(F1))
    return GppInstance(dag, weights, (-1,), None, {"family": "lowerbound", "n": n})
