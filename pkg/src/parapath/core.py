"""Data model: multigraph DAGs, edge weight functions and GPP instances.

Vertices are plain integer ids ``0..n-1`` and edges are identified by their
position in ``Dag.edges``. Paths are tuples of edge ids. All numbers are
exact ``mpq`` rationals.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Optional, Sequence, Union

from .errors import (
    CycleDetected,
    DanglingEdge,
    DimensionMismatch,
    InvalidPath,
    InvalidWeight,
    UnreachableTarget,
)
from .piecewise import PLFunction
from .rational import Q, rational

Path = tuple


@dataclass(frozen=True)
class Dag:
    """Directed acyclic multigraph with distinguished source and target.

    ``edges[i] == (u, v)`` is edge ``i``; parallel edges are allowed.
    Construction verifies acyclicity by topological sort.
    """

    vertex_count: int
    source: int
    target: int
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        n = self.vertex_count
        if n < 2:
            raise DimensionMismatch("a DAG needs at least two vertices", n)
        for v in (self.source, self.target):
            if not 0 <= v < n:
                raise DanglingEdge(f"vertex {v} out of range 0..{n - 1}", v)
        if self.source == self.target:
            raise DimensionMismatch("source and target must differ", self.source)
        for eid, (u, v) in enumerate(self.edges):
            if not (0 <= u < n and 0 <= v < n):
                raise DanglingEdge(f"edge {eid} ({u}->{v}) references a missing vertex", eid)
        _ = self.topological_order

    @cached_property
    def out_edges(self) -> tuple:
        out = [[] for _ in range(self.vertex_count)]
        for eid, (u, _) in enumerate(self.edges):
            out[u].append(eid)
        return tuple(tuple(x) for x in out)

    @cached_property
    def in_edges(self) -> tuple:
        inc = [[] for _ in range(self.vertex_count)]
        for eid, (_, v) in enumerate(self.edges):
            inc[v].append(eid)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def topological_order(self) -> tuple:
        indeg = [0] * self.vertex_count
        for _, v in self.edges:
            indeg[v] += 1
        queue = deque(v for v in range(self.vertex_count) if indeg[v] == 0)
        order = []
        while queue:
            u = queue.popleft()
            order.append(u)
            for eid in self.out_edges[u]:
                v = self.edges[eid][1]
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
        if len(order) != self.vertex_count:
            stuck = min(v for v in range(self.vertex_count) if indeg[v] > 0)
            raise CycleDetected(f"directed cycle through vertex {stuck}", stuck)
        return tuple(order)

    def _reach(self, start: int, forward: bool) -> frozenset:
        adj = self.out_edges if forward else self.in_edges
        end = 1 if forward else 0
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for eid in adj[u]:
                w = self.edges[eid][end]
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return frozenset(seen)

    @cached_property
    def reachable_from_source(self) -> frozenset:
        return self._reach(self.source, True)

    @cached_property
    def reaching_target(self) -> frozenset:
        return self._reach(self.target, False)

    @cached_property
    def useful_vertices(self) -> frozenset:
        """Vertices lying on at least one source-target path."""
        return self.reachable_from_source & self.reaching_target

    def check_path(self, path: Sequence[int]) -> None:
        if not path:
            raise InvalidPath("empty path", tuple(path))
        at = self.source
        for eid in path:
            if not 0 <= eid < len(self.edges):
                raise InvalidPath(f"unknown edge id {eid}", tuple(path))
            u, v = self.edges[eid]
            if u != at:
                raise InvalidPath(f"edge {eid} leaves {u}, expected {at}", tuple(path))
            at = v
        if at != self.target:
            raise InvalidPath(f"path ends at {at}, not the target {self.target}", tuple(path))


@dataclass(frozen=True)
class Affine:
    """``x -> a*x + b``."""

    a: object
    b: object

    def __post_init__(self):
        object.__setattr__(self, "a", rational(self.a))
        object.__setattr__(self, "b", rational(self.b))

    def __call__(self, x):
        return self.a * x + self.b

    def as_pl(self) -> PLFunction:
        return PLFunction.line(self.a, self.b)


@dataclass(frozen=True)
class PiecewiseAffine:
    f: PLFunction

    def __post_init__(self):
        if not isinstance(self.f, PLFunction):
            raise InvalidWeight("PiecewiseAffine wraps a PLFunction")
        if self.f.num_pieces < 2:
            raise InvalidWeight("a one-piece function must be stored as Affine")

    def __call__(self, x):
        return self.f(x)

    def as_pl(self) -> PLFunction:
        return self.f


@dataclass(frozen=True)
class Quadratic:
    """``x -> a*x^2 + b*x + c`` with ``a != 0``; point evaluation only."""

    a: object
    b: object
    c: object

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, rational(getattr(self, name)))
        if self.a == 0:
            raise InvalidWeight("quadratic weight needs a nonzero leading coefficient")

    def __call__(self, x):
        return (self.a * x + self.b) * x + self.c


@dataclass(frozen=True)
class AffineMap:
    """``x -> M x + b`` on k-vectors, k >= 2."""

    matrix: tuple
    offset: tuple

    def __post_init__(self):
        m = tuple(tuple(rational(v) for v in row) for row in self.matrix)
        b = tuple(rational(v) for v in self.offset)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "offset", b)
        k = len(b)
        if k < 2:
            raise DimensionMismatch("vector weights need dimension k >= 2", k)
        if len(m) != k or any(len(row) != k for row in m):
            raise DimensionMismatch(f"matrix shape does not match offset length {k}", k)

    @property
    def k(self) -> int:
        return len(self.offset)

    def __call__(self, x):
        return tuple(
            sum((mij * xj for mij, xj in zip(row, x)), bi)
            for row, bi in zip(self.matrix, self.offset)
        )

    @classmethod
    def diagonal(cls, *entries) -> "AffineMap":
        k = len(entries)
        return cls(
            tuple(tuple(entries[i] if i == j else 0 for j in range(k)) for i in range(k)),
            (0,) * k,
        )


ScalarWeight = Union[Affine, PiecewiseAffine, Quadratic]
Weight = Union[Affine, PiecewiseAffine, Quadratic, AffineMap]
_SCALAR = (Affine, PiecewiseAffine, Quadratic)


@dataclass(frozen=True)
class GppInstance:
    """``(G, W, L, x0)``: graph, per-edge weights, liquidation vector, start value.

    ``meta`` carries free-form generator parameters and is ignored by
    equality.
    """

    dag: Dag
    weights: tuple
    liquidation: tuple
    x0: Optional[tuple] = None
    meta: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(self, "liquidation", tuple(rational(v) for v in self.liquidation))
        if self.x0 is not None:
            object.__setattr__(self, "x0", tuple(rational(v) for v in self.x0))
        _check_structure(self)

    @property
    def k(self) -> int:
        return len(self.liquidation)

    @property
    def kind(self) -> str:
        return "scalar" if self.k == 1 else "vector"

    @property
    def is_affine(self) -> bool:
        return all(isinstance(w, Affine) for w in self.weights)


def _check_structure(inst: GppInstance) -> None:
    m = len(inst.dag.edges)
    if len(inst.weights) != m:
        raise DimensionMismatch(f"{m} edges but {len(inst.weights)} weights", len(inst.weights))
    k = len(inst.liquidation)
    if k < 1:
        raise DimensionMismatch("liquidation vector is empty", k)
    if inst.x0 is not None and len(inst.x0) != k:
        raise DimensionMismatch(f"x0 has {len(inst.x0)} entries, L has {k}", "x0")
    for eid, w in enumerate(inst.weights):
        if k == 1:
            if not isinstance(w, _SCALAR):
                raise DimensionMismatch(f"edge {eid}: scalar instance with a vector weight", eid)
        else:
            if not isinstance(w, AffineMap):
                raise DimensionMismatch(f"edge {eid}: vector instance needs AffineMap weights", eid)
            if w.k != k:
                raise DimensionMismatch(f"edge {eid}: map of dimension {w.k}, L has {k}", eid)


def validate_instance(inst: GppInstance) -> None:
    """Raise the first violated invariant; return ``None`` when the instance is sound."""
    _ = inst.dag.topological_order
    _check_structure(inst)
    if inst.dag.target not in inst.dag.reachable_from_source:
        raise UnreachableTarget(
            f"target {inst.dag.target} is unreachable from source {inst.dag.source}",
            inst.dag.target,
        )


def as_vector(x, k: int) -> tuple:
    if isinstance(x, (tuple, list)):
        vec = tuple(rational(v) for v in x)
    else:
        vec = (rational(x),)
    if len(vec) != k:
        raise DimensionMismatch(f"expected a {k}-vector, got {len(vec)} entries", "x0")
    return vec


def apply_path(inst: GppInstance, path: Sequence[int], x0) -> tuple:
    """The composed image ``w_{e_r}(...w_{e_1}(x0)...)`` as a k-vector."""
    inst.dag.check_path(path)
    vec = as_vector(x0, inst.k)
    if inst.k == 1:
        y = vec[0]
        for eid in path:
            y = inst.weights[eid](y)
        return (y,)
    for eid in path:
        vec = inst.weights[eid](vec)
    return vec


def path_cost(inst: GppInstance, path: Sequence[int], x0=None):
    """``L . w_{e_r}(...w_{e_1}(x0)...)``, exactly."""
    if x0 is None:
        if inst.x0 is None:
            raise DimensionMismatch("no x0 given and the instance has none", "x0")
        x0 = inst.x0
    image = apply_path(inst, path, x0)
    return sum((l * y for l, y in zip(inst.liquidation, image)), Q(0))
