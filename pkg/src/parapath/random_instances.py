"""Seeded random scalar instances for benchmarks and property tests."""

from __future__ import annotations

import random

from .core import Affine, Dag, GppInstance


def random_dag(rng: random.Random, n_vertices: int, n_edges: int) -> Dag:
    """A DAG whose target is reachable from its source.

    A random backbone path from source to target is laid first, then the
    remaining edges (parallel ones included) go between random ordered
    pairs. Vertex ids are shuffled so id order is not a topological order.
    """
    if n_vertices < 2:
        raise ValueError("need at least two vertices")
    interior = list(range(1, n_vertices - 1))
    backbone = [0] + sorted(rng.sample(interior, rng.randint(0, len(interior)))) + [n_vertices - 1]
    edges = list(zip(backbone, backbone[1:]))
    while len(edges) < n_edges:
        u, v = sorted(rng.sample(range(n_vertices), 2))
        edges.append((u, v))
    rng.shuffle(edges)
    label = list(range(n_vertices))
    rng.shuffle(label)
    return Dag(
        n_vertices,
        label[0],
        label[n_vertices - 1],
        tuple((label[u], label[v]) for u, v in edges),
    )


def random_affine_instance(
    rng: random.Random,
    max_vertices: int = 12,
    max_edges: int = 24,
    coef: int = 9,
    liquidation=None,
    x0_range: int = 10,
    vertices: int | None = None,
    edges: int | None = None,
) -> GppInstance:
    """Scalar instance with integer affine weights ``a, b`` in ``[-coef, coef]``.

    Vertex and edge counts are drawn up to the maxima unless given exactly.
    """
    n = vertices if vertices is not None else rng.randint(2, max_vertices)
    m = edges if edges is not None else rng.randint(1, max_edges)
    dag = random_dag(rng, n, m)
    weights = tuple(
        Affine(rng.randint(-coef, coef), rng.randint(-coef, coef)) for _ in dag.edges
    )
    L = liquidation if liquidation is not None else rng.choice((-1, 1))
    x0 = rng.randint(-x0_range, x0_range)
    return GppInstance(dag, weights, (L,), (x0,))
