import os
import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from parapath.core import Affine, Dag, GppInstance
from parapath.piecewise import PLFunction
from parapath.random_instances import random_affine_instance
from parapath.rational import Q

settings.register_profile(
    "default",
    max_examples=int(os.environ.get("HYPOTHESIS_MAX_EXAMPLES", "120")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def small_q(max_num=20, max_den=6):
    return st.builds(
        lambda p, q: Q(p, q),
        st.integers(-max_num, max_num),
        st.integers(1, max_den),
    )


@st.composite
def pl_functions(draw, max_knots=5):
    """Arbitrary continuous PL functions via knot interpolation."""
    xs = draw(st.lists(small_q(), min_size=1, max_size=max_knots, unique=True))
    xs.sort()
    ys = draw(st.lists(small_q(), min_size=len(xs), max_size=len(xs)))
    ls, rs = draw(small_q(5, 3)), draw(small_q(5, 3))
    return PLFunction.from_points(list(zip(xs, ys)), ls, rs)


lines = st.tuples(small_q(6, 4), small_q(10, 4))
line_families = st.lists(lines, min_size=1, max_size=6)


def dense_points(*fns, count=500):
    """At least ``count`` rationals spanning every breakpoint with margins, plus each breakpoint +- 1/1000."""
    bps = sorted({b for f in fns for b in f.breakpoints})
    lo = (bps[0] if bps else Q(0)) - 3
    hi = (bps[-1] if bps else Q(0)) + 3
    step = (hi - lo) / (count - 1)
    pts = {lo + step * i for i in range(count)}
    eps = Q(1, 1000)
    for b in bps:
        pts.update((b - eps, b, b + eps))
    return sorted(pts)


def assert_canonical(f):
    bps = f.breakpoints
    assert len(f.pieces) == len(bps) + 1
    assert all(a < b for a, b in zip(bps, bps[1:]))
    for b, (s0, c0), (s1, c1) in zip(bps, f.pieces, f.pieces[1:]):
        assert (s0, c0) != (s1, c1), "adjacent pieces must be merged"
        assert s0 * b + c0 == s1 * b + c1, "discontinuity"


@pytest.fixture
def rng():
    return random.Random(12345)


def single_edge_instance(a=2, b=1, L=-1, x0=None):
    dag = Dag(2, 0, 1, ((0, 1),))
    return GppInstance(dag, (Affine(a, b),), (L,), None if x0 is None else (x0,))


@st.composite
def affine_instances(draw, max_vertices=8, max_edges=14, liquidation=None):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_affine_instance(
        random.Random(seed), max_vertices=max_vertices, max_edges=max_edges, liquidation=liquidation
    )
