import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lowerbound_facts import alpha_set, f_sigma, lowerbound_table, true_zero_set
from parapath.core import Affine, AffineMap, PiecewiseAffine, Quadratic, path_cost
from parapath.errors import EmptySet, NonPositiveElement
from parapath.gadgets import (
    F0,
    F1,
    all_sigmas,
    alpha,
    lowerbound_instance,
    make_gn,
    path_sigma,
    product_partition_gadget,
    set_partition_gadget,
    sigma_path,
)
from parapath.oracle import best_path, enumerate_paths, path_function
from parapath.pgpp import piecewise_envelope
from parapath.piecewise import compose
from parapath.rational import Q


def test_gn_shapes():
    dag, w = make_gn(4, Affine(1, 0), Affine(1, 1))
    assert dag.vertex_count == 5 and len(dag.edges) == 8 and len(w) == 8
    dag, _ = make_gn(1, Affine(1, 0), Affine(1, 1))
    assert dag.vertex_count == 2 and dag.edges == ((0, 1), (0, 1))
    with pytest.raises(ValueError):
        make_gn(0, Affine(1, 0), Affine(1, 1))


def test_sigma_path_bijection():
    for sigma in all_sigmas(4):
        assert path_sigma(sigma_path(sigma)) == sigma
    assert sorted(sigma_path(s) for s in all_sigmas(3)) == list(
        enumerate_paths(make_gn(3, Affine(1, 0), Affine(1, 1))[0])
    )


def test_sigma_0101_composes_innermost_first():
    inst = lowerbound_instance(4)
    expected = compose(F1, compose(F0, compose(F1, F0)))
    assert path_function(inst, sigma_path((0, 1, 0, 1))) == expected


# ---- set partition ------------------------------------------------------


def test_set_partition_examples():
    inst = set_partition_gadget([1, 2, 3])
    assert inst.dag.vertex_count == 5 and len(inst.dag.edges) == 7
    assert best_path(inst)[1] == 0
    assert -best_path(set_partition_gadget([1, 1, 1]))[1] == 1
    single = set_partition_gadget([5], delta=2)
    assert single.meta["scale"] == 3
    assert -best_path(single)[1] == 15


def test_set_partition_layers_and_meta():
    inst = set_partition_gadget([4, -2], epsilon=Q(1, 2), delta=Q(7, 2))
    assert inst.weights[:4] == (Affine(1, 20), Affine(1, -20), Affine(1, -10), Affine(1, 10))
    assert isinstance(inst.weights[4], PiecewiseAffine)
    assert inst.liquidation == (-1,) and inst.x0 == (0,)
    assert inst.meta["epsilon"] == Q(1, 2)
    sq = set_partition_gadget([4, -2], last_edge="square")
    assert sq.weights[-1] == Quadratic(1, 0, 0)


def test_set_partition_errors():
    with pytest.raises(EmptySet):
        set_partition_gadget([])


@given(
    st.lists(st.integers(-12, 12).filter(bool), min_size=1, max_size=8),
    st.sampled_from([Q(0), Q(1), Q(7, 2)]),
    st.sampled_from(["abs", "square"]),
)
def test_set_partition_gap(elements, delta, last_edge):
    inst = set_partition_gadget(elements, delta=delta, last_edge=last_edge)
    sums = set()
    for path in enumerate_paths(inst.dag):
        cost = -path_cost(inst, path)
        assert cost == 0 or cost > delta
        sums.add(cost)
    has_zero_split = any(
        sum(a if b else -a for a, b in zip(elements, bits)) == 0
        for bits in itertools.product((0, 1), repeat=len(elements))
    )
    assert (0 in sums) == has_zero_split


# ---- product partition --------------------------------------------------


def test_product_partition_examples():
    inst = product_partition_gadget([6, 2, 3, 1])
    assert inst.k == 2 and len(inst.dag.edges) == 8
    assert all(isinstance(w, AffineMap) for w in inst.weights)
    assert best_path(inst)[1] == -2
    best = best_path(product_partition_gadget([2, 3]))[1]
    assert best < -2
    assert best == max(-(a + 1 / a) for a in (Q(6), Q(2, 3), Q(3, 2), Q(1, 6)))
    assert best_path(product_partition_gadget([1]))[1] == -2


def test_product_partition_errors():
    with pytest.raises(EmptySet):
        product_partition_gadget([])
    with pytest.raises(NonPositiveElement):
        product_partition_gadget([3, 0])


@given(st.lists(st.integers(1, 12), min_size=1, max_size=7))
def test_product_partition_cost_formula(elements):
    inst = product_partition_gadget(elements)
    for path in enumerate_paths(inst.dag):
        sigma = path_sigma(path)
        a = Q(1)
        for x, bit in zip(elements, sigma):
            a = a * x if bit == 0 else a / x
        assert path_cost(inst, path) == -(a + 1 / a)


# ---- alpha --------------------------------------------------------------


def test_alpha_small():
    assert alpha(1).values == {(0,): Q(1, 3), (1,): Q(2, 3)}
    assert alpha(2).values == {
        (0, 0): Q(2, 9),
        (0, 1): Q(1, 9),
        (1, 0): Q(7, 9),
        (1, 1): Q(8, 9),
    }


@pytest.mark.parametrize("n", range(1, 11))
def test_alpha_properties_i_to_iii(n):
    vals = alpha(n).values
    assert len(vals) == 2**n and len(set(vals.values())) == 2**n
    for sigma, a in vals.items():
        assert 0 < a < 1
        if sigma[0] == 0:
            assert 0 <= a <= Q(1, 3)
        else:
            assert Q(2, 3) <= a <= 1
        assert a.denominator == 3**n


@pytest.mark.parametrize("n", range(1, 9))
def test_alpha_property_iv(n):
    cert = alpha(n)
    for tau, a in cert.values.items():
        for sigma in all_sigmas(n):
            assert (f_sigma(sigma, a) == 0) == (sigma == tau)


# ---- lower-bound family -------------------------------------------------


def test_lowerbound_instance_shape():
    inst = lowerbound_instance(5)
    assert inst.dag.vertex_count == 6 and len(inst.dag.edges) == 10
    assert inst.liquidation == (-1,) and inst.x0 is None
    assert inst.weights[0].f == F0 and inst.weights[1].f == F1


def test_lowerbound_n1_envelope_two_pieces():
    assert len(piecewise_envelope(lowerbound_instance(1)).runs()) == 2


@pytest.mark.parametrize("n", range(1, 6))
def test_path_costs_nonnegative_everywhere(n):
    inst = lowerbound_instance(n)
    for path in enumerate_paths(inst.dag):
        f = path_function(inst, path)
        assert all(f(b) >= 0 for b in f.breakpoints)
        assert f.slopes[0] <= 0 <= f.slopes[-1]


@pytest.mark.parametrize("n", range(1, 6))
def test_true_zero_set(n):
    """The envelope vanishes exactly at k/3^n, 3 not dividing k: a superset of the alpha values."""
    env = piecewise_envelope(lowerbound_instance(n)).fn
    zeros = {b for b in env.breakpoints if env(b) == 0}
    assert zeros == true_zero_set(n)
    assert alpha_set(n) <= zeros
    assert len(zeros) == 2 * 3 ** (n - 1)
    # direct check of the point that breaks the count claim
    assert f_sigma((0, 0), Q(4, 9)) == 0


def test_lowerbound_n5_envelope_has_32_pieces():
    """Literal count claim. Expected to FAIL: 122 witness intervals (32 distinct paths)."""
    table = lowerbound_table(5)
    assert len({e.path for e in table.entries}) == 32
    assert len(table) == 32
