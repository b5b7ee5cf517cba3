import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import assert_canonical, dense_points, line_families, pl_functions, small_q
from parapath.errors import ShapeViolation
from parapath.gadgets import ABS, F0, F1
from parapath.piecewise import (
    AnnotatedPL,
    PLFunction,
    annotated_max,
    annotated_min,
    compose,
    compose_envelope_sets,
    compose_piece_bound,
    evaluate,
    fold_envelope,
    lower_envelope,
    monotone_segments,
    pointwise_max,
    pointwise_min,
    upper_envelope,
)
from parapath.rational import Q

X = PLFunction.identity()


def line(s, c):
    return PLFunction.line(s, c)


# ---------------------------------------------------------------- construction


def test_constructor_validates():
    with pytest.raises(ValueError):
        PLFunction((0,), ((1, 0), (1, 1)))  # jump at 0
    with pytest.raises(ValueError):
        PLFunction((0,), ((1, 0), (1, 0)))  # unmerged
    with pytest.raises(ValueError):
        PLFunction((1, 0), ((0, 0), (0, 1), (0, 2)))
    with pytest.raises(ValueError):
        PLFunction((0,), ((1, 0),))


def test_from_points_merges_collinear_knots():
    f = PLFunction.from_points([(0, 0), (1, 1), (2, 2)], 1, 1)
    assert f == X


# ---------------------------------------------------------------- eval


def test_eval_examples():
    assert evaluate(ABS, -5) == 5
    assert F0(Q(1, 3)) == 0
    assert F1(0) == 2


@given(pl_functions(), small_q())
def test_eval_matches_piece_formula_both_sides_at_breakpoints(f, x):
    for b in f.breakpoints:
        i = f.breakpoints.index(b)
        (s0, c0), (s1, c1) = f.pieces[i], f.pieces[i + 1]
        assert f(b) == s0 * b + c0 == s1 * b + c1


# ---------------------------------------------------------------- min / max


def test_min_symmetric_crossing():
    h = pointwise_min(X, line(-1, 2))
    assert h.breakpoints == (1,) and h.num_pieces == 2


def test_min_of_three_drops_dominated_line():
    h = fold_envelope([AnnotatedPL(f, (i,)) for i, f in enumerate([X, line(-1, 2), line(0, 1)])])
    assert h.fn.num_pieces == 2
    assert 2 not in h.witnesses
    for x in dense_points(h.fn, count=1000):
        assert h.fn(x) == min(x, 2 - x, 1)


@given(pl_functions())
def test_min_idempotent(f):
    assert pointwise_min(f, f) == f
    assert pointwise_max(f, f) == f


@given(pl_functions(), pl_functions())
def test_min_max_dense_oracle(f, g):
    lo, hi = pointwise_min(f, g), pointwise_max(f, g)
    assert_canonical(lo)
    assert_canonical(hi)
    for x in dense_points(f, g, lo, hi):
        assert lo(x) == min(f(x), g(x))
        assert hi(x) == max(f(x), g(x))


@given(line_families, line_families)
def test_min_of_concave_piece_bound(a, b):
    f, g = lower_envelope(a).fn, lower_envelope(b).fn
    h = pointwise_min(f, g)
    assert h.is_concave()
    assert h.num_pieces <= f.num_pieces + g.num_pieces


def test_annotated_ties_keep_left():
    f = AnnotatedPL(X, ("left",))
    g = AnnotatedPL(X, ("right",))
    assert annotated_min(f, g).witnesses == ("left",)
    assert annotated_max(g, f).witnesses == ("right",)


@given(st.lists(pl_functions(max_knots=3), min_size=1, max_size=6))
def test_fold_matches_sequential_fold(fns):
    tagged = [AnnotatedPL(f, (i,) * f.num_pieces) for i, f in enumerate(fns)]
    seq = tagged[0]
    for t in tagged[1:]:
        seq = annotated_min(seq, t)
    folded = fold_envelope(tagged, lower=True)
    assert folded.fn == seq.fn
    for x in dense_points(folded.fn, count=100):
        w = folded.witness_at(x)
        assert fns[w](x) == folded.fn(x)


def test_witness_change_along_one_line_keeps_a_cut():
    # min(max(0, x), 0) is the zero line, but only function 1 attains it for x > 0.
    relu = AnnotatedPL(PLFunction((Q(0),), ((Q(0), Q(0)), (Q(1), Q(0)))), (0, 0))
    zero = AnnotatedPL(line(0, 0), (1,))
    h = annotated_min(relu, zero)
    assert h.fn == line(0, 0)
    assert h.cuts == (Q(0),) and h.witnesses == (0, 1)
    assert h.witness_at(Q(-5)) == 0 and h.witness_at(Q(5)) == 1
    assert [w for *_, w in h.cells()] == [0, 1]


@given(st.lists(pl_functions(max_knots=3), min_size=1, max_size=5))
def test_witness_valid_on_whole_cells(fns):
    env = fold_envelope([AnnotatedPL.uniform(f, i) for i, f in enumerate(fns)])
    assert set(env.fn.breakpoints) <= set(env.cuts)
    assert list(env.cuts) == sorted(set(env.cuts))
    for lo, hi, s, c, w in env.cells():
        probes = [x for x in (lo, hi) if x is not None]
        probes.append((lo + hi) / 2 if lo is not None and hi is not None else
                      (lo + 1 if lo is not None else (hi - 1 if hi is not None else Q(0))))
        for x in probes:
            assert fns[w](x) == env.fn(x) == s * x + c


# ---------------------------------------------------------------- compose


def test_compose_shift():
    h = compose(ABS, line(1, -1))
    assert h.breakpoints == (1,)
    assert h(-2) == 3 and h(1) == 0 and h(4) == 3


def test_compose_lowerbound_functions():
    assert compose(F1, F0)(Q(1, 9)) == 0


@given(pl_functions())
def test_compose_identity(f):
    assert compose(f, X) == f
    assert compose(X, f) == f


@given(pl_functions(), pl_functions())
def test_compose_dense_oracle(f, g):
    h = compose(f, g)
    assert_canonical(h)
    for x in dense_points(f, g, h):
        assert h(x) == f(g(x))


@given(pl_functions(), pl_functions())
def test_compose_piece_bounds(f, g):
    h = compose(f, g)
    if g.is_monotone():
        assert h.num_pieces <= f.num_pieces + g.num_pieces
    assert h.num_pieces <= compose_piece_bound(f, g)


@given(pl_functions())
def test_monotone_segments_partition_the_pieces(g):
    runs = monotone_segments(g)
    assert sum(runs) == g.num_pieces
    start = 0
    for r in runs:
        sl = g.slopes[start : start + r]
        assert all(s >= 0 for s in sl) or all(s <= 0 for s in sl)
        start += r
    if g.is_monotone():
        assert runs == [g.num_pieces]


# ---------------------------------------------------------------- envelopes


def test_lower_envelope_examples():
    env = lower_envelope([(1, 0), (-1, 2)])
    assert env.fn.breakpoints == (1,) and env.fn.num_pieces == 2
    env = lower_envelope([(2, 0), (2, 1)])
    assert env.fn == line(2, 0) and env.witnesses == (0,)


def test_single_line_family():
    env = upper_envelope([(3, -1)])
    assert env.fn == line(3, -1) and env.witnesses == (0,)


def test_duplicate_lines_smallest_index_wins():
    assert lower_envelope([(1, 0), (-1, 0), (1, 0)]).witnesses == (0, 1)
    assert upper_envelope([(5, 5), (5, 5)]).witnesses == (0,)


@given(line_families)
def test_envelopes_against_brute_force(ls):
    for env, pick, shape in (
        (lower_envelope(ls), min, PLFunction.is_concave),
        (upper_envelope(ls), max, PLFunction.is_convex),
    ):
        assert_canonical(env.fn)
        assert shape(env.fn)
        assert env.fn.num_pieces <= len({s for s, _ in ls})
        for x in dense_points(env.fn):
            best = pick(s * x + c for s, c in ls)
            assert env.fn(x) == best
            s, c = ls[env.witness_at(x)]
            assert s * x + c == best
        # witness is the smallest index among lines equal to the piece
        for (lo, hi, s, c), w in zip(env.fn.cells(), env.witnesses):
            assert w == min(i for i, l in enumerate(ls) if tuple(l) == (s, c))


def _compose_family(F, G):
    return [(sf * sg, sf * cg + cf) for (sf, cf), (sg, cg) in itertools.product(F, G)]


def test_compose_envelope_sets_identity():
    hd, hu = compose_envelope_sets(X, X, X, X)
    assert hd == X and hu == X


def test_compose_envelope_sets_two_line_families():
    F = [(1, 0), (-1, 2)]
    G = [(2, 1), (-3, 0)]
    hd, hu = compose_envelope_sets(
        lower_envelope(F).fn, upper_envelope(F).fn, lower_envelope(G).fn, upper_envelope(G).fn
    )
    fam = _compose_family(F, G)
    assert hd == lower_envelope(fam).fn
    assert hu == upper_envelope(fam).fn


def test_compose_envelope_sets_shape_check():
    with pytest.raises(ShapeViolation):
        compose_envelope_sets(ABS, X, X, X)
    with pytest.raises(ShapeViolation):
        compose_envelope_sets(X, -ABS, X, X)


@given(line_families, line_families)
def test_compose_envelope_sets_matches_enumeration_and_bounds(F, G):
    fd, fu = lower_envelope(F).fn, upper_envelope(F).fn
    gd, gu = lower_envelope(G).fn, upper_envelope(G).fn
    hd, hu = compose_envelope_sets(fd, fu, gd, gu)
    fam = _compose_family(F, G)
    assert hd == lower_envelope(fam).fn
    assert hu == upper_envelope(fam).fn
    p = PLFunction.num_pieces.fget
    assert p(hd) <= 4 * p(fd) + 2 * p(gd) + 2 * p(gu)
    assert p(hu) <= 4 * p(fu) + 2 * p(gd) + 2 * p(gu)


def test_annotated_affine_image_keeps_witnesses():
    env = lower_envelope([(1, 0), (-1, 2)])
    img = env.affine_image(-2, 1)
    assert img.witnesses == env.witnesses
    assert img.fn.is_convex()
