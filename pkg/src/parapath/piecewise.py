"""Exact continuous piecewise-linear functions on the real line.

A :class:`PLFunction` stores strictly increasing breakpoints ``b_0 < ... < b_{m-1}``
and ``m + 1`` affine pieces. Piece ``i`` is active on ``[b_{i-1}, b_i)``
(the first piece opens at -inf, the last one runs to +inf). Functions are
kept in canonical form: continuous, and no two adjacent pieces equal.
Because of continuity the half-open convention is only visible through
witness tags, never through values.

Everything here is exact over ``mpq``; there is no tolerance anywhere.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Optional, Sequence

from .errors import ShapeViolation
from .rational import ONE, ZERO, rational

Line = tuple  # (slope, intercept)


def _rep(lo, hi):
    """A point strictly inside the cell (lo, hi); ``None`` is an infinite end."""
    if lo is None and hi is None:
        return ZERO
    if lo is None:
        return hi - ONE
    if hi is None:
        return lo + ONE
    return (lo + hi) / 2


def _inside(lo, x, hi) -> bool:
    return (lo is None or lo < x) and (hi is None or x < hi)


@dataclass(frozen=True)
class PLFunction:
    breakpoints: tuple
    pieces: tuple

    def __post_init__(self):
        bps = tuple(rational(b) for b in self.breakpoints)
        pcs = tuple((rational(s), rational(c)) for s, c in self.pieces)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", pcs)
        if len(pcs) != len(bps) + 1:
            raise ValueError(
                f"{len(bps)} breakpoints need {len(bps) + 1} pieces, got {len(pcs)}"
            )
        for i, b in enumerate(bps):
            if i and not bps[i - 1] < b:
                raise ValueError("breakpoints must be strictly increasing")
            (s0, c0), (s1, c1) = pcs[i], pcs[i + 1]
            if (s0, c0) == (s1, c1):
                raise ValueError(f"adjacent pieces {i} and {i + 1} are identical")
            if s0 * b + c0 != s1 * b + c1:
                raise ValueError(f"discontinuous at breakpoint {b}")

    @classmethod
    def _trusted(cls, breakpoints: tuple, pieces: tuple) -> "PLFunction":
        # Internal fast path: callers guarantee canonical, continuous input.
        obj = object.__new__(cls)
        object.__setattr__(obj, "breakpoints", breakpoints)
        object.__setattr__(obj, "pieces", pieces)
        return obj

    @classmethod
    def line(cls, slope, intercept) -> "PLFunction":
        return cls._trusted((), ((rational(slope), rational(intercept)),))

    @classmethod
    def identity(cls) -> "PLFunction":
        return cls.line(1, 0)

    @classmethod
    def from_points(cls, points, left_slope, right_slope) -> "PLFunction":
        """Interpolate ``(x, y)`` knots, extending with the given end slopes."""
        pts = [(rational(x), rational(y)) for x, y in points]
        if not pts:
            raise ValueError("need at least one knot")
        segs = []
        x0, y0 = pts[0]
        ls = rational(left_slope)
        segs.append((None, ls, y0 - ls * x0, None))
        for (xa, ya), (xb, yb) in zip(pts, pts[1:]):
            s = (yb - ya) / (xb - xa)
            segs.append((xa, s, ya - s * xa, None))
        xn, yn = pts[-1]
        rs = rational(right_slope)
        segs.append((xn, rs, yn - rs * xn, None))
        return _assemble(segs)[0]

    def __call__(self, x):
        s, c = self.pieces[bisect_right(self.breakpoints, x)]
        return s * x + c

    @property
    def num_pieces(self) -> int:
        return len(self.pieces)

    def piece_index(self, x) -> int:
        return bisect_right(self.breakpoints, x)

    def cells(self) -> Iterator[tuple]:
        """Yield ``(lo, hi, slope, intercept)``; ``None`` marks an infinite end."""
        bps = self.breakpoints
        n = len(bps)
        for i, (s, c) in enumerate(self.pieces):
            yield (bps[i - 1] if i else None, bps[i] if i < n else None, s, c)

    @property
    def slopes(self) -> tuple:
        return tuple(s for s, _ in self.pieces)

    def is_concave(self) -> bool:
        sl = self.slopes
        return all(a > b for a, b in zip(sl, sl[1:]))

    def is_convex(self) -> bool:
        sl = self.slopes
        return all(a < b for a, b in zip(sl, sl[1:]))

    def is_monotone(self) -> bool:
        sl = self.slopes
        return all(s >= 0 for s in sl) or all(s <= 0 for s in sl)

    def affine_image(self, a, b) -> "PLFunction":
        """The function ``x -> a * self(x) + b``."""
        a, b = rational(a), rational(b)
        if a == 0:
            return PLFunction.line(0, b)
        return PLFunction._trusted(
            self.breakpoints, tuple((a * s, a * c + b) for s, c in self.pieces)
        )

    def __neg__(self) -> "PLFunction":
        return self.affine_image(-1, 0)

    def sample_points(self, margin=ONE) -> list:
        """Breakpoints, midpoints between them, and points beyond both ends."""
        bps = self.breakpoints
        if not bps:
            return [-margin, ZERO, margin]
        pts = [bps[0] - margin]
        for i, b in enumerate(bps):
            pts.append(b)
            if i + 1 < len(bps):
                pts.append((b + bps[i + 1]) / 2)
        pts.append(bps[-1] + margin)
        return pts


@dataclass(frozen=True)
class AnnotatedPL:
    """A PL function with a provenance tag on every cell.

    Cells are the pieces of ``fn`` unless ``cuts`` refines them: a cut that
    is not a breakpoint of ``fn`` marks a witness change along a single
    line, where no one tag would be valid for the whole piece.
    """

    fn: PLFunction
    witnesses: tuple
    cuts: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "witnesses", tuple(self.witnesses))
        cuts = self.fn.breakpoints if self.cuts is None else tuple(self.cuts)
        object.__setattr__(self, "cuts", cuts)
        if len(self.witnesses) != len(cuts) + 1:
            raise ValueError("need exactly one witness per cell")

    @classmethod
    def uniform(cls, fn: PLFunction, tag) -> "AnnotatedPL":
        return cls(fn, (tag,) * fn.num_pieces)

    def __call__(self, x):
        return self.fn(x)

    def witness_at(self, x):
        return self.witnesses[bisect_right(self.cuts, x)]

    def cells(self) -> Iterator[tuple]:
        """Yield ``(lo, hi, slope, intercept, witness)`` per cell; ``None`` is infinite."""
        cuts = self.cuts
        n = len(cuts)
        for i, w in enumerate(self.witnesses):
            lo = cuts[i - 1] if i else None
            hi = cuts[i] if i < n else None
            s, c = self.fn.pieces[bisect_right(self.fn.breakpoints, _rep(lo, hi))]
            yield lo, hi, s, c, w

    def runs(self) -> list:
        """Maximal intervals with a constant witness, as ``(lo, hi, witness)``."""
        out = []
        for lo, hi, _, _, w in self.cells():
            if out and out[-1][2] == w:
                out[-1] = (out[-1][0], hi, w)
            else:
                out.append((lo, hi, w))
        return out

    def affine_image(self, a, b) -> "AnnotatedPL":
        fn = self.fn.affine_image(a, b)
        if rational(a) == 0:
            # constant image: every witness gives the same value
            return AnnotatedPL(fn, self.witnesses[:1])
        return AnnotatedPL(fn, self.witnesses, self.cuts)


def _assemble(segments: Iterable[tuple]) -> tuple:
    """Canonical ``(fn, cuts, tags)`` from ``(start, slope, intercept, tag)`` runs.

    Runs on the same line are merged in ``fn``; a cut survives wherever the
    tag changes.
    """
    bps: list = []
    pcs: list = []
    cuts: list = []
    tags: list = []
    for start, s, c, tag in segments:
        new_line = not pcs or pcs[-1][0] != s or pcs[-1][1] != c
        if new_line:
            if pcs:
                bps.append(start)
            pcs.append((s, c))
        if new_line or tags[-1] != tag:
            if tags:
                cuts.append(start)
            tags.append(tag)
    return PLFunction._trusted(tuple(bps), tuple(pcs)), tuple(cuts), tuple(tags)


def evaluate(f: PLFunction, x) -> Any:
    return f(rational(x))


def _combine(f: AnnotatedPL, g: AnnotatedPL, sign: int) -> AnnotatedPL:
    # sign=+1 keeps the pointwise minimum, -1 the maximum; ties keep f.
    xs = sorted(set(f.cuts).union(g.cuts))
    out = []
    lo = None
    for k in range(len(xs) + 1):
        hi = xs[k] if k < len(xs) else None
        rep = _rep(lo, hi)
        fs, fc = f.fn.pieces[bisect_right(f.fn.breakpoints, rep)]
        gs, gc = g.fn.pieces[bisect_right(g.fn.breakpoints, rep)]
        ft = f.witnesses[bisect_right(f.cuts, rep)]
        gt = g.witnesses[bisect_right(g.cuts, rep)]
        ds = (fs - gs) if sign > 0 else (gs - fs)
        dc = (fc - gc) if sign > 0 else (gc - fc)
        if ds == 0:
            if dc <= 0:
                out.append((lo, fs, fc, ft))
            else:
                out.append((lo, gs, gc, gt))
        else:
            xc = -dc / ds
            if _inside(lo, xc, hi):
                if ds > 0:
                    out.append((lo, fs, fc, ft))
                    out.append((xc, gs, gc, gt))
                else:
                    out.append((lo, gs, gc, gt))
                    out.append((xc, fs, fc, ft))
            elif ds * rep + dc < 0:
                out.append((lo, fs, fc, ft))
            else:
                out.append((lo, gs, gc, gt))
        lo = hi
    fn, cuts, tags = _assemble(out)
    return AnnotatedPL(fn, tags, cuts)


def _bare(f: PLFunction) -> AnnotatedPL:
    return AnnotatedPL(f, (None,) * f.num_pieces)


def pointwise_min(f: PLFunction, g: PLFunction) -> PLFunction:
    return _combine(_bare(f), _bare(g), 1).fn


def pointwise_max(f: PLFunction, g: PLFunction) -> PLFunction:
    return _combine(_bare(f), _bare(g), -1).fn


def annotated_min(f: AnnotatedPL, g: AnnotatedPL) -> AnnotatedPL:
    """Pointwise minimum carrying witnesses; on ties ``f`` wins."""
    return _combine(f, g, 1)


def annotated_max(f: AnnotatedPL, g: AnnotatedPL) -> AnnotatedPL:
    return _combine(f, g, -1)


def fold_envelope(fns: Sequence[AnnotatedPL], lower: bool = True) -> AnnotatedPL:
    """Min (or max) of many annotated functions by balanced pairwise merging.

    Order is preserved at every level, so ties resolve to the earliest
    function exactly as a left-to-right fold would.
    """
    if not fns:
        raise ValueError("empty family")
    op = annotated_min if lower else annotated_max
    layer = list(fns)
    while len(layer) > 1:
        nxt = [op(layer[i], layer[i + 1]) for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return layer[0]


def compose(f: PLFunction, g: PLFunction) -> PLFunction:
    """Exact ``f(g(x))``; ``g`` need not be monotone."""
    fb, fp = f.breakpoints, f.pieces
    nf = len(fb)
    out = []
    for lo, hi, s, c in g.cells():
        if s == 0:
            fs, fc = fp[bisect_right(fb, c)]
            out.append((lo, ZERO, fs * c + fc, None))
            continue
        if s > 0:
            k1 = 0 if lo is None else bisect_right(fb, s * lo + c)
            k2 = nf if hi is None else bisect_left(fb, s * hi + c)
            order = range(k1, k2)
            first = k1
        else:
            k1 = 0 if hi is None else bisect_right(fb, s * hi + c)
            k2 = nf if lo is None else bisect_left(fb, s * lo + c)
            order = range(k2 - 1, k1 - 1, -1)
            first = k2
        fs, fc = fp[first]
        out.append((lo, fs * s, fs * c + fc, None))
        for m in order:
            x = (fb[m] - c) / s
            fs, fc = fp[m + 1] if s > 0 else fp[m]
            out.append((x, fs * s, fs * c + fc, None))
    return _assemble(out)[0]


def monotone_segments(g: PLFunction) -> list:
    """Split ``g``'s pieces into maximal runs of non-decreasing/non-increasing slope sign.

    Returns the piece count of each run.
    """
    runs: list = []
    direction = 0
    for s in g.slopes:
        sgn = (s > 0) - (s < 0)
        if runs and (sgn == 0 or direction == 0 or sgn == direction):
            runs[-1] += 1
            if direction == 0:
                direction = sgn
        else:
            runs.append(1)
            direction = sgn
    return runs


def compose_piece_bound(f: PLFunction, g: PLFunction) -> int:
    """Upper bound on ``p(f o g)``: sum over monotone runs of ``g`` of ``p(f) + p(run)``.

    For monotone ``g`` this is the familiar ``p(f) + p(g)``.
    """
    return sum(f.num_pieces + r for r in monotone_segments(g))


def _sorted_unique_lines(lines: Sequence[tuple]) -> list:
    # Descending slope; on equal slope keep lowest intercept, then lowest index.
    keyed = sorted(
        ((rational(s), rational(c), idx) for idx, (s, c) in enumerate(lines)),
        key=lambda t: (-t[0], t[1], t[2]),
    )
    out = []
    for s, c, idx in keyed:
        if out and out[-1][0] == s:
            continue
        out.append((s, c, idx))
    return out


def _lower_hull(lines: Sequence[tuple]) -> AnnotatedPL:
    cand = _sorted_unique_lines(lines)
    st: list = []
    for line in cand:
        s3, c3, _ = line
        while len(st) >= 2:
            s1, c1, _ = st[-2]
            s2, c2, _ = st[-1]
            # st[-1] never strictly minimal when the (1,3) crossing is at or
            # left of the (1,2) crossing.
            if (c3 - c1) * (s1 - s2) <= (c2 - c1) * (s1 - s3):
                st.pop()
            else:
                break
        st.append(line)
    bps = tuple((c2 - c1) / (s1 - s2) for (s1, c1, _), (s2, c2, _) in zip(st, st[1:]))
    fn = PLFunction._trusted(bps, tuple((s, c) for s, c, _ in st))
    return AnnotatedPL(fn, tuple(idx for _, _, idx in st))


def lower_envelope(lines: Sequence[tuple]) -> AnnotatedPL:
    """Pointwise minimum of a nonempty family of ``(slope, intercept)`` lines.

    Each piece is tagged with the index of a line attaining the minimum
    there (the smallest index among identical lines).
    """
    if not lines:
        raise ValueError("lower_envelope of an empty family")
    return _lower_hull(lines)


def upper_envelope(lines: Sequence[tuple]) -> AnnotatedPL:
    if not lines:
        raise ValueError("upper_envelope of an empty family")
    neg = _lower_hull([(-rational(s), -rational(c)) for s, c in lines])
    return AnnotatedPL(-neg.fn, neg.witnesses)


def compose_envelope_sets(
    fdown: PLFunction, fup: PLFunction, gdown: PLFunction, gup: PLFunction
) -> tuple:
    """Envelopes of ``{f o g : f in F, g in G}`` from the envelopes of F and G.

    The composed lower envelope is ``min(Fdown o Gdown, Fdown o Gup)``: a
    concave outer function restricted to ``[Gdown(x), Gup(x)]`` is minimised
    at an endpoint. The upper envelope is the convex mirror image.
    """
    for name, fn in (("Fdown", fdown), ("Gdown", gdown)):
        if not fn.is_concave():
            raise ShapeViolation(f"{name} is not concave", name)
    for name, fn in (("Fup", fup), ("Gup", gup)):
        if not fn.is_convex():
            raise ShapeViolation(f"{name} is not convex", name)
    hdown = pointwise_min(compose(fdown, gdown), compose(fdown, gup))
    hup = pointwise_max(compose(fup, gdown), compose(fup, gup))
    return hdown, hup
