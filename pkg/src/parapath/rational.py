"""Exact rationals backed by GMP.

``gmpy2.mpq`` is always reduced with a positive denominator, which is the
canonical form the rest of the package relies on.
"""

from __future__ import annotations

import numbers
import re

from gmpy2 import mpq

Q = mpq
ZERO = mpq(0)
ONE = mpq(1)

_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


def rational(value) -> mpq:
    """Coerce ``value`` to an exact rational.

    Accepts ints, ``Fraction``/``mpq`` and strings of the form ``"p"`` or
    ``"p/q"``. Floats are refused: they would silently smuggle binary
    rounding into exact computations.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if m is None or m.group(2) is not None and int(m.group(2)) == 0:
            raise ValueError(f"malformed rational {value!r}")
        num = int(m.group(1))
        return mpq(num, int(m.group(2))) if m.group(2) is not None else mpq(num)
    if type(value) is mpq:
        return value
    if isinstance(value, numbers.Rational):
        return mpq(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def fmt(q) -> str:
    """Canonical string: reduced, no '+', denominator omitted when 1."""
    q = rational(q)
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


def ceil(q) -> int:
    q = rational(q)
    return -((-int(q.numerator)) // int(q.denominator))


def to_float(q) -> float:
    return float(rational(q))
