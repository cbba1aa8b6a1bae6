"""Deterministic rendering of reals (round-half-even, fixed significant digits)."""

from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction

import mpmath


def fmt_real(v, digits: int = 6) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        v = mpmath.mpf(v.numerator) / v.denominator
    # 50 digits is well past anything we print
    d = Decimal(mpmath.nstr(mpmath.mpf(v), 50, min_fixed=-10**9, max_fixed=10**9)) if abs(v) < mpmath.mpf(10) ** 30 \
        else Decimal(mpmath.nstr(mpmath.mpf(v), 50))
    if d == 0:
        return "0"
    r = Context(prec=digits, rounding=ROUND_HALF_EVEN).plus(d)
    s = format(r, "g") if abs(r.adjusted()) < 16 else format(r, "E")
    return s
