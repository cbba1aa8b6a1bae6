"""Evaluators for the polynomial-method upper bounds.

Exponential bounds are computed in mpmath at ``WORK_DPS`` significant digits
so that ``base**n`` neither overflows nor loses relative accuracy for n up to
``MAX_TABLE_N``.  The J(t, d) constant comes from a golden-section search
whose result carries a value bracket ``[lo, hi]``: ``hi`` is an attained
value of the objective, ``lo`` subtracts a first-order Lipschitz bound over
the final search interval.

Two notes on the formulas:

* the probability generating function of a uniform variable on
  ``{0, ..., t-1}`` is ``(1/t)(1 - x^t)/(1 - x)``; :func:`uniform_pgf` uses
  that, :func:`displayed_pgf` keeps the incorrect ``t(...)`` variant for
  comparison only;
* the limit constant ``lim J(q, 3)`` is an infimum of
  ``(z - z^-2)/(3 log z)`` over ``z > 1``; on ``z > 3`` that function is
  increasing and its infimum (0.8765 at z = 3) would exceed J(q, 3) for
  large q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Optional, Union

import mpmath

from .counting import CountQuery, binomial, count_B_exact, count_capped_degree
from .ff import prime_power

WORK_DPS = 40
MAX_TABLE_N = 10**6
GOLDEN_TOL = 1e-13
X_EDGE = 1e-9

Real = Union[int, float, Fraction, mpmath.mpf]

_INVPHI = (mpmath.sqrt(5) - 1) / 2


def _mpf(x: Real) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _exact(x: Real):
    """Fraction for rationals/ints, otherwise the float/mpf itself (for cache keys)."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float) and x.is_integer():
        return Fraction(int(x))
    return x


# ---- univariate minimization -------------------------------------------------

@dataclass(frozen=True)
class Minimum:
    x: mpmath.mpf
    value: mpmath.mpf
    lo: mpmath.mpf
    hi: mpmath.mpf
    interval: tuple[mpmath.mpf, mpmath.mpf]


def golden_section(f: Callable, a: Real, b: Real, tol: float = GOLDEN_TOL) -> Minimum:
    """Golden-section search for a unimodal f on [a, b].

    Runs until the bracketing interval is shorter than ``tol``.  The returned
    value bracket uses max |f'| at the final interval endpoints as Lipschitz
    constant, which is valid when f is convex there.
    """
    with mpmath.workdps(WORK_DPS):
        a, b = _mpf(a), _mpf(b)
        c = b - _INVPHI * (b - a)
        d = a + _INVPHI * (b - a)
        fc, fd = f(c), f(d)
        while b - a > tol:
            if fc <= fd:
                b, d, fd = d, c, fc
                c = b - _INVPHI * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + _INVPHI * (b - a)
                fd = f(d)
        x, fx = (c, fc) if fc <= fd else (d, fd)
        slope = max(abs(mpmath.diff(f, a)), abs(mpmath.diff(f, b)))
        lo = fx - slope * (b - a) - abs(fx) * mpmath.mpf(10) ** (8 - WORK_DPS)
        return Minimum(x, fx, lo, fx, (a, b))


# ---- J(t, d) -----------------------------------------------------------------

def j_objective(t: int, d: Real) -> Callable:
    """g(x) = (1 - x^t)/(1 - x) * x^{-(t-1)/d}, with the quotient as a geometric sum."""
    expo = (t - 1) / _mpf(d)

    def g(x):
        s = mpmath.mpf(0)
        for _ in range(t):
            s = s * x + 1
        return s * x ** (-expo)

    return g


@dataclass(frozen=True)
class JValue:
    t: int
    d: Any
    value: mpmath.mpf
    x_star: mpmath.mpf
    lo: mpmath.mpf
    hi: mpmath.mpf
    at_boundary: bool

    def __iter__(self):
        return iter((self.value, self.x_star))

    def __float__(self):
        return float(self.value)


def _check_td(t, d):
    if not isinstance(t, int) or t < 2:
        raise ValueError(f"J(t, d) needs integer t >= 2, got t={t!r}")
    if _mpf(d) <= 0:
        raise ValueError(f"J(t, d) needs d > 0, got d={d!r}")


def j_constant(t: int, d: Real) -> JValue:
    """J(t, d) = (1/t) min_{0<x<1} g(x), including the x -> 1 limit g = t."""
    _check_td(t, d)
    return _j_cached(t, _exact(d))


@lru_cache(maxsize=4096)
def _j_cached(t, d) -> JValue:
    g = j_objective(t, d)
    res = golden_section(g, X_EDGE, 1 - X_EDGE)
    with mpmath.workdps(WORK_DPS):
        tt = mpmath.mpf(t)
        if tt <= res.value:
            return JValue(t, d, mpmath.mpf(1), mpmath.mpf(1), min(res.lo, tt) / tt, mpmath.mpf(1), True)
        return JValue(t, d, res.value / tt, res.x, res.lo / tt, res.hi / tt, False)


def certify_j(t: int, d: Real, grid_points: int = 10**4, step: float = 1e-6) -> bool:
    """Local optimality at x* plus a global grid scan of g."""
    jv = j_constant(t, d)
    g = j_objective(t, d)
    with mpmath.workdps(WORK_DPS):
        gstar = jv.hi * t
        slack = gstar * mpmath.mpf(10) ** (10 - WORK_DPS)
        if not jv.at_boundary:
            if g(jv.x_star + step) < gstar - slack or g(jv.x_star - step) < gstar - slack:
                return False
        # float scan is enough for the global check
        ex = (t - 1) / float(_mpf(d))
        best = min(
            sum((i / grid_points) ** k for k in range(t)) * (i / grid_points) ** (-ex)
            for i in range(1, grid_points)
        )
        return float(gstar) <= best * (1 + 1e-12)


def j_limit_inf(z_min: float = 1.0, z_max: float = 1000.0) -> JValue:
    """inf_{z > z_min} (z - z^-2)/(3 log z), the limit of J(q, 3) as q -> infinity."""

    def h(z):
        return (z - z ** -2) / (3 * mpmath.log(z))

    res = golden_section(h, z_min + X_EDGE, z_max)
    return JValue(0, 3, res.value, res.x, res.lo, res.hi, False)


def j3_monotone(qs) -> bool:
    vals = [j_constant(q, 3).value for q in qs]
    return all(b < a for a, b in zip(vals, vals[1:]))


def uniform_pgf(t: int, x: float) -> float:
    """E[x^X] for X uniform on {0, ..., t-1}."""
    return sum(x**k for k in range(t)) / t


def displayed_pgf(t: int, x: float) -> float:
    """t (1 - x^t)/(1 - x): the incorrect variant, kept for comparison."""
    return t * (1 - x**t) / (1 - x)


# ---- reports -----------------------------------------------------------------

@dataclass
class BoundReport:
    name: str
    params: dict
    value: Any
    exact: Optional[int] = None
    x_star: Optional[Any] = None
    bracket: Optional[tuple] = None
    provenance: str = "exact"
    meta: dict = field(default_factory=dict)

    def to_json(self, digits: int = 17) -> dict:
        from .fmt import fmt_real

        def conv(v):
            if isinstance(v, Fraction):
                return str(v)
            if isinstance(v, (mpmath.mpf, float)):
                return fmt_real(v, digits)
            return v

        out = {
            "name": self.name,
            "params": {k: conv(v) for k, v in self.params.items()},
            "value": conv(self.value),
            "exact": self.exact,
            "x_star": None if self.x_star is None else conv(self.x_star),
            "bracket": None if self.bracket is None else [conv(b) for b in self.bracket],
        }
        if self.meta:
            out["meta"] = {k: conv(v) for k, v in self.meta.items()}
        return out


def _power_report(name, params, mult, base_j: JValue, t, n, meta=None) -> BoundReport:
    with mpmath.workdps(WORK_DPS):
        value = mult * (t * base_j.value) ** n
        lo = mult * (t * base_j.lo) ** n
        hi = mult * (t * base_j.hi) ** n
    return BoundReport(
        name, params, value, x_star=base_j.x_star, bracket=(lo, hi),
        provenance="optimized", meta=meta or {},
    )


def _check_n(n):
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if n > MAX_TABLE_N:
        raise ValueError(f"n={n} exceeds cap {MAX_TABLE_N}")


# ---- count-based bounds ------------------------------------------------------

def chernoff_count_bound(n: int, s: Real, t: int) -> mpmath.mpf:
    """(t J(t, s))^n, an upper bound for |B(n, s, t)|."""
    return chernoff_report(n, s, t).value


def chernoff_report(n, s, t) -> BoundReport:
    _check_n(n)
    if _mpf(s) < 1:
        raise ValueError("s must be >= 1")
    jv = j_constant(t, s)
    rep = _power_report("chernoff", {"n": n, "s": _exact(s), "t": t}, 1, jv, t, n)
    if isinstance(_exact(s), Fraction) and n <= 10**4:
        rep.meta["count_B_exact"] = count_B_exact(n, _exact(s), t)
    return rep


def sz_binomial_bound(r: Real, s: int) -> mpmath.mpf:
    """((r+1)^{r+1} / r^r)^s, an upper bound for C((r+1)s, s)."""
    if _mpf(r) <= 0:
        raise ValueError("r must be positive")
    if not isinstance(s, int) or s < 1:
        raise ValueError("s must be a positive integer")
    with mpmath.workdps(WORK_DPS):
        rr = _mpf(r)
        return ((rr + 1) ** (rr + 1) / rr**rr) ** s


def sz_report(r, s) -> BoundReport:
    value = sz_binomial_bound(r, s)
    rep = BoundReport("sz", {"r": _exact(r), "s": s}, value)
    top = (Fraction(_exact(r)) + 1) * s if isinstance(_exact(r), Fraction) else None
    if top is not None and top.denominator == 1:
        rep.exact = binomial(int(top), s)
    return rep


def bound_main_exact(n: int, caps, m: int, k: int) -> int:
    """m * #{alpha : 0 <= alpha_i <= t_i - 1, sum alpha <= k/m}.

    ``caps`` are the sizes t_i (an int means uniform t).
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    if k < 0:
        raise ValueError("deg P must be >= 0")
    sizes = (caps,) * n if isinstance(caps, int) else tuple(caps)
    if len(sizes) != n or any(t < 1 for t in sizes):
        raise ValueError("need n alphabet sizes, each >= 1")
    return m * count_capped_degree(CountQuery(tuple(t - 1 for t in sizes), Fraction(k, m)))


def main_exact_report(n, t, m, k) -> BoundReport:
    v = bound_main_exact(n, t, m, k)
    return BoundReport("maincor", {"n": n, "t": t, "m": m, "k": k}, v, exact=v)


def _d_value(n, t, m, degP) -> Fraction:
    if not isinstance(degP, int) or degP < 1:
        raise ValueError("deg P must be a positive integer (zero/constant P has no bound)")
    return Fraction(m * n * (t - 1), degP)


def bound_maincor2(n: int, t: int, m: int, degP: int) -> mpmath.mpf:
    return maincor2_report(n, t, m, degP).value


def maincor2_report(n, t, m, degP) -> BoundReport:
    _check_n(n)
    d = _d_value(n, t, m, degP)
    jv = j_constant(t, d)
    return _power_report("maincor2", {"n": n, "t": t, "m": m, "degP": degP}, m, jv, t, n, {"d": d})


def maincor3_base(t: int, d: Real) -> mpmath.mpf:
    """(d+t-1)/d * ((d+t-1)/(t-1))^{(t-1)/d}."""
    if t < 2:
        raise ValueError("t must be >= 2 (the formula divides by t-1)")
    with mpmath.workdps(WORK_DPS):
        dd = _mpf(d)
        return (dd + t - 1) / dd * ((dd + t - 1) / (t - 1)) ** ((t - 1) / dd)


def bound_maincor3(n: int, t: int, m: int, degP: int) -> mpmath.mpf:
    return maincor3_report(n, t, m, degP).value


def maincor3_report(n, t, m, degP) -> BoundReport:
    _check_n(n)
    if t < 2:
        raise ValueError("t must be >= 2 (the formula divides by t-1)")
    d = _d_value(n, t, m, degP)
    with mpmath.workdps(WORK_DPS):
        v = m * maincor3_base(t, d) ** n
    return BoundReport("maincor3", {"n": n, "t": t, "m": m, "degP": degP}, v, meta={"d": d})


def maincor4_base(q: int) -> mpmath.mpf:
    with mpmath.workdps(WORK_DPS):
        return mpmath.mpf(q + 2) / 3 * (mpmath.mpf(q + 2) / (q - 1)) ** (mpmath.mpf(q - 1) / 3)


def bound_maincor4(q: int, n: int) -> mpmath.mpf:
    return maincor4_report(q, n).value


def maincor4_report(q, n) -> BoundReport:
    _check_n(n)
    if q <= 2:
        raise ValueError("q must exceed 2")
    prime_power(q)
    with mpmath.workdps(WORK_DPS):
        v = 3 * maincor4_base(q) ** n
    return BoundReport("maincor4", {"q": q, "n": n}, v)


# ---- difference sets in P(q, n) --------------------------------------------

def digit_sum(k: int, q: int) -> int:
    if k < 0 or q < 2:
        raise ValueError("need k >= 0 and base q >= 2")
    s = 0
    while k:
        k, r = divmod(k, q)
        s += r
    return s


def green_c(k: int, q: int, log_base: str = "e") -> mpmath.mpf:
    """c(k, q) = 1 / (2 k^2 D_q(k)^2 log q); natural log unless log_base="2"."""
    if k < 2:
        raise ValueError("k must be >= 2")
    prime_power(q)
    D = digit_sum(k, q)
    with mpmath.workdps(WORK_DPS):
        lg = mpmath.log(q) if log_base == "e" else mpmath.log(q, 2)
        return 1 / (2 * k**2 * D**2 * lg)


def green_bound(k: int, q: int, n: int, log_base: str = "e") -> mpmath.mpf:
    """2 q^{(1 - c(k, q)) n}."""
    with mpmath.workdps(WORK_DPS):
        return 2 * mpmath.mpf(q) ** ((1 - green_c(k, q, log_base)) * n)


def green_report(k, q, n, log_base="e") -> BoundReport:
    _check_n(n)
    return BoundReport(
        "green", {"k": k, "q": q, "n": n}, green_bound(k, q, n, log_base),
        meta={"c": green_c(k, q, log_base), "log_base": log_base},
    )


def green_map_bound(q: int, n: int, m_prime: int, d_prime: int) -> mpmath.mpf:
    """2 q^n exp(-m'^2 / (2 n d'^2)), the polynomial-map bound we compare against."""
    with mpmath.workdps(WORK_DPS):
        return 2 * mpmath.mpf(q) ** n * mpmath.exp(-mpmath.mpf(m_prime) ** 2 / (2 * n * d_prime**2))


def main_ap_s(n: int, m_prime: int, d_prime: int) -> Fraction:
    if not (0 < m_prime <= n):
        raise ValueError("need 0 < m' <= n")
    if d_prime < 1:
        raise ValueError("need d' >= 1")
    if n * d_prime == m_prime:
        raise ValueError("degenerate case n*d' = m' (s = 2nd'/(nd'-m') divides by zero)")
    return Fraction(2 * n * d_prime, n * d_prime - m_prime)


def bound_main_ap(q: int, n: int, m_prime: int, d_prime: int) -> mpmath.mpf:
    return main_ap_report(q, n, m_prime, d_prime).value


def main_ap_report(q, n, m_prime, d_prime) -> BoundReport:
    _check_n(n)
    prime_power(q)
    s = main_ap_s(n, m_prime, d_prime)
    jv = j_constant(q, s)
    return _power_report(
        "main_ap", {"q": q, "n": n, "m_prime": m_prime, "d_prime": d_prime}, 2, jv, q, n,
        {"s": s, "green_map_bound": green_map_bound(q, n, m_prime, d_prime)},
    )


def main_ap2_d(k: int, q: int) -> Fraction:
    if k < 2:
        raise ValueError("k must be >= 2")
    kd = k * digit_sum(k, q)
    if kd == 1:
        raise ValueError("k * D_q(k) = 1 makes d undefined")
    return Fraction(2 * kd, kd - 1)


def bound_main_ap2(k: int, q: int, n: int) -> mpmath.mpf:
    return main_ap2_report(k, q, n).value


def main_ap2_report(k, q, n, log_base="e") -> BoundReport:
    _check_n(n)
    prime_power(q)
    d = main_ap2_d(k, q)
    jv = j_constant(q, d)
    gb = green_bound(k, q, n, log_base)
    rep = _power_report(
        "main_ap2", {"k": k, "q": q, "n": n}, 2, jv, q, n,
        {"d": d, "m_prime": (n - 1) // k, "green_bound": gb, "log_base": log_base},
    )
    rep.meta["beats_green"] = bool(rep.value < gb)
    return rep


def main_ap2_crossover(k: int, q: int, n_max: int, log_base: str = "e") -> Optional[int]:
    """Smallest n0 with bound_main_ap2 < green_bound for every n in [n0, n_max]."""
    n0 = None
    for n in range(n_max, 0, -1):
        if main_ap2_report(k, q, n, log_base).value < green_bound(k, q, n, log_base):
            n0 = n
        else:
            break
    return n0


def j_report(t, d) -> BoundReport:
    jv = j_constant(t, d)
    return BoundReport(
        "j", {"t": t, "d": _exact(d)}, jv.value, x_star=jv.x_star,
        bracket=(jv.lo, jv.hi), provenance="optimized",
        meta={"t_times_J": t * jv.value, "at_boundary": jv.at_boundary},
    )


REPORTERS: dict[str, Callable[..., BoundReport]] = {
    "j": j_report,
    "maincor": main_exact_report,
    "maincor2": maincor2_report,
    "maincor3": maincor3_report,
    "maincor4": maincor4_report,
    "sz": sz_report,
    "chernoff": chernoff_report,
    "green": green_report,
    "main_ap": main_ap_report,
    "main_ap2": main_ap2_report,
}
