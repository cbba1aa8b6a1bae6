"""Cross-module verification suites behind ``capbound verify``.

Each suite yields :class:`Case` records; a suite passes iff every case does.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import mpmath

from . import bounds, counting
from .ff import make_field
from .grid_ideal import Grid, build_basis, reduce
from .poly import Polynomial, VarLayout
from .search import (
    PointSet,
    _poly_mul_trunc,
    build_ap_polynomial,
    decode,
    is_ap_free,
    kth_power_difference_check,
    max_ap_free,
)
from .slicerank import Tensor, decompose_upper, diag_slice_rank, matrix_slice_rank

import numpy as np

REL_SLACK = 1e-9


@dataclass
class Case:
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)


def monupper2(max_n: int = 8, max_t: int = 5, ss=(2, 3, 4)) -> Iterator[Case]:
    for n, t, s in itertools.product(range(1, max_n + 1), range(2, max_t + 1), ss):
        exact = counting.count_B_exact(n, s, t)
        bound = bounds.chernoff_count_bound(n, s, t)
        yield Case(f"n={n} t={t} s={s}", exact <= bound * (1 + REL_SLACK), {"exact": exact, "bound": bound})


SZ_RS = (Fraction(1, 2), 1, Fraction(3, 2), 2, 3, 4, 5)


def binupper(max_s: int = 20, rs=SZ_RS) -> Iterator[Case]:
    for r, s in itertools.product(rs, range(1, max_s + 1)):
        top = (Fraction(r) + 1) * s
        if top.denominator != 1:
            continue
        exact = math.comb(int(top), s)
        bound = bounds.sz_binomial_bound(r, s)
        yield Case(f"r={r} s={s}", exact <= bound, {"exact": exact, "bound": bound})


def random_polynomial(rng: random.Random, F, nvars: int, nterms: int, max_exp: int) -> Polynomial:
    terms = {}
    for _ in range(nterms):
        e = tuple(rng.randint(0, max_exp) for _ in range(nvars))
        terms[e] = rng.randrange(1, F.q)
    return Polynomial(F, nvars, terms)


def reduction_grids():
    """Small grids with |M^m| <= 729."""
    F3, F5, F4 = make_field(3), make_field(5), make_field(2, 2)
    return [
        (Grid.full(F3, 2), 1),
        (Grid.full(F3, 1), 3),
        (Grid(F3, ((0, 1), (0, 1))), 3),
        (Grid(F5, ((1, 2, 4), (0, 3))), 2),
        (Grid.full(F4, 2), 1),
        (Grid(F4, ((1, 2, 3), (0, 1))), 2),
        (Grid.full(F3, 3), 2),
    ]


def reduction(samples: int = 500, seed: int = 0) -> Iterator[Case]:
    rng = random.Random(seed)
    for grid, m in reduction_grids():
        basis = build_basis(grid, m)
        pts = list(grid.power_points(m))
        caps = basis.caps
        bad = None
        for _ in range(samples):
            P = random_polynomial(rng, grid.field, grid.n * m, rng.randint(1, 6), 6)
            H = reduce(P, basis)
            if any(e > c for exps in H.terms for e, c in zip(exps, caps)):
                bad = ("caps", str(P))
            elif H.degree > P.degree:
                bad = ("degree", str(P))
            elif any(H.eval_codes(pt) != P.eval_codes(pt) for pt in pts):
                bad = ("pointwise", str(P))
            if bad:
                break
        yield Case(f"{grid.field} sizes={grid.sizes} m={m}", bad is None, {"counterexample": bad})


def delta(max_size: int = 5) -> Iterator[Case]:
    F = make_field(3)
    for a in range(1, max_size + 1):
        for diag in itertools.product(range(3), repeat=a):
            ent = np.diag(np.array(diag, dtype=np.int64))
            T = Tensor(F, 2, tuple(range(a)), ent)
            r1, r2 = diag_slice_rank(diag, 2), matrix_slice_rank(T)
            if r1 != r2:
                yield Case(f"diag={diag}", False, {"diag_rank": r1, "matrix_rank": r2})
                return
        yield Case(f"size={a} all {3**a} diagonals", True)


def main_chain(q: int = 3, n: int = 2) -> Iterator[Case]:
    res = max_ap_free(q, n)
    F = res.witness.field
    k = n * (q - 1)
    exact = bounds.bound_main_exact(n, q, 3, k)
    analytic = bounds.bound_maincor2(n, q, 3, k)
    yield Case(
        "oracle witness is AP-free", is_ap_free(res.witness), {"size": res.size, "witness": res.witness.to_json()}
    )
    yield Case("size <= m * count", res.size <= exact, {"size": res.size, "bound_main_exact": exact})
    yield Case("size <= m (qJ)^n", res.size <= analytic, {"size": res.size, "bound_maincor2": analytic})
    if n * (q - 1) <= 8:
        P = build_ap_polynomial(q, n)
        lay = VarLayout(3, n)
        br = decompose_upper(P, Grid.full(F, n), lay, res.witness)
        ok = res.size == br.lower <= br.upper <= exact and br.verify()
        yield Case(
            "|F| = lower <= upper <= m*count", ok,
            {"size": res.size, "lower": br.lower, "upper": br.upper, "bound_main_exact": exact},
        )


def naive_kpower_difference_free(S: PointSet, k: int) -> bool:
    """Scan all h of degree < n (not only degree <= (n-1)//k)."""
    F, n = S.field, S.n
    powers = set()
    for h in itertools.product(range(F.q), repeat=n):
        if not any(h):
            continue
        pw = [1] + [0] * (n - 1)
        for _ in range(k):
            pw = _poly_mul_trunc(F, pw, list(h), n + k * n)  # keep full degree
        if any(pw[n:]):
            continue
        powers.add(tuple(pw[:n]))
    vecs = S.vectors()
    for a, b in itertools.permutations(vecs, 2):
        if tuple(F.sub(x, y) for x, y in zip(a, b)) in powers:
            return False
    return True


def diffset(q: int = 3, n: int = 3, k: int = 2, trials: int = 100, seed: int = 0, max_n: int = 50) -> Iterator[Case]:
    F = make_field(q)
    rng = random.Random(seed)
    N = q**n
    mismatches = 0
    free_count = 0
    for _ in range(trials):
        size = rng.randint(1, 6)
        S = PointSet(F, n, frozenset(rng.sample(range(N), size)))
        fast = kth_power_difference_check(S, k)
        free_count += fast
        if fast != naive_kpower_difference_free(S, k):
            mismatches += 1
    yield Case(f"k-th power check vs naive oracle ({trials} sets)", mismatches == 0,
               {"mismatches": mismatches, "free_sets": free_count})
    worst = max(
        (bounds.bound_main_ap2(k, q, m) / (2 * mpmath.mpf(q) ** m) for m in range(1, max_n + 1))
    )
    yield Case(f"main_ap2 < 2 q^n for n <= {max_n}", worst < 1, {"max_ratio": worst})
    n0 = bounds.main_ap2_crossover(k, q, max_n)
    yield Case("main_ap2 beats green from n0 on", n0 is not None, {"n0": n0})


SUITES: dict[str, Callable[..., Iterator[Case]]] = {
    "monupper2": monupper2,
    "binupper": binupper,
    "reduction": reduction,
    "delta": delta,
    "main-chain": main_chain,
    "diffset": diffset,
}
