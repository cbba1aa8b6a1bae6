"""Vanishing ideals of grids M^m and reduction to standard monomials.

For a grid M = A_1 x ... x A_n the polynomials g_i(x) = prod_{a in A_i}(x - a),
one per variable, form the reduced Groebner basis of I(M^m) for every term
order.  Reduction therefore never mixes variables: each power x^e with
e >= t_i is rewritten via x^{t_i} -> x^{t_i} - g_i(x) until it drops below
t_i, i.e. replaced by the remainder of x^e modulo g_i.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

from .counting import enumerate_capped
from .errors import GuardExceeded
from .ff import FieldSpec
from .poly import Polynomial, VarLayout, monomial_key

ENUM_GUARD = 10**7


@dataclass(frozen=True)
class Grid:
    field: FieldSpec
    alphabets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        alph = tuple(tuple(a) for a in self.alphabets)
        object.__setattr__(self, "alphabets", alph)
        for A in alph:
            if not A:
                raise ValueError("grid alphabets must be nonempty")
            if len(set(A)) != len(A):
                raise ValueError(f"alphabet {A} has duplicates")
            if any(not 0 <= a < self.field.q for a in A):
                raise ValueError(f"alphabet {A} has elements outside {self.field}")

    @classmethod
    def full(cls, field: FieldSpec, n: int) -> "Grid":
        return cls(field, (tuple(field.elements()),) * n)

    @property
    def n(self) -> int:
        return len(self.alphabets)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(A) for A in self.alphabets)

    def points(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*self.alphabets)

    def power_points(self, m: int) -> Iterator[tuple[int, ...]]:
        """Points of M^m as flat tuples in block order."""
        for pts in itertools.product(list(self.points()), repeat=m):
            yield tuple(itertools.chain.from_iterable(pts))


def _vanishing_poly(F: FieldSpec, A: Sequence[int]) -> list[int]:
    """Coefficients (low degree first) of prod_{a in A} (x - a); monic."""
    coeffs = [1]
    for a in A:
        na = F.neg(a)
        new = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            new[i + 1] = F.add(new[i + 1], c)
            new[i] = F.add(new[i], F.mul(c, na))
        coeffs = new
    return coeffs


@dataclass(frozen=True)
class GridBasis:
    grid: Grid
    m: int
    layout: VarLayout
    # generator coefficients per coordinate i (shared across blocks)
    gens: tuple[tuple[int, ...], ...]
    order: str = "deglex"
    _rem: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def caps(self) -> tuple[int, ...]:
        """Per-variable exponent caps t_i - 1 over the flat m*n variables."""
        return tuple(t - 1 for t in self.grid.sizes) * self.m

    def generators(self) -> list[Polynomial]:
        """The m*n univariate generators g_i(x_{j,i})."""
        F = self.grid.field
        out = []
        for idx in range(self.layout.nvars):
            _, i = self.layout.block_of(idx)
            terms = {}
            for k, c in enumerate(self.gens[i - 1]):
                e = [0] * self.layout.nvars
                e[idx] = k
                terms[tuple(e)] = c
            out.append(Polynomial(F, self.layout, terms))
        return out

    def power_remainder(self, coord: int, e: int) -> tuple[int, ...]:
        """x^e mod g_coord as low-degree-first coefficients (length t)."""
        key = (coord, e)
        hit = self._rem.get(key)
        if hit is not None:
            return hit
        F = self.grid.field
        g = self.gens[coord]
        t = len(g) - 1
        if e < t:
            r = [0] * t
            r[e] = 1
            res = tuple(r)
        else:
            prev = self.power_remainder(coord, e - 1)
            # multiply by x, then fold the x^t coefficient back using x^t = -(g - x^t)
            shifted = [0] + list(prev)
            top = shifted.pop()
            for k in range(t):
                shifted[k] = F.sub(shifted[k], F.mul(top, g[k]))
            res = tuple(shifted)
        self._rem[key] = res
        return res


def build_basis(grid: Grid, m: int = 1) -> GridBasis:
    if m < 1:
        raise ValueError("m must be >= 1")
    gens = tuple(tuple(_vanishing_poly(grid.field, A)) for A in grid.alphabets)
    return GridBasis(grid, m, VarLayout(m, grid.n), gens)


def reduce(P: Polynomial, basis: GridBasis) -> Polynomial:
    """Normal form of P modulo I(M^m): every exponent of x_{j,i} is < t_i."""
    lay = basis.layout
    if P.nvars != lay.nvars:
        raise ValueError(f"polynomial has {P.nvars} variables, basis expects {lay.nvars}")
    if P.field != basis.grid.field:
        raise ValueError("field mismatch between polynomial and grid")
    F = P.field
    n = basis.grid.n
    sizes = basis.grid.sizes
    out: dict[tuple[int, ...], int] = {}
    # highest-degree-first traversal
    for exps, c in sorted(P.terms.items(), key=lambda kv: monomial_key(kv[0]), reverse=True):
        if all(e < sizes[idx % n] for idx, e in enumerate(exps)):
            out[exps] = F.add(out.get(exps, 0), c)
            continue
        partial = {(): c}
        for idx, e in enumerate(exps):
            rem = basis.power_remainder(idx % n, e)
            nxt = {}
            for head, v in partial.items():
                for k, r in enumerate(rem):
                    if r:
                        key = head + (k,)
                        nxt[key] = F.add(nxt.get(key, 0), F.mul(v, r))
            partial = nxt
        for key, v in partial.items():
            out[key] = F.add(out.get(key, 0), v)
    return Polynomial(F, P.layout, out)


def standard_monomials(
    grid: Grid, m: int = 1, max_deg: Optional[Union[int, Fraction]] = None, guard: int = ENUM_GUARD
) -> Iterator[tuple[int, ...]]:
    caps = tuple(t - 1 for t in grid.sizes) * m
    size = 1
    for c in caps:
        size *= c + 1
    if max_deg is None and size > guard:
        raise GuardExceeded(f"{size} standard monomials exceed guard {guard}")
    if max_deg is not None:
        from .counting import CountQuery, count_capped_degree

        cnt = count_capped_degree(CountQuery(caps, Fraction(max_deg)))
        if cnt > guard:
            raise GuardExceeded(f"{cnt} standard monomials exceed guard {guard}")
    return enumerate_capped(caps, max_deg)


def is_member(P: Polynomial, grid: Grid, m: int = 1) -> bool:
    return reduce(P, build_basis(grid, m)).is_zero()
