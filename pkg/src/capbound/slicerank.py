"""Slice rank: exact for diagonal tensors and matrices, bracketed otherwise.

A function F on A^m with all off-diagonal values zero has slice rank equal
to the number of nonzero diagonal values.  For a polynomial in normal form
the pigeonhole split over blocks gives an explicit decomposition into
functions of the form f(x_j) g(other blocks); its length is the upper end of
the bracket.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .counting import CountQuery, count_capped_degree
from .errors import GuardExceeded
from .ff import FieldElem, FieldSpec
from .grid_ideal import Grid, build_basis, reduce
from .poly import Polynomial, VarLayout, to_json as poly_to_json
from .search import PointSet, decode

TENSOR_GUARD = 10**7


@dataclass(frozen=True)
class Tensor:
    field: FieldSpec
    m: int
    axis: tuple
    entries: np.ndarray = field(compare=False)

    def __post_init__(self):
        if self.entries.shape != (len(self.axis),) * self.m:
            raise ValueError("entries shape does not match axis and order")

    @property
    def size(self) -> int:
        return len(self.axis)

    def is_diagonal(self) -> bool:
        if self.size == 0:
            return True
        mask = np.ones(self.entries.shape, dtype=bool)
        idx = np.arange(self.size)
        mask[(idx,) * self.m] = False
        return not self.entries[mask].any()

    def diagonal(self) -> np.ndarray:
        idx = np.arange(self.size)
        return self.entries[(idx,) * self.m]


def _code(F: FieldSpec, c) -> int:
    if isinstance(c, FieldElem):
        return F.element(c).code
    return int(c)


def diag_slice_rank(coeffs: Union[Mapping, Sequence], m: int) -> int:
    """Slice rank of sum_a c_a delta_a(x_1)...delta_a(x_m): the number of nonzero c_a."""
    if m < 2:
        raise ValueError("order m must be >= 2")
    values = coeffs.values() if isinstance(coeffs, Mapping) else coeffs
    return sum(1 for c in values if int(c) != 0)


def rank_over_field(F: FieldSpec, rows: Sequence[Sequence[int]]) -> int:
    """Row-reduction rank of a matrix of field codes."""
    mat = [list(r) for r in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = F.inv(mat[rank][col])
        prow = [F.mul(inv, x) for x in mat[rank]]
        mat[rank] = prow
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                f = mat[r][col]
                mat[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(mat[r], prow)]
        rank += 1
        if rank == len(mat):
            break
    return rank


def matrix_slice_rank(T: Tensor) -> int:
    if T.m != 2:
        raise ValueError(f"matrix rank needs an order-2 tensor, got order {T.m}")
    return rank_over_field(T.field, T.entries.tolist())


def tensor_from_function(F: FieldSpec, m: int, axis: Sequence, fn, guard: int = TENSOR_GUARD) -> Tensor:
    a = len(axis)
    if a**m > guard:
        raise GuardExceeded(f"tensor with {a}^{m} entries exceeds guard {guard}")
    ent = np.zeros((a,) * m, dtype=np.int64)
    for idx in itertools.product(range(a), repeat=m):
        ent[idx] = fn(*(axis[i] for i in idx))
    return Tensor(F, m, tuple(axis), ent)


def build_eval_tensor(P: Polynomial, family: PointSet, layout: VarLayout, guard: int = TENSOR_GUARD) -> Tensor:
    """Tensor (a_1, ..., a_m) -> P(a_1, ..., a_m) over family^m (family in sorted order)."""
    if P.nvars != layout.nvars:
        raise ValueError(f"polynomial has {P.nvars} variables, layout has {layout.nvars}")
    if family.n != layout.n:
        raise ValueError("family dimension differs from layout block size")
    if P.field != family.field:
        raise ValueError("field mismatch")
    vecs = family.vectors()
    return tensor_from_function(
        P.field, layout.m, vecs, lambda *pts: P.eval_codes(list(itertools.chain.from_iterable(pts))), guard
    )


@dataclass(frozen=True)
class SliceSummand:
    """x_axis^exps * cofactor, where cofactor does not involve block ``axis``."""

    axis: int
    exps: tuple
    cofactor: Polynomial

    def as_polynomial(self, layout: VarLayout) -> Polynomial:
        full = [0] * layout.nvars
        full[layout.block_slice(self.axis)] = self.exps
        mono = Polynomial(self.cofactor.field, layout, {tuple(full): 1})
        return mono * self.cofactor

    def to_json(self) -> dict:
        return {"axis": self.axis, "factor_exps": list(self.exps), "cofactor": poly_to_json(self.cofactor)}


@dataclass
class SliceRankBracket:
    lower: int
    upper: int
    certificate_upper: list
    certificate_lower: dict
    normal_form: Polynomial
    layout: VarLayout
    count_bound: int

    def certificate_sum(self) -> Polynomial:
        total = Polynomial.zero(self.normal_form.field, self.layout)
        for s in self.certificate_upper:
            total = total + s.as_polynomial(self.layout)
        return total

    def verify(self, points: Optional[Sequence[Sequence[int]]] = None) -> bool:
        """Summands reproduce the normal form, as a polynomial and entrywise on ``points``."""
        if self.certificate_sum() != self.normal_form:
            return False
        if points is not None:
            H = self.normal_form
            for pt in points:
                acc = 0
                for s in self.certificate_upper:
                    block = pt[self.layout.block_slice(s.axis)]
                    f = 1
                    for x, e in zip(block, s.exps):
                        f = H.field.mul(f, H.field.pow(x, e))
                    acc = H.field.add(acc, H.field.mul(f, s.cofactor.eval_codes(pt)))
                if acc != H.eval_codes(pt):
                    return False
        return self.lower <= self.upper

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "count_bound": self.count_bound,
            "certificate_upper": [s.to_json() for s in self.certificate_upper],
            "certificate_lower": self.certificate_lower,
        }


def pigeonhole_split(H: Polynomial, layout: VarLayout) -> list[SliceSummand]:
    """Group terms by the first block j whose degree is <= deg(H)/m."""
    if H.is_zero():
        return []
    k, m, n = int(H.degree), layout.m, layout.n
    groups: dict[tuple[int, tuple], dict] = {}
    for exps, c in H.sorted_terms():
        for j in range(1, m + 1):
            sl = layout.block_slice(j)
            if sum(exps[sl]) * m <= k:
                break
        else:  # pragma: no cover - impossible since block degrees sum to <= k
            raise AssertionError("pigeonhole failed")
        alpha = tuple(exps[sl])
        rest = list(exps)
        rest[sl] = [0] * n
        groups.setdefault((j, alpha), {})[tuple(rest)] = c
    return [
        SliceSummand(j, alpha, Polynomial(H.field, layout, terms))
        for (j, alpha), terms in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1]))
    ]


def decompose_upper(P: Polynomial, grid: Grid, layout: VarLayout, family: PointSet) -> SliceRankBracket:
    if grid.n != layout.n:
        raise ValueError("grid dimension differs from layout block size")
    P = P.with_layout(layout) if P.nvars == layout.nvars else P
    basis = build_basis(grid, layout.m)
    H = reduce(P, basis).with_layout(layout)
    summands = pigeonhole_split(H, layout)
    caps = tuple(t - 1 for t in grid.sizes)
    count_bound = 0 if H.is_zero() else layout.m * count_capped_degree(
        CountQuery(caps, Fraction(int(H.degree), layout.m))
    )
    upper = len(summands)
    T = build_eval_tensor(H, family, layout)
    if T.is_diagonal():
        diag = T.diagonal()
        lower = diag_slice_rank(diag.tolist(), layout.m)
        cert = {"kind": "diagonal", "support": [list(v) for v, c in zip(T.axis, diag.tolist()) if c]}
    elif layout.m == 2:
        lower = matrix_slice_rank(T)
        cert = {"kind": "matrix_rank"}
    else:
        lower = 0
        cert = {"kind": "none"}
    if lower > upper:
        raise AssertionError(f"bracket inverted: lower {lower} > upper {upper}")
    if upper > count_bound:
        raise AssertionError(f"decomposition length {upper} exceeds count bound {count_bound}")
    return SliceRankBracket(lower, upper, summands, cert, H, layout, count_bound)
