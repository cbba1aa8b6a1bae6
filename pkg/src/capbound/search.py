"""Brute-force ground truth: AP-free sets, polynomial-map images, difference sets.

Points of F_q^n are encoded as integers in [0, q^n) with the first
coordinate most significant, so integer order is lexicographic order on
coordinate vectors.  A three-term progression is a triple of pairwise
distinct a, b, c with a - 2b + c = 0; in odd characteristic any two of the
three determine the third, and distinctness is automatic once a != b.
"""

from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import GuardExceeded
from .ff import FieldSpec, field_of_order
from .poly import Polynomial, VarLayout, product

EXHAUSTIVE_MAX_POINTS = 243
BNB_MAX_POINTS = 729
PHI_DOMAIN_GUARD = 10**6
POWER_ENUM_GUARD = 10**6
FLAT_GUARD = 20_000  # total flats tracked by the nested flat bound


def encode(F: FieldSpec, vec: Sequence[int]) -> int:
    code = 0
    for c in vec:
        code = code * F.q + c
    return code


def decode(F: FieldSpec, code: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        code, r = divmod(code, F.q)
        out.append(r)
    return tuple(reversed(out))


@dataclass(frozen=True)
class PointSet:
    field: FieldSpec
    n: int
    points: frozenset

    def __post_init__(self):
        pts = frozenset(self.points)
        object.__setattr__(self, "points", pts)
        N = self.field.q**self.n
        if any(not (isinstance(p, int) and 0 <= p < N) for p in pts):
            raise ValueError(f"point codes must lie in [0, {N})")

    @classmethod
    def from_vectors(cls, F: FieldSpec, n: int, vecs: Iterable[Sequence[int]]) -> "PointSet":
        codes = []
        for v in vecs:
            if len(v) != n or any(not 0 <= c < F.q for c in v):
                raise ValueError(f"bad point {v} for {F}^{n}")
            codes.append(encode(F, v))
        return cls(F, n, frozenset(codes))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(sorted(self.points))

    def __contains__(self, code) -> bool:
        return code in self.points

    def vectors(self) -> list[tuple[int, ...]]:
        return [decode(self.field, c, self.n) for c in sorted(self.points)]

    def to_json(self) -> dict:
        return {"q": self.field.q, "n": self.n, "points": [list(v) for v in self.vectors()]}

    @classmethod
    def from_json(cls, obj: dict, field: Optional[FieldSpec] = None) -> "PointSet":
        F = field or field_of_order(int(obj["q"]))
        return cls.from_vectors(F, int(obj["n"]), obj["points"])


# ---- vector arithmetic on codes ---------------------------------------------

def _vec_op(F, n, a, b, op):
    return encode(F, [op(x, y) for x, y in zip(decode(F, a, n), decode(F, b, n))])


def _require_odd(F: FieldSpec):
    if F.p == 2:
        raise ValueError(
            f"3-AP freeness is undefined over {F}: in characteristic 2, a - 2b + c = a + c"
        )


@lru_cache(maxsize=16)
def _ap_tables(F: FieldSpec, n: int):
    """third[a][b] = 2b - a and mid[a][b] = (a + b)/2 for all point codes."""
    _require_odd(F)
    N = F.q**n
    two = F.from_int(2)
    half = F.inv(two)
    coords = [decode(F, c, n) for c in range(N)]
    third, mid = [], []
    for a in coords:
        row_t, row_m = [], []
        for b in coords:
            row_t.append(encode(F, [F.sub(F.mul(two, y), x) for x, y in zip(a, b)]))
            row_m.append(encode(F, [F.mul(half, F.add(x, y)) for x, y in zip(a, b)]))
        third.append(row_t)
        mid.append(row_m)
    return third, mid


def third_point(F: FieldSpec, n: int, a: int, b: int) -> int:
    """c = 2b - a: the point completing a progression a, b, c."""
    two = F.from_int(2)
    return _vec_op(F, n, a, b, lambda x, y: F.sub(F.mul(two, y), x))


def is_ap_free(S: PointSet) -> bool:
    F = S.field
    _require_odd(F)
    pts = sorted(S.points)
    for a, b in itertools.permutations(pts, 2):
        if third_point(F, S.n, a, b) in S.points:
            return False
    return True


def find_ap(S: PointSet) -> Optional[tuple[int, int, int]]:
    F = S.field
    _require_odd(F)
    for a, b in itertools.permutations(sorted(S.points), 2):
        c = third_point(F, S.n, a, b)
        if c in S.points:
            return a, b, c
    return None


# ---- maximum AP-free set ------------------------------------------------------

@dataclass(frozen=True)
class SearchResult:
    size: int
    witness: PointSet
    nodes: int


def _popcount(x: int) -> int:
    return bin(x).count("1")


class _Search:
    """Include-first DFS over candidate bitmasks with pluggable bounds."""

    def __init__(self, F: FieldSpec, n: int, triples: list, flats):
        self.F, self.n = F, n
        self.third, self.mid = _ap_tables(F, n)
        self.triples, self.flats = triples, flats
        self.nodes = 0

    def kill_mask(self, chosen, p: int) -> int:
        third, mid = self.third, self.mid
        kill = 0
        for s in chosen:
            kill |= (1 << third[p][s]) | (1 << third[s][p]) | (1 << mid[p][s])
        return kill

    def bound(self, cand: int, chosen: list, chosen_mask: int, best: int, cls=(None, 0)) -> int:
        # disjoint progressions inside the live set each lose a point; those
        # through a chosen point (two open points, only one usable) go first
        live = cand | chosen_mask
        ub = _popcount(live)
        used = 0
        for first in (True, False):
            for tm in self.triples:
                if tm & live == tm and not tm & used and bool(tm & chosen_mask) == first:
                    used |= tm
                    ub -= 1
        if self.flats is not None and ub > best:
            ub = min(ub, self.flats(live, *cls))
        return ub

    def run(self, forced, best_size: int, stop_at: Optional[int] = None, hyper_cap: Optional[int] = None):
        """Largest AP-free superset of ``forced`` beating ``best_size``, or None.

        Strict improvement keeps the first optimum in include-first order,
        which is the lexicographically least one.  With ``stop_at`` the search
        ends at the first set of that size.  With ``hyper_cap`` = h, pruning
        assumes every hyperplane holds at most h points and x_1 = 0 exactly h;
        sets outside that class may be missed (but anything returned is valid).
        """
        cls = (None, 0) if hyper_cap is None else (hyper_cap, hyper_cap)
        N = self.F.q**self.n
        chosen: list[int] = []
        state = {"mask": 0, "best": best_size, "set": None, "done": False}
        cand = (1 << N) - 1
        for p in forced:
            if not cand >> p & 1:
                return None
            cand &= ~((1 << p) | self.kill_mask(chosen, p))
            chosen.append(p)
            state["mask"] |= 1 << p

        def dfs(cand: int):
            self.nodes += 1
            if not cand:
                if len(chosen) > state["best"]:
                    state["best"] = len(chosen)
                    state["set"] = list(chosen)
                    if stop_at is not None and len(chosen) >= stop_at:
                        state["done"] = True
                return
            if len(chosen) + _popcount(cand) <= state["best"]:
                return
            if self.bound(cand, chosen, state["mask"], state["best"], cls) <= state["best"]:
                return
            p = (cand & -cand).bit_length() - 1
            rest = cand & ~(1 << p)
            kill = self.kill_mask(chosen, p)
            chosen.append(p)
            state["mask"] |= 1 << p
            dfs(rest & ~kill)
            state["mask"] &= ~(1 << p)
            chosen.pop()
            if not state["done"]:
                dfs(rest)

        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 4 * N + 100))
        try:
            dfs(cand)
        finally:
            sys.setrecursionlimit(old)
        return state["set"]


def _greedy(F: FieldSpec, n: int) -> list[int]:
    """Lexicographically first maximal AP-free set: the first leaf of the DFS."""
    third, mid = _ap_tables(F, n)
    out: list[int] = []
    blocked = set()
    for p in range(F.q**n):
        if p in blocked:
            continue
        for s in out:
            blocked.update((third[p][s], third[s][p], mid[p][s]))
        out.append(p)
    return out


def max_ap_free(
    q: int, n: int, method: str = "bnb", max_points: Optional[int] = None, symmetry: bool = True
) -> SearchResult:
    """Exact maximum 3-AP-free subset of F_q^n with its lexicographically least witness.

    Depth-first include-before-exclude branching on the smallest candidate
    point; the incumbent is only replaced on strict improvement, so the first
    optimum reached is the lexicographically least one.  ``method="bnb"``
    tightens the cardinality bound by a greedy packing of progressions inside
    the live set (each loses at least one point) and, for n >= 2, by the
    nested flat bound of :func:`_flat_bound` with capacities computed
    recursively one dimension down.  ``method="exhaustive"`` uses the plain
    cardinality bound only.

    With ``symmetry`` (bnb only) the search runs in three phases:

    1. the greedy lexicographic set gives an incumbent g;
    2. optimality: any AP-free set larger than r(q, n-1) lies in no
       hyperplane, so it has n+1 affinely independent points, and an affine
       map sends them to 0, e_1, ..., e_n.  Searching supersets of that basis
       for size > g therefore decides the optimum (only when g >= r(q, n-1));
    3. witness: the lexicographically least optimum starts with 0 (translate)
       and e_n = code 1 (a linear map fixing 0).  If no other point of the line
       through them survives, it next takes e_{n-1} = code q, the smallest code
       off that line: an optimum for n >= 2 leaves the line (products of
       AP-free sets are AP-free, so the optimum beats the line) and a linear
       map fixing e_n moves an outside point to e_{n-1}.  The include-first
       search from that prefix stops at the first set of optimal size.

    Size and witness agree with ``symmetry=False``; only the tree shrinks.
    """
    F = field_of_order(q)
    _require_odd(F)
    N = q**n
    limit = max_points or (BNB_MAX_POINTS if method == "bnb" else EXHAUSTIVE_MAX_POINTS)
    if method not in ("bnb", "exhaustive"):
        raise ValueError(f"unknown method {method!r}")
    if N > limit:
        raise GuardExceeded(f"F_{q}^{n} has {N} points, above the {method} limit {limit}")
    third, mid = _ap_tables(F, n)

    triples = []
    flats = None
    caps: list[int] = []
    if method == "bnb":
        seen = set()
        for a in range(N):
            for c in range(a + 1, N):
                key = tuple(sorted((a, mid[a][c], c)))
                if key not in seen:
                    seen.add(key)
                    triples.append((1 << a) | (1 << mid[a][c]) | (1 << c))
        if n >= 2:
            caps = [max_ap_free(q, k, method, symmetry=symmetry).size for k in range(1, n)]
            flats = _flat_bound(F, n, tuple(caps))
    search = _Search(F, n, triples, flats)

    if not (symmetry and method == "bnb"):
        best = search.run([], 0)
        return SearchResult(len(best), PointSet(F, n, frozenset(best)), search.nodes)

    greedy = _greedy(F, n)
    size = len(greedy)
    if n == 1:
        better = search.run([0, 1], size)
        size = len(better) if better else size
    else:
        # case split on h, the largest hyperplane intersection of a better set
        below = caps[-2] if n >= 3 else 1
        h = caps[-1]
        while q * h > size:
            if h <= below:
                better = search.run([], size)
                size = len(better) if better else size
                break
            forced = [0] + [q**i for i in range(n - 2, -1, -1)] + [q ** (n - 1)]
            better = search.run(forced, size, hyper_cap=h)
            size = len(better) if better else size
            h -= 1

    prefix = [0, 1] if N >= 2 else [0]
    cand = (1 << N) - 1
    for p in prefix:
        cand &= ~((1 << p) | search.kill_mask(prefix[: prefix.index(p)], p))
    if n >= 2 and not cand & ((1 << q) - 1):
        prefix.append(q)
    witness = search.run(prefix, size - 1, stop_at=size)
    if witness is None:  # pragma: no cover - the prefix argument guarantees a hit
        raise AssertionError("no optimum through the canonical prefix")
    return SearchResult(size, PointSet(F, n, frozenset(witness)), search.nodes)


def _subspaces(F: FieldSpec, n: int, dim: int) -> list[frozenset]:
    """All dim-dimensional linear subspaces of F^n as sets of point codes."""
    N = F.q**n
    coords = [decode(F, c, n) for c in range(N)]

    def add(a, b):
        return encode(F, [F.add(x, y) for x, y in zip(coords[a], coords[b])])

    def scale(c, a):
        return encode(F, [F.mul(c, x) for x in coords[a]])

    level = {frozenset({0})}
    for _ in range(dim):
        nxt = set()
        for V in level:
            for v in range(1, N):
                if v in V:
                    continue
                line = [scale(c, v) for c in range(F.q)]
                nxt.add(frozenset(add(a, b) for a in V for b in line))
        level = nxt
    return sorted(level, key=sorted)


def _cosets(F: FieldSpec, n: int, V: frozenset) -> list[frozenset]:
    N = F.q**n
    coords = [decode(F, c, n) for c in range(N)]
    seen, out = set(), []
    for a in range(N):
        if a in seen:
            continue
        C = frozenset(encode(F, [F.add(x, y) for x, y in zip(coords[a], coords[v])]) for v in V)
        seen |= C
        out.append(C)
    return out


def _flat_bound(F: FieldSpec, n: int, caps: tuple):
    """Nested flat bound on the size of an AP-free subset of a live set.

    A k-flat holds at most caps[k-1] points (the optimum in dimension k), and
    at most the sum of the bounds of any of its partitions into parallel
    (k-1)-flats.  Levels are computed bottom-up from lines to hyperplanes;
    the result is the best hyperplane partition of the whole space.  When the
    full hierarchy is too large only hyperplanes are tracked.
    """
    N = F.q**n
    dims = list(range(1, n))
    total = sum(len(_subspaces(F, n, k)) * F.q ** (n - k) for k in dims) if n <= 4 else FLAT_GUARD + 1
    if total > FLAT_GUARD:
        dims = [n - 1]
    members, subparts, index = {}, {}, {}
    for k in dims:
        flats = []
        for V in _subspaces(F, n, k):
            flats.extend(_cosets(F, n, V))
        index[k] = {C: i for i, C in enumerate(flats)}
        M = np.zeros((len(flats), N), dtype=np.int32)
        for i, C in enumerate(flats):
            M[i, list(C)] = 1
        members[k] = M
    subs = {k: _subspaces(F, n, k) for k in dims}
    for k in dims:
        if k - 1 not in index:
            continue
        parts = []
        for C in index[k]:
            a = min(C)
            V = frozenset(_vec_sub(F, n, c, a) for c in C)
            row = []
            for W in subs[k - 1]:
                if W <= V:
                    row.append([index[k - 1][Cw] for Cw in _cosets_within(F, n, W, C)])
            parts.append(row)
        subparts[k] = np.array(parts, dtype=np.intp)
    top = n - 1
    top_parts = np.array([[index[top][C] for C in _cosets(F, n, V)] for V in subs[top]], dtype=np.intp)
    cap = {k: caps[k - 1] for k in dims}

    h0 = index[top][frozenset(range(N // F.q))]

    def bound(mask: int, top_cap: Optional[int] = None, h0_min: int = 0) -> int:
        """Upper bound; with ``top_cap`` every hyperplane holds at most that many
        points, and a bound of -1 means x_1 = 0 cannot reach ``h0_min``."""
        bits = np.frombuffer(mask.to_bytes((N + 7) // 8, "little"), dtype=np.uint8)
        live = np.unpackbits(bits, bitorder="little")[:N].astype(np.int32)
        b = None
        for k in dims:
            cnt = members[k] @ live
            bk = np.minimum(cnt, cap[k] if k < top or top_cap is None else min(cap[k], top_cap))
            if b is not None:
                bk = np.minimum(bk, b[subparts[k]].sum(axis=2).min(axis=1))
            b = bk
        if b[h0] < h0_min:
            return -1
        return int(b[top_parts].sum(axis=1).min())

    return bound


def _vec_sub(F, n, a, b):
    return encode(F, [F.sub(x, y) for x, y in zip(decode(F, a, n), decode(F, b, n))])


def _cosets_within(F, n, W, C):
    """Cosets of the subspace W partitioning the flat C."""
    rest, out = set(C), []
    while rest:
        a = min(rest)
        Cw = frozenset(encode(F, [F.add(x, y) for x, y in zip(decode(F, a, n), decode(F, w, n))]) for w in W)
        rest -= Cw
        out.append(Cw)
    return out


# ---- the progression polynomial ------------------------------------------------

def build_ap_polynomial(q: int, n: int, max_degree: int = 16) -> Polynomial:
    """prod_i (1 - (x_i - 2 y_i + z_i)^{q-1}) in 3n variables (blocks x, y, z)."""
    if q <= 2:
        raise ValueError("q must exceed 2")
    F = field_of_order(q)
    _require_odd(F)
    if n * (q - 1) > max_degree:
        raise GuardExceeded(f"degree n(q-1) = {n * (q - 1)} exceeds guard {max_degree}")
    lay = VarLayout(3, n)
    one = Polynomial.constant(F, lay, 1)
    factors = []
    for i in range(1, n + 1):
        x = Polynomial.variable(F, lay, lay.index(1, i))
        y = Polynomial.variable(F, lay, lay.index(2, i))
        z = Polynomial.variable(F, lay, lay.index(3, i))
        factors.append(one - (x - 2 * y + z) ** (q - 1))
    return product(factors)


# ---- polynomial maps -------------------------------------------------------------

@dataclass(frozen=True)
class PolyMap:
    components: tuple
    m_prime: int
    d_prime: int

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("a polynomial map needs at least one component")
        F = comps[0].field
        for phi in comps:
            if phi.field != F:
                raise ValueError("components over different fields")
            if phi.nvars != self.m_prime:
                raise ValueError(f"component has {phi.nvars} variables, expected m'={self.m_prime}")
            if phi.degree > self.d_prime:
                raise ValueError(f"component degree {phi.degree} exceeds d'={self.d_prime}")

    @property
    def field(self) -> FieldSpec:
        return self.components[0].field

    @property
    def n(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class PhiImage:
    image: PointSet
    preimage_zero_count: int
    gcd_ok: bool


def phi_image(phi: PolyMap, guard: int = PHI_DOMAIN_GUARD) -> PhiImage:
    F = phi.field
    size = F.q**phi.m_prime
    if size > guard:
        raise GuardExceeded(f"domain of size {size} exceeds guard {guard}")
    img = set()
    zeros = 0
    for u in itertools.product(range(F.q), repeat=phi.m_prime):
        v = [c.eval_codes(u) for c in phi.components]
        code = encode(F, v)
        img.add(code)
        zeros += code == 0
    return PhiImage(PointSet(F, phi.n, frozenset(img)), zeros, math.gcd(zeros, F.q) == 1)


def find_difference_violation(S: PointSet, image: PointSet) -> Optional[tuple]:
    """First (a, b), a != b in S, with a - b in image minus {0}; None if none."""
    if S.field != image.field or S.n != image.n:
        raise ValueError("point set and image live in different spaces")
    F, n = S.field, S.n
    targets = image.points - {0}
    for a, b in itertools.permutations(sorted(S.points), 2):
        if _vec_op(F, n, a, b, F.sub) in targets:
            return decode(F, a, n), decode(F, b, n)
    return None


def verify_difference_condition(S: PointSet, image: PointSet) -> bool:
    """(S - S) meets the image only in 0."""
    return find_difference_violation(S, image) is None


# ---- k-th power differences in P(q, n) ----------------------------------------

def _poly_mul_trunc(F, a, b, n):
    out = [0] * n
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if i + j < n and y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return out


def kth_powers(F: FieldSpec, n: int, k: int, guard: int = POWER_ENUM_GUARD) -> dict:
    """Map code of h^k -> h for nonzero h of degree <= (n-1)//k, as coefficient vectors.

    Coefficient vectors are (a_0, ..., a_{n-1}), constant term first.
    """
    D = (n - 1) // k
    if F.q ** (D + 1) > guard:
        raise GuardExceeded(f"{F.q ** (D + 1)} candidate h exceed guard {guard}")
    out = {}
    for h in itertools.product(range(F.q), repeat=D + 1):
        if not any(h):
            continue
        hv = list(h) + [0] * (n - D - 1)
        pw = [1] + [0] * (n - 1)
        for _ in range(k):
            pw = _poly_mul_trunc(F, pw, hv, n)
        out.setdefault(encode(F, pw), tuple(h))
    return out


def kth_power_difference_witness(S: PointSet, k: int) -> Optional[tuple]:
    """(p, q, h) with p - q = h^k for distinct p, q in S, or None."""
    if k < 2:
        raise ValueError("k must be >= 2")
    F, n = S.field, S.n
    powers = kth_powers(F, n, k)
    for a, b in itertools.permutations(sorted(S.points), 2):
        h = powers.get(_vec_op(F, n, a, b, F.sub))
        if h is not None:
            return decode(F, a, n), decode(F, b, n), h
    return None


def kth_power_difference_check(S: PointSet, k: int) -> bool:
    """True iff no two distinct members of S differ by a k-th power."""
    return kth_power_difference_witness(S, k) is None
