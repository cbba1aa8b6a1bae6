"""Sparse multivariate polynomials over F_q and a small expression parser.

A polynomial is a map from exponent tuples to nonzero coefficient codes.
Variables are addressed through a :class:`VarLayout` of ``m`` blocks with
``n`` coordinates each; block ``j`` coordinate ``i`` (both 1-based) lives at
flat index ``(j-1)*n + i-1``.  Textual names:

* ``x<j>_<i>``   block j, coordinate i (always accepted);
* ``x<i>, y<i>, z<i>, w<i>, u<i>, v<i>``   blocks 1..6, coordinate i;
* a bare block letter when ``n == 1``.

Integer literals map into F_q through Z -> F_q.  ``{c}`` denotes the field
element whose serialized code is ``c`` so that extension-field coefficients
survive a print/parse round trip.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce as _fold
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import FieldError, PolyParseError
from .ff import FieldElem, FieldSpec

NEG_INF = float("-inf")
"""Degree of the zero polynomial."""

BLOCK_LETTERS = "xyzwuv"

Exps = tuple[int, ...]


@dataclass(frozen=True)
class VarLayout:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError(f"layout needs m, n >= 1, got {self.m}, {self.n}")

    @property
    def nvars(self) -> int:
        return self.m * self.n

    def index(self, j: int, i: int) -> int:
        if not (1 <= j <= self.m and 1 <= i <= self.n):
            raise IndexError(f"variable ({j}, {i}) outside layout {self.m}x{self.n}")
        return (j - 1) * self.n + i - 1

    def block_of(self, idx: int) -> tuple[int, int]:
        return idx // self.n + 1, idx % self.n + 1

    def name(self, idx: int) -> str:
        j, i = self.block_of(idx)
        if self.m <= len(BLOCK_LETTERS):
            return f"{BLOCK_LETTERS[j - 1]}{i}"
        return f"x{j}_{i}"

    def block_slice(self, j: int) -> slice:
        return slice((j - 1) * self.n, j * self.n)


def _as_layout(layout: Union[VarLayout, int]) -> VarLayout:
    return layout if isinstance(layout, VarLayout) else VarLayout(1, int(layout))


def monomial_key(exps: Exps) -> tuple[int, Exps]:
    """Deglex sort key; larger key = larger monomial (x_{1,1} has top priority)."""
    return sum(exps), exps


class Polynomial:
    """Immutable sparse polynomial.  ``terms`` must not be mutated."""

    __slots__ = ("field", "layout", "terms", "_deg")

    def __init__(self, field: FieldSpec, layout: Union[VarLayout, int], terms: Mapping[Exps, int] = ()):
        self.field = field
        self.layout = _as_layout(layout)
        nv = self.layout.nvars
        clean = {}
        for exps, c in dict(terms).items():
            if len(exps) != nv:
                raise ValueError(f"exponent vector {exps} has wrong length for {nv} variables")
            if c:
                clean[tuple(exps)] = c
        self.terms: dict[Exps, int] = clean
        self._deg = max((sum(e) for e in clean), default=NEG_INF)

    # ---- constructors
    @classmethod
    def zero(cls, field, layout):
        return cls(field, layout)

    @classmethod
    def constant(cls, field, layout, c: int):
        layout = _as_layout(layout)
        return cls(field, layout, {(0,) * layout.nvars: c})

    @classmethod
    def variable(cls, field, layout, idx: int, power: int = 1):
        layout = _as_layout(layout)
        exps = [0] * layout.nvars
        exps[idx] = power
        return cls(field, layout, {tuple(exps): 1})

    @property
    def nvars(self) -> int:
        return self.layout.nvars

    @property
    def degree(self) -> Union[int, float]:
        return self._deg

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[Exps, int]]:
        return iter(self.sorted_terms())

    def sorted_terms(self) -> list[tuple[Exps, int]]:
        return sorted(self.terms.items(), key=lambda kv: monomial_key(kv[0]), reverse=True)

    def leading_monomial(self) -> Exps:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=monomial_key)

    # ---- arithmetic
    def _check(self, other: "Polynomial"):
        if self.field != other.field:
            raise FieldError("polynomials over different fields")
        if self.nvars != other.nvars:
            raise ValueError("polynomials in different numbers of variables")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, FieldElem):
            return Polynomial.constant(self.field, self.layout, other.code)
        if isinstance(other, int):
            return Polynomial.constant(self.field, self.layout, self.field.from_int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = F.add(out.get(e, 0), c)
        return Polynomial(F, self.layout, out)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return Polynomial(F, self.layout, {e: F.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.field
        out: dict[Exps, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = F.add(out.get(e, 0), F.mul(c1, c2))
        return Polynomial(F, self.layout, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return pow_poly(self, k)

    def scale(self, c: int) -> "Polynomial":
        F = self.field
        return Polynomial(F, self.layout, {e: F.mul(c, v) for e, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.field == other.field and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, self.nvars, frozenset(self.terms.items())))

    # ---- evaluation
    def eval_codes(self, point: Sequence[int]) -> int:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, polynomial has {self.nvars} variables")
        F = self.field
        total = 0
        for exps, c in self.terms.items():
            v = c
            for x, k in zip(point, exps):
                if k:
                    v = F.mul(v, F.pow(x, k))
                    if v == 0:
                        break
            total = F.add(total, v)
        return total

    def __call__(self, *point) -> FieldElem:
        return evaluate(self, point)

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"Polynomial({self.field}, {to_text(self)!r})"

    def with_layout(self, layout: VarLayout) -> "Polynomial":
        if layout.nvars != self.nvars:
            raise ValueError("layout size mismatch")
        return Polynomial(self.field, layout, self.terms)


# ---- free functions ---------------------------------------------------------

def evaluate(P: Polynomial, point: Sequence[Union[FieldElem, int]]) -> FieldElem:
    """Evaluate P at a point given as FieldElems or integer codes."""
    codes = [P.field.element(x).code if isinstance(x, FieldElem) else x for x in point]
    for c in codes:
        if not 0 <= c < P.field.q:
            raise FieldError(f"code {c} is not an element of {P.field}")
    return FieldElem(P.field, P.eval_codes(codes))


def add(P: Polynomial, Q: Polynomial) -> Polynomial:
    return P + Q


def mul(P: Polynomial, Q: Polynomial) -> Polynomial:
    return P * Q


def pow_poly(P: Polynomial, k: int) -> Polynomial:
    if k < 0:
        raise ValueError("negative polynomial power")
    result = Polynomial.constant(P.field, P.layout, 1)
    base = P
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result


def substitute(Q: Polynomial, images: Sequence[Polynomial]) -> Polynomial:
    """Compose Q with the substitution x_i -> images[i]."""
    if len(images) != Q.nvars:
        raise ValueError(f"need {Q.nvars} images, got {len(images)}")
    if not images:
        raise ValueError("cannot substitute into a polynomial with no variables")
    target = images[0]
    for img in images:
        target._check(img)
    F = Q.field
    cache: dict[tuple[int, int], Polynomial] = {}

    def power(i, k):
        if (i, k) not in cache:
            cache[(i, k)] = pow_poly(images[i], k)
        return cache[(i, k)]

    out = Polynomial.zero(F, target.layout)
    for exps, c in Q.terms.items():
        term = Polynomial.constant(F, target.layout, c)
        for i, k in enumerate(exps):
            if k:
                term = term * power(i, k)
        out = out + term
    return out


def substitute_difference(Q: Polynomial) -> Polynomial:
    """P(x, y) := Q(x - y) over a 2 x n block layout."""
    n = Q.nvars
    F = Q.field
    lay = VarLayout(2, n)
    images = [
        Polynomial.variable(F, lay, i) - Polynomial.variable(F, lay, n + i) for i in range(n)
    ]
    return substitute(Q, images)


def product(polys: Iterable[Polynomial]) -> Polynomial:
    return _fold(lambda a, b: a * b, polys)


# ---- text -------------------------------------------------------------------

def _coef_text(F: FieldSpec, c: int) -> str:
    return str(c) if c < F.p else "{" + str(c) + "}"


def to_text(P: Polynomial) -> str:
    """Canonical rendering, terms in descending deglex order."""
    if P.is_zero():
        return "0"
    parts = []
    for exps, c in P.sorted_terms():
        factors = []
        for idx, k in enumerate(exps):
            if k == 1:
                factors.append(P.layout.name(idx))
            elif k > 1:
                factors.append(f"{P.layout.name(idx)}^{k}")
        if c != 1 or not factors:
            factors.insert(0, _coef_text(P.field, c))
        parts.append("*".join(factors))
    return " + ".join(parts)


_TOKEN = re.compile(r"(\d+)|([A-Za-z]\w*)|(\{\s*\d+\s*\})|(.)")
_VARNAME = re.compile(r"([a-z])(\d+)?(?:_(\d+))?$")


class _Parser:
    def __init__(self, text: str, field: FieldSpec, layout: VarLayout):
        self.text = text
        self.F = field
        self.layout = layout
        self.toks = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            mt = _TOKEN.match(text, pos)
            kind = ("int", "name", "code", "op")[mt.lastindex - 1]
            self.toks.append((kind, mt.group(mt.lastindex), pos))
            pos = mt.end()
        self.toks.append(("eof", "", len(text)))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise PolyParseError(f"expected {op!r}, found {val or 'end of input'!r}", pos)

    def const(self, c):
        return Polynomial.constant(self.F, self.layout, c)

    def parse(self) -> Polynomial:
        p = self.expr()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise PolyParseError(f"unexpected {val!r}", pos)
        return p

    def expr(self):
        left = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                right = self.term()
                left = left + right if val == "+" else left - right
            else:
                return left

    def term(self):
        left = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                left = left * self.unary()
            else:
                return left

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in "-+":
            self.take()
            inner = self.unary()
            return -inner if val == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "int":
                raise PolyParseError("exponent must be a non-negative integer literal", pos)
            result = pow_poly(base, int(val))
            kind2, val2, pos2 = self.peek()
            if kind2 == "op" and val2 == "^":
                raise PolyParseError("chained exponents need parentheses", pos2)
            return result
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "int":
            return self.const(self.F.from_int(int(val)))
        if kind == "code":
            c = int(val.strip("{} \t"))
            if c >= self.F.q:
                raise PolyParseError(f"element code {c} out of range for {self.F}", pos)
            return self.const(c)
        if kind == "name":
            return Polynomial.variable(self.F, self.layout, self.resolve(val, pos))
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise PolyParseError(f"unexpected {val or 'end of input'!r}", pos)

    def resolve(self, name: str, pos: int) -> int:
        lay = self.layout
        mt = _VARNAME.match(name)
        if mt:
            letter, a, b = mt.groups()
            try:
                if b is not None:
                    if letter == "x" and a is not None:
                        return lay.index(int(a), int(b))
                elif letter in BLOCK_LETTERS:
                    j = BLOCK_LETTERS.index(letter) + 1
                    if a is not None:
                        return lay.index(j, int(a))
                    if lay.n == 1:
                        return lay.index(j, 1)
            except IndexError:
                pass
        raise PolyParseError(f"unknown variable {name!r}", pos)


def parse(expr: str, layout: Union[VarLayout, int], field: FieldSpec) -> Polynomial:
    """Parse an expression such as ``"1 - (x1 - 2*y1 + z1)^2"``."""
    return _Parser(expr, field, _as_layout(layout)).parse()


# ---- JSON -------------------------------------------------------------------

def to_json(P: Polynomial) -> dict:
    return {
        "nvars": P.nvars,
        "terms": [{"exps": list(e), "coef": c} for e, c in P.sorted_terms()],
    }


def from_json(obj: Mapping, field: FieldSpec, layout: Union[VarLayout, int, None] = None) -> Polynomial:
    nv = int(obj["nvars"])
    lay = _as_layout(layout if layout is not None else nv)
    if lay.nvars != nv:
        raise ValueError("layout does not match nvars")
    terms: dict[Exps, int] = {}
    for t in obj["terms"]:
        c = int(t["coef"])
        if not 0 <= c < field.q:
            raise FieldError(f"coefficient {c} outside [0, {field.q})")
        e = tuple(int(x) for x in t["exps"])
        if any(x < 0 for x in e):
            raise ValueError("negative exponent")
        terms[e] = field.add(terms.get(e, 0), c)
    return Polynomial(field, lay, terms)
