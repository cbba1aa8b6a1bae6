"""Exact arithmetic in finite fields F_q, q = p^e <= 2^16.

Elements are handled internally as integer codes in [0, q): the coefficient
vector (c_0, ..., c_{e-1}) of the polynomial representative is read as a
base-p number, c_0 being the least significant digit.  Prime fields use the
residue itself.  :class:`FieldElem` wraps a code for user-facing arithmetic;
the polynomial and search modules work on raw codes through the
:class:`FieldSpec` methods.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence, Union

from .errors import FieldError

MAX_FIELD_SIZE = 1 << 16


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 4_759_123_141."""
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13):
        if n % sp == 0:
            return n == sp
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 7, 61):
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, e) with q = p^e, or raise FieldError."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            break
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1 or not is_prime(p):
        raise FieldError(f"{q} is not a prime power")
    return p, e


# -- univariate polynomials over F_p as low-degree-first lists ---------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], f: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _trim(a)
    return a


def _pmulmod(a, b, f, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _pmod(out, f, p)


def _ppowmod(a, n, f, p):
    result, base = [1], _pmod(list(a), f, p)
    while n:
        if n & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        n >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's irreducibility test for a monic f over F_p."""
    e = len(f) - 1
    if e < 1:
        return False
    if e == 1:
        return True
    x = [0, 1]
    if _pmod(_sub(_ppowmod(x, p**e, f, p), x, p), f, p):
        return False
    for r in _prime_factors(e):
        h = _sub(_ppowmod(x, p ** (e // r), f, p), x, p)
        if len(_pgcd(f, h, p)) != 1:
            return False
    return True


def _sub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree e over F_p.

    Candidates are ordered by (c_0, c_1, ..., c_{e-1}), low degree first.
    """
    for tail in itertools.product(range(p), repeat=e):
        f = list(tail) + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise FieldError(f"no irreducible polynomial of degree {e} over F_{p}")  # pragma: no cover


# -- the field ----------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    p: int
    e: int
    modulus: tuple[int, ...]
    _exp: tuple = field(default=(), compare=False, repr=False)
    _log: tuple = field(default=(), compare=False, repr=False)
    _digits: tuple = field(default=(), compare=False, repr=False)

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def characteristic(self) -> int:
        return self.p

    def __str__(self) -> str:
        return f"F_{self.q}"

    # ---- code-level arithmetic
    def elements(self) -> range:
        return range(self.q)

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_q."""
        return n % self.p

    def _to_digits(self, a: int) -> tuple[int, ...]:
        return self._digits[a]

    def _from_digits(self, ds) -> int:
        code = 0
        for c in reversed(ds):
            code = code * self.p + c
        return code

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        p = self.p
        return self._from_digits([(x + y) % p for x, y in zip(self._digits[a], self._digits[b])])

    def neg(self, a: int) -> int:
        if self.e == 1:
            return -a % self.p
        if self.p == 2:
            return a
        return self._from_digits([-x % self.p for x in self._digits[a]])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"inverse of zero in {self}")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if n == 0:
            return 1
        if a == 0:
            return 0
        if self.e == 1:
            return pow(a, n, self.p)
        return self._exp[self._log[a] * n % (self.q - 1)]

    def scalar(self, k: int, a: int) -> int:
        """k * a for an integer k (repeated addition)."""
        return self.mul(self.from_int(k), a)

    # ---- element-level API
    def element(self, value: Union[int, Sequence[int], "FieldElem"]) -> "FieldElem":
        if isinstance(value, FieldElem):
            if value.field != self:
                raise FieldError("element belongs to a different field")
            return value
        if isinstance(value, int):
            if not 0 <= value < self.q:
                raise FieldError(f"code {value} out of range for {self}")
            return FieldElem(self, value)
        ds = list(value)
        if len(ds) != self.e or any(not 0 <= c < self.p for c in ds):
            raise FieldError(f"bad coefficient vector {ds} for {self}")
        return FieldElem(self, self._from_digits(ds))

    def zero(self) -> "FieldElem":
        return FieldElem(self, 0)

    def one(self) -> "FieldElem":
        return FieldElem(self, 1)


def make_field(p: int, e: int = 1) -> FieldSpec:
    """Build F_{p^e}; the modulus is the lexicographically smallest irreducible."""
    if not isinstance(p, int) or not isinstance(e, int):
        raise FieldError("p and e must be integers")
    if e < 1:
        raise FieldError(f"extension degree must be >= 1, got {e}")
    if not is_prime(p):
        raise FieldError(f"characteristic {p} is not prime")
    if p**e > MAX_FIELD_SIZE:
        raise FieldError(f"field size {p}^{e} exceeds cap {MAX_FIELD_SIZE}")
    modulus = smallest_irreducible(p, e)
    if e == 1:
        return FieldSpec(p, 1, modulus)
    q = p**e
    digits = tuple(
        tuple((c // p**i) % p for i in range(e)) for c in range(q)
    )
    exp, log = _log_tables(p, e, modulus, digits)
    return FieldSpec(p, e, modulus, exp, log, digits)


def field_of_order(q: int) -> FieldSpec:
    p, e = prime_power(q)
    return make_field(p, e)


def _log_tables(p, e, modulus, digits):
    q = p**e

    def code(poly):
        c = 0
        for x in reversed(poly + [0] * (e - len(poly))):
            c = c * p + x
        return c

    for g in range(2, q):
        gpoly = _trim(list(digits[g]))
        exp = [1]
        cur = [1]
        for _ in range(q - 2):
            cur = _pmulmod(cur, gpoly, modulus, p)
            c = code(cur)
            if c == 1:
                break
            exp.append(c)
        if len(exp) == q - 1:
            log = [0] * q
            for i, c in enumerate(exp):
                log[c] = i
            return tuple(exp), tuple(log)
    raise FieldError("no primitive element found")  # pragma: no cover


@dataclass(frozen=True)
class FieldElem:
    field: FieldSpec
    code: int

    @property
    def rep(self) -> Union[int, tuple[int, ...]]:
        """Canonical representative: residue (e = 1) or coefficient vector."""
        if self.field.e == 1:
            return self.code
        return self.field._digits[self.code]

    def _other(self, b) -> int:
        if isinstance(b, FieldElem):
            if b.field != self.field:
                raise FieldError("operands belong to different fields")
            return b.code
        if isinstance(b, int):
            return self.field.from_int(b)
        return NotImplemented

    def _wrap(self, code: int) -> "FieldElem":
        return FieldElem(self.field, code)

    def __add__(self, b):
        return self._wrap(self.field.add(self.code, self._other(b)))

    __radd__ = __add__

    def __sub__(self, b):
        return self._wrap(self.field.sub(self.code, self._other(b)))

    def __rsub__(self, b):
        return self._wrap(self.field.sub(self._other(b), self.code))

    def __mul__(self, b):
        return self._wrap(self.field.mul(self.code, self._other(b)))

    __rmul__ = __mul__

    def __truediv__(self, b):
        return self._wrap(self.field.div(self.code, self._other(b)))

    def __neg__(self):
        return self._wrap(self.field.neg(self.code))

    def __pow__(self, n: int):
        return self._wrap(self.field.pow(self.code, n))

    def inv(self) -> "FieldElem":
        return self._wrap(self.field.inv(self.code))

    def __int__(self) -> int:
        return self.code

    def __bool__(self) -> bool:
        return self.code != 0

    def __repr__(self) -> str:
        return f"{self.field}({self.rep})"
