import itertools

import pytest

from capbound.errors import FieldError
from capbound.ff import FieldElem, field_of_order, is_prime, make_field, prime_power

SMALL = [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (2, 3), (3, 2), (2, 4), (5, 2), (2, 8), (3, 5)]


def test_prime_field_trivial_modulus():
    F = make_field(3, 1)
    assert F.q == 3
    assert F.modulus == (0, 1)


def test_f4_modulus_by_enumeration():
    # monic quadratics over F_2 without roots in F_2
    irreducible = [
        (c0, c1, 1)
        for c0, c1 in itertools.product(range(2), repeat=2)
        if all((c0 + c1 * x + x * x) % 2 for x in range(2))
    ]
    assert irreducible == [(1, 1, 1)]
    assert make_field(2, 2).modulus == (1, 1, 1)


@pytest.mark.parametrize("p, e", [(4, 1), (1, 1), (9, 1), (2, 17), (3, 0)])
def test_invalid_fields(p, e):
    with pytest.raises(FieldError):
        make_field(p, e)


def test_f3_examples():
    F = make_field(3)
    two = F.element(2)
    assert two.inv() == two
    assert two**2 == F.one()


def test_f4_x_squared():
    F = make_field(2, 2)
    x = F.element((0, 1))
    assert (x * x).rep == (1, 1)
    assert int(x * x) == 3


def test_inverse_of_zero():
    F = make_field(5)
    with pytest.raises(ZeroDivisionError):
        F.zero().inv()


@pytest.mark.parametrize("p, e", SMALL)
def test_inverse_and_frobenius_exhaustive(p, e):
    F = make_field(p, e)
    for a in F.elements():
        assert F.pow(a, F.q) == a
        if a:
            assert F.mul(a, F.inv(a)) == 1
            assert F.pow(a, F.q - 1) == 1


@pytest.mark.parametrize("p, e", [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4)])
def test_tables_associative_commutative(p, e):
    F = make_field(p, e)
    els = list(F.elements())
    for a, b in itertools.product(els, repeat=2):
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
    for a, b, c in itertools.product(els, repeat=3):
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))


def test_extension_modulus_is_lexicographically_first():
    # F_9: x^2 + 1 is irreducible over F_3 (no roots), and (1, 0, 1) precedes all
    # other irreducible candidates in low-degree-first order
    F = make_field(3, 2)
    assert F.modulus == (1, 0, 1)
    # F_8: both x^3 + x + 1 and x^3 + x^2 + 1 are irreducible; comparing c0, c1, c2 in
    # turn puts 1 + x^2 + x^3 first
    assert make_field(2, 3).modulus == (1, 0, 1, 1)


def test_deterministic_construction():
    assert make_field(2, 8) == make_field(2, 8)
    assert make_field(2, 8).modulus == make_field(2, 8).modulus


def test_primality_matches_trial_division():
    def slow(n):
        return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))

    assert all(is_prime(n) == slow(n) for n in range(3000))
    assert is_prime(4294967291)
    assert not is_prime(4294967297)  # 641 * 6700417


def test_prime_power_and_cap():
    assert prime_power(9) == (3, 2)
    assert field_of_order(25).q == 25
    with pytest.raises(FieldError):
        prime_power(12)
    with pytest.raises(FieldError):
        make_field(2, 17)


def test_serialization_codes():
    F = make_field(3, 2)
    e = F.element((2, 1))  # 2 + x
    assert int(e) == 2 + 1 * 3
    assert F.element(int(e)) == e
    assert len({F.element(c) for c in F.elements()}) == 9


def test_mixed_fields_rejected():
    with pytest.raises(FieldError):
        make_field(3).one() + make_field(5).one()


def test_elem_int_coercion():
    F = make_field(5)
    a = F.element(3)
    assert a + 4 == F.element(2)
    assert 2 * a == F.element(1)
    assert isinstance(a - 1, FieldElem)
