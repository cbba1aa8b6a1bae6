import itertools
import json

import pytest
from hypothesis import given, strategies as st

from capbound.errors import PolyParseError
from capbound.ff import make_field
from capbound.poly import (
    NEG_INF,
    Polynomial,
    VarLayout,
    evaluate,
    from_json,
    parse,
    substitute_difference,
    to_json,
)

F3 = make_field(3)
F5 = make_field(5)
F9 = make_field(3, 2)


def expand_maincor4_q3():
    """1 - (x - 2y + z)^2 expanded by hand: over F_3, -2 = 1 so x - 2y + z = x + y + z."""
    # (x+y+z)^2 = x^2+y^2+z^2+2xy+2xz+2yz; negate mod 3: 2x^2+2y^2+2z^2+xy+xz+yz
    return {
        (0, 0, 0): 1,
        (2, 0, 0): 2, (0, 2, 0): 2, (0, 0, 2): 2,
        (1, 1, 0): 1, (1, 0, 1): 1, (0, 1, 1): 1,
    }


def test_parse_maincor4_q3():
    P = parse("1 - (x1 - 2*y1 + z1)^2", VarLayout(3, 1), F3)
    assert P.terms == expand_maincor4_q3()
    assert P.degree == 2


def test_block_names_equivalent():
    lay = VarLayout(3, 1)
    assert parse("x1_1 + x2_1 + x3_1", lay, F3) == parse("x1 + y1 + z1", lay, F3) == parse("x + y + z", lay, F3)


def test_zero_polynomial_sentinel():
    Z = parse("0", 1, F3)
    assert Z.is_zero()
    assert Z.degree == NEG_INF
    assert Z.degree != -1
    assert evaluate(Z, [2]).code == 0


def test_eval_x_squared_plus_two():
    assert evaluate(parse("x1^2 + 2", 1, F3), [1]).code == 0


def test_evaluate_maincor4_points():
    P = parse("1 - (x1 - 2*y1 + z1)^2", VarLayout(3, 1), F3)
    assert evaluate(P, [1, 1, 1]).code == 1
    # oracle: integer arithmetic mod 3
    for a, b, c in itertools.product(range(3), repeat=3):
        assert evaluate(P, [a, b, c]).code == (1 - (a - 2 * b + c) ** 2) % 3
    assert evaluate(P, [0, 1, 0]).code == 0


def test_evaluate_dimension_mismatch():
    with pytest.raises(ValueError):
        evaluate(parse("x1", 2, F3), [1])


def test_precedence():
    # ^ binds tighter than unary minus, which binds tighter than *
    assert parse("-x1^2", 1, F5) == -(parse("x1", 1, F5) ** 2)
    assert parse("2*3+4", 1, F5) == parse("0", 1, F5)
    assert parse("2-3-4", 1, F5) == parse("0", 1, F5)  # (2-3)-4 = -5
    assert parse("(x1+1)^2", 1, F5) == parse("x1^2 + 2*x1 + 1", 1, F5)


@pytest.mark.parametrize(
    "text, pos",
    [("x1 +", 4), ("x1 ^ y1", 5), ("(x1", 3), ("x1 $ 2", 3), ("x1^-1", 3), ("x1^2^3", 4)],
)
def test_syntax_errors_report_offset(text, pos):
    with pytest.raises(PolyParseError) as exc:
        parse(text, VarLayout(2, 1), F3)
    assert exc.value.pos == pos


@pytest.mark.parametrize("text", ["x3", "q1", "y1", "x2_1"])
def test_unknown_variables(text):
    with pytest.raises(PolyParseError):
        parse(text, 2, F3)


def test_substitute_difference_examples():
    lay = VarLayout(2, 1)
    assert substitute_difference(parse("x1", 1, F3)) == parse("x1 - y1", lay, F3)
    assert substitute_difference(parse("x1^2", 1, F3)) == parse("x1^2 + x1*y1 + y1^2", lay, F3)
    assert substitute_difference(parse("1", 1, F3)) == parse("1", lay, F3)


@pytest.mark.parametrize("F, n", [(F3, 2), (F5, 1), (F9, 1), (make_field(7), 2)])
def test_substitute_difference_exhaustive(F, n):
    Q = parse(" + ".join(f"x{i}^{i + 2}" for i in range(1, n + 1)) + " + 2*x1 + 1", n, F)
    P = substitute_difference(Q)
    assert P.degree == Q.degree
    for a in itertools.product(range(F.q), repeat=n):
        for b in itertools.product(range(F.q), repeat=n):
            diff = [F.sub(x, y) for x, y in zip(a, b)]
            assert P.eval_codes(list(a) + list(b)) == Q.eval_codes(diff)


def polys(F, nvars, max_terms=5, max_exp=3):
    return st.dictionaries(
        st.tuples(*[st.integers(0, max_exp)] * nvars), st.integers(1, F.q - 1), max_size=max_terms
    ).map(lambda d: Polynomial(F, nvars, d))


@given(polys(F5, 3), polys(F5, 3), st.tuples(*[st.integers(0, 4)] * 3))
def test_evaluation_is_ring_homomorphism(P, R, pt):
    F = F5
    assert (P + R).eval_codes(pt) == F.add(P.eval_codes(pt), R.eval_codes(pt))
    assert (P * R).eval_codes(pt) == F.mul(P.eval_codes(pt), R.eval_codes(pt))
    assert (P - R).eval_codes(pt) == F.sub(P.eval_codes(pt), R.eval_codes(pt))


@given(polys(F9, 2), st.tuples(*[st.integers(0, 8)] * 2))
def test_homomorphism_extension_field(P, pt):
    assert (P * P).eval_codes(pt) == F9.mul(P.eval_codes(pt), P.eval_codes(pt))


@given(polys(F5, 3, max_terms=8))
def test_print_parse_roundtrip(P):
    assert parse(str(P), 3, F5) == P


@given(polys(F9, 2, max_terms=6))
def test_print_parse_roundtrip_extension(P):
    assert parse(str(P), 2, F9) == P


@given(polys(F5, 6))
def test_roundtrip_block_layout(P):
    lay = VarLayout(3, 2)
    P = P.with_layout(lay)
    assert parse(str(P), lay, F5) == P


def test_roundtrip_many_blocks():
    lay = VarLayout(8, 1)
    P = parse("x8_1^2 + 3*x1_1*x5_1", lay, F5)
    assert "x8_1^2" in str(P)
    assert parse(str(P), lay, F5) == P


@given(polys(F5, 3))
def test_json_roundtrip(P):
    obj = json.loads(json.dumps(to_json(P)))
    assert obj["nvars"] == 3
    assert all(0 <= t["coef"] < 5 for t in obj["terms"])
    assert from_json(obj, F5) == P


def test_canonical_order_deglex():
    P = parse("x2 + x1 + x1^2 + x2^2 + x1*x2 + 1", 2, F5)
    assert str(P) == "x1^2 + x1*x2 + x2^2 + x1 + x2 + 1"


def test_field_mismatch():
    with pytest.raises(ValueError):
        parse("x1", 1, F3) + parse("x1", 1, F5)


def test_pow_zero_is_one():
    assert parse("(x1 + 2)^0", 1, F3) == parse("1", 1, F3)
