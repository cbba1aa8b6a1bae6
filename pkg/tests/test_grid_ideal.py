import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from capbound.counting import count_B_exact
from capbound.errors import GuardExceeded
from capbound.ff import make_field
from capbound.grid_ideal import Grid, build_basis, is_member, reduce, standard_monomials
from capbound.poly import Polynomial, VarLayout, parse
from capbound.verify import random_polynomial, reduction_grids

F3, F5, F4 = make_field(3), make_field(5), make_field(2, 2)


def test_generators_full_f3():
    basis = build_basis(Grid.full(F3, 2))
    gens = basis.generators()
    assert gens[0] == parse("x1^3 - x1", 2, F3)
    assert gens[1] == parse("x2^3 - x2", 2, F3)


def test_generators_small_alphabets():
    assert build_basis(Grid(F3, ((0, 1),))).generators()[0] == parse("x1^2 - x1", 1, F3)
    assert build_basis(Grid(F5, ((1, 2),))).generators()[0] == parse("x1^2 - 3*x1 + 2", 1, F5)


def test_generators_vanish_on_alphabet():
    grid = Grid(F4, ((0, 2, 3),))
    g = build_basis(grid).generators()[0]
    assert g.eval_codes([1]) != 0
    assert all(g.eval_codes([a]) == 0 for a in (0, 2, 3))


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(F3, ((0, 0),))
    with pytest.raises(ValueError):
        Grid(F3, ((),))
    with pytest.raises(ValueError):
        Grid(F3, ((0, 3),))


def test_reduce_examples():
    basis = build_basis(Grid.full(F3, 1))
    assert reduce(parse("x1^4", 1, F3), basis) == parse("x1^2", 1, F3)
    cube = Grid(F3, ((0, 1), (0, 1)))
    H = reduce(parse("(x1 - x2)^2", 2, F3), build_basis(cube))
    assert H == parse("x1 - 2*x1*x2 + x2", 2, F3)


def test_reduce_idempotent_on_standard_form():
    basis = build_basis(Grid.full(F3, 2))
    P = parse("x1^2*x2^2 + 2*x1 + 1", 2, F3)
    assert reduce(P, basis) == P


def test_reduce_multiblock():
    basis = build_basis(Grid.full(F3, 1), m=3)
    P = parse("1 - (x1 - 2*y1 + z1)^2", VarLayout(3, 1), F3)
    assert reduce(P, basis) == P
    P4 = P * P
    H = reduce(P4, basis)
    assert max(max(e) for e in H.terms) <= 2
    for pt in itertools.product(range(3), repeat=3):
        assert H.eval_codes(pt) == P4.eval_codes(pt)


@pytest.mark.parametrize("idx", range(len(reduction_grids())))
def test_reduce_sound_on_random_polynomials(idx):
    # pointwise agreement plus caps pins down the normal form uniquely (interpolation on a grid)
    grid, m = reduction_grids()[idx]
    basis = build_basis(grid, m)
    rng = random.Random(idx)
    pts = list(grid.power_points(m))
    for _ in range(60):
        P = random_polynomial(rng, grid.field, grid.n * m, rng.randint(1, 5), 7)
        H = reduce(P, basis)
        assert all(e <= c for exps in H.terms for e, c in zip(exps, basis.caps))
        assert H.degree <= P.degree
        assert all(H.eval_codes(pt) == P.eval_codes(pt) for pt in pts)


@settings(max_examples=50)
@given(st.dictionaries(st.tuples(st.integers(0, 8), st.integers(0, 8)), st.integers(1, 4), max_size=6))
def test_reduce_is_linear_and_sound(terms):
    grid = Grid(F5, ((1, 2, 4), (0, 3)))
    basis = build_basis(grid)
    P = Polynomial(F5, 2, terms)
    Q = parse("x1^5*x2^3 + x2^4", 2, F5)
    assert reduce(P + Q, basis) == reduce(P, basis) + reduce(Q, basis)
    H = reduce(P, basis)
    for pt in grid.points():
        assert H.eval_codes(pt) == P.eval_codes(pt)


def test_standard_monomials():
    assert sorted(standard_monomials(Grid(F3, ((0, 1), (0, 1))))) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert len(list(standard_monomials(Grid.full(F3, 1), m=2))) == 9
    from fractions import Fraction

    mons = list(standard_monomials(Grid.full(F3, 2), max_deg=Fraction(4, 3)))
    assert len(mons) == 3 == count_B_exact(2, 3, 3)


def test_standard_monomials_guard():
    with pytest.raises(GuardExceeded):
        standard_monomials(Grid.full(F3, 20), guard=1000)


def test_membership():
    assert is_member(parse("x1^3 - x1", 1, F3), Grid.full(F3, 1))
    assert not is_member(parse("1", 1, F3), Grid.full(F3, 1))
    assert is_member(parse("(x1^2 - x1)*x2 + (x2^2 - x2)", 2, F3), Grid(F3, ((0, 1), (0, 1))))


def test_reduce_mismatch_errors():
    basis = build_basis(Grid.full(F3, 2))
    with pytest.raises(ValueError):
        reduce(parse("x1", 1, F3), basis)
    with pytest.raises(ValueError):
        reduce(parse("x1", 2, F5), basis)
