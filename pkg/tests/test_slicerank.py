import itertools
import random

import numpy as np
import pytest

from capbound.ff import make_field
from capbound.grid_ideal import Grid
from capbound.poly import VarLayout, parse
from capbound.search import PointSet, build_ap_polynomial, max_ap_free
from capbound.slicerank import (
    Tensor,
    build_eval_tensor,
    decompose_upper,
    diag_slice_rank,
    matrix_slice_rank,
    pigeonhole_split,
    rank_over_field,
)

F3, F5 = make_field(3), make_field(5)


def det_mod_p(M, p):
    """Leibniz expansion, for the minors oracle."""
    n = len(M)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        prod = sign
        for i in range(n):
            prod *= M[i][perm[i]]
        total += prod
    return total % p


def rank_by_minors(M, p):
    rows, cols = len(M), len(M[0])
    for r in range(min(rows, cols), 0, -1):
        for ri in itertools.combinations(range(rows), r):
            for ci in itertools.combinations(range(cols), r):
                if det_mod_p([[M[i][j] for j in ci] for i in ri], p):
                    return r
    return 0


def test_diag_examples():
    assert diag_slice_rank([1, 1, 0], 3) == 2
    assert diag_slice_rank([0, 0, 0], 3) == 0
    assert diag_slice_rank({(0,): 1, (1,): 2, (2,): 1}, 2) == 3
    with pytest.raises(ValueError):
        diag_slice_rank([1], 1)


def test_matrix_examples():
    assert matrix_slice_rank(Tensor(F3, 2, (0, 1), np.eye(2, dtype=np.int64))) == 2
    assert matrix_slice_rank(Tensor(F3, 2, (0, 1, 2), np.ones((3, 3), dtype=np.int64))) == 1
    with pytest.raises(ValueError):
        matrix_slice_rank(Tensor(F3, 3, (0,), np.ones((1, 1, 1), dtype=np.int64)))


def test_random_matrices_vs_minors_oracle():
    rng = random.Random(5)
    for _ in range(60):
        M = [[rng.randrange(5) if rng.random() < 0.7 else 0 for _ in range(4)] for _ in range(4)]
        if rng.random() < 0.3:
            M[3] = [(a + 2 * b) % 5 for a, b in zip(M[0], M[1])]
        assert rank_over_field(F5, M) == rank_by_minors(M, 5)


def test_rectangular_rank():
    assert rank_over_field(F3, [[1, 2, 0], [2, 1, 0]]) == 1
    assert rank_over_field(F3, []) == 0


def test_diag_matches_matrix_rank_exhaustive():
    for a in range(1, 6):
        for diag in itertools.product(range(3), repeat=a):
            T = Tensor(F3, 2, tuple(range(a)), np.diag(np.array(diag, dtype=np.int64)))
            assert T.is_diagonal()
            assert diag_slice_rank(diag, 2) == matrix_slice_rank(T)


def test_tensor_diagonal_detection():
    ent = np.zeros((2, 2, 2), dtype=np.int64)
    ent[0, 0, 0] = ent[1, 1, 1] = 1
    T = Tensor(F3, 3, (0, 1), ent)
    assert T.is_diagonal()
    ent[0, 1, 0] = 2
    assert not Tensor(F3, 3, (0, 1), ent).is_diagonal()


def test_eval_tensor_constant_and_empty():
    lay = VarLayout(3, 1)
    fam = PointSet.from_vectors(F3, 1, [(0,), (2,)])
    T = build_eval_tensor(parse("1", lay, F3), fam, lay)
    assert T.entries.shape == (2, 2, 2) and (T.entries == 1).all()
    empty = build_eval_tensor(parse("1", lay, F3), PointSet(F3, 1, frozenset()), lay)
    assert empty.size == 0 and empty.is_diagonal()


def test_pigeonhole_split_reconstructs():
    lay = VarLayout(3, 1)
    P = parse("1 - (x1 - 2*y1 + z1)^2", lay, F3)
    summands = pigeonhole_split(P, lay)
    total = sum((s.as_polynomial(lay) for s in summands[1:]), summands[0].as_polynomial(lay))
    assert total == P
    for s in summands:
        assert sum(s.exps) * 3 <= 2


@pytest.mark.parametrize("n", [1, 2])
def test_decompose_maincor4_chain(n):
    res = max_ap_free(3, n)
    P = build_ap_polynomial(3, n)
    br = decompose_upper(P, Grid.full(F3, n), VarLayout(3, n), res.witness)
    pts = list(Grid.full(F3, n).power_points(3))
    assert br.verify(pts)
    assert br.lower == res.size
    assert br.certificate_lower["kind"] == "diagonal"
    assert br.lower <= br.upper <= br.count_bound
    if n == 2:
        assert br.count_bound == 9 and br.lower == 4


def test_decompose_matrix_case():
    lay = VarLayout(2, 1)
    P = parse("x1*y1 + 1", lay, F3)
    fam = PointSet.from_vectors(F3, 1, [(0,), (1,), (2,)])
    br = decompose_upper(P, Grid.full(F3, 1), lay, fam)
    assert br.certificate_lower["kind"] == "matrix_rank"
    assert br.lower == 2 <= br.upper
    assert br.verify(list(Grid.full(F3, 1).power_points(2)))
