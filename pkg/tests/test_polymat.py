import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabdecomp.errors import DimensionMismatch
from stabdecomp.laurent import LaurentPoly, parse_poly
from stabdecomp.polymat import (
    PolyMatrix,
    coarse_grain_scalar,
    coarse_grain_vector,
    coset_reps,
)


def P(p, s):
    return parse_poly(p, s)


def matrix_strategy(p, rows, cols):
    term = st.tuples(
        st.integers(min_value=-2, max_value=2),
        st.integers(min_value=-2, max_value=2),
        st.integers(min_value=0, max_value=p - 1),
    )
    poly = st.lists(term, max_size=3).map(
        lambda ts: LaurentPoly(p, {(a, b): c for a, b, c in ts})
    )
    return st.lists(
        st.lists(poly, min_size=cols, max_size=cols), min_size=rows, max_size=rows
    ).map(lambda rs: PolyMatrix(p, rs))


def test_lambda_form():
    lam = PolyMatrix.lambda_form(5, 2)
    assert lam.rows == lam.cols == 4
    assert lam[0, 2].is_one() and lam[1, 3].is_one()
    assert lam[2, 0] == LaurentPoly.const(5, -1)
    # antisymmetry under dagger and square = -I
    assert lam.dagger() == -lam
    mI = -PolyMatrix.identity(5, 4)
    assert lam * lam == mI


def test_elementary():
    p = 3
    E = PolyMatrix.elementary(p, 2, 0, 1, P(p, "x - 1"))
    assert E[0, 1] == P(p, "x - 1") and E[0, 0].is_one()
    # transvection inverse
    Einv = PolyMatrix.elementary(p, 2, 0, 1, -P(p, "x - 1"))
    assert E * Einv == PolyMatrix.identity(p, 2)
    # diagonal case adds on the diagonal
    D = PolyMatrix.elementary(p, 2, 1, 1, P(p, "2"))
    assert D[1, 1] == P(p, "2 + 1")


def test_mul_shapes():
    A = PolyMatrix.zeros(3, 2, 3)
    B = PolyMatrix.zeros(3, 4, 2)
    with pytest.raises(DimensionMismatch):
        A * B


@settings(max_examples=30)
@given(st.tuples(matrix_strategy(3, 2, 3), matrix_strategy(3, 3, 2)))
def test_dagger_antihomomorphism(ab):
    A, B = ab
    assert (A * B).dagger() == B.dagger() * A.dagger()
    assert A.dagger().dagger() == A


def test_eval_at_unity():
    p = 3
    M = PolyMatrix(p, [[P(p, "x - 1"), P(p, "x + y + 1")], [P(p, "2"), P(p, "0")]])
    assert np.array_equal(M.eval_at_unity(), np.array([[0, 0], [2, 0]]))


def test_coset_reps_order():
    assert coset_reps(2) == [(0, 0), (1, 0), (0, 1), (1, 1)]


def test_coarse_grain_scalar_x():
    p = 5
    blocks = coarse_grain_scalar(LaurentPoly.variable(p, "x"), 2)
    x = LaurentPoly.variable(p, "x")
    one = LaurentPoly.one(p)
    # columns say: 1 -> x, x -> x'*1, y -> x*y, x*y -> x'*y
    assert blocks == {(1, 0): one, (0, 1): x, (3, 2): one, (2, 3): x}


def test_coarse_grain_identity_and_m1():
    p = 3
    M = PolyMatrix.identity(p, 2)
    assert M.coarse_grain(2) == PolyMatrix.identity(p, 8)
    A = PolyMatrix(p, [[P(p, "x*y - 2")]])
    assert A.coarse_grain(1) is A


@settings(max_examples=30, deadline=None)
@given(st.tuples(matrix_strategy(2, 2, 2), matrix_strategy(2, 2, 2)))
def test_coarse_grain_functorial(ab):
    A, B = ab
    m = 2
    assert (A * B).coarse_grain(m) == A.coarse_grain(m) * B.coarse_grain(m)
    assert A.coarse_grain(m).dagger() == A.dagger().coarse_grain(m)


def test_coarse_grain_lambda():
    p = 3
    lam = PolyMatrix.lambda_form(p, 1)
    # q=1 cell coarse-grained by 2 has q=4; block structure must be
    # exactly the larger symplectic form
    assert lam.coarse_grain(2) == PolyMatrix.lambda_form(p, 4)


def test_coarse_grain_vector_matches_matrix():
    p = 5
    col = [P(p, "x + 2*y^-1"), P(p, "x^2*y - 1")]
    V = PolyMatrix.from_cols(p, 2, [col])
    W = V.coarse_grain(2)
    assert coarse_grain_vector(col, 2) == W.col(0)


def test_stack_and_drop():
    p = 2
    A = PolyMatrix.identity(p, 2)
    B = PolyMatrix.zeros(p, 2, 2)
    H = A.hstack(B)
    assert H.cols == 4 and H[0, 0].is_one() and H[0, 2].is_zero()
    V = A.vstack(B)
    assert V.rows == 4
    assert H.drop_col(0).cols == 3
    assert V.drop_row(3).rows == 3
    row = [LaurentPoly.one(p), LaurentPoly.zero(p)]
    assert A.insert_row(1, row).rows == 3
    assert A.append_col([LaurentPoly.one(p)] * 2).cols == 3
