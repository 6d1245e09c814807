import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabdecomp.corpus import toric
from stabdecomp.errors import UndecidedMembership
from stabdecomp.imagesolver import (
    CAP,
    FOUND,
    OBSTRUCTED,
    BoxSystem,
    box_support,
    certify_row_combination,
    eval_obstructed,
    is_trivial_excitation,
    solve_in_image,
)
from stabdecomp.laurent import LaurentPoly, parse_poly
from stabdecomp.polymat import PolyMatrix


def P(p, s):
    return parse_poly(p, s)


def col_from(M, w):
    return M * PolyMatrix.from_cols(M.p, M.cols, [list(w)])


def test_toric_x_mover_target_is_reachable():
    for p in (2, 3, 5):
        eps = toric(p).epsilon
        target = [P(p, "x - 1"), P(p, "0")]
        res = solve_in_image(eps, target)
        assert res.status == FOUND
        prod = col_from(eps, res.witness)
        assert [prod[i, 0] for i in range(2)] == target
        # the hand-built witness e_1 solves the same system
        unit = [P(p, "1"), P(p, "0"), P(p, "0"), P(p, "0")]
        prod = col_from(eps, unit)
        assert [prod[i, 0] for i in range(2)] == target


def test_toric_charge_row_target_reachable():
    p = 3
    eps = toric(p).epsilon
    target = [P(p, "0"), P(p, "x - 1")]
    res = solve_in_image(eps, target)
    assert res.found
    # x*e_4 is one valid witness: (1 - x^-1) * x = x - 1
    w = [P(p, "0"), P(p, "0"), P(p, "0"), P(p, "x")]
    prod = col_from(eps, w)
    assert [prod[i, 0] for i in range(2)] == target


def test_unit_excitation_is_obstructed():
    # eval(eps) vanishes for the toric code, so any target with a
    # nonzero evaluation is refuted by the constant-term check alone.
    for p in (2, 5):
        eps = toric(p).epsilon
        target = [P(p, "1"), P(p, "0")]
        assert eval_obstructed(eps, target)
        res = solve_in_image(eps, target)
        assert res.status == OBSTRUCTED
        assert not is_trivial_excitation(toric(p), target)


def test_zero_target_short_circuits():
    eps = toric(3).epsilon
    res = solve_in_image(eps, [P(3, "0"), P(3, "0")])
    assert res.found and res.box == 0
    assert all(f.is_zero() for f in res.witness)


def test_cap_exhaustion_reported():
    # x - 1 is not a multiple of y - 1, and there is no evaluation
    # obstruction, so the search runs out of box instead.
    p = 3
    M = PolyMatrix.from_cols(p, 1, [[P(p, "y - 1")]])
    res = solve_in_image(M, [P(p, "x - 1")], box_cap=4)
    assert res.status == CAP
    with pytest.raises(UndecidedMembership):
        code_like = type("C", (), {"epsilon": M})
        is_trivial_excitation(code_like, [P(p, "x - 1")], box_cap=4)


def test_row_certificate_unit_row():
    p = 2
    eps = toric(p).epsilon
    target = eps.row(1)
    res = certify_row_combination(eps, target)
    assert res.found
    r = res.witness
    back = [sum_rows(eps, r, j) for j in range(eps.cols)]
    assert back == target


def sum_rows(M, r, j):
    acc = LaurentPoly.zero(M.p)
    for k in range(M.rows):
        if r[k].terms:
            acc = acc + r[k] * M[k, j]
    return acc


def test_row_certificate_polynomial_combination():
    p = 5
    eps = toric(p).epsilon
    c0, c1 = P(p, "2"), P(p, "x")
    target = [c0 * eps[0, j] + c1 * eps[1, j] for j in range(eps.cols)]
    res = certify_row_combination(eps, target)
    assert res.found
    back = [sum_rows(eps, res.witness, j) for j in range(eps.cols)]
    assert back == target


def test_row_certificate_refuses_outside_rowspace():
    p = 2
    eps = toric(p).epsilon
    target = [P(p, "1"), P(p, "0"), P(p, "0"), P(p, "0")]
    res = certify_row_combination(eps, target)
    assert res.status == OBSTRUCTED


def test_box_monotonicity():
    # a witness found under a tight cap is still found under a loose one
    p = 3
    eps = toric(p).epsilon
    target = [P(p, "x - 1"), P(p, "0")]
    tight = solve_in_image(eps, target, box_cap=1)
    loose = solve_in_image(eps, target, box_cap=32)
    assert tight.found and loose.found


def test_box_support_shape():
    assert box_support(0) == {(0, 0)}
    assert len(box_support(2)) == 25


def test_kernel_vectors_annihilate():
    p = 3
    eps = toric(p).epsilon
    sys_ = BoxSystem(eps, [box_support(1)] * eps.cols)
    for w in sys_.kernel()[:8]:
        prod = col_from(eps, w)
        assert all(prod[i, 0].is_zero() for i in range(eps.rows))


@st.composite
def small_poly(draw, p):
    n_terms = draw(st.integers(0, 3))
    terms = {}
    for _ in range(n_terms):
        a = draw(st.integers(-2, 2))
        b = draw(st.integers(-2, 2))
        c = draw(st.integers(1, p - 1))
        terms[(a, b)] = c
    return LaurentPoly(p, terms)


@settings(max_examples=40, deadline=None)
@given(data=st.data(), p=st.sampled_from([2, 3, 5]))
def test_planted_solutions_round_trip(data, p):
    rows, cols = 2, 3
    M = PolyMatrix(
        p, [[data.draw(small_poly(p)) for _ in range(cols)] for _ in range(rows)]
    )
    w0 = [data.draw(small_poly(p)) for _ in range(cols)]
    target = [col_from(M, w0)[i, 0] for i in range(rows)]
    res = solve_in_image(M, target)
    assert res.found
    back = col_from(M, res.witness)
    assert [back[i, 0] for i in range(rows)] == target
