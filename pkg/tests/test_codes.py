import pytest
from hypothesis import given, settings, strategies as st

from stabdecomp.codes import (
    CoarseGrainOp,
    CPGate,
    CXGate,
    Circuit,
    DropGen,
    HGate,
    MulGate,
    NewGen,
    Rescale,
    RowAdd,
    RowScale,
    RowSwap,
    StabilizerCode,
    direct_sum,
    gate_inverse_word,
    gate_matrix,
    is_symplectic,
)
from stabdecomp.corpus import color_666, toric, toric_stack, trivial, wen_plaquette
from stabdecomp.errors import NonCommutingCode
from stabdecomp.laurent import LaurentPoly, parse_poly
from stabdecomp.polymat import PolyMatrix

PRIMES = [2, 3, 5, 7]


def P(p, s):
    return parse_poly(p, s)


def epsilon_rows(code):
    return [[code.epsilon[i, j].to_str() for j in range(2 * code.q)]
            for i in range(code.t)]


def test_toric_excitation_map():
    for p in PRIMES:
        code = toric(p)
        assert epsilon_rows(code) == [
            [P(p, "x - 1").to_str(), P(p, "y - 1").to_str(), "0", "0"],
            ["0", "0", P(p, "y^-1 - 1").to_str(), P(p, "1 - x^-1").to_str()],
        ]
        code.check_commuting()
        assert not code.epsilon.eval_at_unity().any()


def test_single_z_excitation_map():
    code = trivial(1, 3)
    assert epsilon_rows(code) == [[P(3, "-1").to_str(), "0"]]


def test_anticommuting_witness():
    p = 3
    sigma = PolyMatrix.from_cols(
        p, 2, [[P(p, "1"), P(p, "0")], [P(p, "0"), P(p, "1")]]
    )
    code = StabilizerCode(p, 1, sigma)
    with pytest.raises(NonCommutingCode) as ei:
        code.check_commuting()
    assert ei.value.witness.is_constant()
    assert not ei.value.witness.is_zero()


def test_commutation_matrix_identity():
    # dagger(sigma) lambda sigma equals eps lambda dagger(eps)
    code = color_666()
    lhs = code.commutation_matrix()
    eps = code.epsilon
    rhs = eps * code.lam() * eps.dagger()
    assert lhs == rhs
    assert lhs.is_zero()


def test_hadamard_expansion():
    p = 5
    U = gate_matrix(p, 1, HGate(0))
    assert U.entries[0][0].is_zero()
    assert U.entries[0][1] == P(p, "-1")
    assert U.entries[1][0].is_one()
    assert U.entries[1][1].is_zero()
    sigma = PolyMatrix.from_cols(p, 2, [[P(p, "1"), P(p, "0")]])
    code = StabilizerCode(p, 1, sigma)
    out = code.apply_op(HGate(0))
    assert out.sigma.col(0) == [P(p, "0"), P(p, "1")]


def poly_strategy(p):
    term = st.tuples(
        st.integers(min_value=-2, max_value=2),
        st.integers(min_value=-2, max_value=2),
        st.integers(min_value=0, max_value=p - 1),
    )
    return st.lists(term, max_size=3).map(
        lambda ts: LaurentPoly(p, {(a, b): c for a, b, c in ts})
    )


def gate_strategy(p, q):
    poly = poly_strategy(p)
    idx = st.integers(min_value=0, max_value=q - 1)
    hada = idx.map(HGate)
    cp = st.tuples(idx, idx, poly).map(lambda t: CPGate(*t))
    cx = (
        st.tuples(idx, idx, poly)
        .filter(lambda t: t[0] != t[1])
        .map(lambda t: CXGate(*t))
    )
    mul = st.tuples(idx, st.integers(min_value=1, max_value=p - 1)).map(
        lambda t: MulGate(*t)
    )
    return st.one_of(hada, cp, cx, mul)


@settings(max_examples=80, deadline=None)
@given(
    st.sampled_from(PRIMES).flatmap(
        lambda p: st.tuples(st.just(p), gate_strategy(p, 3))
    )
)
def test_gates_are_symplectic(pg):
    p, g = pg
    assert is_symplectic(gate_matrix(p, 3, g))


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from(PRIMES).flatmap(
        lambda p: st.tuples(st.just(p), gate_strategy(p, 2))
    )
)
def test_gate_inverse_word(pg):
    p, g = pg
    code = toric(p)
    back = code.apply_op(g).apply_word(gate_inverse_word(g, p))
    assert back.sigma == code.sigma


def test_extragate_action():
    p = 5
    code = toric(p)
    out = code.apply_op(MulGate(0, 2))
    for j in range(code.t):
        assert out.sigma[0, j] == code.sigma[0, j].scale(2)
        assert out.sigma[2, j] == code.sigma[2, j].scale(3)  # 2*3=1 mod 5
        assert out.sigma[1, j] == code.sigma[1, j]


def test_cp_leaves_x_rows():
    p = 3
    code = toric(p)
    out = code.apply_op(CPGate(0, 0, P(p, "x")))
    for j in range(code.t):
        assert out.sigma[0, j] == code.sigma[0, j]
        assert out.sigma[1, j] == code.sigma[1, j]


def test_row_ops_act_on_epsilon():
    p = 5
    code = toric_stack(2, p)
    f = P(p, "2*x - y^-1")
    added = code.apply_op(RowAdd(0, 2, f))
    for jc in range(2 * code.q):
        assert added.epsilon[0, jc] == code.epsilon[0, jc] + f * code.epsilon[2, jc]
        assert added.epsilon[2, jc] == code.epsilon[2, jc]
    swapped = code.apply_op(RowSwap(1, 3))
    assert swapped.epsilon.row(1) == code.epsilon.row(3)
    assert swapped.epsilon.row(3) == code.epsilon.row(1)
    scaled = code.apply_op(RowScale(1, 3))
    assert scaled.epsilon.row(1) == [P(p, "3") * g for g in code.epsilon.row(1)]


def test_newgen_dropgen():
    p = 3
    code = toric(p)
    coeffs = (P(p, "x"), P(p, "1 - y"))
    grown = code.apply_op(NewGen(coeffs))
    assert grown.t == 3
    expect = [
        coeffs[0] * code.epsilon[0, jc] + coeffs[1] * code.epsilon[1, jc]
        for jc in range(4)
    ]
    assert grown.epsilon.row(2) == expect
    grown.check_commuting()
    assert grown.apply_op(DropGen(2)).sigma == code.sigma


def test_rescale_is_monomial_bookkeeping():
    p = 5
    code = toric(p)
    mono = P(p, "x^2")
    out = code.apply_op(Rescale(1, mono))
    assert out.sigma.col(1) == [mono * g for g in code.sigma.col(1)]
    assert out.epsilon.row(1) == [mono.bar() * g for g in code.epsilon.row(1)]
    with pytest.raises(ValueError):
        code.apply_op(Rescale(0, P(p, "x + 1")))


def test_coarse_grain_code():
    code = wen_plaquette()
    cg = code.coarse_grain(2)
    assert cg.q == 4 and cg.t == 4
    cg.check_commuting()
    # commutation functorial under coarse graining
    assert cg.commutation_matrix() == code.commutation_matrix().coarse_grain(2)


def test_direct_sum_blocks():
    p = 3
    a = toric(p)
    b = trivial(1, p)
    s = direct_sum(a, b)
    assert (s.p, s.q, s.t) == (3, 3, 3)
    s.check_commuting()
    # epsilon is block diagonal under the component interleaving
    eps = s.epsilon
    for i in range(2):  # toric rows touch only components 0,1 (X) / 3,4 (Z)
        assert eps[i, 2].is_zero() and eps[i, 5].is_zero()
    assert eps[2, 2] == P(p, "-1")
    for c in (0, 1, 3, 4):
        assert eps[2, c].is_zero()


def test_stack_epsilon_is_block_sum():
    p = 2
    s = toric_stack(2, p)
    eps = s.epsilon
    t1 = toric(p).epsilon
    # generator 2 (second copy, first generator) lives in components 2,3,6,7
    assert eps[2, 2] == t1[0, 0]
    assert eps[2, 3] == t1[0, 1]
    assert eps[2, 6] == t1[0, 2]
    assert eps[2, 7] == t1[0, 3]
    assert eps[2, 0].is_zero() and eps[2, 4].is_zero()


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from([2, 3, 5]).flatmap(
        lambda p: st.tuples(st.just(p), st.lists(gate_strategy(p, 2), max_size=4))
    )
)
def test_gates_preserve_commutation(pw):
    p, word = pw
    code = toric(p).apply_word(word)
    code.check_commuting()


def test_circuit_replay():
    p = 3
    circ = Circuit(p, width=4)
    circ.append(HGate(0))
    circ.append(RowSwap(0, 1))
    circ.append(CPGate(0, 1, P(p, "x - 1")))
    code = toric(p)
    out1 = circ.replay(code)
    out2 = circ.replay(code)
    assert out1.sigma == out2.sigma
    out1.check_commuting()


def test_circuit_replay_with_coarse():
    circ = Circuit(2, width=8)
    circ.append(CoarseGrainOp(2))
    circ.append(HGate(3))
    out = circ.replay(wen_plaquette())
    assert out.q == 4
    out.check_commuting()
