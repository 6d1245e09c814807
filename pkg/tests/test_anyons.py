import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabdecomp import fplin
from stabdecomp.anyons import (
    Charge,
    MoverPair,
    annihilator_normalize,
    charge_basis,
    charge_count,
    echelon_charge_rows,
    find_boson,
    find_movers,
    polar_form,
    spin_table,
    string_bracket,
    topological_spin,
    unit_charge,
)
from stabdecomp.corpus import color_666, toric, toric_stack, trivial, wen_plaquette
from stabdecomp.errors import NoCharges, NormalizationFailed, UndecidedMembership
from stabdecomp.imagesolver import BoxSystem, box_support
from stabdecomp.laurent import LaurentPoly, parse_poly
from stabdecomp.polymat import PolyMatrix


def P(p, s):
    return parse_poly(p, s)


def apply_eps(code, w):
    prod = code.epsilon * PolyMatrix.from_cols(code.p, 2 * code.q, [list(w)])
    return [prod[i, 0] for i in range(code.t)]


def check_mover_equations(code, mv):
    p = code.p
    xm1, ym1 = P(p, "x - 1"), P(p, "y - 1")
    assert apply_eps(code, mv.p_x) == [xm1 * f for f in mv.e.rep]
    assert apply_eps(code, mv.p_y) == [ym1 * f for f in mv.e.rep]


# ---------------------------------------------------------------------------
# charge counting and bases


def test_charge_counts():
    assert charge_count(toric(2)) == 2
    assert charge_count(toric(7)) == 2
    assert charge_count(toric_stack(2, 3)) == 4
    assert charge_count(trivial(3, 5)) == 0
    assert charge_count(wen_plaquette()) == 1
    assert charge_count(color_666()) == 4


def test_charge_basis_unit_vectors():
    k, basis, eps = charge_basis(toric(3))
    assert k == 2
    assert [b.coords for b in basis] == [(1, 0), (0, 1)]
    reps = [[f.to_str() for f in b.rep] for b in basis]
    assert reps == [["1", "0"], ["0", "1"]]


def test_echelon_rows_put_eval_in_rref():
    code = color_666()
    ech, charge_rows, ops = echelon_charge_rows(code)
    E = ech.epsilon.eval_at_unity() % 2
    R, piv = fplin.rref(E, 2)
    assert np.array_equal(E, R)
    assert charge_rows == list(range(len(piv), code.t))
    # the recorded ops replay to the same code
    replayed = code.apply_word(ops)
    assert replayed.sigma == ech.sigma
    ech.check_commuting()


def test_echelon_preserves_charge_count():
    for code in (toric(5), color_666(), wen_plaquette().coarse_grain(2)):
        ech, charge_rows, _ = echelon_charge_rows(code)
        assert len(charge_rows) == charge_count(code) == charge_count(ech)


# ---------------------------------------------------------------------------
# annihilator normalization


def test_normalize_toric_is_identity():
    m, cg = annihilator_normalize(toric(2))
    assert m == 1 and cg.q == 2


def test_normalize_wen_needs_two():
    m, cg = annihilator_normalize(wen_plaquette())
    assert m == 2
    assert cg.q == 4 and charge_count(cg) == 2


def test_normalize_trivial_vacuous():
    m, cg = annihilator_normalize(trivial(2, 3))
    assert m == 1


def test_normalize_cap_respected():
    with pytest.raises(NormalizationFailed):
        annihilator_normalize(wen_plaquette(), m_cap=1)


# ---------------------------------------------------------------------------
# movers


def test_toric_mover_equations_hold():
    for p in (2, 3, 5):
        code = toric(p)
        k, basis, _ = charge_basis(code)
        for e in basis:
            check_mover_equations(code, find_movers(code, e))


def test_toric_hand_built_movers_are_valid():
    # vertex charge: unit Pauli vectors already shift it
    p = 5
    code = toric(p)
    e = unit_charge(p, 2, 0, 2, 0)
    z = P(p, "0")
    hand = MoverPair(
        (P(p, "1"), z, z, z), (z, P(p, "1"), z, z), e
    )
    check_mover_equations(code, hand)
    # plaquette charge: the Z-pair with monomial offsets
    em = unit_charge(p, 2, 1, 2, 1)
    hand_m = MoverPair(
        (z, z, z, P(p, "x")), (z, z, P(p, "-y"), z), em
    )
    check_mover_equations(code, hand_m)


def test_movers_undecided_without_normalization():
    # the mover target always evaluates to zero, so the failure shows
    # up as cap exhaustion rather than an evaluation refutation
    code = wen_plaquette()
    ech, charge_rows, _ = echelon_charge_rows(code)
    e = unit_charge(2, code.t, charge_rows[0], 1, 0)
    with pytest.raises(UndecidedMembership):
        find_movers(ech, e, box_cap=16)


def test_zero_charge_zero_movers():
    code = toric(3)
    zero = Charge(tuple([P(3, "0")] * 2), (0, 0))
    mv = find_movers(code, zero)
    assert all(f.is_zero() for f in mv.p_x + mv.p_y)
    assert topological_spin(code, zero, movers=mv) == 0


# ---------------------------------------------------------------------------
# spins: frozen values for the toric code


def test_toric_spin_table():
    for p in (2, 3, 5):
        tab = spin_table(toric(p))
        assert tab.k == 2
        assert tab.theta_basis == [0, 0]
        assert tab.S[0, 1] == tab.S[1, 0] == p - 1
        assert tab.S[0, 0] == tab.S[1, 1] == 0
        # e+m composite is the fermion-like charge: theta = -1
        em = tab.basis[0] + tab.basis[1]
        assert topological_spin(tab.code, em) == p - 1
        assert tab.theta_of((1, 1)) == p - 1


def test_polar_form_identities():
    p = 3
    code = toric(p)
    k, basis, _ = charge_basis(code)
    e, m = basis
    assert polar_form(code, e, m) == p - 1
    zero = Charge(tuple([P(p, "0")] * 2), (0, 0))
    assert polar_form(code, e, zero) == 0
    for a in range(p):
        ea = e.scaled(a)
        assert polar_form(code, ea, ea) == (2 * topological_spin(code, ea)) % p


def test_spin_quadraticity():
    p = 5
    tab = spin_table(toric(p))
    em = tab.basis[0] + tab.basis[1]
    mv = tab.movers[0] + tab.movers[1]
    th = topological_spin(tab.code, em, movers=mv)
    for a in range(p):
        got = topological_spin(tab.code, em.scaled(a), movers=mv.scaled(a))
        assert got == (a * a * th) % p


def test_spin_alternate_strings_agree():
    for code in (toric(2), toric(3), wen_plaquette().coarse_grain(2)):
        tab = spin_table(code)
        for e, mv in zip(tab.basis, tab.movers):
            assert (
                topological_spin(tab.code, e, movers=mv, alternate=True)
                == topological_spin(tab.code, e, movers=mv)
            )
        em = tab.basis[0] + tab.basis[1]
        mv = tab.movers[0] + tab.movers[1]
        assert (
            topological_spin(tab.code, em, movers=mv, alternate=True)
            == topological_spin(tab.code, em, movers=mv)
        )


def test_spin_mover_choice_invariance():
    # re-derive movers after adding stabilizer-image noise: epsilon
    # annihilates columns of sigma, so these are equally valid movers
    # and must give the same spin
    rng = np.random.default_rng(7)
    p = 3
    tab = spin_table(toric(p))
    code = tab.code
    for e, mv, th in zip(tab.basis, tab.movers, tab.theta_basis):
        for _ in range(10):
            wx = _random_sigma_image(rng, code)
            wy = _random_sigma_image(rng, code)
            noisy = MoverPair(
                tuple(a + b for a, b in zip(mv.p_x, wx)),
                tuple(a + b for a, b in zip(mv.p_y, wy)),
                e,
            )
            check_mover_equations(code, noisy)
            assert topological_spin(code, e, movers=noisy) == th


def _random_sigma_image(rng, code):
    p = code.p
    out = [LaurentPoly.zero(p)] * (2 * code.q)
    for j in range(code.t):
        a = int(rng.integers(-1, 2))
        b = int(rng.integers(-1, 2))
        c = int(rng.integers(0, p))
        mono = LaurentPoly.monomial(p, a, b, c)
        if mono.is_zero():
            continue
        col = code.sigma.col(j)
        out = [f + mono * g for f, g in zip(out, col)]
    return out


def test_spin_representative_invariance():
    # shifting the representative by a trivial excitation changes the
    # movers but not the spin
    p = 2
    tab = spin_table(toric(p))
    code = tab.code
    e = tab.basis[0]
    w = [P(p, "x*y"), P(p, "0"), P(p, "1 + x^-1"), P(p, "y")]
    shift = apply_eps(code, w)
    e2 = Charge(tuple(a + b for a, b in zip(e.rep, shift)), e.coords)
    assert topological_spin(code, e2) == tab.theta_basis[0]


# ---------------------------------------------------------------------------
# kernel-witness invariance (solver-level mover freedom)


def test_spin_kernel_witness_invariance():
    p = 2
    tab = spin_table(toric(p))
    code = tab.code
    e, mv, th = tab.basis[1], tab.movers[1], tab.theta_basis[1]
    sys_ = BoxSystem(code.epsilon, [box_support(2)] * (2 * code.q))
    kern = sys_.kernel()
    assert kern, "toric epsilon has confined kernel vectors"
    for w in kern[:12]:
        noisy = MoverPair(
            tuple(a + b for a, b in zip(mv.p_x, w)), mv.p_y, e
        )
        check_mover_equations(code, noisy)
        assert topological_spin(code, e, movers=noisy) == th


# ---------------------------------------------------------------------------
# boson search


def test_find_boson_toric():
    for p in (2, 3, 5):
        b = find_boson(toric(p))
        assert b.coords == (1, 0)


def test_find_boson_stack_scan_order():
    b = find_boson(toric_stack(2, 3))
    assert b.coords == (1, 0, 0, 0)


def test_find_boson_wen():
    m, cg = annihilator_normalize(wen_plaquette())
    b = find_boson(cg)
    assert topological_spin(spin_table(cg).code, b) == 0


def test_find_boson_color():
    b = find_boson(color_666())
    assert b.coords[0] == 1


def test_find_boson_requires_charges():
    with pytest.raises(NoCharges):
        find_boson(trivial(1, 3))


# ---------------------------------------------------------------------------
# bracket basics


def test_bracket_antisymmetry_on_constants():
    p = 5
    rng = np.random.default_rng(3)
    q = 2
    for _ in range(20):
        u = [
            LaurentPoly(p, {(int(rng.integers(-2, 3)), int(rng.integers(-2, 3))):
                            int(rng.integers(1, p))})
            for _ in range(2 * q)
        ]
        v = [
            LaurentPoly(p, {(int(rng.integers(-2, 3)), int(rng.integers(-2, 3))):
                            int(rng.integers(1, p))})
            for _ in range(2 * q)
        ]
        assert string_bracket(u, u, q, p) == 0
        lhs = string_bracket(u, v, q, p)
        rhs = string_bracket(v, u, q, p)
        assert (lhs + rhs) % p == 0
