import numpy as np
import pytest

from stabdecomp import fplin
from stabdecomp.codes import CXGate, HGate, StabilizerCode, direct_sum
from stabdecomp.corpus import color_666, toric, toric_stack, trivial, wen_plaquette
from stabdecomp.laurent import parse_poly
from stabdecomp.polymat import PolyMatrix
from stabdecomp.torus import (
    empirical_tqo_check,
    instantiate_torus,
    logical_qudits,
    torus_commuting,
)


def P(p, s):
    return parse_poly(p, s)


def test_toric_l3_rank_oracle():
    # L x L toric code: 2L^2 stabilizers, two relations (the product of
    # all vertex terms and the product of all plaquette terms are both
    # the identity), so the rank is 2L^2 - 2.
    code = toric(2)
    inst = instantiate_torus(code, 3)
    A = inst.matrix
    assert A.shape == (4 * 9, 2 * 9)
    assert fplin.rank(A.T % 2, 2) == 16


def test_toric_relation_vectors_are_in_kernel():
    # summing each generator over all translates gives zero syndrome
    code = toric(2)
    L = 4
    inst = instantiate_torus(code, L)
    A = inst.matrix  # rows: 2q*L^2 Pauli components, cols: t*L^2 stabilizers
    for j in range(code.t):
        s = np.zeros(A.shape[0], dtype=np.int64)
        for site in range(L * L):
            s = (s + A[:, site * code.t + j]) % 2
        assert not s.any()


def test_toric_logicals_all_primes():
    for p in (2, 3, 5):
        for L in (4, 5, 6):
            assert logical_qudits(toric(p), L) == 2


def test_stack_logicals_additive():
    assert logical_qudits(toric_stack(2, 3), 4) == 4
    two = direct_sum(toric(2), trivial(2, 2))
    assert logical_qudits(two, 4) == 2


def test_instantiation_commutes():
    for code in (toric(3), wen_plaquette(), color_666()):
        assert torus_commuting(instantiate_torus(code, 4)) is None


def test_logical_count_is_gate_invariant():
    code = toric(3)
    word = [HGate(0), CXGate(0, 1, P(3, "x - 2*y^-1")), HGate(1)]
    moved = code.apply_word(word)
    for L in (4, 5):
        assert logical_qudits(moved, L) == logical_qudits(code, L)


def test_tqo_check_passes_on_corpus():
    for code in (toric(2), toric(5), toric_stack(2, 2), color_666()):
        rep = empirical_tqo_check(code)
        assert rep.passed, str(rep)


def test_tqo_check_flags_size_dependence():
    # a single X-string generator: on the L-torus each row of sites
    # contributes one relation, so the logical count grows with L and
    # never matches k
    p = 2
    sigma = PolyMatrix.from_cols(p, 2, [[P(p, "1 + x"), P(p, "0")]])
    code = StabilizerCode(p, 1, sigma)
    rep = empirical_tqo_check(code)
    assert not rep.passed
    counts = [rep.counts[L] for L in sorted(rep.counts)]
    assert counts[0] != counts[1] or counts[0] != rep.k


def test_wen_needs_coarse_graining():
    # at the native cell the charge count is 1 but the torus sees 2
    rep = empirical_tqo_check(wen_plaquette())
    assert not rep.passed
    cg = wen_plaquette().coarse_grain(2)
    rep2 = empirical_tqo_check(cg)
    assert rep2.passed and rep2.k == 2


def test_degenerate_code_shapes():
    p = 3
    empty = StabilizerCode(p, 0, PolyMatrix.zeros(p, 0, 0))
    assert logical_qudits(empty, 4) == 0
    assert empirical_tqo_check(empty).passed
    no_qudits = StabilizerCode(p, 0, PolyMatrix(p, [], cols=2))
    assert logical_qudits(no_qudits, 4) == 0
    no_gens = StabilizerCode(p, 1, PolyMatrix.zeros(p, 2, 0))
    assert logical_qudits(no_gens, 3) == 9
