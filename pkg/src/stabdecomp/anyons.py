"""Topological charge analysis.

A charge is an excitation class modulo trivial excitations (columns of
epsilon).  The charge group is computed by row-reducing the evaluation
of epsilon at x = y = 1: each zero row of the reduced matrix carries a
basis charge.  Movers are string-operator generators p_x, p_y with
eps(p_x) = (x-1)e and eps(p_y) = (y-1)e; from them the topological
spin theta(e) is a sum of three string commutators, evaluated on
truncated strings long enough that the value has stabilized.

All spins are elements of F_p.  theta is a quadratic form; its polar
form S(e, e') = theta(e+e') - theta(e) - theta(e') is the braiding
phase matrix used by the decomposition pipeline to locate a boson.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fplin
from .codes import RowAdd, RowScale, RowSwap, StabilizerCode
from .errors import (
    DimensionMismatch,
    NoCharges,
    NormalizationFailed,
    TheoremViolation,
    UndecidedMembership,
)
from .imagesolver import CAP, OBSTRUCTED, solve_in_image_many
from .laurent import LaurentPoly
from .polymat import PolyMatrix


# ---------------------------------------------------------------------------
# charges


@dataclass(frozen=True)
class Charge:
    """An excitation class: a representative column in the codomain of
    epsilon plus its coordinates relative to the current charge basis."""

    rep: tuple
    coords: tuple

    def __add__(self, other: "Charge") -> "Charge":
        if len(self.rep) != len(other.rep):
            raise DimensionMismatch("charges live in different codes")
        p = _vec_prime(self.rep)
        return Charge(
            tuple(a + b for a, b in zip(self.rep, other.rep)),
            tuple((a + b) % p for a, b in zip(self.coords, other.coords)),
        )

    def scaled(self, a: int) -> "Charge":
        p = _vec_prime(self.rep)
        a %= p
        c = LaurentPoly.const(p, a) if a else LaurentPoly.zero(p)
        return Charge(
            tuple(c * f for f in self.rep),
            tuple((a * x) % p for x in self.coords),
        )

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.rep)


@dataclass(frozen=True)
class MoverPair:
    """String generators for one charge: eps(p_x) = (x-1)e and
    eps(p_y) = (y-1)e hold exactly."""

    p_x: tuple
    p_y: tuple
    e: Charge

    def __add__(self, other: "MoverPair") -> "MoverPair":
        return MoverPair(
            tuple(a + b for a, b in zip(self.p_x, other.p_x)),
            tuple(a + b for a, b in zip(self.p_y, other.p_y)),
            self.e + other.e,
        )

    def scaled(self, a: int) -> "MoverPair":
        p = _vec_prime(self.p_x) if self.p_x else _vec_prime(self.e.rep)
        c = LaurentPoly.const(p, a % p) if a % p else LaurentPoly.zero(p)
        return MoverPair(
            tuple(c * f for f in self.p_x),
            tuple(c * f for f in self.p_y),
            self.e.scaled(a),
        )


def _vec_prime(vec) -> int:
    if not vec:
        raise ValueError("empty vector has no prime")
    return vec[0].p


def charge_count(code: StabilizerCode) -> int:
    """Dimension k of the charge group over F_p."""
    E = code.epsilon.eval_at_unity() % code.p
    return code.t - fplin.rank(E, code.p)


def echelon_charge_rows(code: StabilizerCode):
    """Row-reduce eval(epsilon) over F_p by generator operations.

    Returns (new_code, charge_rows, ops): the transformed code whose
    evaluated epsilon is in reduced row echelon form, the indices of
    its zero rows (one basis charge each), and the op records that got
    it there (replayable on the original code).
    """
    p = code.p
    E = code.epsilon.eval_at_unity() % p
    _, piv, rowops = fplin.rref(E, p, want_ops=True)
    records = []
    G = np.eye(code.t, dtype=np.int64)
    for kind, *args in rowops:
        if kind == "swap":
            i, j = args
            if i == j:
                continue
            records.append(RowSwap(i, j))
            G[[i, j]] = G[[j, i]]
        elif kind == "scale":
            i, c = args
            if c % p == 1:
                continue
            records.append(RowScale(i, int(c % p)))
            G[i] = G[i] * c % p
        else:
            i, j, c = args
            if c % p == 0:
                continue
            records.append(RowAdd(i, j, LaurentPoly.const(p, int(c % p))))
            G[i] = (G[i] + c * G[j]) % p
    out = _apply_constant_row_mix(code, G)
    rank = len(piv)
    charge_rows = list(range(rank, code.t))
    return out, charge_rows, records


def _apply_constant_row_mix(code: StabilizerCode, G: np.ndarray) -> StabilizerCode:
    """The code whose epsilon rows are G times the old rows, built in
    one pass; equals replaying the elementary ops one at a time, at a
    fraction of the copying."""
    p, t = code.p, code.t
    ent = code.sigma.entries
    rows_out = []
    for r in range(2 * code.q):
        row = ent[r]
        acc = [None] * t
        for j in range(t):
            f = row[j]
            if f.is_zero():
                continue
            for i in np.nonzero(G[:, j])[0]:
                c = int(G[i, j])
                d = acc[i]
                if d is None:
                    d = acc[i] = {}
                for key, v in f.terms.items():
                    d[key] = (d.get(key, 0) + c * v) % p
        rows_out.append([
            LaurentPoly.zero(p) if d is None else LaurentPoly(p, d)
            for d in acc
        ])
    return code.with_sigma(PolyMatrix(p, rows_out, cols=t))


def unit_charge(p: int, t: int, row: int, k: int, index: int) -> Charge:
    """The basis charge supported on one row of the echeloned epsilon."""
    rep = [LaurentPoly.zero(p)] * t
    rep[row] = LaurentPoly.one(p)
    coords = [0] * k
    coords[index] = 1
    return Charge(tuple(rep), tuple(coords))


def charge_basis(code: StabilizerCode):
    """(k, basis charges, echelon-transformed epsilon).

    The returned epsilon has its evaluation at x = y = 1 in reduced
    row echelon form; the basis charges are unit columns at its zero
    rows.
    """
    ech, charge_rows, _ = echelon_charge_rows(code)
    k = len(charge_rows)
    basis = [
        unit_charge(code.p, code.t, r, k, i) for i, r in enumerate(charge_rows)
    ]
    return k, basis, ech.epsilon


# ---------------------------------------------------------------------------
# annihilator normalization


def annihilator_normalize(code: StabilizerCode, m_cap: int = 16,
                          box_cap: int | None = None):
    """Smallest m <= m_cap whose coarse-graining gives every basis
    charge an x- and y-mover; returns (m, coarse-grained code).

    Movers exist for all charges exactly when (x-1) and (y-1) kill the
    charge group, so each candidate m is accepted iff (x-1)e and
    (y-1)e are images of epsilon for every basis charge e of the
    coarse-grained code.  The membership probes run under a small box
    cap: at the correct m the witnesses are near the unit cell, and at
    a wrong m the evaluation obstruction usually fires immediately.
    """
    for m in range(1, m_cap + 1):
        cg = code.coarse_grain(m)
        if _movers_exist_everywhere(cg, box_cap):
            return m, cg
    raise NormalizationFailed(
        f"no coarse-graining up to m={m_cap} gives movers for every charge"
    )


def _movers_exist_everywhere(code: StabilizerCode, box_cap: int | None) -> bool:
    ech, charge_rows, _ = echelon_charge_rows(code)
    if not charge_rows:
        return True
    p = code.p
    eps = ech.epsilon
    probe_cap = 8 * max(1, eps.max_abs_exponent())
    if box_cap is not None:
        probe_cap = min(probe_cap, box_cap)
    xm1 = LaurentPoly.monomial(p, 1, 0, 1) - LaurentPoly.one(p)
    ym1 = LaurentPoly.monomial(p, 0, 1, 1) - LaurentPoly.one(p)
    zero = LaurentPoly.zero(p)
    targets = []
    for r in charge_rows:
        for s in (xm1, ym1):
            target = [zero] * code.t
            target[r] = s
            targets.append(target)
    return all(res.found for res in solve_in_image_many(eps, targets, probe_cap))


# ---------------------------------------------------------------------------
# movers


def find_movers_many(code: StabilizerCode, charges,
                     box_cap: int | None = None) -> list:
    """Movers for several charges of one code, batched so all the
    string systems share each box rung's elimination.

    Requires the annihilator normalization: on a non-normalized code
    an x- or y-system has no solution and this raises.
    """
    p = code.p
    xm1 = LaurentPoly.monomial(p, 1, 0, 1) - LaurentPoly.one(p)
    ym1 = LaurentPoly.monomial(p, 0, 1, 1) - LaurentPoly.one(p)
    targets = []
    for e in charges:
        if len(e.rep) != code.t:
            raise DimensionMismatch("charge length does not match generator count")
        targets.append([xm1 * f for f in e.rep])
        targets.append([ym1 * f for f in e.rep])
    res = solve_in_image_many(code.epsilon, targets, box_cap)
    out = []
    for j, e in enumerate(charges):
        pair = []
        for axis, r in (("x", res[2 * j]), ("y", res[2 * j + 1])):
            if r.status == OBSTRUCTED:
                raise NormalizationFailed(
                    f"{axis}-mover system is obstructed; the annihilator "
                    "normalization was not applied to this code"
                )
            if r.status == CAP:
                raise UndecidedMembership(
                    f"{axis}-mover search exhausted box {r.box}; the "
                    "annihilator normalization is likely missing or incomplete"
                )
            pair.append(tuple(r.witness))
        out.append(MoverPair(pair[0], pair[1], e))
    return out


def find_movers(code: StabilizerCode, e: Charge,
                box_cap: int | None = None) -> MoverPair:
    """Solve for string generators of the charge e."""
    return find_movers_many(code, [e], box_cap)[0]


# ---------------------------------------------------------------------------
# string commutators and spin


def _const_dot(f: LaurentPoly, g: LaurentPoly) -> int:
    """Constant coefficient of bar(f) * g, without multiplying."""
    acc = 0
    a, b = (f, g) if len(f.terms) <= len(g.terms) else (g, f)
    for key, c in a.terms.items():
        d = b.terms.get(key)
        if d:
            acc += c * d
    return acc % f.p


def string_bracket(u, v, q: int, p: int) -> int:
    """Commutation coefficient of two Pauli vectors: the constant
    coefficient of dagger(u) * lambda * v."""
    acc = 0
    for i in range(q):
        acc += _const_dot(u[i], v[i + q]) - _const_dot(u[i + q], v[i])
    return acc % p


def _geom(p: int, axis: int, lo: int, hi: int) -> LaurentPoly:
    """Sum of pure powers along one axis, exponents lo..hi inclusive."""
    if axis == 0:
        return LaurentPoly(p, {(j, 0): 1 for j in range(lo, hi + 1)})
    return LaurentPoly(p, {(0, j): 1 for j in range(lo, hi + 1)})


def _theta_truncated(code: StabilizerCode, movers: MoverPair, n: int,
                     alternate: bool) -> int:
    """One evaluation of the three-string commutator sum at length n.

    The standard configuration inserts the strings counterclockwise:
    a_n runs in from the left along -x, b_n comes up from below along
    -y, c_n exits right along +x.  The alternate configuration swaps
    the roles so that b'_n exits right and c'_n exits up; both must
    give the same value once n is large enough.
    """
    p, q = code.p, code.q
    px, py = list(movers.p_x), list(movers.p_y)
    a = [_geom(p, 0, -n, -1) * f for f in px]
    if not alternate:
        b = [_geom(p, 1, -n, -1) * f for f in py]
        c = [-(_geom(p, 0, 0, n)) * f for f in px]
    else:
        b = [-(_geom(p, 0, 0, n)) * f for f in px]
        c = [-(_geom(p, 1, 0, n)) * f for f in py]
    return (
        string_bracket(a, b, q, p)
        + string_bracket(b, c, q, p)
        + string_bracket(c, a, q, p)
    ) % p


def topological_spin(code: StabilizerCode, e: Charge,
                     movers: MoverPair | None = None,
                     alternate: bool = False,
                     box_cap: int | None = None) -> int:
    """theta(e) in F_p.

    Truncated strings of length n = 2D and n = 4D are compared, where
    D bounds every exponent in play; far string segments commute, so
    the two values agree once the strings clear the movers' support.
    Disagreement means the stabilization argument failed and is
    reported, never averaged away.
    """
    if movers is None:
        movers = find_movers(code, e, box_cap)
    D = max(1, code.sigma.max_abs_exponent(), code.epsilon.max_abs_exponent())
    for f in list(movers.p_x) + list(movers.p_y):
        D = max(D, f.max_abs_exponent())
    v1 = _theta_truncated(code, movers, 2 * D, alternate)
    v2 = _theta_truncated(code, movers, 4 * D, alternate)
    if v1 != v2:
        raise TheoremViolation(
            f"spin did not stabilize: theta_2D={v1} theta_4D={v2}"
        )
    return v1


def polar_form(code: StabilizerCode, e: Charge, e2: Charge,
               box_cap: int | None = None) -> int:
    """S(e, e') = theta(e+e') - theta(e) - theta(e') mod p."""
    t_sum = topological_spin(code, e + e2, box_cap=box_cap)
    t_e = topological_spin(code, e, box_cap=box_cap)
    t_e2 = topological_spin(code, e2, box_cap=box_cap)
    return (t_sum - t_e - t_e2) % code.p


# ---------------------------------------------------------------------------
# spin table and boson search


@dataclass
class SpinTable:
    """Spins of a charge basis plus the polar matrix, enough to
    reconstruct theta on all p^k charges."""

    p: int
    k: int
    code: StabilizerCode
    charge_rows: list
    basis: list
    movers: list
    theta_basis: list
    S: np.ndarray

    def theta_of(self, coords) -> int:
        """theta of the charge with the given basis coordinates, by
        quadratic reconstruction from basis spins and the polar form."""
        if len(coords) != self.k:
            raise DimensionMismatch("coordinate length must be k")
        acc = 0
        for i, a in enumerate(coords):
            acc += a * a * self.theta_basis[i]
            for j in range(i + 1, self.k):
                acc += a * coords[j] * int(self.S[i, j])
        return acc % self.p

    def charge_of(self, coords) -> Charge:
        e = Charge(
            tuple(LaurentPoly.zero(self.p) for _ in range(self.code.t)),
            tuple([0] * self.k),
        )
        for i, a in enumerate(coords):
            if a % self.p:
                e = e + self.basis[i].scaled(a)
        return e

    def movers_of(self, coords) -> MoverPair:
        mv = None
        for i, a in enumerate(coords):
            if a % self.p == 0:
                continue
            part = self.movers[i].scaled(a)
            mv = part if mv is None else mv + part
        if mv is None:
            z = tuple(LaurentPoly.zero(self.p) for _ in range(2 * self.code.q))
            return MoverPair(z, z, self.charge_of(coords))
        return mv


def spin_table(code: StabilizerCode, box_cap: int | None = None) -> SpinTable:
    """Echelon the charge basis and tabulate basis spins and the polar
    matrix.  The code must already be normalized (annihilator_normalize)."""
    ech, charge_rows, _ = echelon_charge_rows(code)
    k = len(charge_rows)
    p = code.p
    basis = [
        unit_charge(p, code.t, r, k, i) for i, r in enumerate(charge_rows)
    ]
    movers = find_movers_many(ech, basis, box_cap)
    theta = [
        topological_spin(ech, e, movers=mv, box_cap=box_cap)
        for e, mv in zip(basis, movers)
    ]
    S = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        S[i, i] = (2 * theta[i]) % p
        for j in range(i + 1, k):
            pair = topological_spin(
                ech, basis[i] + basis[j], movers=movers[i] + movers[j],
                box_cap=box_cap,
            )
            S[i, j] = S[j, i] = (pair - theta[i] - theta[j]) % p
    return SpinTable(
        p=p, k=k, code=ech, charge_rows=charge_rows, basis=basis,
        movers=movers, theta_basis=theta, S=S,
    )


def find_boson(code: StabilizerCode, box_cap: int | None = None,
               table: SpinTable | None = None) -> Charge:
    """First nontrivial charge with theta = 0 in base-p coordinate
    order ((1,0,...) then (2,0,...) up the last digit).

    The charge theory guarantees a boson exists whenever k >= 1; a
    full scan with no hit therefore reports a violated premise rather
    than returning anything.
    """
    if table is None:
        table = spin_table(code, box_cap)
    if table.k == 0:
        raise NoCharges("code carries no topological charge")
    p, k = table.p, table.k
    for v in range(1, p ** k):
        coords = tuple((v // p ** i) % p for i in range(k))
        if table.theta_of(coords) != 0:
            continue
        mv = table.movers_of(coords)
        direct = topological_spin(table.code, mv.e, movers=mv, box_cap=box_cap)
        assert direct == 0, "reconstructed spin disagrees with direct value"
        return mv.e
    raise TheoremViolation(
        f"no boson among {p ** k - 1} nontrivial charges"
    )
