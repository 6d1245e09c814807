"""Constructive splitting into toric layers.

The driver repeats one move until no charge is left: put the generator
matrix in charge echelon form, slide a boson onto the first free
coordinate, solve for a commuting pair of two-cell string movers, rotate
the movers onto the first two qudits by symplectic gates, append the one
redundant generator that completes a toric pair, clear the coupling
entries that tie the pair to the rest, and detach the block.  Every step
is recorded, so the concatenation of records is a replayable certificate
for the whole decomposition.

Obstructions are never patched over: a solver that runs out of room, a
parity split that does not exist mod 2, or a residual the cleanup cannot
reach all raise, and the driver answers by doubling the unit cell and
starting over.  Inputs outside the valid class (non-commuting, failing
the torus check, odd charge count) are refused up front.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fplin
from .errors import (
    DimensionMismatch,
    ExtractionStuck,
    InvalidInput,
    NoCharges,
    NotTopologicallyOrdered,
    ScaleRetry,
    StabDecompError,
    TheoremViolation,
)
from .laurent import (
    LaurentPoly,
    exact_div_x1,
    exact_div_y1,
    exact_div_ybar1,
    divmod_x1,
    poly_divmod_uni,
    sym_halves,
    uni_span,
)
from .polymat import PolyMatrix, coarse_grain_vector
from .codes import (
    Circuit,
    CircuitOp,
    CoarseGrainOp,
    CPGate,
    CXGate,
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
)
from .anyons import (
    Charge,
    MoverPair,
    annihilator_normalize,
    charge_count,
    echelon_charge_rows,
    find_boson,
    spin_table,
    topological_spin,
)
from .imagesolver import (
    DENSE_GUARD,
    BoxSystem,
    box_support,
    certify_row_combination,
)
from .torus import empirical_tqo_check, logical_qudits


# ---------------------------------------------------------------------------
# symplectic pairing of Pauli vectors, as a full polynomial


def _bracket_poly(u, v, q: int) -> LaurentPoly:
    """bar(u)^T lambda v.  Zero iff u commutes with every translate of v."""
    p = u[0].p
    acc = LaurentPoly.zero(p)
    for i in range(q):
        acc = acc + u[i].bar() * v[i + q] - u[i + q].bar() * v[i]
    return acc


def _gate_on_vec(op, vec, q: int):
    """Apply one gate record to a Pauli column (length 2q), in place."""
    if isinstance(op, HGate):
        i = op.i
        vec[i], vec[i + q] = -vec[i + q], vec[i]
    elif isinstance(op, CPGate):
        i, j, f = op.i, op.j, op.f
        if i == j:
            vec[i + q] = vec[i + q] + (f + f.bar()) * vec[i]
        else:
            a, b = vec[j], vec[i]
            vec[i + q] = vec[i + q] + f * a
            vec[j + q] = vec[j + q] + f.bar() * b
    elif isinstance(op, CXGate):
        i, j, f = op.i, op.j, op.f
        a, b = vec[j], vec[i + q]
        vec[i] = vec[i] + f * a
        vec[j + q] = vec[j + q] - f.bar() * b
    elif isinstance(op, MulGate):
        p = vec[0].p
        a = LaurentPoly.const(p, op.a)
        ainv = LaurentPoly.const(p, pow(op.a, -1, p))
        vec[op.i] = vec[op.i] * a
        vec[op.i + q] = vec[op.i + q] * ainv
    else:
        raise TypeError(f"not a gate record: {op!r}")


# ---------------------------------------------------------------------------
# commuting movers with prescribed supports


def _xy_poly(p: int, axis: str) -> LaurentPoly:
    var = LaurentPoly.variable(p, axis)
    return var - LaurentPoly.one(p)


def _shift_order(radius: int):
    """Exponent shifts (0,0), then the L-infinity rings outward."""
    out = [(0, 0)]
    for r in range(1, radius + 1):
        ring = [
            (a, b)
            for a in range(-r, r + 1)
            for b in range(-r, r + 1)
            if max(abs(a), abs(b)) == r
        ]
        out.extend(sorted(ring))
    return out


def _mover_supports(q: int, axis: str, skip=()):
    """Two-cell support sets, one per component; ``skip`` components get
    the empty set, which pins them to zero."""
    cell = {(0, 0), (1, 0)} if axis == "x" else {(0, 0), (0, 1)}
    return [frozenset() if c in skip else frozenset(cell) for c in range(2 * q)]


def _confined_movers(code: StabilizerCode, rep, jobs, box_cap=None):
    """Solve for movers with fixed supports and vanishing brackets.

    ``jobs`` is a list of (scalar, supports): mover i must satisfy
    eps * m_i = scalar_i * rep exactly, stay inside supports_i, and
    bracket to zero against itself and every other mover.  Returns the
    list of mover columns or raises ScaleRetry.

    The solve is exact: a particular confined solution of each linear
    system is corrected by sigma-image vectors, whose pairwise brackets
    vanish identically because the generators commute, so the bracket
    conditions are affine in the correction coefficients.
    """
    eps = code.epsilon
    sig = code.sigma
    p, q, t = code.p, code.q, code.t
    zero = LaurentPoly.zero(p)

    parts = []
    for scalar, sups in jobs:
        target = [scalar * f for f in rep]
        part = BoxSystem(eps, sups).solve(target)
        if part is None:
            raise ScaleRetry(
                "no support-confined mover at this cell size; "
                "coarse-grain and retry"
            )
        parts.append(part)

    nm = len(jobs)
    pair_list = [(i, j) for i in range(nm) for j in range(i, nm)]

    def brackets_vanish(ms):
        return all(
            _bracket_poly(ms[i], ms[j], q).is_zero() for i, j in pair_list
        )

    if brackets_vanish(parts):
        return parts

    deg = max(
        1,
        sig.max_abs_exponent(),
        max(max(f.max_abs_exponent() for f in m) for m in parts),
    )
    cap = box_cap if box_cap is not None else 8 * deg
    N = 1
    while N <= cap:
        shifts = box_support(N)
        per_mover = t * len(shifts)
        if nm * per_mover > DENSE_GUARD // 4:
            break
        # unknown u = (mover mi, generator g, shift s); its effect on
        # mover mi is sigma column g shifted by s.
        effects = []
        for g in range(t):
            col = [sig[c, g] for c in range(2 * q)]
            for s in shifts:
                effects.append([f.shift(*s) for f in col])
        ne = len(effects)

        rows = []
        rhs = []

        def add_poly_eqs(coeff_polys, base_poly, allowed=frozenset()):
            """One F_p equation per exponent outside ``allowed`` in
            base_poly + sum w_u coeff_polys[u]."""
            region = set(base_poly.support())
            for _, f in coeff_polys:
                region |= set(f.support())
            region -= set(allowed)
            for expo in sorted(region):
                row = np.zeros(nm * ne, dtype=np.int64)
                for u, f in coeff_polys:
                    c = f.coeff(*expo)
                    if c:
                        row[u] += c
                rows.append(row % p)
                rhs.append((-base_poly.coeff(*expo)) % p)

        for mi in range(nm):
            off = mi * ne
            sups = jobs[mi][1]
            for c in range(2 * q):
                coeffs = [
                    (off + u, effects[u][c])
                    for u in range(ne)
                    if not effects[u][c].is_zero()
                ]
                add_poly_eqs(coeffs, parts[mi][c], allowed=sups[c])

        for (i, j) in pair_list:
            base = _bracket_poly(parts[i], parts[j], q)
            coeffs = []
            for u in range(ne):
                f = _bracket_poly(parts[i], effects[u], q)
                if not f.is_zero():
                    coeffs.append((j * ne + u, f))
            for u in range(ne):
                f = _bracket_poly(effects[u], parts[j], q)
                if not f.is_zero():
                    coeffs.append((i * ne + u, f))
            # i == j: both sums hit the same unknowns and simply add.
            merged: dict = {}
            for u, f in coeffs:
                merged[u] = merged.get(u, zero) + f
            add_poly_eqs(sorted(merged.items()), base)

        A = (
            np.vstack(rows)
            if rows
            else np.zeros((0, nm * ne), dtype=np.int64)
        )
        b = np.array(rhs, dtype=np.int64)
        w = fplin.solve(A, b, p)
        if w is not None:
            movers = []
            for mi in range(nm):
                m = list(parts[mi])
                for u in range(ne):
                    c = int(w[mi * ne + u]) % p
                    if c:
                        cf = LaurentPoly.const(p, c)
                        for comp in range(2 * q):
                            m[comp] = m[comp] + cf * effects[u][comp]
                movers.append(m)
            for mi, (scalar, sups) in enumerate(jobs):
                got = [
                    sum((eps[r, c] * movers[mi][c] for c in range(2 * q)),
                        zero)
                    for r in range(t)
                ]
                want = [scalar * f for f in rep]
                assert got == want, "corrected mover lost its equation"
                for c in range(2 * q):
                    assert set(movers[mi][c].support()) <= set(sups[c]), \
                        "corrected mover left its support"
            assert brackets_vanish(movers), "bracket residue after solve"
            return movers
        N *= 2

    raise ScaleRetry(
        "mover corrections found no commuting combination within the "
        "box cap; coarse-grain and retry"
    )


def commuting_movers(code: StabilizerCode, e: Charge, box_cap=None,
                     m_cap: int = 16):
    """Two-cell movers for e that commute with all their translates.

    Returns (m, MoverPair) where m is the extra coarse-graining factor
    that made the supports fit: the pair lives on code.coarse_grain(m).
    Raises ExtractionStuck when no factor up to m_cap works.
    """
    p = code.p
    if e.is_zero():
        z = tuple([LaurentPoly.zero(p)] * (2 * code.q))
        return 1, MoverPair(z, z, e)
    if len(e.rep) != code.t:
        raise DimensionMismatch("charge length does not match generator count")
    last = None
    m = 1
    while m <= m_cap:
        work = code.coarse_grain(m)
        rep = coarse_grain_vector(list(e.rep), m)
        jobs = [
            (_xy_poly(p, "x"), _mover_supports(work.q, "x")),
            (_xy_poly(p, "y"), _mover_supports(work.q, "y")),
        ]
        try:
            mx, my = _confined_movers(work, rep, jobs, box_cap)
            em = Charge(tuple(rep), e.coords)
            return m, MoverPair(tuple(mx), tuple(my), em)
        except ScaleRetry as err:
            last = err
            m *= 2
    raise ExtractionStuck(
        f"no commuting two-cell movers up to coarse factor {m_cap}: {last}"
    )


# ---------------------------------------------------------------------------
# charge echelon form with the boson on the first free coordinate


def _seat_boson(out: StabilizerCode, charge_rows, boson: Charge,
                box_cap=None, movers=None):
    """Mix the charge rows by constant row operations so the first one
    carries ``boson``.  Returns (code, r0, ops)."""
    k = len(charge_rows)
    p = out.p
    ops: list = []
    digits = list(boson.coords)
    if digits != [1] + [0] * (k - 1):
        lead = next(i for i, d in enumerate(digits) if d)
        M = np.zeros((k, k), dtype=np.int64)
        for i, d in enumerate(digits):
            M[i, 0] = d
        j = 1
        for i in range(k):
            if i != lead:
                M[i, j] = 1
                j += 1
        _, _, rowops = fplin.rref(M, p, want_ops=True)
        for kind, *args in rowops:
            if kind == "swap":
                i, j = args
                if i == j:
                    continue
                rec = RowSwap(charge_rows[i], charge_rows[j])
            elif kind == "scale":
                i, c = args
                if c % p == 1:
                    continue
                rec = RowScale(charge_rows[i], int(c % p))
            else:
                i, j, c = args
                if c % p == 0:
                    continue
                rec = RowAdd(charge_rows[i], charge_rows[j],
                             LaurentPoly.const(p, int(c % p)))
            ops.append(rec)
            out = out.apply_op(rec)
    r0 = charge_rows[0]
    rep = [LaurentPoly.zero(p)] * out.t
    rep[r0] = LaurentPoly.one(p)
    unit = Charge(tuple(rep), boson.coords)
    # movers found before the mix stay valid: they live on the Pauli
    # side, and only generator rows were touched
    assert topological_spin(out, unit, movers=movers,
                            box_cap=box_cap) == 0, \
        "moved boson lost its zero spin"
    return out, r0, ops


# how many zero-spin charges the extraction will audition before asking
# for a coarser cell; candidates beyond the first few rarely differ in
# kind, they just shuffle which basis rows carry the thickness
BOSON_CANDIDATES = 12


def _boson_candidates(table, box_cap=None, limit: int = BOSON_CANDIDATES):
    """Zero-spin charges in base-p coordinate order, each verified
    directly, as MoverPair objects (charge plus its free movers).

    Different bosons of the same code can have movers of very different
    shapes, so when the first one refuses to fit a confined window the
    extraction auditions a few more before escalating the cell size.
    """
    p, k = table.p, table.k
    if k == 0:
        raise NoCharges("code carries no topological charge")
    found = 0
    for v in range(1, p ** k):
        coords = tuple((v // p ** i) % p for i in range(k))
        if table.theta_of(coords) != 0:
            continue
        mv = table.movers_of(coords)
        direct = topological_spin(table.code, mv.e, movers=mv,
                                  box_cap=box_cap)
        if direct != 0:
            raise TheoremViolation(
                "reconstructed spin disagrees with direct value"
            )
        yield mv
        found += 1
        if found >= limit:
            return
    if found == 0:
        raise TheoremViolation(
            f"no boson among {p ** k - 1} nontrivial charges"
        )


def _echelon_with_boson(code: StabilizerCode, box_cap=None):
    """(code, r0, ops): echelon the generators, then mix the charge rows
    by constant row operations so the first zero row carries a boson.

    r0 is that row; the unit column there is a self-trivial charge with
    exact two-cell movers available after normalization.
    """
    out, charge_rows, ops = echelon_charge_rows(code)
    ops = list(ops)
    if not charge_rows:
        return out, None, ops
    table = spin_table(out, box_cap)
    boson = find_boson(out, box_cap, table=table)
    mv = table.movers_of(boson.coords)
    out, r0, mix = _seat_boson(out, charge_rows, boson, box_cap, movers=mv)
    return out, r0, ops + mix


def echelon_generators(code: StabilizerCode, box_cap=None) -> StabilizerCode:
    """Charge echelon form with a boson on the first free coordinate.

    Idempotent: the evaluated epsilon is in reduced row echelon form
    afterwards, and the first zero row is the representative of a
    spin-zero charge, so a second pass changes nothing.
    """
    out, _, _ = _echelon_with_boson(code, box_cap)
    return out


# ---------------------------------------------------------------------------
# rotating the movers onto the first two qudits


class _MoverFrame:
    """A code plus tracked Pauli columns, transformed together."""

    def __init__(self, code: StabilizerCode, vecs):
        self.code = code
        self.vecs = [list(v) for v in vecs]
        self.ops: list = []

    @property
    def q(self):
        return self.code.q

    def gate(self, op):
        self.code = self.code.apply_op(op)
        for v in self.vecs:
            _gate_on_vec(op, v, self.code.q)
        self.ops.append(op)

    def word(self, ops):
        for op in ops:
            self.gate(op)

    def record(self, op):
        """Generator-side op: transforms the code but not the columns."""
        self.code = self.code.apply_op(op)
        self.ops.append(op)


def _univar(f: LaurentPoly, axis: str) -> dict:
    other = "y" if axis == "x" else "x"
    if f.involves(other):
        raise ExtractionStuck(
            f"mover entry {f} is not univariate in {axis}; support "
            "confinement was lost"
        )
    return f.as_univar(axis)


def _from_univar(p: int, axis: str, d: dict) -> LaurentPoly:
    return LaurentPoly.from_univar(p, axis, d)


_SNAKE_GUARD = 500


def _swap_x_word(p: int, i: int, j: int):
    one = LaurentPoly.one(p)
    neg = -one
    return [CXGate(i, j, one), CXGate(j, i, neg), CXGate(i, j, one)]


def _swap_z_word(p: int, i: int, j: int):
    one = LaurentPoly.one(p)
    neg = -one
    return [CXGate(i, j, neg), CXGate(j, i, one), CXGate(i, j, neg)]


def _euclid_into(frame: _MoverFrame, vi: int, axis: str, hot: int,
                 other: int, xside: bool):
    """Drain px[other] into px[hot] by Euclidean division.

    ``xside`` chooses which block the pair of components lives in; the
    component indices are hot(+q) and other(+q).  Entries must stay
    univariate in ``axis``.
    """
    p = frame.code.p
    q = frame.q
    off = 0 if xside else q
    guard = _SNAKE_GUARD

    def entry(c):
        return frame.vecs[vi][c + off]

    def combine(dst, src, h):
        # component dst += h * component src, on the chosen side
        if xside:
            frame.gate(CXGate(dst, src, h))
        else:
            frame.gate(CXGate(src, dst, -h.bar()))

    def swap():
        word = (_swap_x_word(p, hot, other) if xside
                else _swap_z_word(p, hot, other))
        frame.word(word)

    while not entry(other).is_zero():
        guard -= 1
        if guard < 0:
            raise ExtractionStuck("mover reduction failed to terminate")
        if entry(hot).is_zero():
            swap()
            continue
        gh = _univar(entry(hot), axis)
        go = _univar(entry(other), axis)
        if uni_span(go) >= uni_span(gh):
            qd, _ = poly_divmod_uni(go, gh, p)
            combine(other, hot, -_from_univar(p, axis, qd))
        else:
            qd, _ = poly_divmod_uni(gh, go, p)
            combine(hot, other, -_from_univar(p, axis, qd))


def _snake_mover_to_base(frame: _MoverFrame, vi: int, axis: str):
    """Gate the tracked column vi down to gamma * e_base.

    Returns gamma (a unit monomial).  The column must be confined to one
    variable; its symplectic self-bracket must vanish, which makes every
    division in the final two-entry reduction exact or reducible.
    """
    p, q = frame.code.p, frame.q
    if q < 2:
        raise ExtractionStuck("need at least two qudits to place a pair")
    guard = _SNAKE_GUARD
    while True:
        guard -= 1
        if guard < 0:
            raise ExtractionStuck("mover reduction failed to terminate")
        for j in range(1, q):
            _euclid_into(frame, vi, axis, 0, j, xside=True)
        for j in range(2, q):
            _euclid_into(frame, vi, axis, 1, j, xside=False)
        vec = frame.vecs[vi]
        if not vec[1 + q].is_zero():
            frame.gate(HGate(1))
            continue
        # only (X_0, Z_0) = (g, z) can remain
        g, z = vec[0], vec[q]
        if z.is_zero():
            break
        if g.is_zero():
            frame.gate(HGate(0))
            break
        gd = _univar(g, axis)
        zd = _univar(z, axis)
        qd, rd = poly_divmod_uni(zd, gd, p)
        if not rd:
            w = _from_univar(p, axis, qd)
            if w != w.bar():
                raise ExtractionStuck(
                    "self-bracket residue in mover reduction; the column "
                    "was not isotropic"
                )
            frame.gate(CPGate(0, 0, sym_halves(-w)))
            break
        # g does not divide z: push z up through a spare qudit and
        # reduce g modulo z, then re-gather.
        one = LaurentPoly.one(p)
        frame.gate(CXGate(0, 1, -one))
        frame.gate(HGate(1))
        qd2, _ = poly_divmod_uni(gd, zd, p)
        frame.gate(CXGate(0, 1, _from_univar(p, axis, qd2)))
    gamma = frame.vecs[vi][0]
    rest = [c for c in range(2 * q) if c != 0]
    assert all(frame.vecs[vi][c].is_zero() for c in rest), \
        "mover reduction left extra components"
    if not gamma.is_monomial():
        raise ExtractionStuck(
            f"mover reduces to the non-unit generator {gamma}; the charge "
            "row is not aligned with a free coordinate"
        )
    return gamma


def _const_of(f: LaurentPoly) -> int:
    ((_, _), c), = f.terms.items()
    return c


def _expo_of(f: LaurentPoly):
    ((a, b), _), = f.terms.items()
    return a, b


def _trivialize_px(frame: _MoverFrame, r0: int, rep_mono: LaurentPoly):
    """Send the tracked x-mover to a power of x times e_0 and rescale
    generator r0 so the epsilon column of X_0 is exactly (x-1) e_r0."""
    p = frame.code.p
    gamma = _snake_mover_to_base(frame, 0, "x")
    c = _const_of(gamma)
    if c != 1:
        frame.gate(MulGate(0, pow(c, -1, p)))
    A, B = _expo_of(gamma)
    assert B == 0, "x-mover acquired a y power"
    cm, (am, bm) = _const_of(rep_mono), _expo_of(rep_mono)
    # epsilon row r0 must absorb x^A and the representative's monomial
    need = LaurentPoly.monomial(p, A - am, -bm, pow(cm, -1, p))
    if not need.is_one():
        frame.record(Rescale(r0, need.bar()))


def _resolve_py(frame: _MoverFrame, r0: int, box_cap):
    """Solve the y-mover on the current code, with the first Z component
    pinned to zero so it commutes with the trivialized x-mover."""
    code = frame.code
    p, q = code.p, code.q
    rep = [LaurentPoly.zero(p)] * code.t
    rep[r0] = LaurentPoly.one(p)
    jobs = [(_xy_poly(p, "y"), _mover_supports(q, "y", skip=(q,)))]
    (py,) = _confined_movers(code, rep, jobs, box_cap)
    return py


def _slot_components(q: int):
    """Component indices that may host the y-mover's unit: everything on
    qudits 1..q-1, both blocks."""
    return [c for j in range(1, q) for c in (j, j + q)]


def _slot_alpha_beta(f: LaurentPoly):
    a = f.coeff(0, 0)
    b = f.coeff(0, 1)
    return a, b


def _hunt_const_slot(frame: _MoverFrame, vi: int):
    """Gate until some component on qudits >= 1 is a nonzero constant.

    The slot values stay inside the two-cell window {1, y}, so each is
    an affine form alpha + beta*y.  Two slots with independent forms mix
    into a constant by one constant-coefficient gate; the degenerate
    patterns (all slots pure y, all slots proportional to a single form
    with alpha, beta both nonzero) either rotate into a mixable shape or
    raise ScaleRetry because only a larger cell can seat the pair.
    """
    p, q = frame.code.p, frame.q
    guard = 4 * q + 16
    while True:
        guard -= 1
        if guard < 0:
            raise ScaleRetry("slot hunt did not converge at this cell size")
        slots = _slot_components(q)
        vals = [frame.vecs[vi][c] for c in slots]
        for c, f in zip(slots, vals):
            if not f.is_zero() and f.is_constant():
                return c
        live = [(c, _slot_alpha_beta(f))
                for c, f in zip(slots, vals) if not f.is_zero()]
        if not live:
            raise ExtractionStuck("y-mover vanished on all free qudits")
        if any(set(f.support()) - {(0, 0), (0, 1)}
               for f in vals if not f.is_zero()):
            raise ScaleRetry("y-mover slots left the two-cell window")
        pair = None
        for i in range(len(live)):
            for j in range(i + 1, len(live)):
                (_, (a1, b1)), (_, (a2, b2)) = live[i], live[j]
                if (a1 * b2 - a2 * b1) % p:
                    pair = (live[i], live[j])
                    break
            if pair:
                break
        if pair is None:
            a, b = live[0][1]
            if a % p == 0:
                # every slot is pure beta*y; shift one into a Z slot
                # with a y-translated phase gate to expose a constant
                c, _ = live[0]
                if c >= q:
                    frame.gate(HGate(c - q))
                    continue
                r = c
                # the gate below writes Z_partner and adds y * X_partner
                # to Z_r, so a partner with zero X slot keeps the window
                partner = next(
                    (j for j in range(1, q)
                     if j != r and frame.vecs[vi][j].is_zero()),
                    None,
                )
                if partner is None:
                    partner = 1 if r != 1 else (2 if q > 2 else r)
                ybar = LaurentPoly.monomial(p, 0, -1, 1)
                frame.gate(CPGate(partner, r, ybar))
                continue
            raise ScaleRetry(
                "every y-mover slot is proportional to the same affine "
                "form; the cell is too small to seat the pair"
            )
        (c1, (a1, b1)), (c2, (a2, b2)) = pair
        # mix slot c2 into slot c1 to kill the y coefficient of c1
        if b1 % p == 0:
            c1, a1, b1, c2, a2, b2 = c2, a2, b2, c1, a1, b1
        lam = (-b1 * pow(b2, -1, p)) % p
        f = LaurentPoly.const(p, lam)
        in_x1, in_x2 = c1 < q, c2 < q
        i1, i2 = c1 % q, c2 % q
        if i1 == i2:
            # same qudit: copy its X slot onto a spare qudit first, or
            # rotate the qudit when no spare is free
            spare = next(
                (j for j in range(1, q)
                 if j != i1 and frame.vecs[vi][j].is_zero()
                 and frame.vecs[vi][j + q].is_zero()),
                None,
            )
            if spare is not None:
                frame.gate(CXGate(spare, i1, LaurentPoly.one(p)))
            else:
                frame.gate(HGate(i1))
            continue
        if in_x1 and in_x2:
            frame.gate(CXGate(i1, i2, f))
        elif not in_x1 and not in_x2:
            frame.gate(CXGate(i2, i1, -f))
        elif not in_x1 and in_x2:
            frame.gate(CPGate(i1, i2, f))
        else:
            # c1 in the X block, c2 in the Z block: rotate qudit i2 so
            # its Z slot moves into the X block, then rescan
            frame.gate(HGate(i2))


def _trivialize_py(frame: _MoverFrame, vi: int):
    """Send the tracked y-mover to exactly e_1, preserving the epsilon
    column of X_0 and the zero first-Z component throughout."""
    p, q = frame.code.p, frame.q
    zq = frame.vecs[vi][q]
    assert zq.is_zero(), "y-mover has weight on the pinned component"
    c = _hunt_const_slot(frame, vi)
    if c >= q:
        frame.gate(HGate(c - q))
        c -= q
    if c != 1:
        frame.word(_swap_x_word(p, 1, c))
    val = _const_of(frame.vecs[vi][1])
    if val != 1:
        frame.gate(MulGate(1, pow(val, -1, p)))
    for s in range(2, q):
        f = frame.vecs[vi][s]
        if not f.is_zero():
            frame.gate(CXGate(s, 1, -f))
    for s in range(2, q):
        f = frame.vecs[vi][s + q]
        if not f.is_zero():
            frame.gate(CPGate(s, 1, -f))
    w = frame.vecs[vi][1 + q]
    if not w.is_zero():
        if w != w.bar():
            raise ExtractionStuck(
                "self-bracket residue on the y-mover; the column was "
                "not isotropic"
            )
        frame.gate(CPGate(1, 1, sym_halves(-w)))
    w1 = frame.vecs[vi][0]
    if not w1.is_zero():
        frame.gate(CXGate(0, 1, -w1))
    vec = frame.vecs[vi]
    unit = [LaurentPoly.zero(p)] * (2 * q)
    unit[1] = LaurentPoly.one(p)
    assert vec == unit, "y-mover cleanup missed a component"


def _rep_row_and_mono(code: StabilizerCode, rep):
    """Split a representative that is a monomial times a unit column."""
    nz = [i for i, f in enumerate(rep) if not f.is_zero()]
    if len(nz) != 1 or not rep[nz[0]].is_monomial():
        raise ExtractionStuck(
            "charge representative is not a single monomial coordinate; "
            "echelon the generators first"
        )
    r0 = nz[0]
    ev = code.epsilon.eval_at_unity() % code.p
    if ev[r0].any():
        raise ExtractionStuck(
            "charge representative sits on a non-free generator row"
        )
    return r0, rep[r0]


def trivialize_movers(code: StabilizerCode, movers: MoverPair,
                      box_cap=None):
    """Rotate a commuting mover pair onto the first two qudits.

    Returns (Circuit, code): after replaying the circuit, e_1 and e_2
    are valid movers for the boson, i.e. the epsilon columns of the
    first two X components are (x-1) and (y-1) times the boson's unit
    row.  Uses at most one generator rescale.  Raises ScaleRetry (a
    subclass of ExtractionStuck) when a cleanup step needs a parity
    split or a residual pattern that only a larger cell provides.
    """
    p, q = code.p, code.q
    eps = code.epsilon
    zero = LaurentPoly.zero(p)

    def image(vec):
        return [
            sum((eps[r, c] * vec[c] for c in range(2 * q)), zero)
            for r in range(code.t)
        ]

    xm1, ym1 = _xy_poly(p, "x"), _xy_poly(p, "y")
    gx = image(list(movers.p_x))
    gy = image(list(movers.p_y))
    try:
        repx = [exact_div_x1(f) for f in gx]
        repy = [exact_div_y1(f) for f in gy]
    except ValueError as err:
        raise InvalidInput(f"not a mover pair: {err}") from None
    if repx != repy:
        raise InvalidInput(
            "x- and y-movers reference different representatives"
        )
    for i, j in ((0, 0), (0, 1), (1, 1)):
        vecs = (movers.p_x, movers.p_y)
        if not _bracket_poly(vecs[i], vecs[j], q).is_zero():
            raise InvalidInput("mover pair does not commute with itself")

    r0, mono = _rep_row_and_mono(code, repx)
    frame = _MoverFrame(code, [list(movers.p_x), list(movers.p_y)])
    _trivialize_px(frame, r0, mono)
    # the tracked y-mover stays valid through the gates; use it when it
    # already fits the window, otherwise solve afresh on the new code
    py = frame.vecs[1]
    ok = py[q].is_zero() and all(
        set(f.support()) <= {(0, 0), (0, 1)} for f in py
    )
    target = [zero] * code.t
    target[r0] = ym1
    eps2 = frame.code.epsilon
    if ok:
        got = [
            sum((eps2[r, c] * py[c] for c in range(2 * q)), zero)
            for r in range(code.t)
        ]
        ok = got == target
    if not ok:
        frame.vecs[1] = list(_resolve_py(frame, r0, box_cap))
    _trivialize_py(frame, 1)

    out = frame.code
    ex = out.epsilon
    for r in range(out.t):
        assert ex[r, 0] == (xm1 if r == r0 else zero)
        assert ex[r, 1] == (ym1 if r == r0 else zero)
    return Circuit(p, 2 * q, frame.ops), out


# ---------------------------------------------------------------------------
# clearing the residual coupling pair (u, v)


def _corner_relation(u: LaurentPoly, v: LaurentPoly) -> LaurentPoly:
    """(x-1) bar(u) - (xbar-1) u + (y-1) bar(v) - (ybar-1) v."""
    p = u.p
    x = LaurentPoly.variable(p, "x")
    y = LaurentPoly.variable(p, "y")
    xb = LaurentPoly.monomial(p, -1, 0, 1)
    yb = LaurentPoly.monomial(p, 0, -1, 1)
    one = LaurentPoly.one(p)
    return ((x - one) * u.bar() - (xb - one) * u
            + (y - one) * v.bar() - (yb - one) * v)


def _regrade(f: LaurentPoly):
    """Terms of f in (total y-degree, x-slope) coordinates: the term
    c x^a y^b is indexed by (a + b, -a)."""
    out: dict = {}
    for (a, b), c in f.terms.items():
        out[(a + b, -a)] = c
    return out


def _ungrade(p: int, graded: dict) -> LaurentPoly:
    terms = {}
    for (d, m), c in graded.items():
        a = -m
        terms[(a, d - a)] = c
    return LaurentPoly(p, terms)


def _corner_ops(u: LaurentPoly, v: LaurentPoly, p: int, r0: int, r1: int):
    """Op sequence that clears the coupling entries (u, v) at row r0,
    given the completed pair row r1 = (0, 0, ybar-1, -xbar+1).

    The sequence touches only the epsilon entries (r0, Z_0) and
    (r0, Z_1); every identity it relies on is asserted along the way.
    The gates act on qudits 0 and 1.
    """
    assert _corner_relation(u, v).is_zero(), "coupling pair is not isotropic"
    ops: list = []
    one = LaurentPoly.one(p)

    # (a) peel the y-dependence of u onto the pair row
    u2 = u.subs_y1()
    u1 = exact_div_ybar1(u - u2)
    if not u1.is_zero():
        ops.append(RowAdd(r0, r1, -u1))
    v2 = v + u1 * (LaurentPoly.monomial(p, -1, 0, 1) - one)

    # (b) the x-part of u is (x-1) times a bar-fixed half
    assert (u2.bar() + LaurentPoly.monomial(p, -1, 0, 1) * u2).is_zero(), \
        "u residue fails its reflection identity"
    if not u2.is_zero():
        h = exact_div_x1(u2)
        assert h == h.bar(), "u residue half is not bar-fixed"
        ops.append(HGate(0))
        ops.append(CPGate(0, 0, sym_halves(-h)))
        ops.extend(gate_inverse_word(HGate(0), p))

    # (c) split v2 = (x-1) s + f and kill f = (y-1) g the same way
    f0 = v2.subs_x1()
    s = exact_div_x1(v2 - f0)
    assert (f0.bar() + LaurentPoly.monomial(p, 0, -1, 1) * f0).is_zero(), \
        "v residue fails its reflection identity"
    if not f0.is_zero():
        g = exact_div_y1(f0)
        assert g == g.bar(), "v residue half is not bar-fixed"
        ops.append(HGate(1))
        ops.append(CPGate(1, 1, sym_halves(-g)))
        ops.extend(gate_inverse_word(HGate(1), p))

    # (d) the leftover (x-1) s obeys s = (xbar y) bar(s); split it into
    # an upper half plus a palindromic diagonal ridge and cancel both
    # with one two-qudit transvection word and one row operation
    if not s.is_zero():
        z = LaurentPoly.monomial(p, -1, 1, 1)
        assert s == z * s.bar(), "leftover coupling fails its symmetry"
        graded = _regrade(s)
        diag = {m: c for (d, m), c in graded.items() if d == 0}
        upper = {key: c for key, c in graded.items() if key[0] > 0}
        zp1 = {0: 1, 1: 1}
        ell, rem = poly_divmod_uni(diag, zp1, p)
        assert not rem, "diagonal ridge is not divisible by z + 1"
        ell_poly = _ungrade(p, {(0, m): c for m, c in ell.items()})
        assert ell_poly == ell_poly.bar(), "ridge quotient is not palindromic"
        fw = _ungrade(p, upper) + z * ell_poly
        ops.append(HGate(1))
        # the H conjugation flips the effective sign of the transvection,
        # so the gate carries -fw to subtract (x-1) s rather than add it
        ops.append(CXGate(0, 1, -fw))
        ops.extend(gate_inverse_word(HGate(1), p))
        y = LaurentPoly.variable(p, "y")
        ops.append(RowAdd(r0, r1, -(y * fw.bar())))
    return ops


def xyab_eliminate(u: LaurentPoly, v: LaurentPoly):
    """Clear the coupling pair of a completed toric block.

    Input: the two entries (u, v) that couple the row (x-1, y-1, u, v)
    to its partner (0, 0, ybar-1, -xbar+1) on two qudits.  The pair
    must satisfy the isotropy relation that makes the two rows commute;
    anything else raises InvalidInput.

    Returns (A, B): a 2x2 generator transformation and a gate circuit
    such that replaying B on the Pauli side and A on the generator side
    of the two-row matrix yields exactly the toric form (u = v = 0).
    """
    p = u.p
    if v.p != p:
        raise InvalidInput("coupling entries live over different primes")
    if not _corner_relation(u, v).is_zero():
        raise InvalidInput(
            "coupling pair fails the isotropy relation; the two rows "
            "do not commute"
        )
    one = LaurentPoly.one(p)
    zero = LaurentPoly.zero(p)
    x = LaurentPoly.variable(p, "x")
    y = LaurentPoly.variable(p, "y")
    xb = LaurentPoly.monomial(p, -1, 0, 1)
    yb = LaurentPoly.monomial(p, 0, -1, 1)
    eps = PolyMatrix(p, [
        [x - one, y - one, u, v],
        [zero, zero, yb - one, -(xb - one)],
    ])
    lam = PolyMatrix.lambda_form(p, 2)
    sigma = lam * eps.dagger()
    code = StabilizerCode(p, 2, sigma, name="coupling block")
    code.check_commuting()

    ops = _corner_ops(u, v, p, 0, 1)
    A = PolyMatrix.identity(p, 2)
    gates = []
    out = code
    for op in ops:
        out = out.apply_op(op)
        if isinstance(op, RowAdd):
            A = PolyMatrix.elementary(p, 2, op.i, op.j, op.f) * A
        else:
            gates.append(op)
    want = PolyMatrix(p, [
        [x - one, y - one, zero, zero],
        [zero, zero, yb - one, -(xb - one)],
    ])
    assert out.epsilon == want, "coupling cleanup missed the toric form"
    return A, Circuit(p, 4, gates)


# ---------------------------------------------------------------------------
# one full extraction step


def _row_entries(eps: PolyMatrix, r: int):
    return [eps[r, c] for c in range(eps.cols)]


def extract_toric_summand(code: StabilizerCode, box_cap=None, n0: int = 0):
    """Split one toric block off a normalized code.

    Returns (Circuit, remainder, n0 + 1): the recorded ops move a boson
    pair onto the first two qudits and the first two generator rows,
    leaving an exact toric block there; ``remainder`` is the code on
    the other qudits.  The charge count drops by exactly two.

    Raises NoCharges when nothing is left to extract, TheoremViolation
    on an odd charge count (impossible for a valid input), and
    ExtractionStuck / ScaleRetry when a solver or cleanup step cannot
    finish at this cell size.
    """
    p = code.p
    k = charge_count(code)
    if k == 0:
        raise NoCharges("no charge left to extract")
    if k % 2:
        raise TheoremViolation(
            f"charge count {k} is odd; a commuting translation-invariant "
            "code cannot have an unpaired species"
        )
    if code.q < 2:
        raise ExtractionStuck("need at least two qudits to seat a pair")

    base, charge_rows, ech_ops = echelon_charge_rows(code)
    table = spin_table(base, box_cap)
    zero = LaurentPoly.zero(p)
    one = LaurentPoly.one(p)
    xjob = [(_xy_poly(p, "x"), _mover_supports(base.q, "x"))]
    yjob = [(_xy_poly(p, "y"), _mover_supports(base.q, "y"))]

    # Two nested rescues before escalating the cell size.  The boson's
    # canonical cell may sit a little off the origin at this scale, so
    # each candidate is tried at every monomial shift in a small window
    # (the snake's final rescale absorbs the shift for free).  And
    # different bosons of one code can have movers of very different
    # thickness, so several are auditioned: the first whose x and y
    # movers both confine wins, else the first with a confined x mover.
    work = r0 = px = None
    ops: list = []
    rep_mono = one
    best = None
    for mv in _boson_candidates(table, box_cap):
        seated, r0c, mix = _seat_boson(base, charge_rows, mv.e, box_cap,
                                       movers=mv)
        rep = [zero] * seated.t
        rep[r0c] = one
        fallback = None
        for a, b in _shift_order(2):
            mono = LaurentPoly.monomial(p, a, b, 1)
            shifted = rep if mono.is_one() else [mono * f for f in rep]
            try:
                (cand,) = _confined_movers(seated, shifted, xjob, box_cap)
            except ScaleRetry:
                continue
            if fallback is None:
                fallback = (cand, mono)
            try:
                _confined_movers(seated, shifted, yjob, box_cap)
            except ScaleRetry:
                continue
            px, rep_mono = cand, mono
            break
        if px is not None:
            work, r0 = seated, r0c
            ops = list(ech_ops) + mix
            break
        if best is None and fallback is not None:
            best = (seated, r0c, mix) + fallback
    if px is None:
        if best is None:
            raise ScaleRetry(
                "no auditioned boson has a support-confined mover within "
                "the shift window; coarse-grain and retry"
            )
        work, r0, mix, px, rep_mono = best
        ops = list(ech_ops) + mix
    q, t = work.q, work.t

    frame = _MoverFrame(work, [px])
    _trivialize_px(frame, r0, rep_mono)
    frame.vecs.append(list(_resolve_py(frame, r0, box_cap)))
    _trivialize_py(frame, 1)
    work = frame.code
    ops.extend(frame.ops)

    # append the redundant generator that completes the pair
    target = [zero] * (2 * q)
    target[q] = LaurentPoly.monomial(p, 0, -1, 1) - one
    target[q + 1] = -(LaurentPoly.monomial(p, -1, 0, 1) - one)
    res = certify_row_combination(work.epsilon, target, box_cap)
    if not res.found:
        raise ExtractionStuck(
            f"pair-completing row is not certified in the row span "
            f"({res.status})"
        )
    coeffs = list(res.witness)
    assert coeffs[r0].is_zero(), \
        "pair-completing row leans on the boson row"
    rec = NewGen(tuple(coeffs))
    work = work.apply_op(rec)
    ops.append(rec)
    r1 = t  # the appended row
    t = work.t
    assert _row_entries(work.epsilon, r1) == target, \
        "appended row came out wrong"

    # clear the boson row outside the block
    xm1, ym1 = _xy_poly(p, "x"), _xy_poly(p, "y")
    for j in range(2, q):
        for zside in (False, True):
            col = j + q if zside else j
            s = work.epsilon[r0, col]
            if s.is_zero():
                continue
            alpha, remx = divmod_x1(s)
            try:
                beta = exact_div_y1(remx)
            except ValueError:
                raise ExtractionStuck(
                    f"boson-row entry {s} does not evaluate to zero"
                ) from None
            word = []
            if zside:
                # conjugating by H shows the entry negated on the x side,
                # so the string words must remove -s rather than s
                word.append(HGate(j))
                alpha, beta = -alpha, -beta
            if not alpha.is_zero():
                word.append(CXGate(0, j, alpha))
            if not beta.is_zero():
                word.append(CXGate(1, j, beta))
            if zside:
                word.extend(gate_inverse_word(HGate(j), p))
            for g in word:
                work = work.apply_op(g)
                ops.append(g)
            assert work.epsilon[r0, col].is_zero()

    # clear the coupling entries of every other row against the pair row
    for i in range(t):
        if i in (r0, r1):
            continue
        ui = work.epsilon[i, q]
        vi = work.epsilon[i, q + 1]
        if ui.is_zero() and vi.is_zero():
            continue
        try:
            ci = exact_div_ybar1(ui)
        except ValueError:
            raise ExtractionStuck(
                f"row {i} coupling {ui} is not a pair-row multiple"
            ) from None
        if vi != -ci * (LaurentPoly.monomial(p, -1, 0, 1) - one):
            raise ExtractionStuck(
                f"row {i} couplings do not match one pair-row multiple"
            )
        rec = RowAdd(i, r1, -ci)
        work = work.apply_op(rec)
        ops.append(rec)

    # clear the boson row couplings themselves
    u = work.epsilon[r0, q]
    v = work.epsilon[r0, q + 1]
    for op in _corner_ops(u, v, p, r0, r1):
        work = work.apply_op(op)
        ops.append(op)

    # move the pair rows to the top
    if r0 != 0:
        rec = RowSwap(0, r0)
        work = work.apply_op(rec)
        ops.append(rec)
    assert r1 not in (0, r0)
    if r1 != 1:
        rec = RowSwap(1, r1)
        work = work.apply_op(rec)
        ops.append(rec)

    # verify the exact block split
    eps = work.epsilon
    toric_rows = PolyMatrix(p, [
        [xm1, ym1, zero, zero],
        [zero, zero, LaurentPoly.monomial(p, 0, -1, 1) - one,
         -(LaurentPoly.monomial(p, -1, 0, 1) - one)],
    ])
    pair_cols = [0, 1, q, q + 1]
    assert eps.submatrix([0, 1], pair_cols) == toric_rows, \
        "extracted block is not the toric form"
    rest_cols = [c for j in range(2, q) for c in (j, j + q)]
    assert eps.submatrix([0, 1], rest_cols).is_zero(), \
        "pair rows leak outside their block"
    assert eps.submatrix(range(2, t), pair_cols).is_zero(), \
        "other rows leak into the pair block"

    # drop redundant generators until the remainder's count is k - 2
    def remainder_of(c: StabilizerCode) -> StabilizerCode:
        comps = [j for j in range(2, c.q)] + \
                [j + c.q for j in range(2, c.q)]
        sub = c.sigma.submatrix(comps, range(2, c.t))
        return StabilizerCode(p, c.q - 2, sub, name=c.name)

    rem = remainder_of(work)
    assert charge_count(rem) == k - 1, \
        "pair extraction shifted the charge accounting"
    guard = rem.t + 1
    while charge_count(rem) > k - 2:
        guard -= 1
        if guard < 0:
            raise ExtractionStuck("redundancy pruning failed to terminate")
        dropped = _prune_one(work, rem, ops, box_cap)
        if dropped is None:
            raise ExtractionStuck(
                "no certified-redundant generator to prune, yet the "
                "charge count says one exists"
            )
        work = dropped
        rem = remainder_of(work)
    if charge_count(rem) != k - 2:
        raise TheoremViolation(
            "pruning overshot the charge count; the input breaks the "
            "pair structure"
        )
    rem.check_commuting()
    return Circuit(p, 2 * q, ops), rem, n0 + 1


def _prune_one(work: StabilizerCode, rem: StabilizerCode, ops: list,
               box_cap):
    """Drop one certified-redundant remainder generator from work.

    Zero rows go first; the certify scan then widens its box cap in
    stages, so a cheaply-certified redundancy is found before any full
    ladder is burned on rows that are not redundant.  Returns the new
    code, or None when nothing certifies.
    """
    for i in range(rem.t):
        if all(f.is_zero() for f in _row_entries(rem.epsilon, i)):
            rec = DropGen(i + 2)
            ops.append(rec)
            return work.apply_op(rec)
    if box_cap is None:
        caps = [2, 8, None]
    else:
        caps = [c for c in (2, 8) if c < box_cap] + [box_cap]
    for cap in caps:
        for i in range(rem.t):
            others = rem.epsilon.drop_row(i)
            res = certify_row_combination(
                others, _row_entries(rem.epsilon, i), cap
            )
            if res.found:
                rec = DropGen(i + 2)
                ops.append(rec)
                return work.apply_op(rec)
    return None


# ---------------------------------------------------------------------------
# the driver


@dataclass
class DecompositionResult:
    """Outcome of a full decomposition.

    n            number of toric blocks split off
    certificate  replayable op record from the input code to the final
                 block-diagonal form (gates, row operations, coarse
                 grainings, generator bookkeeping)
    remainder    the charge-free code left on the last qudits
    m            total coarse-graining factor the certificate applies
    """

    n: int
    certificate: Circuit
    remainder: StabilizerCode
    m: int

    def __repr__(self):
        return (f"DecompositionResult(n={self.n}, m={self.m}, "
                f"remainder q={self.remainder.q}, "
                f"|certificate|={len(self.certificate)})")


def _translate_op(op: CircuitOp, base: int) -> CircuitOp:
    """Shift an op computed on the active tail of the code so it acts on
    the full code, whose first ``base`` qudits and rows are frozen."""
    if base == 0:
        return op
    if isinstance(op, HGate):
        return HGate(op.i + base)
    if isinstance(op, CPGate):
        return CPGate(op.i + base, op.j + base, op.f)
    if isinstance(op, CXGate):
        return CXGate(op.i + base, op.j + base, op.f)
    if isinstance(op, MulGate):
        return MulGate(op.i + base, op.a)
    if isinstance(op, RowSwap):
        return RowSwap(op.i + base, op.j + base)
    if isinstance(op, RowScale):
        return RowScale(op.i + base, op.c)
    if isinstance(op, RowAdd):
        return RowAdd(op.i + base, op.j + base, op.f)
    if isinstance(op, NewGen):
        p = op.coeffs[0].p if op.coeffs else 2
        pad = tuple([LaurentPoly.zero(p)] * base)
        return NewGen(pad + op.coeffs)
    if isinstance(op, DropGen):
        return DropGen(op.i + base)
    if isinstance(op, Rescale):
        return Rescale(op.g + base, op.mono)
    raise TypeError(f"cannot translate {op!r}")


def _subcell_layout(t_base: int, m: int, dx: int, dy: int):
    """Generator relabeling induced on a fresh m-fold coarse code by a
    fine-lattice translation of (dx, dy).

    Rows of a code straight out of coarse_grain(m) come in blocks of
    m*m copies per original generator, copy (a, b) at offset a + m*b.
    A translation moves copy (a, b) to ((a+dx) mod m, (b+dy) mod m),
    and a copy pushed across the cell boundary picks up one coarse
    lattice step as a monomial factor.  Returns (dst, carry): the
    content of row r lands at row dst[r] with epsilon-row monomial
    x**carry[r][0] * y**carry[r][1].
    """
    n = t_base * m * m
    dst = np.zeros(n, dtype=np.int64)
    carry = [(0, 0)] * n
    for g in range(t_base):
        base = g * m * m
        for b in range(m):
            for a in range(m):
                s, a2 = divmod(a + dx, m)
                t2, b2 = divmod(b + dy, m)
                dst[base + a + m * b] = base + a2 + m * b2
                carry[base + a + m * b] = (s, t2)
    return dst, carry


def subcell_shift_records(p: int, t_base: int, m: int, dx: int, dy: int):
    """Row operations that re-anchor a fresh coarse code's unit cell at
    the fine offset (dx, dy).

    The coarse matrix itself cannot see where the cell boundaries were
    drawn, but the extraction's confined-mover windows can: a string
    segment that straddles a boundary refuses to fit in a two-cell
    window at every scale.  Relabeling the generator copies by a fine
    translation slides the boundaries under the code, which turns the
    straddle into an interior segment for some offset.  The relabeling
    is just monomial rescales (the boundary wrap) followed by a
    permutation of rows, so it is expressible in ordinary certificate
    records.
    """
    dst, carry = _subcell_layout(t_base, m, dx, dy)
    recs: list = []
    for r in range(len(dst)):
        s, t2 = carry[r]
        if s or t2:
            # Rescale multiplies the epsilon row by the bar, so invert
            recs.append(Rescale(r, LaurentPoly.monomial(p, -s, -t2, 1)))
    seen = [False] * len(dst)
    for r0 in range(len(dst)):
        if seen[r0]:
            continue
        cycle = [r0]
        r = int(dst[r0])
        while r != r0:
            cycle.append(r)
            r = int(dst[r])
        for r in cycle:
            seen[r] = True
        for c in cycle[1:]:
            recs.append(RowSwap(cycle[0], c))
    return recs


def _apply_subcell_shift(code: StabilizerCode, m: int, dx: int, dy: int):
    """One-pass equivalent of replaying subcell_shift_records, plus the
    records themselves."""
    p = code.p
    if code.t % (m * m):
        raise DimensionMismatch(
            f"{code.t} rows do not split into {m}x{m} cosets"
        )
    t_base = code.t // (m * m)
    dst, carry = _subcell_layout(t_base, m, dx, dy)
    ent = code.sigma.entries
    rows_out = []
    for c in range(2 * code.q):
        src_row = ent[c]
        row = [None] * code.t
        for r in range(code.t):
            f = src_row[r]
            s, t2 = carry[r]
            if (s or t2) and f:
                f = f.shift(-s, -t2)
            row[int(dst[r])] = f
        rows_out.append(row)
    out = code.with_sigma(PolyMatrix(p, rows_out, cols=code.t))
    return out, subcell_shift_records(p, t_base, m, dx, dy)


def _extract_all(code: StabilizerCode, box_cap):
    """Iterate the extraction on the active tail until no charge is
    left.  Returns (n, ops, remainder)."""
    ops: list = []
    active = code
    n = 0
    while True:
        k = charge_count(active)
        if k == 0:
            break
        circ, active, _ = extract_toric_summand(active, box_cap)
        ops.extend(_translate_op(op, 2 * n) for op in circ.ops)
        n += 1
    return n, ops, active


def decompose(code: StabilizerCode, box_cap=None,
              m_cap: int = 16) -> DecompositionResult:
    """Split a code into toric blocks plus a charge-free remainder.

    The returned certificate replays on the input code to a code that
    equals toric x n (+) remainder exactly, with block i on qudits
    (2i, 2i+1) and generator rows (2i, 2i+1) and the remainder after
    them.  Raises NotTopologicallyOrdered when the torus check refuses
    the input, and propagates solver failures with the partial op
    record attached as ``partial_certificate``.
    """
    from .corpus import toric  # local import: corpus builds on codes only

    p = code.p
    code.check_commuting()
    ops_all: list = []
    work = code

    def fail(err):
        err.partial_certificate = Circuit(p, 2 * work.q, list(ops_all))
        raise err

    try:
        for i in sorted(work.zero_generator_indices(), reverse=True):
            rec = DropGen(i)
            work = work.apply_op(rec)
            ops_all.append(rec)
        m, work = annihilator_normalize(work, m_cap=m_cap, box_cap=box_cap)
        if m > 1:
            ops_all.append(CoarseGrainOp(m))
        report = empirical_tqo_check(work)
        if not report.passed:
            raise NotTopologicallyOrdered(report)
        k0 = charge_count(work)
        if k0 % 2:
            raise TheoremViolation(
                f"charge count {k0} is odd on the normalized code"
            )
    except StabDecompError as err:
        fail(err)

    # Retry ladder.  Each attempt restarts from the normalized code with
    # one extra coarse factor mx and one sub-cell anchor (dx, dy); the
    # anchor scan comes before the next doubling because a mover that
    # straddles a cell boundary keeps straddling it at every scale, while
    # sliding the boundaries by a fine offset frees it at this one.
    base_code = work
    base_ops = list(ops_all)

    def _attempts():
        mx = 1
        while m * mx <= m_cap:
            deltas = sorted(
                ((dx, dy) for dx in range(mx) for dy in range(mx)),
                key=lambda d: (max(d), d),
            )
            for d in deltas[:25]:
                yield mx, d
            mx *= 2

    n = ext_ops = remainder = None
    last_err: ScaleRetry | None = None
    for mx, (dx, dy) in _attempts():
        attempt = base_code
        attempt_ops = list(base_ops)
        if mx > 1:
            attempt = attempt.coarse_grain(mx)
            attempt_ops.append(CoarseGrainOp(mx))
        if (dx, dy) != (0, 0):
            attempt, recs = _apply_subcell_shift(attempt, mx, dx, dy)
            attempt_ops.extend(recs)
        try:
            n, ext_ops, remainder = _extract_all(attempt, box_cap)
            work = attempt
            ops_all = attempt_ops
            m = m * mx
            break
        except ScaleRetry as err:
            last_err = err
        except StabDecompError as err:
            fail(err)
    if remainder is None:
        fail(last_err if last_err is not None else ExtractionStuck(
            f"no attempt possible within coarse factor cap {m_cap}"))

    ops_all.extend(ext_ops)
    certificate = Circuit(p, 2 * work.q, ops_all)

    final = certificate.replay(code)
    expected = remainder
    for _ in range(n):
        expected = direct_sum(toric(p), expected)
    assert final == expected, \
        "certificate replay does not reach the block-diagonal form"
    assert charge_count(remainder) == 0
    rem_report = empirical_tqo_check(remainder)
    if not (rem_report.passed and rem_report.k == 0):
        raise TheoremViolation(
            f"remainder keeps topological content: {rem_report}"
        )
    for L in (4, 5, 6):
        got = logical_qudits(work, L)
        if got != 2 * n:
            raise TheoremViolation(
                f"torus cross-check: {got} logical qudits at L={L}, "
                f"expected {2 * n}"
            )
    return DecompositionResult(n, certificate, remainder, m)
