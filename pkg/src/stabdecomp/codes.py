"""Stabilizer codes over R and the operations that transform them.

A code is held by its stabilizer map sigma (2q x t): column j lists the
X-block and Z-block exponents of generator j.  The excitation map
epsilon = dagger(sigma) * lambda_q is derived on demand, so sigma is the
single source of truth and every transformation is expressed as an
update of sigma:

  gates           sigma <- U sigma          (epsilon <- epsilon U^-1)
  row operations  epsilon <- G epsilon      (sigma <- sigma dagger(G))

Gates follow the four elementary symplectic kinds; generator-basis
changes are recorded as explicit bookkeeping records so a decomposition
certificate can be replayed deterministically.  Everything is
functional: apply_op returns a new code.

Indices are 0-based throughout the Python API; the file formats are
1-based and the translation happens at (de)serialization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import DimensionMismatch, NonCommutingCode, PrimeMismatch
from .laurent import LaurentPoly
from .polymat import PolyMatrix


# -- gate and bookkeeping records -------------------------------------------

@dataclass(frozen=True)
class HGate:
    """Hadamard on qudit i: block [[0, -1], [1, 0]] on components (i, i+q)."""
    i: int


@dataclass(frozen=True)
class CPGate:
    """Control-phase: I + f e_{i+q,j} + bar(f) e_{j+q,i}; for i = j the
    single entry (f + bar(f)) e_{i+q,i}."""
    i: int
    j: int
    f: LaurentPoly


@dataclass(frozen=True)
class CXGate:
    """Control-not (i != j): I + f e_{i,j} - bar(f) e_{j+q,i+q}."""
    i: int
    j: int
    f: LaurentPoly


@dataclass(frozen=True)
class MulGate:
    """Single-qudit rescale: a on component i, a^-1 on component i+q."""
    i: int
    a: int


@dataclass(frozen=True)
class CoarseGrainOp:
    m: int


@dataclass(frozen=True)
class RowSwap:
    i: int
    j: int


@dataclass(frozen=True)
class RowScale:
    """epsilon row i scaled by the constant c (invertible mod p)."""
    i: int
    c: int


@dataclass(frozen=True)
class RowAdd:
    """epsilon row i += f * (epsilon row j)."""
    i: int
    j: int
    f: LaurentPoly


@dataclass(frozen=True)
class NewGen:
    """Append a redundant generator: new epsilon row = sum coeffs[k] * row k."""
    coeffs: tuple


@dataclass(frozen=True)
class DropGen:
    i: int


@dataclass(frozen=True)
class Rescale:
    """sigma column g multiplied by a monomial (epsilon row g by its bar)."""
    g: int
    mono: LaurentPoly


GateOp = Union[HGate, CPGate, CXGate, MulGate]
CircuitOp = Union[
    HGate, CPGate, CXGate, MulGate,
    CoarseGrainOp, RowSwap, RowScale, RowAdd, NewGen, DropGen, Rescale,
]


def gate_matrix(p: int, q: int, g: GateOp) -> PolyMatrix:
    """Expand a gate record to its 2q x 2q symplectic matrix."""
    n = 2 * q
    U = PolyMatrix.identity(p, n).entries
    one = LaurentPoly.one(p)
    if isinstance(g, HGate):
        i = _check_qudit(g.i, q)
        U[i][i] = LaurentPoly.zero(p)
        U[i][i + q] = -one
        U[i + q][i] = one
        U[i + q][i + q] = LaurentPoly.zero(p)
    elif isinstance(g, CPGate):
        i = _check_qudit(g.i, q)
        j = _check_qudit(g.j, q)
        f = g.f
        if i == j:
            U[i + q][i] = U[i + q][i] + f + f.bar()
        else:
            U[i + q][j] = U[i + q][j] + f
            U[j + q][i] = U[j + q][i] + f.bar()
    elif isinstance(g, CXGate):
        i = _check_qudit(g.i, q)
        j = _check_qudit(g.j, q)
        if i == j:
            raise ValueError("control-not needs distinct qudits")
        U[i][j] = U[i][j] + g.f
        U[j + q][i + q] = U[j + q][i + q] - g.f.bar()
    elif isinstance(g, MulGate):
        i = _check_qudit(g.i, q)
        a = g.a % p
        if a == 0:
            raise ValueError("rescale constant must be invertible mod p")
        U[i][i] = LaurentPoly.const(p, a)
        U[i + q][i + q] = LaurentPoly.const(p, pow(a, -1, p))
    else:
        raise TypeError(f"not a gate: {g!r}")
    return PolyMatrix(p, U)


def _check_qudit(i: int, q: int) -> int:
    if not 0 <= i < q:
        raise ValueError(f"qudit index {i} out of range for q={q}")
    return i


def gate_inverse_word(g: GateOp, p: int):
    """Gates whose left-to-right application equals the inverse of g."""
    if isinstance(g, HGate):
        if p == 2:
            return [g]
        return [g, MulGate(g.i, p - 1)]
    if isinstance(g, CPGate):
        return [CPGate(g.i, g.j, -g.f)]
    if isinstance(g, CXGate):
        return [CXGate(g.i, g.j, -g.f)]
    if isinstance(g, MulGate):
        return [MulGate(g.i, pow(g.a, -1, p))]
    raise TypeError(f"not a gate: {g!r}")


def _row_comb(base, f, other):
    """base + f * other over aligned entry rows."""
    return [a + f * b if b else a for a, b in zip(base, other)]


def _gate_on_sigma(p: int, q: int, sigma: PolyMatrix, g: GateOp) -> PolyMatrix:
    """U * sigma without forming U: every gate touches at most two of
    the 2q component rows, so the dense product is quadratic waste."""
    ent = sigma.entries
    rows = list(ent)
    if isinstance(g, HGate):
        i = _check_qudit(g.i, q)
        rows[i] = [-f for f in ent[i + q]]
        rows[i + q] = ent[i]
    elif isinstance(g, CPGate):
        i = _check_qudit(g.i, q)
        j = _check_qudit(g.j, q)
        f = g.f
        if i == j:
            rows[i + q] = _row_comb(ent[i + q], f + f.bar(), ent[i])
        else:
            rows[i + q] = _row_comb(ent[i + q], f, ent[j])
            rows[j + q] = _row_comb(ent[j + q], f.bar(), ent[i])
    elif isinstance(g, CXGate):
        i = _check_qudit(g.i, q)
        j = _check_qudit(g.j, q)
        if i == j:
            raise ValueError("control-not needs distinct qudits")
        rows[i] = _row_comb(ent[i], g.f, ent[j])
        rows[j + q] = _row_comb(ent[j + q], -g.f.bar(), ent[i + q])
    elif isinstance(g, MulGate):
        i = _check_qudit(g.i, q)
        a = g.a % p
        if a == 0:
            raise ValueError("rescale constant must be invertible mod p")
        ainv = pow(a, -1, p)
        rows[i] = [f.scale(a) if f else f for f in ent[i]]
        rows[i + q] = [f.scale(ainv) if f else f for f in ent[i + q]]
    else:
        raise TypeError(f"not a gate: {g!r}")
    return PolyMatrix(p, rows, cols=sigma.cols)


def is_symplectic(U: PolyMatrix) -> bool:
    """dagger(U) lambda U = lambda, with the block form fixed by size."""
    if U.rows != U.cols or U.rows % 2:
        raise DimensionMismatch("symplectic check needs even square size")
    lam = PolyMatrix.lambda_form(U.p, U.rows // 2)
    return U.dagger() * lam * U == lam


# -- the code itself ---------------------------------------------------------

class StabilizerCode:
    __slots__ = ("p", "q", "t", "sigma", "name", "_eps")

    def __init__(self, p: int, q: int, sigma: PolyMatrix, name: str = ""):
        if sigma.p != p:
            raise PrimeMismatch(f"sigma over p={sigma.p}, code over p={p}")
        if sigma.rows != 2 * q:
            raise DimensionMismatch(
                f"sigma has {sigma.rows} rows, expected 2q={2 * q}"
            )
        self.p = p
        self.q = q
        self.t = sigma.cols
        self.sigma = sigma
        self.name = name
        self._eps = None

    @property
    def epsilon(self) -> PolyMatrix:
        # dagger(sigma) * lambda, written out entrywise: lambda only
        # permutes and negates columns, so the full matrix product is
        # wasted work at any real size
        if self._eps is None:
            q, ent = self.q, self.sigma.entries
            rows = [
                [-(ent[c + q][g].bar()) for c in range(q)]
                + [ent[c][g].bar() for c in range(q)]
                for g in range(self.t)
            ]
            self._eps = PolyMatrix(self.p, rows, cols=2 * self.q)
        return self._eps

    def lam(self) -> PolyMatrix:
        return PolyMatrix.lambda_form(self.p, self.q)

    def commutation_matrix(self) -> PolyMatrix:
        """dagger(sigma) lambda sigma; zero iff all generators commute.

        This equals epsilon lambda dagger(epsilon) because lambda
        dagger(lambda) is the identity.  Computed pairwise from the
        nonzero component lists: lambda is almost all zeros and the
        generator columns are sparse, so the dense triple product would
        spend quadratic time multiplying zeros.
        """
        p, q, t = self.p, self.q, self.t
        ent = self.sigma.entries
        xs: list = [{} for _ in range(t)]
        zs: list = [{} for _ in range(t)]
        for c in range(q):
            rowx, rowz = ent[c], ent[c + q]
            for g in range(t):
                if rowx[g]:
                    xs[g][c] = rowx[g]
                if rowz[g]:
                    zs[g][c] = rowz[g]
        zero = LaurentPoly.zero(p)
        out = []
        for i in range(t):
            xi, zi = xs[i], zs[i]
            row = []
            for j in range(t):
                acc = zero
                zj, xj = zs[j], xs[j]
                for c, f in xi.items():
                    g = zj.get(c)
                    if g is not None:
                        acc = acc + f.bar() * g
                for c, f in zi.items():
                    g = xj.get(c)
                    if g is not None:
                        acc = acc - f.bar() * g
                row.append(acc)
            out.append(row)
        return PolyMatrix(p, out, cols=t)

    def check_commuting(self) -> None:
        M = self.commutation_matrix()
        for i in range(M.rows):
            for j in range(M.cols):
                if not M[i, j].is_zero():
                    raise NonCommutingCode(i, j, M[i, j])

    def commutes(self) -> bool:
        return self.commutation_matrix().is_zero()

    def zero_generator_indices(self):
        return [
            j for j in range(self.t)
            if all(self.sigma[i, j].is_zero() for i in range(2 * self.q))
        ]

    # -- transformations -----------------------------------------------------

    def with_sigma(self, sigma: PolyMatrix, q=None) -> "StabilizerCode":
        return StabilizerCode(self.p, self.q if q is None else q, sigma, self.name)

    def apply_op(self, op: CircuitOp) -> "StabilizerCode":
        p, q = self.p, self.q
        if isinstance(op, (HGate, CPGate, CXGate, MulGate)):
            return self.with_sigma(_gate_on_sigma(p, q, self.sigma, op))
        if isinstance(op, CoarseGrainOp):
            return self.coarse_grain(op.m)
        if isinstance(op, RowSwap):
            cols = list(range(self.t))
            cols[op.i], cols[op.j] = cols[op.j], cols[op.i]
            return self.with_sigma(self.sigma.submatrix(range(2 * q), cols))
        if isinstance(op, RowScale):
            c = op.c % p
            if c == 0:
                raise ValueError("row scale must be invertible mod p")
            f = LaurentPoly.const(p, c)
            sig = [list(r) for r in self.sigma.entries]
            for i in range(2 * q):
                sig[i][op.i] = sig[i][op.i] * f
            return self.with_sigma(PolyMatrix(p, sig))
        if isinstance(op, RowAdd):
            if op.i == op.j:
                raise ValueError("row add needs distinct rows")
            fb = op.f.bar()
            sig = [list(r) for r in self.sigma.entries]
            for i in range(2 * q):
                sig[i][op.i] = sig[i][op.i] + fb * sig[i][op.j]
            return self.with_sigma(PolyMatrix(p, sig))
        if isinstance(op, NewGen):
            if len(op.coeffs) != self.t:
                raise DimensionMismatch("new generator needs one coefficient per row")
            col = []
            for i in range(2 * q):
                acc = LaurentPoly.zero(p)
                for k, c in enumerate(op.coeffs):
                    if c.terms:
                        acc = acc + c.bar() * self.sigma[i, k]
                col.append(acc)
            return self.with_sigma(self.sigma.append_col(col))
        if isinstance(op, DropGen):
            return self.with_sigma(self.sigma.drop_col(op.i))
        if isinstance(op, Rescale):
            if not op.mono.is_monomial():
                raise ValueError("rescale needs a monomial")
            sig = [list(r) for r in self.sigma.entries]
            for i in range(2 * q):
                sig[i][op.g] = sig[i][op.g] * op.mono
            return self.with_sigma(PolyMatrix(p, sig))
        raise TypeError(f"unknown circuit op {op!r}")

    def apply_word(self, ops) -> "StabilizerCode":
        code = self
        for op in ops:
            code = code.apply_op(op)
        return code

    def coarse_grain(self, m: int) -> "StabilizerCode":
        if m == 1:
            return self
        return StabilizerCode(
            self.p, self.q * m * m, self.sigma.coarse_grain(m), self.name
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, StabilizerCode):
            return NotImplemented
        return (
            self.p == other.p and self.q == other.q and self.sigma == other.sigma
        )

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return f"StabilizerCode(p={self.p}, q={self.q}, t={self.t}{tag})"


def direct_sum(a: StabilizerCode, b: StabilizerCode) -> StabilizerCode:
    """Block sum keeping the X|Z component convention.

    Components: X-block of a, then X-block of b, then both Z-blocks in
    the same order; generators of a come first.
    """
    if a.p != b.p:
        raise PrimeMismatch(f"p={a.p} vs p={b.p}")
    p = a.p
    q = a.q + b.q
    t = a.t + b.t
    sig = PolyMatrix.zeros(p, 2 * q, t).entries
    for i in range(a.q):
        for j in range(a.t):
            sig[i][j] = a.sigma[i, j]
            sig[q + i][j] = a.sigma[a.q + i, j]
    for i in range(b.q):
        for j in range(b.t):
            sig[a.q + i][a.t + j] = b.sigma[i, j]
            sig[q + a.q + i][a.t + j] = b.sigma[b.q + i, j]
    name = f"{a.name}+{b.name}" if a.name and b.name else (a.name or b.name)
    return StabilizerCode(p, q, PolyMatrix(p, sig), name)


@dataclass
class Circuit:
    """Ordered transformation record.

    ``width`` is the component count 2q on which the gate records act,
    i.e. after any CoarseGrainOp in the list; replay checks that the
    final code agrees with it.
    """

    p: int
    width: int
    ops: list = field(default_factory=list)

    def append(self, op: CircuitOp):
        self.ops.append(op)

    def extend(self, ops):
        self.ops.extend(ops)

    def __len__(self):
        return len(self.ops)

    def replay(self, code: StabilizerCode) -> StabilizerCode:
        if code.p != self.p:
            raise PrimeMismatch(f"circuit p={self.p}, code p={code.p}")
        out = code.apply_word(self.ops)
        if 2 * out.q != self.width:
            raise DimensionMismatch(
                f"replay ended at width {2 * out.q}, circuit declares {self.width}"
            )
        return out
