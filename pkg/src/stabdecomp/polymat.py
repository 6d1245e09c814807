"""Matrices over the two-variable Laurent ring.

Entries are LaurentPoly over a shared prime p.  Instances are used as
values: every operation returns a fresh matrix, nothing is mutated in
place.  ``dagger`` is the antipode applied entrywise followed by the
transpose; it is the adjoint relevant for commutation checks.

``coarse_grain`` rewrites a matrix over the subring generated by x^m,
y^m, expanding every scalar into an m^2 x m^2 block over the coarse
variables.  Coset representatives x^a y^b are ordered by k = a + m*b,
so for m = 2 the order is 1, x, y, x*y.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, PrimeMismatch
from .laurent import LaurentPoly


class PolyMatrix:
    __slots__ = ("p", "rows", "cols", "entries")

    def __init__(self, p: int, entries, cols: int | None = None):
        self.p = p
        self.entries = [list(row) for row in entries]
        self.rows = len(self.entries)
        if self.rows:
            self.cols = len(self.entries[0])
            if cols is not None and cols != self.cols:
                raise DimensionMismatch("explicit cols disagrees with entries")
        else:
            # Degenerate 0 x n shapes carry no entry to infer n from.
            self.cols = cols if cols is not None else 0
        for row in self.entries:
            if len(row) != self.cols:
                raise DimensionMismatch("ragged rows")
            for f in row:
                if f.p != p:
                    raise PrimeMismatch(f"entry over p={f.p} in matrix over p={p}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> "PolyMatrix":
        z = LaurentPoly.zero(p)
        return cls(p, [[z] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, p: int, n: int) -> "PolyMatrix":
        z = LaurentPoly.zero(p)
        one = LaurentPoly.one(p)
        return cls(p, [[one if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def lambda_form(cls, p: int, q: int) -> "PolyMatrix":
        """The symplectic form [[0, I_q], [-I_q, 0]] on 2q components."""
        m = cls.zeros(p, 2 * q, 2 * q).entries
        one = LaurentPoly.one(p)
        for i in range(q):
            m[i][q + i] = one
            m[q + i][i] = -one
        return cls(p, m)

    @classmethod
    def elementary(cls, p: int, n: int, i: int, j: int, f: LaurentPoly) -> "PolyMatrix":
        """Identity plus f in position (i, j)."""
        m = cls.identity(p, n).entries
        m[i][j] = m[i][j] + f
        return cls(p, m)

    @classmethod
    def from_cols(cls, p: int, rows: int, cols_list) -> "PolyMatrix":
        out = cls.zeros(p, rows, len(cols_list)).entries
        for j, col in enumerate(cols_list):
            if len(col) != rows:
                raise DimensionMismatch("column length mismatch")
            for i, f in enumerate(col):
                out[i][j] = f
        return cls(p, out)

    # -- access ------------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int):
        return list(self.entries[i])

    def col(self, j: int):
        return [self.entries[i][j] for i in range(self.rows)]

    def with_entry(self, i: int, j: int, f: LaurentPoly) -> "PolyMatrix":
        m = [list(r) for r in self.entries]
        m[i][j] = f
        return PolyMatrix(self.p, m)

    def submatrix(self, row_idx, col_idx) -> "PolyMatrix":
        col_idx = list(col_idx)
        return PolyMatrix(
            self.p,
            [[self.entries[i][j] for j in col_idx] for i in row_idx],
            cols=len(col_idx),
        )

    def append_row(self, row) -> "PolyMatrix":
        return PolyMatrix(self.p, self.entries + [list(row)])

    def append_col(self, col) -> "PolyMatrix":
        if len(col) != self.rows:
            raise DimensionMismatch("column length mismatch")
        return PolyMatrix(
            self.p,
            [r + [col[i]] for i, r in enumerate(self.entries)],
            cols=self.cols + 1,
        )

    def insert_row(self, at: int, row) -> "PolyMatrix":
        m = [list(r) for r in self.entries]
        m.insert(at, list(row))
        return PolyMatrix(self.p, m)

    def drop_row(self, i: int) -> "PolyMatrix":
        return PolyMatrix(
            self.p,
            [r for k, r in enumerate(self.entries) if k != i],
            cols=self.cols,
        )

    def drop_col(self, j: int) -> "PolyMatrix":
        return PolyMatrix(
            self.p, [[f for k, f in enumerate(r) if k != j] for r in self.entries]
        )

    def hstack(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.rows != other.rows:
            raise DimensionMismatch("row count mismatch in hstack")
        return PolyMatrix(
            self.p,
            [self.entries[i] + other.entries[i] for i in range(self.rows)],
            cols=self.cols + other.cols,
        )

    def vstack(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.cols:
            raise DimensionMismatch("column count mismatch in vstack")
        return PolyMatrix(self.p, self.entries + other.entries, cols=self.cols)

    # -- algebra -----------------------------------------------------------

    def _check(self, other: "PolyMatrix"):
        if self.p != other.p:
            raise PrimeMismatch(f"p={self.p} vs p={other.p}")

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shape mismatch in add")
        return PolyMatrix(
            self.p,
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ],
            cols=self.cols,
        )

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return self + (-other)

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix(
            self.p, [[-f for f in r] for r in self.entries], cols=self.cols
        )

    def __mul__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check(other)
        if self.cols != other.rows:
            raise DimensionMismatch(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        z = LaurentPoly.zero(self.p)
        out = []
        for i in range(self.rows):
            row = []
            for k in range(other.cols):
                acc = z
                for j in range(self.cols):
                    f = self.entries[i][j]
                    g = other.entries[j][k]
                    if f.terms and g.terms:
                        acc = acc + f * g
                row.append(acc)
            out.append(row)
        return PolyMatrix(self.p, out, cols=other.cols)

    def scale(self, f: LaurentPoly) -> "PolyMatrix":
        return PolyMatrix(
            self.p, [[f * g for g in r] for r in self.entries], cols=self.cols
        )

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(
            self.p,
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows,
        )

    def dagger(self) -> "PolyMatrix":
        """Entrywise antipode followed by transpose."""
        return PolyMatrix(
            self.p,
            [
                [self.entries[i][j].bar() for i in range(self.rows)]
                for j in range(self.cols)
            ],
            cols=self.rows,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (
            self.p == other.p
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def is_zero(self) -> bool:
        return all(f.is_zero() for r in self.entries for f in r)

    def max_abs_exponent(self) -> int:
        m = 0
        for r in self.entries:
            for f in r:
                m = max(m, f.max_abs_exponent())
        return m

    def eval_at_unity(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.int64)
        for i in range(self.rows):
            for j in range(self.cols):
                out[i, j] = self.entries[i][j].eval_at_unity()
        return out

    def __repr__(self):
        body = "; ".join(
            ", ".join(f.to_str() for f in row) for row in self.entries
        )
        return f"PolyMatrix({self.p}, {self.rows}x{self.cols}: [{body}])"

    # -- coarse graining -----------------------------------------------------

    def coarse_grain(self, m: int) -> "PolyMatrix":
        if m < 1:
            raise ValueError("coarse-graining factor must be positive")
        if m == 1:
            return self
        mm = m * m
        out = PolyMatrix.zeros(self.p, self.rows * mm, self.cols * mm).entries
        for i in range(self.rows):
            for j in range(self.cols):
                f = self.entries[i][j]
                if f.is_zero():
                    continue
                for (bi, bj), g in coarse_grain_scalar(f, m).items():
                    out[i * mm + bi][j * mm + bj] = out[i * mm + bi][j * mm + bj] + g
        return PolyMatrix(self.p, out, cols=self.cols * mm)


def coset_reps(m: int):
    """Representative exponent pairs in block order: k = a + m*b."""
    return [(k % m, k // m) for k in range(m * m)]


def coarse_grain_scalar(f: LaurentPoly, m: int) -> dict:
    """Expand one scalar into its m^2 x m^2 block, as {(I, J): poly}.

    Column J holds the expansion of f * x^aJ y^bJ over the coset basis:
    a term x^A y^B lands in row I with A + aJ = m*s + aI and
    B + bJ = m*t + bI, contributing x^s y^t.  Floor divmod keeps this
    correct for negative exponents.
    """
    p = f.p
    reps = coset_reps(m)
    blocks: dict = {}
    for J, (aj, bj) in enumerate(reps):
        for (A, B), c in f.terms.items():
            s, ai = divmod(A + aj, m)
            t, bi = divmod(B + bj, m)
            I = ai + m * bi
            key = (I, J)
            cur = blocks.get(key)
            add = LaurentPoly.monomial(p, s, t, c)
            blocks[key] = add if cur is None else cur + add
    return {k: v for k, v in blocks.items() if not v.is_zero()}


def coarse_grain_vector(col, m: int):
    """Coarse-grain a column vector (list of LaurentPoly): take the
    coarse column at coset representative (0, 0) of each entry's block."""
    out = []
    for f in col:
        blocks = coarse_grain_scalar(f, m)
        mm = m * m
        p = f.p
        for I in range(mm):
            out.append(blocks.get((I, 0), LaurentPoly.zero(p)))
    return out
