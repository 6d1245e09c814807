"""Finite-support membership solver for polynomial matrices.

Whether a column lies in the image of M over R is semidecidable with a
boxed ansatz: restrict every witness entry to exponents in [-N, N]^2,
match coefficients, and solve the resulting F_p linear system.  The box
grows geometrically until a cap.  Failure inside every box is reported
as cap exhaustion, distinct from the one genuine non-membership proof we
have: the witness would survive evaluation at x = y = 1, so if the
evaluated target misses the evaluated column space, membership is
impossible at any box size.

BoxSystem is the reusable core: a linear system for M*w = target where
each component of w is confined to an explicit support set.  The
extraction pipeline uses it directly with non-square supports (movers
confined to two adjacent cells).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fplin
from .errors import DimensionMismatch, UndecidedMembership
from .laurent import LaurentPoly
from .polymat import PolyMatrix

FOUND = "found"
OBSTRUCTED = "obstructed"
CAP = "cap_exhausted"

# Refuse to assemble dense systems beyond this many unknowns; the caller
# sees cap exhaustion instead of a memory blowup.
DENSE_GUARD = 20000


@dataclass
class SolveResult:
    status: str
    witness: list | None
    box: int

    @property
    def found(self) -> bool:
        return self.status == FOUND


class BoxSystem:
    """Coefficient-matching system for M*w = target, supports fixed.

    supports[j] is the set of exponent pairs allowed in component j of
    the witness.  Equations cover every monomial that M*w could touch,
    so a solution of the linear system is an exact identity, and a
    target outside the reachable region is infeasible by inspection.
    """

    def __init__(self, M: PolyMatrix, supports):
        if len(supports) != M.cols:
            raise DimensionMismatch("one support set per witness component")
        self.M = M
        self.p = M.p
        self.unknowns = []
        for j, sup in enumerate(supports):
            for mono in sorted(sup):
                self.unknowns.append((j, mono))
        region = set()
        for j, sup in enumerate(supports):
            for i in range(M.rows):
                f = M[i, j]
                for (A, B) in f.terms:
                    for (a, b) in sup:
                        region.add((i, A + a, B + b))
        self.region = region
        self._eq_index = {key: n for n, key in enumerate(sorted(region))}
        A = np.zeros((len(region), len(self.unknowns)), dtype=np.int64)
        for col, (j, (a, b)) in enumerate(self.unknowns):
            for i in range(M.rows):
                for (Am, Bm), v in M[i, j].terms.items():
                    A[self._eq_index[(i, Am + a, Bm + b)], col] += v
        self.A = A % self.p

    def n_unknowns(self) -> int:
        return len(self.unknowns)

    def _rhs(self, target):
        b = np.zeros(len(self._eq_index), dtype=np.int64)
        for i, f in enumerate(target):
            for (A, B), v in f.terms.items():
                key = (i, A, B)
                if key not in self._eq_index:
                    return None
                b[self._eq_index[key]] = v
        return b

    def to_polys(self, x) -> list:
        out = [dict() for _ in range(self.M.cols)]
        for col, (j, mono) in enumerate(self.unknowns):
            v = int(x[col]) % self.p
            if v:
                out[j][mono] = v
        return [LaurentPoly(self.p, d) for d in out]

    def solve(self, target):
        """One witness as a list of LaurentPoly, or None."""
        b = self._rhs(target)
        if b is None:
            return None
        x = fplin.solve(self.A, b, self.p)
        if x is None:
            return None
        return self.to_polys(x)

    def kernel(self) -> list:
        """Basis of support-confined solutions of M*w = 0, as poly lists."""
        K = fplin.kernel(self.A, self.p)
        return [self.to_polys(K[r]) for r in range(K.shape[0])]


def box_support(N: int):
    return {(a, b) for a in range(-N, N + 1) for b in range(-N, N + 1)}


def eval_obstructed(M: PolyMatrix, target) -> bool:
    """True when membership is refuted by evaluation at x = y = 1."""
    A0 = M.eval_at_unity()
    b0 = np.array([f.eval_at_unity() for f in target], dtype=np.int64)
    return fplin.solve(A0, b0, M.p) is None


def solve_in_image(M: PolyMatrix, target, box_cap: int | None = None) -> SolveResult:
    """Search for w with M*w = target, each entry supported in [-N, N]^2.

    target is a list of M.rows polynomials.  N runs over 1, 2, 4, ...
    up to box_cap (default 64 * max degree).  The returned witness is
    always re-verified by exact multiplication.
    """
    return solve_in_image_many(M, [target], box_cap)[0]


def solve_in_image_many(M: PolyMatrix, targets, box_cap: int | None = None) -> list:
    """solve_in_image for several targets against one matrix.

    All still-unsolved targets share each box rung's elimination, so k
    sibling searches cost about one.  Small boxes come first: failures
    there are cheap, and witnesses tend to sit near the unit cell even
    when the matrix degree is large.  Results align with targets.
    """
    results: list[SolveResult | None] = [None] * len(targets)
    pending: dict[int, list] = {}
    for idx, target in enumerate(targets):
        if len(target) != M.rows:
            raise DimensionMismatch("target length must match matrix rows")
        if all(f.is_zero() for f in target):
            results[idx] = SolveResult(FOUND, [LaurentPoly.zero(M.p)] * M.cols, 0)
        else:
            pending[idx] = list(target)
    if pending:
        A0 = M.eval_at_unity()
        B0 = np.array(
            [[f.eval_at_unity() for f in pending[i]] for i in sorted(pending)],
            dtype=np.int64,
        ).T
        for i, x in zip(sorted(pending), fplin.solve_many(A0, B0, M.p)):
            if x is None:
                results[i] = SolveResult(OBSTRUCTED, None, 0)
                del pending[i]
    if not pending:
        return results
    deg = max(1, M.max_abs_exponent())
    for target in pending.values():
        for f in target:
            deg = max(deg, f.max_abs_exponent())
    cap = 64 * deg if box_cap is None else box_cap
    N = 1
    last = 0
    while N <= cap and pending:
        last = N
        if M.cols * (2 * N + 1) ** 2 > DENSE_GUARD:
            break
        sys_ = BoxSystem(M, [box_support(N)] * M.cols)
        order = []
        cols = []
        for idx in sorted(pending):
            b = sys_._rhs(pending[idx])
            if b is not None:
                order.append(idx)
                cols.append(b)
        if cols:
            for idx, x in zip(order, fplin.solve_many(sys_.A, np.stack(cols, axis=1), M.p)):
                if x is None:
                    continue
                w = sys_.to_polys(x)
                _verify_witness(M, w, pending[idx])
                results[idx] = SolveResult(FOUND, w, N)
                del pending[idx]
        N *= 2
    for idx in pending:
        results[idx] = SolveResult(CAP, None, last)
    return results


def _verify_witness(M: PolyMatrix, w, target):
    prod = M * PolyMatrix.from_cols(M.p, M.cols, [w])
    for i in range(M.rows):
        if prod[i, 0] != target[i]:
            raise AssertionError("witness failed exact re-verification")


def certify_row_combination(M: PolyMatrix, row_target, box_cap: int | None = None) -> SolveResult:
    """Find a coefficient row r with r*M = row_target.

    Solved as the plain-transpose image problem; no involution is
    applied, since (r*M)_j = sum_k r_k M[k][j].
    """
    if len(row_target) != M.cols:
        raise DimensionMismatch("row target length must match matrix columns")
    return solve_in_image(M.transpose(), list(row_target), box_cap)


def is_trivial_excitation(code, e, box_cap: int | None = None) -> bool:
    """Whether the excitation column e lies in the image of epsilon.

    Raises UndecidedMembership if the box cap is exhausted while the
    evaluation pre-filter was inconclusive.
    """
    res = solve_in_image(code.epsilon, list(e), box_cap)
    if res.status == FOUND:
        return True
    if res.status == OBSTRUCTED:
        return False
    raise UndecidedMembership(
        f"no witness within box {res.box} and no evaluation obstruction"
    )
