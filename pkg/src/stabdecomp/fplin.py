"""Exact dense linear algebra over F_p on numpy int64 arrays.

One Gaussian-elimination core serves every prime; entries stay in
[0, p) and products fit comfortably in int64 at desk scale.  ``rref``
optionally reports the row operations it performed so callers can
replay them on a parallel object (the generator basis of a code).
"""

from __future__ import annotations

import numpy as np


def _as_fp(A, p: int) -> np.ndarray:
    M = np.array(A, dtype=np.int64)
    if M.ndim != 2:
        raise ValueError("expected a 2-D array")
    return M % p


def rref(A, p: int, want_ops: bool = False):
    """Reduced row echelon form of A mod p.

    Returns (R, pivot_cols) or (R, pivot_cols, ops).  Each op is one of
    ("swap", i, j), ("scale", i, c), ("add", i, j, c) meaning
    row_i += c*row_j; replaying them on A yields R.
    """
    R = _as_fp(A, p)
    m, n = R.shape
    ops = []
    piv = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            R[[r, pr]] = R[[pr, r]]
            ops.append(("swap", r, pr))
        v = int(R[r, c])
        if v != 1:
            inv = pow(v, -1, p)
            R[r] = R[r] * inv % p
            ops.append(("scale", r, inv))
        col = R[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            R[rows] = (R[rows] - np.outer(col[rows], R[r])) % p
            if want_ops:
                for i in rows:
                    ops.append(("add", int(i), r, int(-col[i]) % p))
        piv.append(c)
        r += 1
    if want_ops:
        return R, piv, ops
    return R, piv


def rank(A, p: int) -> int:
    _, piv = rref(A, p)
    return len(piv)


_MOD_TABLES: dict = {}


def _mod_table(p: int):
    """Lookup table for v % p over v in [-(p-1)^2, p); faster than `%`
    on large int16 blocks."""
    tab = _MOD_TABLES.get(p)
    if tab is None:
        off = (p - 1) * (p - 1)
        tab = np.array([v % p for v in range(-off, p)], dtype=np.int16), off
        _MOD_TABLES[p] = tab
    return tab


def _forward_eliminate(R: np.ndarray, p: int, ncols: int):
    """In-place forward elimination on R, pivoting over the first
    ncols columns only.  Rows below each pivot are cleared; rows above
    are left alone.  Returns the pivot list [(row, col), ...].

    R must already be reduced mod p.  The dtype is the caller's
    business: uint8 for p = 2 (pure xor updates), int16 otherwise.
    """
    m = R.shape[0]
    piv = []
    r = 0
    if p == 2:
        for c in range(ncols):
            if r == m:
                break
            nz = np.nonzero(R[r:, c])[0]
            if nz.size == 0:
                continue
            pr = r + int(nz[0])
            if pr != r:
                R[[r, pr]] = R[[pr, r]]
            rows = r + 1 + np.nonzero(R[r + 1:, c])[0]
            if rows.size:
                R[rows, c:] ^= R[r, c:]
            piv.append((r, c))
            r += 1
        return piv
    table, off = _mod_table(p)
    for c in range(ncols):
        if r == m:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            R[[r, pr]] = R[[pr, r]]
        v = int(R[r, c])
        if v != 1:
            R[r, c:] = R[r, c:] * pow(v, -1, p) % p
        col = R[r + 1:, c]
        rows = np.nonzero(col)[0]
        if rows.size:
            rows = r + 1 + rows
            sub = R[rows, c:] - np.outer(R[rows, c], R[r, c:])
            R[rows, c:] = table[sub + off]
        piv.append((r, c))
        r += 1
    return piv


def solve_many(A, B, p: int):
    """Solutions of A x = b for every column b of B, sharing one
    elimination.  Returns a list with an int64 vector (free variables
    zero) per consistent column and None per inconsistent one.
    """
    A = _as_fp(A, p)
    B = np.array(B, dtype=np.int64) % p
    if B.ndim == 1:
        B = B[:, None]
    m, n = A.shape
    nb = B.shape[1]
    if B.shape[0] != m:
        raise ValueError("shape mismatch in solve_many")
    if p == 2:
        R = np.concatenate([A, B], axis=1).astype(np.uint8)
    elif p <= 181:
        R = np.concatenate([A, B], axis=1).astype(np.int16)
    else:
        # primes past the int16 product range take the generic rref,
        # one target at a time so pivots in a target column cannot
        # contaminate its neighbours
        sols = []
        for t in range(nb):
            Rb, pivb = rref(np.concatenate([A, B[:, t:t + 1]], axis=1), p)
            if n in pivb:
                sols.append(None)
                continue
            x = np.zeros(n, dtype=np.int64)
            for row, c in enumerate(pivb):
                x[c] = Rb[row, n]
            sols.append(x)
        return sols
    piv = _forward_eliminate(R, p, n)
    npiv = len(piv)
    # rows past the pivots are zero in the A block (entries stay
    # reduced throughout), so a target is consistent exactly when its
    # column is zero there
    tail = R[npiv:, n:]
    ok = ~np.any(tail, axis=0) if tail.size else np.ones(nb, dtype=bool)
    if npiv == 0:
        return [np.zeros(n, dtype=np.int64) if ok[t] else None for t in range(nb)]
    pivrows = np.array([r for r, _ in piv])
    pivcols = np.array([c for _, c in piv])
    U = R[pivrows[:, None], pivcols[None, :]].astype(np.int64)
    Bp = R[pivrows, n:].astype(np.int64)
    X = np.zeros((npiv, nb), dtype=np.int64)
    for i in range(npiv - 1, -1, -1):
        acc = Bp[i].copy()
        if i + 1 < npiv:
            acc -= U[i, i + 1:] @ X[i + 1:]
        X[i] = acc % p
    out = []
    for t in range(nb):
        if not ok[t]:
            out.append(None)
            continue
        x = np.zeros(n, dtype=np.int64)
        x[pivcols] = X[:, t]
        out.append(x)
    return out


def solve(A, b, p: int):
    """One solution x of A x = b mod p, or None if inconsistent.

    Free variables are set to zero.
    """
    b = np.array(b, dtype=np.int64).reshape(-1)
    return solve_many(A, b[:, None], p)[0]


def kernel(A, p: int) -> np.ndarray:
    """Basis of the right null space, one vector per row; shape (d, n)."""
    A = _as_fp(A, p)
    n = A.shape[1]
    R, piv = rref(A, p)
    free = [c for c in range(n) if c not in piv]
    out = np.zeros((len(free), n), dtype=np.int64)
    for k, fc in enumerate(free):
        out[k, fc] = 1
        for row, c in enumerate(piv):
            out[k, c] = (-R[row, fc]) % p
    return out


def inv(A, p: int) -> np.ndarray:
    A = _as_fp(A, p)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("inverse of a non-square matrix")
    aug = np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1)
    R, piv = rref(aug, p)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular mod p")
    return R[:, n:]


def in_colspace(A, b, p: int) -> bool:
    return solve(A, b, p) is not None
