"""Dense linear algebra over GF(2^k), vectorized with numpy.

Matrices are 2-d int64 arrays of field elements.  For table-backed fields
(k <= 16) the row operations reduce to log/antilog lookups, which keeps
Gaussian elimination fast enough for the decoder systems used throughout
the package.
"""

from __future__ import annotations

import numpy as np

from .gf import BinaryField


def matmul(field: BinaryField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product over the field; a is (r, k), b is (k, c)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} x {b.shape}")
    exp, log = field._exp, field._log
    if exp is not None and a.shape[0] * a.shape[1] * b.shape[1] <= 200_000:
        prod = exp[log[a][:, :, None] + log[b][None, :, :]]
        prod[(a == 0)[:, :, None] | (b == 0)[None, :, :]] = 0
        return np.bitwise_xor.reduce(prod, axis=1)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for j in range(a.shape[1]):
        col = a[:, j]
        row = b[j]
        if not col.any() or not row.any():
            continue
        if exp is not None:
            prod = exp[log[col][:, None] + log[row][None, :]]
            prod[col == 0, :] = 0
            prod[:, row == 0] = 0
            out ^= prod
        else:
            out ^= field.mul_outer(col, row)
    return out


def matvec(field: BinaryField, a: np.ndarray, v: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64).reshape(-1)
    if field._exp is not None:
        nz = v != 0
        if not nz.any():
            return np.zeros(a.shape[0], dtype=np.int64)
        sub = a[:, nz]
        prod = field._exp[field._log[sub] + field._log[v[nz]][None, :]]
        prod[sub == 0] = 0
        return np.bitwise_xor.reduce(prod, axis=1)
    return matmul(field, a, v.reshape(-1, 1))[:, 0]


def apply_along_axis(field: BinaryField, m: np.ndarray, arr: np.ndarray, axis: int) -> np.ndarray:
    """Contract matrix m (out_dim, in_dim) with ``arr`` along ``axis``."""
    arr = np.asarray(arr, dtype=np.int64)
    moved = np.moveaxis(arr, axis, 0)
    lead = moved.shape[0]
    flat = moved.reshape(lead, -1)
    res = matmul(field, m, flat)
    res = res.reshape((m.shape[0],) + moved.shape[1:])
    return np.moveaxis(res, 0, axis)


def _scale_row(field: BinaryField, row: np.ndarray, c: int) -> np.ndarray:
    """c * row with c nonzero."""
    if field._exp is not None:
        out = field._exp[field._log[row] + field._log[c]]
        out[row == 0] = 0
        return out
    return field.mul_vec(row, np.int64(c))


def _outer_nonzero_col(field: BinaryField, col: np.ndarray, row: np.ndarray) -> np.ndarray:
    """Outer product col[i]*row[j] when every col[i] is nonzero."""
    if field._exp is not None:
        out = field._exp[field._log[col][:, None] + field._log[row][None, :]]
        out[:, row == 0] = 0
        return out
    return field.mul_outer(col, row)


def _eliminate(field: BinaryField, m: np.ndarray,
               forward_only: bool = False) -> tuple[np.ndarray, list[int]]:
    """In-place row reduction; returns (matrix, pivot column list).

    Full mode produces the reduced row echelon form.  ``forward_only``
    clears entries below each pivot only, which is enough for rank and
    pivot-column detection at roughly half the work.
    """
    rows, cols = m.shape
    exp, log = field._exp, field._log
    pivot_cols: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            m[[r, p]] = m[[p, r]]
        inv = field.inv(int(m[r, c]))
        if inv != 1:
            m[r] = _scale_row(field, m[r], inv)
        row = m[r]
        if forward_only:
            sub = m[r + 1 :]
            factors = sub[:, c]
        else:
            sub = m
            factors = m[:, c].copy()
            factors[r] = 0
        if factors.any():
            if exp is not None:
                prod = exp[log[factors][:, None] + log[row][None, :]]
                prod[factors == 0, :] = 0
                prod[:, row == 0] = 0
                sub ^= prod
            else:
                sub ^= field.mul_outer(factors, row)
        pivot_cols.append(c)
        r += 1
    return m, pivot_cols


def rank(field: BinaryField, m: np.ndarray) -> int:
    work = np.array(m, dtype=np.int64, copy=True)
    _, pivots = _eliminate(field, work, forward_only=True)
    return len(pivots)


def nullspace_vector(field: BinaryField, m: np.ndarray) -> np.ndarray | None:
    """One nonzero solution of m x = 0, or None if the kernel is trivial."""
    work = np.array(m, dtype=np.int64, copy=True)
    rows, cols = work.shape
    work, pivots = _eliminate(field, work)
    if len(pivots) == cols:
        return None
    pivot_set = set(pivots)
    free = next(c for c in range(cols) if c not in pivot_set)
    x = np.zeros(cols, dtype=np.int64)
    x[free] = 1
    for r, c in enumerate(pivots):
        # row r of the RREF reads x_c + work[r, free] * x_free = 0
        x[c] = int(work[r, free])
    return x


def solve(field: BinaryField, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Solve a x = b for square a; None when a is singular."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    n = a.shape[0]
    aug = np.concatenate([a, b], axis=1)
    aug, pivots = _eliminate(field, aug)
    if pivots != list(range(n)):
        return None
    return aug[:n, n].copy()


def invert(field: BinaryField, a: np.ndarray) -> np.ndarray | None:
    """Matrix inverse, or None if singular."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse requires a square matrix")
    aug = np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1)
    aug, pivots = _eliminate(field, aug)
    if pivots != list(range(n)):
        return None
    return aug[:, n:].copy()


def vandermonde(field: BinaryField, xs, width: int) -> np.ndarray:
    """V[i, j] = xs[i]^j for j < width."""
    return field.power_table(xs, width - 1)
