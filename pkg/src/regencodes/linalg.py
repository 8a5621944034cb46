"""Dense matrix algebra over GF(2^q).

Matrices are plain 2-D numpy arrays of symbols (``field.dtype``); the
field is passed explicitly. ``apply`` is the workhorse for bulk data: it
multiplies a small coefficient matrix into a ``(b, stripes)`` array,
one stripe at a time.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import FieldError, SingularMatrixError
from .gf import FieldContext


def as_matrix(field: FieldContext, rows) -> np.ndarray:
    a = np.asarray(rows)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if a.size and (a.min() < 0 or a.max() >= field.size):
        raise FieldError(f"matrix entries must lie in [0, {field.size})")
    return a.astype(field.dtype)


def identity(field: FieldContext, n: int) -> np.ndarray:
    return np.eye(n, dtype=field.dtype)


def apply(field: FieldContext, coeffs: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Return ``coeffs @ rows`` where ``rows`` has shape ``(b, stripes)``.

    Column ``s`` of ``rows`` is one stripe's vector; the product is formed
    stripe by stripe as a vector times the transposed coefficient matrix.
    """
    coeffs = np.asarray(coeffs)
    a, b = coeffs.shape
    rows = np.asarray(rows)
    if rows.ndim != 2 or rows.shape[0] != b:
        raise ValueError(f"dimension mismatch: {coeffs.shape} x {rows.shape}")
    lg = np.ascontiguousarray(field.log_ext[coeffs.T])
    xt = np.ascontiguousarray(rows.T, dtype=field.dtype)
    return kernels.vecmat(lg, xt, field.log_ext, field.exp_ext, field.zero_log)


def mat_mul(field: FieldContext, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape} x {B.shape}")
    return apply(field, A, np.asarray(B, dtype=field.dtype))


def _row_reduce(field: FieldContext, M: np.ndarray, ncols: int):
    """Gauss-Jordan on the first ``ncols`` columns of ``M`` in place.

    Pivot rows are normalised to 1. Returns the list of pivot columns,
    whose length is the rank of the left block.
    """
    log_ext, exp_ext = field.log_ext, field.exp_ext
    nrows = M.shape[0]
    pivots = []
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(M[r:, col])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            M[[r, p]] = M[[p, r]]
        lead = int(M[r, col])
        if lead != 1:
            M[r] = exp_ext[log_ext[M[r]] + (field.order - int(log_ext[lead]))]
        targets = np.flatnonzero(M[:, col])
        targets = targets[targets != r]
        if targets.size:
            M[targets] ^= exp_ext[log_ext[M[targets, col]][:, None] + log_ext[M[r]][None, :]]
        pivots.append(col)
        r += 1
    return pivots


def mat_rank(field: FieldContext, A: np.ndarray) -> int:
    M = np.array(A, dtype=field.dtype)
    if M.size == 0:
        return 0
    return len(_row_reduce(field, M, M.shape[1]))


def mat_invert(field: FieldContext, A: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse; raises ``SingularMatrixError`` with the rank reached."""
    A = np.asarray(A)
    n, m = A.shape
    if n != m:
        raise ValueError(f"cannot invert a non-square {A.shape} matrix")
    aug = np.concatenate([A.astype(field.dtype), identity(field, n)], axis=1)
    pivots = _row_reduce(field, aug, n)
    if len(pivots) < n:
        raise SingularMatrixError(
            f"matrix is singular (rank {len(pivots)} < {n})", rank=len(pivots)
        )
    return np.ascontiguousarray(aug[:, n:])


def mat_solve(field: FieldContext, A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``A x = b`` for square nonsingular ``A``; ``b`` may be 1-D or 2-D."""
    A = np.asarray(A)
    b = np.asarray(b)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("mat_solve requires a square matrix")
    vec = b.ndim == 1
    rhs = b.reshape(n, -1).astype(field.dtype)
    aug = np.concatenate([A.astype(field.dtype), rhs], axis=1)
    pivots = _row_reduce(field, aug, n)
    if len(pivots) < n:
        raise SingularMatrixError(
            f"matrix is singular (rank {len(pivots)} < {n})", rank=len(pivots)
        )
    x = aug[:, n:]
    return x[:, 0].copy() if vec else x.copy()


def vandermonde(field: FieldContext, points, cols: int) -> np.ndarray:
    """Matrix with entry ``(i, j) = points[i] ** j``."""
    points = [int(x) for x in points]
    if len(set(points)) != len(points):
        raise FieldError("Vandermonde evaluation points must be distinct")
    if any(x == 0 for x in points):
        raise FieldError("Vandermonde evaluation points must be nonzero")
    V = np.zeros((len(points), cols), dtype=field.dtype)
    for i, x in enumerate(points):
        V[i] = [field.pow(x, j) for j in range(cols)]
    return V


def default_points(field: FieldContext, count: int, start: int = 0) -> list[int]:
    """The deterministic evaluation points ``g^start, ..., g^(start+count-1)``."""
    if start + count > field.order:
        raise FieldError(
            f"GF(2^{field.q}) has only {field.order} nonzero elements; "
            f"{start + count} distinct points requested"
        )
    return [field.exp(i) for i in range(start, start + count)]
