"""Small dense/sparse linear-algebra kernels shared by the solvers."""

from __future__ import annotations

import numpy as np


def pcg(A, B: np.ndarray, diag: np.ndarray, tol: float = 1e-10, maxiter: int | None = None,
        x0: np.ndarray | None = None):
    """Jacobi-preconditioned conjugate gradients on the columns of ``B``.

    Columns are solved one after another, each to its own tolerance (``tol``
    is a scalar or one value per column).  Returns
    ``(X, max_iterations_over_columns, relative_residuals)``.
    """
    B = np.asarray(B, dtype=float)
    vector = B.ndim == 1
    # work on rows: one contiguous right-hand side per row
    Bt = np.ascontiguousarray(B.reshape(len(B), -1).T)
    k, n = Bt.shape
    maxiter = maxiter or 10 * n
    X = np.zeros((k, n)) if x0 is None else np.ascontiguousarray(np.asarray(x0, dtype=float).reshape(n, k).T)
    R = Bt - _apply(A, X)
    inv_d = 1.0 / diag
    Z = R * inv_d
    P = Z.copy()
    rz = np.einsum("ij,ij->i", R, Z)
    bnorm = np.sqrt(np.einsum("ij,ij->i", Bt, Bt))
    bnorm[bnorm == 0] = 1.0
    tol = np.broadcast_to(np.asarray(tol, dtype=float), (k,))
    rel = np.sqrt(np.einsum("ij,ij->i", R, R)) / bnorm
    it = 0
    for c in range(k):
        if rel[c] <= tol[c]:
            continue
        x, r, z, p = X[c], R[c], Z[c], P[c]
        rzc, bn, tc = rz[c], bnorm[c], tol[c]
        j = 0
        while j < maxiter:
            j += 1
            ap = A @ p
            pap = p @ ap
            if pap <= 0:
                break
            alpha = rzc / pap
            x += alpha * p
            r -= alpha * ap
            rel[c] = np.sqrt(r @ r) / bn
            if rel[c] <= tc:
                break
            np.multiply(r, inv_d, out=z)
            rz_new = r @ z
            p *= rz_new / rzc
            p += z
            rzc = rz_new
        it = max(it, j)
    if vector:
        return X[0], it, float(rel[0])
    return X.T.copy(), it, rel


def _apply(A, X: np.ndarray) -> np.ndarray:
    """A applied to each row of X."""
    return np.ascontiguousarray((A @ X.T).T)
