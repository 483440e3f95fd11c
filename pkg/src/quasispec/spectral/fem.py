"""P1 finite elements for the Neumann Laplacian and its first nontrivial eigenvalue."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .._linalg import pcg
from ..geometry import TriMesh


class EigenError(RuntimeError):
    """Raised with ``code`` NON_CONVERGED or DISCONNECTED_MESH."""

    def __init__(self, code: str, message: str, residual: float | None = None):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.residual = residual


@dataclass
class EigenResult:
    mu1: float
    residual: float
    dofs: int
    h: float
    iterations: int = 0
    inner_iterations: int = 0
    mu2: float | None = None
    orthogonality: float = 0.0
    vector: np.ndarray | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "mu1": self.mu1,
            "residual": self.residual,
            "dofs": self.dofs,
            "h": self.h,
            "iterations": self.iterations,
            "inner_iterations": self.inner_iterations,
            "mu2": self.mu2,
            "orthogonality": self.orthogonality,
        }


def element_matrices(p: np.ndarray):
    """Stiffness and consistent mass blocks for triangles ``p`` of shape (T, 3, 2).

    Returns arrays of shape (T, 3, 3).
    """
    # edge opposite vertex i, rotated by 90 degrees, is 2 * area * grad(lambda_i)
    e = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1)
    area = 0.5 * (e[:, 2, 0] * (-e[:, 1, 1]) - e[:, 2, 1] * (-e[:, 1, 0]))
    if np.any(area <= 0):
        bad = int(np.flatnonzero(area <= 0)[0])
        raise EigenError("DEGENERATE_ELEMENT", f"triangle {bad} has non-positive area")
    ke = np.einsum("tik,tjk->tij", e, e) / (4.0 * area)[:, None, None]
    me = (area / 12.0)[:, None, None] * (np.ones((3, 3)) + np.eye(3))
    return ke, me, area


def assemble_p1(mesh: TriMesh):
    """Global stiffness and consistent mass matrices (CSR, natural boundary)."""
    t = mesh.triangles
    ke, me, _ = element_matrices(mesh.nodes[t])
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    n = mesh.n_nodes
    K = sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((me.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    K.sum_duplicates()
    M.sum_duplicates()
    return K, M


def rayleigh(u: np.ndarray, stiffness, mass) -> float:
    return float(u @ (stiffness @ u)) / float(u @ (mass @ u))


def neumann_mu1(mesh: TriMesh, tol: float = 1e-8, block: int = 6, maxiter: int = 500,
                inner_tol: float = 1e-10, seed: int = 0) -> EigenResult:
    """Smallest nonzero eigenvalue of K u = mu M u.

    Block shift-invert iteration on (K + sigma M) with
    sigma = 1e-3 * trace(K) / dofs.  The constant mode is removed by an
    M-orthogonal projection after every solve, and each sweep ends with a
    Rayleigh-Ritz step on the block.  Inner solves use Jacobi-PCG; only the
    leading Ritz vector is solved to ``inner_tol``, the rest of the block
    just accelerates convergence and gets a loose tolerance.
    """
    K, M = assemble_p1(mesh)
    n = mesh.n_nodes
    b = max(1, min(block, n - 2))
    sigma = 1e-3 * K.diagonal().sum() / n
    A = (K + sigma * M).tocsr()
    diag = A.diagonal()
    m1 = M @ np.ones(n)
    total = m1.sum()

    def deflate(X):
        return X - np.outer(np.ones(n), (m1 @ X) / total)

    rng = np.random.default_rng(seed)
    X = deflate(rng.standard_normal((n, b)))
    col_tol = np.full(b, max(inner_tol, 1e-4))
    col_tol[0] = inner_tol
    residual = np.inf
    theta = None
    guess = None
    it = 0
    inner = 0
    for it in range(1, maxiter + 1):
        Y, k, _ = pcg(A, M @ X, diag, tol=col_tol, x0=guess)
        inner += k
        Y = deflate(Y)
        KY, MY = K @ Y, M @ Y
        kr, mr = Y.T @ KY, Y.T @ MY
        kr, mr = 0.5 * (kr + kr.T), 0.5 * (mr + mr.T)
        theta, C = scipy.linalg.eigh(kr, mr)
        X = Y @ C
        # Ritz pairs give a near-exact start for the next inner solve
        guess = X / (theta + sigma)
        u = X[:, 0]
        mu = theta[0]
        residual = float(np.linalg.norm(K @ u - mu * (M @ u)) / np.sqrt(u @ (M @ u)))
        if residual <= tol:
            break
    else:
        raise EigenError("NON_CONVERGED", f"residual {residual:.3e} after {maxiter} sweeps", residual)
    if theta[0] < 1e-10:
        raise EigenError("DISCONNECTED_MESH", f"second zero eigenvalue ({theta[0]:.3e})")
    u = X[:, 0] / np.sqrt(X[:, 0] @ (M @ X[:, 0]))
    mu1 = rayleigh(u, K, M)
    ortho = abs(float(m1 @ u)) / np.sqrt(total)
    return EigenResult(
        mu1=mu1,
        residual=residual,
        dofs=n,
        h=mesh.max_edge_length(),
        iterations=it,
        inner_iterations=inner,
        mu2=float(theta[1]) if len(theta) > 1 else None,
        orthogonality=ortho,
        vector=u,
    )
