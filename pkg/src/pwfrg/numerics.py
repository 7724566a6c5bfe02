"""Dense real linear algebra and the Lanczos ground-state solver."""
from __future__ import annotations

from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import (AllSingularValuesCut, NoConvergence, NonFinite,
                     NonSymmetric, ZeroStartVector)

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 500
DEFAULT_PINV_EPS = 1e-8


class SpectralDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


class LanczosResult(NamedTuple):
    energy: float
    vector: np.ndarray
    iterations: int
    ritz_values: np.ndarray
    residual: float


def _check_finite(M, what="matrix"):
    if not np.all(np.isfinite(M)):
        raise NonFinite(f"{what} contains NaN or Inf")


def fix_sign_gauge(vectors):
    """Flip columns in place so that each largest-magnitude entry is positive.

    ``argmax`` returns the first maximal index, so exact magnitude ties are
    resolved in favour of the lowest row.
    """
    if vectors.ndim == 1:
        if vectors.size and vectors[np.argmax(np.abs(vectors))] < 0:
            vectors *= -1.0
        return vectors
    if vectors.shape[1] == 0:
        return vectors
    rows = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[rows, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors *= signs
    return vectors


def sym_eig_desc(M, sym_tol: float = 1e-12) -> SpectralDecomposition:
    """Eigen-decomposition of a real symmetric matrix, largest value first.

    Eigenvectors carry the sign gauge of :func:`fix_sign_gauge`. Raises
    :class:`NonSymmetric` if ``M`` deviates from its transpose by more than
    ``sym_tol`` relative to its largest entry.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NonSymmetric(f"expected a square matrix, got shape {M.shape}")
    _check_finite(M)
    scale = max(np.max(np.abs(M), initial=0.0), 1e-300)
    if np.max(np.abs(M - M.T), initial=0.0) > sym_tol * scale:
        raise NonSymmetric("matrix is not symmetric within tolerance")
    w, v = np.linalg.eigh(0.5 * (M + M.T))
    w = w[::-1].copy()
    v = np.ascontiguousarray(v[:, ::-1])
    fix_sign_gauge(v)
    return SpectralDecomposition(w, v)


def pinv_cutoff(M, eps_rel: float = DEFAULT_PINV_EPS) -> np.ndarray:
    """Moore-Penrose inverse after zeroing singular values below
    ``eps_rel * s_max``."""
    M = np.asarray(M, dtype=float)
    _check_finite(M)
    if eps_rel <= 0:
        raise ValueError("eps_rel must be positive")
    if M.size == 0:
        raise AllSingularValuesCut("empty matrix")
    u, s, vt = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0.0:
        raise AllSingularValuesCut("matrix is identically zero")
    keep = s >= eps_rel * s[0]
    return (vt[keep].T / s[keep]) @ u[:, keep].T


def _lowest_ritz(alphas, betas):
    k = len(alphas)
    if k == 1:
        return np.array([alphas[0]]), np.ones((1, 1))
    hi = min(1, k - 1)
    vals, vecs = eigh_tridiagonal(np.asarray(alphas), np.asarray(betas),
                                  select="i", select_range=(0, hi))
    return vals, vecs


def _single_step(apply, v, previous):
    basis = [v]
    images = [np.asarray(apply(v), dtype=float)]
    basis.append(images[0])
    if previous is not None:
        basis.append(np.asarray(previous, dtype=float))
    Q, R = np.linalg.qr(np.column_stack(basis))
    diag = np.abs(np.diag(R))
    Q = Q[:, diag > 1e-12 * max(diag[0], 1e-300)]
    # A applied to each orthonormal direction; the first is already known
    AQ = np.empty_like(Q)
    AQ[:, 0] = images[0] * float(Q[:, 0] @ v)
    for j in range(1, Q.shape[1]):
        AQ[:, j] = apply(Q[:, j])
    Hs = Q.T @ AQ
    w, y = np.linalg.eigh(0.5 * (Hs + Hs.T))
    x = Q @ y[:, 0]
    Ax = AQ @ y[:, 0]
    nrm = np.linalg.norm(x)
    x /= nrm
    Ax /= nrm
    res = float(np.linalg.norm(Ax - w[0] * x))
    return LanczosResult(float(w[0]), x, Q.shape[1], w, res)


def lanczos_ground(apply: Callable[[np.ndarray], np.ndarray], start,
                   tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                   mode: str = "converge",
                   previous: Optional[np.ndarray] = None) -> LanczosResult:
    """Lowest eigenpair of a symmetric operator given as a callback.

    In ``converge`` mode a Lanczos recursion with full reorthogonalization
    runs until ``||A x - E x|| <= tol * max(1, |E|)``; when the Krylov space
    fills up (or hits ``max_iter`` total) without reaching the tolerance it
    restarts from the current Ritz vector. ``single_step`` performs one
    Krylov expansion and returns the Rayleigh-Ritz optimum in
    ``span{start, A start}`` (plus ``previous`` when given).

    ``iterations`` counts operator applications.
    """
    v = np.array(start, dtype=float).ravel()
    _check_finite(v, "start vector")
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ZeroStartVector("Lanczos start vector is zero")
    v /= nrm
    if mode == "single_step":
        return _single_step(apply, v, previous)
    if mode != "converge":
        raise ValueError(f"unknown Lanczos mode {mode!r}")

    n = v.size
    total = 0
    best = None
    while True:
        capacity = min(n, max_iter - total)
        if capacity <= 0:
            raise NoConvergence(
                f"Lanczos did not converge in {max_iter} iterations", best=best)
        V = np.empty((capacity, n))
        W = np.empty((capacity, n))
        alphas, betas = [], []
        V[0] = v
        for j in range(capacity):
            w = np.asarray(apply(V[j]), dtype=float).ravel()
            W[j] = w
            total += 1
            alpha = float(V[j] @ w)
            alphas.append(alpha)
            r = w - alpha * V[j]
            if j > 0:
                r -= betas[-1] * V[j - 1]
            for _ in range(2):
                r -= V[:j + 1].T @ (V[:j + 1] @ r)
            beta = float(np.linalg.norm(r))

            ritz, y = _lowest_ritz(alphas, betas)
            theta = float(ritz[0])
            y0 = y[:, 0]
            x = y0 @ V[:j + 1]
            Ax = y0 @ W[:j + 1]
            xn = np.linalg.norm(x)
            x /= xn
            Ax /= xn
            res = float(np.linalg.norm(Ax - theta * x))
            best = LanczosResult(theta, x, total, ritz, res)
            if res <= tol * max(1.0, abs(theta)):
                return best
            if beta <= 1e-14 * max(1.0, abs(theta)) or j + 1 == capacity:
                break
            betas.append(beta)
            V[j + 1] = r / beta
        if total >= max_iter:
            raise NoConvergence(
                f"Lanczos did not converge in {max_iter} iterations", best=best)
        v = best.vector.copy()
