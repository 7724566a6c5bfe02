"""Brute-force reference calculations in the full 2^(2N) spin space.

Full state vectors are indexed with site 1 as the most significant bit, so
``psi.reshape([2] * L)`` has one axis per site in chain order. Bit value 0
is spin up.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .errors import SizeTooLarge
from .kernels import heisenberg_apply
from .model import ModelSpec, couplings
from .numerics import DEFAULT_PINV_EPS, fix_sign_gauge, pinv_cutoff
from .predictor import pad_state

MAX_SITES = 20
MAX_MCCULLOCH_SITES = 16
_DENSE_LIMIT = 10


def _check_size(two_n, cap=MAX_SITES):
    if two_n > cap:
        raise SizeTooLarge(f"{two_n} sites exceeds the oracle cap of {cap}")
    if two_n < 2:
        raise ValueError("need at least two sites")


def full_apply(spec: ModelSpec, two_n: int, x) -> np.ndarray:
    _check_size(two_n)
    return heisenberg_apply(np.asarray(x, dtype=float), couplings(spec, two_n))


def full_matrix(spec: ModelSpec, two_n: int) -> np.ndarray:
    _check_size(two_n, 12)
    dim = 1 << two_n
    H = np.empty((dim, dim))
    for k, col in enumerate(np.eye(dim)):
        H[:, k] = full_apply(spec, two_n, col)
    return H


def ed_ground(spec: ModelSpec, two_n: int):
    """Lowest eigenpair of the open chain; vector gauge: largest entry positive."""
    _check_size(two_n)
    if two_n <= _DENSE_LIMIT:
        w, v = np.linalg.eigh(full_matrix(spec, two_n))
        e0, vec = float(w[0]), v[:, 0].copy()
    else:
        dim = 1 << two_n
        op = LinearOperator((dim, dim), matvec=lambda x: full_apply(spec, two_n, x),
                            dtype=float)
        v0 = np.random.default_rng(0).standard_normal(dim)
        w, v = eigsh(op, k=1, which="SA", v0=v0, tol=0)
        e0, vec = float(w[0]), v[:, 0].copy()
    vec /= np.linalg.norm(vec)
    return e0, fix_sign_gauge(vec)


def raw_predict(psi_small, pad: str = "singlet") -> np.ndarray:
    """Pad a ``2N-2`` site state with two fixed spins at each end.

    The right pad is the mirror image of the left one: with ``p`` over
    (outer, inner) spins, sites ``2N+1, 2N+2`` carry ``p(inner, outer)``.
    """
    psi_small = np.asarray(psi_small, dtype=float).ravel()
    n_small = int(np.log2(psi_small.size))
    _check_size(n_small + 4)
    p = pad_state(pad)
    right = p.reshape(2, 2).T.ravel()
    out = np.kron(np.kron(p, psi_small), right)
    return out / np.linalg.norm(out)


def raw_mcculloch(psi_small, psi_now, eps_rel: float = DEFAULT_PINV_EPS
                  ) -> np.ndarray:
    """``Phi_L pinv(Psi_small) Phi_R`` with the cut of ``psi_now`` moved one
    site right (``Phi_L``) and one site left (``Phi_R``)."""
    psi_small = np.asarray(psi_small, dtype=float).ravel()
    psi_now = np.asarray(psi_now, dtype=float).ravel()
    two_n = int(np.log2(psi_now.size))
    if int(np.log2(psi_small.size)) != two_n - 2:
        raise ValueError("psi_small must have two sites fewer than psi_now")
    _check_size(two_n + 2, MAX_MCCULLOCH_SITES)
    n = two_n // 2
    half = 1 << (n - 1)
    inv = pinv_cutoff(psi_small.reshape(half, half), eps_rel)
    phi_l = psi_now.reshape(1 << (n + 1), half)
    phi_r = psi_now.reshape(half, 1 << (n + 1))
    out = (phi_l @ inv @ phi_r).ravel()
    return out / np.linalg.norm(out)


def left_chain(isometries) -> np.ndarray:
    """Compose ``A_1 .. A_k`` into a ``2^k x d_k`` map from raw sites 1..k."""
    U = np.asarray(isometries[0], dtype=float)
    for A in isometries[1:]:
        d = U.shape[1]
        U = (U @ A.reshape(d, 2 * A.shape[1])).reshape(-1, A.shape[1])
    return U


def right_chain(isometries) -> np.ndarray:
    """Compose ``B_1 .. B_k``; rows run over the raw right sites in chain
    order (innermost first, the outermost site is the least significant)."""
    V = np.asarray(isometries[0], dtype=float)
    for B in isometries[1:]:
        d = V.shape[1]
        B3 = B.reshape(d, 2, B.shape[1])
        V = np.einsum("rq,qsk->srk", V, B3).reshape(-1, B.shape[1])
    return V


def expand_center(psi, U, V) -> np.ndarray:
    """Raw-space state from a center tensor and the block maps around it."""
    t = np.tensordot(U, psi, axes=(1, 0))
    t = np.tensordot(t, V, axes=(3, 1))
    return t.ravel()


def block_transform(raw, U, V) -> np.ndarray:
    """Project a raw state onto ``U`` (left sites) and ``V`` (right sites),
    leaving the two center spins raw."""
    raw = np.asarray(raw, dtype=float).ravel()
    t = raw.reshape(U.shape[0], 2, 2, V.shape[0])
    t = np.tensordot(U.T, t, axes=(1, 0))
    return np.tensordot(t, V, axes=(3, 0))
