"""Trial wave functions for the next growth step.

The PWFRG prediction shifts a converged center tensor two steps back onto
the current block bases through the shift matrices ``L`` and ``R``::

    trial(xi_N, s, sb, xib_N) = sum L(xi_N, a) psi_small(a, s, sb, b) R(xib_N, b)

where ``L`` is the overlap between the ``N``-site block basis and the
``(N-2)``-site block basis with two extra spins in a fixed pad state placed
at the outer edge.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import DimensionMismatch, NotNormalized, ZeroNorm
from .numerics import DEFAULT_PINV_EPS, pinv_cutoff

_S2 = np.sqrt(0.5)
PAD_STATES = {
    # uniform 1/sqrt(2) amplitude per padded spin
    "uniform": np.full(4, 0.5),
    "singlet": np.array([0.0, _S2, -_S2, 0.0]),
}
ZERO_NORM_TOL = 1e-12


def pad_state(kind: str = "singlet") -> np.ndarray:
    """Two-spin state over ``(outer spin, inner spin)``."""
    try:
        return PAD_STATES[kind].copy()
    except KeyError:
        raise ValueError(f"unknown pad state {kind!r}") from None


@dataclass(frozen=True)
class ShiftMatrices:
    L: np.ndarray
    R: np.ndarray
    n: int


@dataclass(frozen=True)
class TrialWaveFunction:
    psi: np.ndarray
    kind: str
    source_sizes: Tuple[int, int]


def _init_one(X2, X3, p):
    if X2.shape[0] != 4:
        raise DimensionMismatch(f"two-site isometry must have 4 rows, got {X2.shape}")
    d2 = X2.shape[1]
    if X3.shape[0] != 2 * d2:
        raise DimensionMismatch(
            f"three-site isometry rows {X3.shape[0]} != 2 * {d2}")
    edge = X2.T @ p
    return np.einsum("ask,a->ks", X3.reshape(d2, 2, -1), edge)


def init_shift(A2, A3, B2, B3, pad: str = "singlet") -> ShiftMatrices:
    """Shift matrices for ``N = 3``, mapping the one-site basis into ``xi_3``."""
    p = pad_state(pad)
    return ShiftMatrices(_init_one(A2, A3, p), _init_one(B2, B3, p), 3)


def _update_one(L, Xn, Xp):
    dN, dS = L.shape
    if Xn.shape[0] != 2 * dN or Xp.shape[0] != 2 * dS:
        raise DimensionMismatch(
            f"shift matrix {L.shape} incompatible with isometries "
            f"{Xn.shape}, {Xp.shape}")
    tmp = L @ Xp.reshape(dS, 2 * Xp.shape[1])
    return Xn.T @ tmp.reshape(2 * dN, Xp.shape[1])


def update_shift(S: ShiftMatrices, A_next, A_prev_small, B_next,
                 B_prev_small) -> ShiftMatrices:
    """One step of ``L_{N+1} = sum_s A_{N+1}^T L_N A_{N-1}`` (and ``R``)."""
    return ShiftMatrices(_update_one(S.L, A_next, A_prev_small),
                         _update_one(S.R, B_next, B_prev_small), S.n + 1)


def _normalized(t, kind, sizes):
    nrm = np.linalg.norm(t)
    if not nrm > ZERO_NORM_TOL:
        raise ZeroNorm(f"{kind} trial has norm {nrm}")
    return TrialWaveFunction(t / nrm, kind, sizes)


def pwfrg_predict(S: ShiftMatrices, psi_small) -> TrialWaveFunction:
    psi_small = np.asarray(psi_small, dtype=float)
    if abs(np.linalg.norm(psi_small) - 1.0) > 1e-8:
        raise NotNormalized("small-system center tensor is not normalized")
    if (psi_small.ndim != 4 or S.L.shape[1] != psi_small.shape[0]
            or S.R.shape[1] != psi_small.shape[3]):
        raise DimensionMismatch(
            f"shift matrices {S.L.shape}/{S.R.shape} do not fit {psi_small.shape}")
    t = np.tensordot(S.L, psi_small, axes=(1, 0))
    t = np.tensordot(t, S.R, axes=(3, 1))
    n = S.n
    return _normalized(t, "pwfrg", (2 * n - 2, 2 * n))


def fidelity_error(trial, converged) -> float:
    """``1 - |<trial|converged>|`` for unit vectors, clipped to [0, 1]."""
    a = trial.psi if isinstance(trial, TrialWaveFunction) else trial
    a = np.asarray(a, dtype=float)
    b = np.asarray(converged, dtype=float)
    if a.size != b.size:
        raise DimensionMismatch(f"sizes {a.size} and {b.size} differ")
    ov = abs(float(a.ravel() @ b.ravel()))
    return min(1.0, max(0.0, 1.0 - ov))


def mcculloch_predict(Lambda_now, A_now, B_now, Lambda_prev,
                      eps_rel: float = DEFAULT_PINV_EPS,
                      left_match: Optional[np.ndarray] = None,
                      right_match: Optional[np.ndarray] = None,
                      two_n: Optional[int] = None) -> TrialWaveFunction:
    """Rotate the center one site in each direction around an inverted
    earlier center matrix.

    ``trial(xi, s, sb, xib) = Lam(xi, ab) B(b s, ab) Lam_prev^+(b, a)
    A(a sb, al) Lam(al, xib)``. ``left_match``/``right_match`` relate the
    bases of ``Lambda_prev`` to those of ``A_now``/``B_now`` (rows: bases of
    ``Lambda_prev``); they are the identity for a single growth run.
    ``two_n`` is the size of the system ``Lambda_now`` belongs to.
    """
    lam = np.asarray(Lambda_now, dtype=float)
    inv = pinv_cutoff(Lambda_prev, eps_rel)
    if left_match is not None:
        inv = inv @ left_match
    if right_match is not None:
        inv = right_match.T @ inv
    dN, dNb = lam.shape
    da, db = inv.shape[1], inv.shape[0]
    if (A_now.shape != (2 * da, dN) or B_now.shape != (2 * db, dNb)):
        raise DimensionMismatch(
            f"A {A_now.shape}, B {B_now.shape} incompatible with "
            f"Lambda {lam.shape} and inverse {inv.shape}")
    A3 = A_now.reshape(da, 2, dN)
    B3 = B_now.reshape(db, 2, dNb)
    X = np.tensordot(lam, B3, axes=(1, 2))          # (xi, b, s)
    Y = np.tensordot(X, inv, axes=(1, 0))           # (xi, s, a)
    Z = np.tensordot(Y, A3, axes=(2, 0))            # (xi, s, sb, al)
    T = np.tensordot(Z, lam, axes=(3, 0))           # (xi, s, sb, xib)
    sizes = (two_n - 2, two_n) if two_n else (0, 0)
    return _normalized(T, "mcculloch", sizes)
