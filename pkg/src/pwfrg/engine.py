"""Infinite-system DMRG growth with wave-function prediction.

Layout conventions
------------------
A center tensor ``psi`` has shape ``(dL, 2, 2, dR)`` and indices
``(xi, sigma, sigma_bar, xi_bar)``: left block state, left center spin, right
center spin, right block state. Enlarged blocks use the combined index
``xi * 2 + sigma`` on both sides, so ``A`` and ``B`` isometries have rows
``(xi_old, sigma)`` and columns ``xi_new``.

Right blocks are labelled by distance from the right edge (``sigma_bar_i``
is site ``2N + 1 - i``). Because the chain length is even, the bond between
mirrored labels ``i`` and ``i + 1`` has the same strength as bond ``i``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Optional

import numpy as np

from . import predictor as pred
from .config import RunConfig
from .errors import (AllSingularValuesCut, DimensionMismatch,
                     InvalidDensityMatrix, NoConvergence, NotNormalized,
                     SiteNotAdjacent, ZeroNorm)
from .model import (SITE_LABELS, SM, SP, SZ, ModelSpec, bond_coupling,
                    bond_hamiltonian, center_bond_index)
from .numerics import (SpectralDecomposition, fix_sign_gauge, lanczos_ground,
                       sym_eig_desc)

log = logging.getLogger(__name__)

DEGENERACY_GAP = 1e-10
UNIFORM_PAD_MIX = 1e-6


@dataclass
class Block:
    """A left or right chain segment in a (possibly truncated) basis.

    ``sz``/``sp`` act on the innermost site of the segment; ``labels`` holds
    twice the S^z of every basis state.
    """
    side: str
    n_sites: int
    h: np.ndarray
    sz: np.ndarray
    sp: np.ndarray
    labels: np.ndarray

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    @property
    def sm(self) -> np.ndarray:
        return self.sp.T

    @property
    def site_range(self) -> range:
        return range(1, self.n_sites + 1)


def empty_block(side: str) -> Block:
    z = np.zeros((1, 1))
    return Block(side, 0, z.copy(), z.copy(), z.copy(), np.array([0]))


def enlarge(block: Block, new_site: int, spec: ModelSpec) -> Block:
    """Absorb the raw site ``new_site`` into ``block``; basis is ``(xi, sigma)``."""
    if new_site != block.n_sites + 1:
        raise SiteNotAdjacent(
            f"site {new_site} is not adjacent to a {block.side} block of "
            f"{block.n_sites} sites")
    eye = np.eye(block.dim)
    h = np.kron(block.h, np.eye(2))
    if block.n_sites >= 1:
        c = bond_coupling(spec, block.n_sites)
        h += c * (np.kron(block.sz, SZ)
                  + 0.5 * (np.kron(block.sp, SM) + np.kron(block.sm, SP)))
    labels = (block.labels[:, None] + SITE_LABELS[None, :]).ravel()
    return Block(block.side, new_site, h, np.kron(eye, SZ), np.kron(eye, SP),
                 labels)


def renormalize(block: Block, iso: np.ndarray, labels: np.ndarray) -> Block:
    if iso.shape[0] != block.dim:
        raise DimensionMismatch("isometry rows do not match block dimension")
    h = iso.T @ block.h @ iso
    return Block(block.side, block.n_sites, 0.5 * (h + h.T),
                 iso.T @ block.sz @ iso, iso.T @ block.sp @ iso,
                 np.asarray(labels))


def center_shape(left: Block, right: Block) -> tuple:
    return (left.dim // 2, 2, 2, right.dim // 2)


def as_matrix(psi: np.ndarray) -> np.ndarray:
    """Center tensor -> matrix over ``(xi sigma) x (xi_bar sigma_bar)``."""
    dl, _, _, dr = psi.shape
    return psi.transpose(0, 1, 3, 2).reshape(2 * dl, 2 * dr)


def from_matrix(M: np.ndarray) -> np.ndarray:
    DL, DR = M.shape
    return M.reshape(DL // 2, 2, DR // 2, 2).transpose(0, 1, 3, 2)


def superblock_apply(left: Block, right: Block, center_coupling: float,
                     x: np.ndarray) -> np.ndarray:
    """Apply the superblock Hamiltonian to ``x`` without forming it.

    ``left`` and ``right`` are enlarged blocks; the result has the shape of
    ``x``.
    """
    shape = center_shape(left, right)
    x = np.asarray(x, dtype=float)
    if x.size != left.dim * right.dim:
        raise DimensionMismatch(
            f"vector of size {x.size} does not fit superblock {shape}")
    X = x.reshape(shape)
    M = as_matrix(X)
    Y = from_matrix(left.h @ M + M @ right.h.T)
    hb = bond_hamiltonian(center_coupling)
    dl, _, _, dr = shape
    Z = hb @ X.transpose(1, 2, 0, 3).reshape(4, dl * dr)
    Y = Y + Z.reshape(2, 2, dl, dr).transpose(2, 0, 1, 3)
    return Y.reshape(x.shape)


def superblock_matrix(left: Block, right: Block,
                      center_coupling: float) -> np.ndarray:
    n = left.dim * right.dim
    H = np.empty((n, n))
    for k, col in enumerate(np.eye(n)):
        H[:, k] = superblock_apply(left, right, center_coupling, col)
    return 0.5 * (H + H.T)


def density_matrices(psi: np.ndarray):
    """Reduced density matrices of both halves of a normalized center tensor.

    ``rho_L`` lives on ``(xi, sigma)`` and ``rho_R`` on
    ``(xi_bar, sigma_bar)``.
    """
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-8:
        raise NotNormalized(f"center tensor has norm {nrm}")
    M = as_matrix(psi)
    rl = M @ M.T
    rr = M.T @ M
    return 0.5 * (rl + rl.T), 0.5 * (rr + rr.T)


class Truncation(NamedTuple):
    isometry: np.ndarray
    kept_weights: np.ndarray
    trunc_error: float
    labels: Optional[np.ndarray]
    spectrum: np.ndarray


def _sector_eig(rho, labels):
    values, vectors, order_labels = [], [], []
    D = rho.shape[0]
    for q in np.unique(labels):
        idx = np.flatnonzero(labels == q)
        w, v = sym_eig_desc(rho[np.ix_(idx, idx)])
        full = np.zeros((D, len(idx)))
        full[idx] = v
        values.append(w)
        vectors.append(full)
        order_labels.append(np.full(len(idx), q))
    w = np.concatenate(values)
    v = np.concatenate(vectors, axis=1)
    lab = np.concatenate(order_labels)
    order = np.argsort(-w, kind="stable")
    return SpectralDecomposition(w[order], v[:, order]), lab[order]


# eigenvalue round-off of a unit-trace density matrix
WEIGHT_NOISE = 1e-14


def _multiplet_cut(w, m, tol):
    k = m
    while k > 0 and w[k - 1] - w[k] <= tol * w[k - 1] + WEIGHT_NOISE:
        k -= 1
    # a single multiplet wider than m cannot be kept whole; split it
    return k if k > 0 else m


def truncation_operator(rho, m: int, degeneracy_tol: float = 1e-10,
                        labels=None) -> Truncation:
    """Keep at most ``m`` leading density-matrix eigenvectors.

    A cut that would fall inside a multiplet (neighbouring weights equal to
    relative precision ``degeneracy_tol``, or both at round-off level) is
    moved down so that the whole multiplet is
    discarded. When ``labels`` (twice S^z per basis state) are given the
    diagonalization is done sector by sector and the kept states carry
    definite quantum numbers.
    """
    rho = np.asarray(rho, dtype=float)
    tr = np.trace(rho)
    if abs(tr - 1.0) > 1e-8:
        raise InvalidDensityMatrix(f"trace is {tr}, expected 1")
    if labels is None:
        dec, lab = sym_eig_desc(rho), None
    else:
        labels = np.asarray(labels)
        if labels.shape != (rho.shape[0],):
            raise DimensionMismatch("labels do not match density matrix")
        dec, lab = _sector_eig(rho, labels)
    w = dec.values
    if w[-1] < -1e-10:
        raise InvalidDensityMatrix(f"negative eigenvalue {w[-1]}")
    D = len(w)
    k = D if m >= D else _multiplet_cut(w, m, degeneracy_tol)
    kept = w[:k].copy()
    err = max(0.0, 1.0 - float(np.sum(kept)))
    return Truncation(np.ascontiguousarray(dec.vectors[:, :k]), kept, err,
                      None if lab is None else lab[:k].copy(), w)


def center_matrix(psi, A, B) -> np.ndarray:
    """``Lambda = A^T psi B`` with psi viewed as a ``(xi sigma, xi_bar sigma_bar)``
    matrix. No diagonal form is assumed."""
    M = as_matrix(np.asarray(psi, dtype=float))
    if A.shape[0] != M.shape[0] or B.shape[0] != M.shape[1]:
        raise DimensionMismatch(
            f"isometries {A.shape}, {B.shape} do not fit psi {psi.shape}")
    return A.T @ M @ B


@dataclass
class StepRecord:
    two_n: int
    energy: float
    energy_per_site_est: float
    trunc_err_left: float
    trunc_err_right: float
    fidelity_error: Optional[float]
    lanczos_iterations: int
    m_kept_left: int
    m_kept_right: int
    degeneracy_flag: bool
    predictor_fallback_flag: bool


CSV_FIELDS = ("two_n", "energy", "energy_per_site_est", "trunc_err_left",
              "trunc_err_right", "fidelity_error", "lanczos_iterations",
              "m_kept_left", "m_kept_right", "degeneracy_flag",
              "predictor_fallback_flag")


@dataclass
class MpsRecord:
    """History of a growth run keyed by half size ``n`` (system of ``2n``).

    ``A[1]``/``B[1]`` are the trivial one-site transforms. ``Lambda[n]`` is
    normalized to unit Frobenius norm; the norm before normalization is kept
    in ``lambda_norm``.
    """
    A: dict = field(default_factory=dict)
    B: dict = field(default_factory=dict)
    Lambda: dict = field(default_factory=dict)
    lambda_norm: dict = field(default_factory=dict)
    psi: dict = field(default_factory=dict)
    trial: dict = field(default_factory=dict)
    spectrum_left: dict = field(default_factory=dict)
    spectrum_right: dict = field(default_factory=dict)
    trunc_left: dict = field(default_factory=dict)
    trunc_right: dict = field(default_factory=dict)
    energy: dict = field(default_factory=dict)
    sz_total: dict = field(default_factory=dict)
    shifts: dict = field(default_factory=dict)


class RunResult(NamedTuple):
    steps: list
    mps: MpsRecord


def _total_labels(left: Block, right: Block) -> np.ndarray:
    tot = left.labels[:, None] + right.labels[None, :]
    dl, dr = left.dim // 2, right.dim // 2
    return from_matrix(tot).reshape(dl, 2, 2, dr)


class InfiniteDMRG:
    """Grows an open chain two sites at a time from 2N = 4.

    ``grow()`` yields one :class:`StepRecord` per size; the isometries,
    center matrices and converged center tensors accumulate in ``mps``.
    """

    def __init__(self, config: RunConfig, keep_history: bool = True):
        self.config = config
        self.spec = ModelSpec(config.J, config.delta)
        self.mps = MpsRecord()
        self.steps: list = []
        self.keep_history = keep_history

    def _random_start(self, n, mask):
        rng = np.random.default_rng([self.config.seed, n])
        v = rng.standard_normal(mask.size)
        v[~mask] = 0.0
        return v / np.linalg.norm(v)

    def _predict(self, n):
        cfg = self.config
        mps = self.mps
        if cfg.predictor == "pwfrg":
            return pred.pwfrg_predict(mps.shifts[n - 1], mps.psi[n - 2])
        if cfg.predictor == "mcculloch":
            return pred.mcculloch_predict(mps.Lambda[n - 1], mps.A[n - 1],
                                          mps.B[n - 1], mps.Lambda[n - 2],
                                          cfg.pinv_eps, two_n=2 * n - 2)
        return None

    def _dense_ground(self, EL, ER, c, start):
        H = superblock_matrix(EL, ER, c)
        w, V = np.linalg.eigh(H)
        E0 = float(w[0])
        tol = DEGENERACY_GAP * max(1.0, abs(E0))
        ground = V[:, w <= w[0] + tol]
        degenerate = ground.shape[1] > 1
        if degenerate:
            psi = ground @ (ground.T @ start)
            psi /= np.linalg.norm(psi)
        else:
            psi = V[:, 0].copy()
        return E0, psi, degenerate

    def _solve(self, n, EL, ER, c, start, mode="converge"):
        cfg = self.config
        shape = center_shape(EL, ER)
        mask = (_total_labels(EL, ER) == 0).ravel()
        if cfg.sz_sector_restriction:
            size = shape[0] * shape[1] * shape[2] * shape[3]

            def op(v):
                full = np.zeros(size)
                full[mask] = v
                return superblock_apply(EL, ER, c, full)[mask]
            res = lanczos_ground(op, start[mask], cfg.lanczos_tol,
                                 cfg.lanczos_max_iter, mode)
            vec = np.zeros(size)
            vec[mask] = res.vector
            res = res._replace(vector=vec)
        else:
            res = lanczos_ground(lambda v: superblock_apply(EL, ER, c, v),
                                 start, cfg.lanczos_tol, cfg.lanczos_max_iter,
                                 mode)
        return res

    def grow(self) -> Iterator[StepRecord]:
        cfg = self.config
        spec = self.spec
        mps = self.mps
        left = enlarge(empty_block("left"), 1, spec)
        right = enlarge(empty_block("right"), 1, spec)
        mps.A[1] = np.eye(2)
        mps.B[1] = np.eye(2)
        prev_energy = None
        # single-step refinement only pays off once predictions are accurate
        stepping = False
        for n in range(2, cfg.two_n_max // 2 + 1):
            two_n = 2 * n
            EL = enlarge(left, n, spec)
            ER = enlarge(right, n, spec)
            c = bond_coupling(spec, center_bond_index(two_n))
            shape = center_shape(EL, ER)
            mask = (_total_labels(EL, ER) == 0).ravel()
            random_start = self._random_start(n, mask)
            fidelity = None
            fallback = False
            trial = None
            if n <= 3:
                energy, vec, degenerate = self._dense_ground(
                    EL, ER, c, random_start)
                iterations = 0
            else:
                start = random_start
                try:
                    trial = self._predict(n)
                except (ZeroNorm, AllSingularValuesCut) as exc:
                    log.info("predictor failed at 2N=%d: %s", two_n, exc)
                    fallback = True
                if trial is not None:
                    t = trial.psi.ravel().copy()
                    t[~mask] = 0.0
                    tn = np.linalg.norm(t)
                    if tn < 1e-8:
                        fallback = True
                        trial = None
                    else:
                        start = t / tn
                        if (cfg.predictor == "pwfrg"
                                and cfg.padding == "uniform"):
                            # that trial is pure spin 2; without a seed of
                            # other spins Lanczos never leaves that sector
                            start = start + UNIFORM_PAD_MIX * random_start
                mode = ("single_step" if stepping and trial is not None
                        else "converge")
                try:
                    res = self._solve(n, EL, ER, c, start, mode)
                except NoConvergence as exc:
                    exc.steps = list(self.steps)
                    raise
                energy, vec, iterations = res.energy, res.vector, res.iterations
                rv = res.ritz_values
                degenerate = bool(len(rv) > 1 and rv[1] - rv[0]
                                  <= DEGENERACY_GAP * max(1.0, abs(energy)))
                if trial is not None and mode == "converge":
                    fidelity = pred.fidelity_error(trial, vec.reshape(shape))
                    if (cfg.lanczos_mode == "single_step"
                            and fidelity <= cfg.single_step_after_fidelity):
                        stepping = True
            vec = fix_sign_gauge(vec / np.linalg.norm(vec))
            psi = vec.reshape(shape)

            rho_l, rho_r = density_matrices(psi)
            tl = truncation_operator(rho_l, cfg.m_max, cfg.degeneracy_tol,
                                     EL.labels)
            tr = truncation_operator(rho_r, cfg.m_max, cfg.degeneracy_tol,
                                     ER.labels)
            A, B = tl.isometry, tr.isometry
            lam = center_matrix(psi, A, B)
            lam_norm = float(np.linalg.norm(lam))
            mps.A[n], mps.B[n] = A, B
            mps.Lambda[n] = lam / lam_norm
            mps.lambda_norm[n] = lam_norm
            mps.psi[n] = psi
            if trial is not None:
                mps.trial[n] = trial.psi
            mps.spectrum_left[n] = tl.spectrum
            mps.spectrum_right[n] = tr.spectrum
            mps.trunc_left[n] = tl.trunc_error
            mps.trunc_right[n] = tr.trunc_error
            mps.energy[n] = energy
            mps.sz_total[n] = 0.5 * float(
                np.sum(psi.ravel() ** 2 * _total_labels(EL, ER).ravel()))
            if n == 3:
                mps.shifts[3] = pred.init_shift(mps.A[2], A, mps.B[2], B,
                                                pad=cfg.padding)
            elif n > 3:
                mps.shifts[n] = pred.update_shift(mps.shifts[n - 1], A,
                                                  mps.A[n - 2], B,
                                                  mps.B[n - 2])
            if not self.keep_history:
                self._forget(n)

            if prev_energy is None:
                e_site = energy / two_n
            else:
                e_site = 0.5 * (energy - prev_energy)
            prev_energy = energy
            rec = StepRecord(two_n, energy, e_site, tl.trunc_error,
                             tr.trunc_error, fidelity, iterations,
                             A.shape[1], B.shape[1], degenerate, fallback)
            self.steps.append(rec)
            left = renormalize(EL, A, tl.labels)
            right = renormalize(ER, B, tr.labels)
            yield rec

    def _forget(self, n):
        # predictors need the last two sizes; the shift recursion needs A/B two back
        old = n - 3
        if old < 2:
            return
        for d in (self.mps.A, self.mps.B, self.mps.Lambda, self.mps.psi,
                  self.mps.trial, self.mps.shifts):
            d.pop(old, None)

    def run(self, on_step: Optional[Callable[[StepRecord], None]] = None
            ) -> RunResult:
        for rec in self.grow():
            if on_step is not None:
                on_step(rec)
        return RunResult(self.steps, self.mps)


def idmrg_run(config: RunConfig, on_step=None) -> RunResult:
    return InfiniteDMRG(config).run(on_step)
