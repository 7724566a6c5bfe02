import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from pwfrg.errors import (AllSingularValuesCut, NoConvergence, NonFinite,
                          NonSymmetric, ZeroStartVector)
from pwfrg.model import ModelSpec, couplings
from pwfrg.kernels import heisenberg_apply
from pwfrg.numerics import (fix_sign_gauge, lanczos_ground, pinv_cutoff,
                            sym_eig_desc)

from conftest import random_symmetric


def test_eig_identity():
    dec = sym_eig_desc(np.eye(4))
    assert_allclose(dec.values, np.ones(4))
    assert_allclose(dec.vectors.T @ dec.vectors, np.eye(4), atol=1e-12)


def test_eig_pauli_x():
    dec = sym_eig_desc(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert_allclose(dec.values, [1.0, -1.0])
    s = np.sqrt(0.5)
    assert_allclose(np.abs(dec.vectors), [[s, s], [s, s]])
    # gauge: largest entry positive, first index wins ties
    assert dec.vectors[0, 0] > 0 and dec.vectors[0, 1] > 0


def test_eig_reconstruction(rng):
    M = random_symmetric(rng, 8)
    dec = sym_eig_desc(M)
    R = dec.vectors @ np.diag(dec.values) @ dec.vectors.T
    assert np.linalg.norm(R - M) <= 1e-10
    assert np.all(np.diff(dec.values) <= 0)


@given(n=st.integers(1, 40), seed=st.integers(0, 2**31))
def test_eig_properties(n, seed):
    M = random_symmetric(np.random.default_rng(seed), n)
    dec = sym_eig_desc(M)
    assert np.all(dec.values[:-1] >= dec.values[1:])
    assert np.linalg.norm(dec.vectors.T @ dec.vectors - np.eye(n)) <= 1e-12 * n
    R = dec.vectors @ np.diag(dec.values) @ dec.vectors.T
    assert np.linalg.norm(R - M) <= 1e-10 * max(np.linalg.norm(M), 1.0)
    rows = np.argmax(np.abs(dec.vectors), axis=0)
    assert np.all(dec.vectors[rows, np.arange(n)] > 0)


def test_eig_large(rng):
    M = random_symmetric(rng, 512)
    dec = sym_eig_desc(M)
    R = (dec.vectors * dec.values) @ dec.vectors.T
    assert np.linalg.norm(R - M) <= 1e-10 * np.linalg.norm(M)


def test_eig_errors():
    with pytest.raises(NonSymmetric):
        sym_eig_desc(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NonFinite):
        sym_eig_desc(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_sign_gauge_tie_goes_to_first_row():
    v = np.array([[-1.0], [1.0]])
    fix_sign_gauge(v)
    assert_allclose(v[:, 0], [1.0, -1.0])


def test_lanczos_diag():
    A = np.diag([-1.0, 3.0])
    res = lanczos_ground(lambda x: A @ x, np.array([1.0, 1.0]) / np.sqrt(2))
    assert_allclose(res.energy, -1.0, atol=1e-12)
    assert res.iterations <= 2


def test_lanczos_heisenberg4(rng):
    c = couplings(ModelSpec(1.0, 0.0), 4)
    res = lanczos_ground(lambda x: heisenberg_apply(x, c),
                         rng.standard_normal(16))
    assert_allclose(res.energy, -1.6160254037844388, atol=1e-10)
    assert res.residual <= 1e-12 * max(1, abs(res.energy))
    assert_allclose(np.linalg.norm(res.vector), 1.0, atol=1e-14)


def test_lanczos_exact_start(rng):
    M = random_symmetric(rng, 30)
    w, v = np.linalg.eigh(M)
    res = lanczos_ground(lambda x: M @ x, v[:, 0])
    assert res.iterations == 1
    assert_allclose(res.energy, w[0], atol=1e-12)


def test_lanczos_matches_dense(rng):
    M = random_symmetric(rng, 200)
    res = lanczos_ground(lambda x: M @ x, rng.standard_normal(200))
    w = np.linalg.eigvalsh(M)
    assert_allclose(res.energy, w[0], atol=1e-10)
    assert_allclose(M @ res.vector, res.energy * res.vector, atol=1e-10)


def test_lanczos_restart_monotone(rng):
    # a tiny max_iter forces restarts; each restart starts from the last
    # Ritz vector so the energy cannot go up
    M = random_symmetric(rng, 120)
    start = rng.standard_normal(120)
    energies = []
    for cap in (5, 10, 15, 20, 25):
        try:
            energies.append(lanczos_ground(lambda x: M @ x, start,
                                           max_iter=cap).energy)
        except NoConvergence as exc:
            energies.append(exc.best.energy)
    assert np.all(np.diff(energies) <= 1e-12)


def test_lanczos_no_convergence(rng):
    M = random_symmetric(rng, 100)
    with pytest.raises(NoConvergence) as info:
        lanczos_ground(lambda x: M @ x, rng.standard_normal(100), max_iter=3)
    assert info.value.best is not None
    assert np.isfinite(info.value.best.energy)


def test_lanczos_zero_start():
    with pytest.raises(ZeroStartVector):
        lanczos_ground(lambda x: x, np.zeros(3))


def test_single_step_is_rayleigh_ritz(rng):
    M = random_symmetric(rng, 50)
    v = rng.standard_normal(50)
    v /= np.linalg.norm(v)
    res = lanczos_ground(lambda x: M @ x, v, mode="single_step")
    Q, _ = np.linalg.qr(np.column_stack([v, M @ v]))
    ref = np.linalg.eigvalsh(Q.T @ M @ Q)[0]
    assert_allclose(res.energy, ref, atol=1e-12)
    assert res.energy <= v @ M @ v
    assert res.iterations == 2


def test_single_step_with_previous(rng):
    M = random_symmetric(rng, 50)
    v, p = rng.standard_normal((2, 50))
    res = lanczos_ground(lambda x: M @ x, v, mode="single_step", previous=p)
    Q, _ = np.linalg.qr(np.column_stack([v, M @ v, p]))
    assert_allclose(res.energy, np.linalg.eigvalsh(Q.T @ M @ Q)[0], atol=1e-12)


def test_pinv_examples():
    assert_allclose(pinv_cutoff(np.diag([2.0, 1.0])), np.diag([0.5, 1.0]))
    assert_allclose(pinv_cutoff(np.diag([1.0, 1e-15]), 1e-8),
                    np.diag([1.0, 0.0]))


def test_pinv_left_inverse(rng):
    M = rng.standard_normal((6, 4))
    assert_allclose(pinv_cutoff(M) @ M, np.eye(4), atol=1e-10)


def test_pinv_errors():
    with pytest.raises(AllSingularValuesCut):
        pinv_cutoff(np.zeros((3, 3)))
    with pytest.raises(NonFinite):
        pinv_cutoff(np.array([[np.inf]]))


@given(n=st.integers(1, 12), seed=st.integers(0, 2**31))
def test_pinv_properties(n, seed):
    r = np.random.default_rng(seed)
    M = r.standard_normal((n, n)) + n * np.eye(n)
    P = pinv_cutoff(M)
    assert_allclose(M @ P @ M, M, atol=1e-8)
    assert_allclose(pinv_cutoff(P), M, atol=1e-8)


def test_lanczos_basis_orthogonality(rng):
    # full reorthogonalization keeps the Ritz vector exact even for a
    # spectrum that would make plain Lanczos lose orthogonality
    w = np.concatenate([[-10.0], np.linspace(0, 1, 299)])
    Q, _ = np.linalg.qr(rng.standard_normal((300, 300)))
    M = (Q * w) @ Q.T
    res = lanczos_ground(lambda x: M @ x, rng.standard_normal(300))
    assert_allclose(res.energy, -10.0, atol=1e-10)
    assert abs(abs(res.vector @ Q[:, 0]) - 1.0) <= 1e-10


def test_lanczos_krylov_vectors_orthonormal(rng):
    M = random_symmetric(rng, 400)
    seen = []

    def apply(x):
        seen.append(x.copy())
        return M @ x

    try:
        lanczos_ground(apply, rng.standard_normal(400), tol=1e-14,
                       max_iter=60)
    except NoConvergence:
        pass
    V = np.array(seen[:60])
    G = V @ V.T
    assert np.max(np.abs(G - np.eye(len(V)))) <= 1e-10
