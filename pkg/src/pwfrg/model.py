"""Open dimerized spin-1/2 Heisenberg chain.

Sites are numbered from 1 and bond ``i`` joins sites ``i`` and ``i + 1``
with strength ``J * (1 + delta * (-1)**i)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OddSystemSize

SZ = np.array([[0.5, 0.0], [0.0, -0.5]])
SP = np.array([[0.0, 1.0], [0.0, 0.0]])
SM = SP.T.copy()
# twice the S^z eigenvalue of each local basis state (up, down)
SITE_LABELS = np.array([1, -1])


@dataclass(frozen=True)
class ModelSpec:
    J: float = 1.0
    delta: float = 0.0
    local_dim: int = 2

    def __post_init__(self):
        if not self.J > 0:
            raise ValueError("J must be positive (antiferromagnetic)")
        if not abs(self.delta) <= 1.0:
            raise ValueError("delta must lie in [-1, 1]")
        if self.local_dim != 2:
            raise ValueError("only spin-1/2 sites are supported")


@dataclass(frozen=True)
class LocalOperators:
    sz: np.ndarray = SZ
    sp: np.ndarray = SP
    sm: np.ndarray = SM


def bond_coupling(spec: ModelSpec, i: int) -> float:
    if i < 1:
        raise ValueError("bond index starts at 1")
    return spec.J * (1.0 + spec.delta * (-1) ** i)


def bond_hamiltonian(c: float) -> np.ndarray:
    """``c * S_1 . S_2`` on the 4-dimensional two-site space."""
    return c * (np.kron(SZ, SZ) + 0.5 * (np.kron(SP, SM) + np.kron(SM, SP)))


def center_bond_index(two_n: int) -> int:
    if two_n < 2 or two_n % 2:
        raise OddSystemSize(f"system size must be even and >= 2, got {two_n}")
    return two_n // 2


def couplings(spec: ModelSpec, n_sites: int) -> np.ndarray:
    """Bond strengths for bonds 1 .. n_sites-1."""
    return np.array([bond_coupling(spec, i) for i in range(1, n_sites)])
