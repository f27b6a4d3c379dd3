"""Spin-chain Hamiltonians in the computational basis and their spectra.

Every model here has real matrix elements in the ``sigma^z`` basis (the
``sigma^y sigma^y`` coupling included), so spectra come from a real symmetric
eigensolve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .states import popcounts, z_signs

MODELS = ("ising-nn", "ising-long-range", "xxz", "txy", "txy-longitudinal")
BOUNDARIES = ("open", "periodic")
MAX_SITES = 14


class ModelError(ValueError):
    """Invalid model specification."""


@dataclass(frozen=True)
class ModelSpec:
    """Model name, chain length and couplings.

    Only the couplings relevant to ``model`` are read:
    ``J`` (ising-nn), ``J, delta`` (ising-long-range), ``J, Jz`` (xxz),
    ``Jx, Jy, h`` (txy) and ``Jx, Jy, h, h_long`` (txy-longitudinal).
    """

    model: str
    n_sites: int
    J: float = 1.0
    delta: float = 1.0
    Jz: float = 1.0
    Jx: float = 1.0
    Jy: float = 1.0
    h: float = 0.0
    h_long: float = 0.0
    boundary: str = "open"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ModelError(f"model: unknown model {self.model!r}; expected one of {MODELS}")
        if self.boundary not in BOUNDARIES:
            raise ModelError(f"boundary: expected one of {BOUNDARIES}, got {self.boundary!r}")
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ModelError(f"n_sites: need an integer N >= 2, got {self.n_sites}")
        for name in ("J", "delta", "Jz", "Jx", "Jy", "h", "h_long"):
            if not math.isfinite(getattr(self, name)):
                raise ModelError(f"{name}: coupling must be finite")
        if self.model == "ising-long-range":
            if self.delta <= 0:
                raise ModelError(f"delta: must be > 0, got {self.delta}")
            if self.boundary == "periodic":
                raise ModelError("boundary: periodic chains are not defined for ising-long-range")

    def with_(self, **changes) -> "ModelSpec":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class SpectralHamiltonian:
    spec: ModelSpec
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def residual(self) -> float:
        v, lam = self.eigenvectors, self.eigenvalues
        return float(np.abs(self.matrix @ v - v * lam).max())


def _bonds(n_sites: int, boundary: str):
    bonds = [(i, i + 1) for i in range(n_sites - 1)]
    if boundary == "periodic" and n_sites > 2:
        bonds.append((n_sites - 1, 0))
    return bonds


def _flip_term(n_sites, i, k, values):
    """Sparse matrix with ``values[s]`` at (s ^ mask, s) for the two-site flip mask."""
    dim = 1 << n_sites
    cols = np.arange(dim)
    rows = cols ^ ((1 << i) | (1 << k))
    return sp.csr_matrix((values, (rows, cols)), shape=(dim, dim))


def pair_xx(n_sites: int, i: int, k: int) -> sp.csr_matrix:
    """``sigma^x_i sigma^x_k`` with 0-based site indices."""
    return _flip_term(n_sites, i, k, np.ones(1 << n_sites))


def pair_yy(n_sites: int, i: int, k: int) -> sp.csr_matrix:
    z = z_signs(n_sites)
    return _flip_term(n_sites, i, k, -z[:, i] * z[:, k])


def pair_zz(n_sites: int, i: int, k: int) -> sp.csr_matrix:
    z = z_signs(n_sites)
    return sp.diags(z[:, i] * z[:, k]).tocsr()


def single_z(n_sites: int, i: int) -> sp.csr_matrix:
    return sp.diags(z_signs(n_sites)[:, i]).tocsr()


def single_x(n_sites: int, i: int) -> sp.csr_matrix:
    dim = 1 << n_sites
    cols = np.arange(dim)
    return sp.csr_matrix((np.ones(dim), (cols ^ (1 << i), cols)), shape=(dim, dim))


def hamiltonian_matrix(spec: ModelSpec) -> sp.csr_matrix:
    """Sparse Hamiltonian for ``spec``."""
    n = spec.n_sites
    H = sp.csr_matrix((1 << n, 1 << n))
    bonds = _bonds(n, spec.boundary)
    if spec.model == "ising-nn":
        for i, k in bonds:
            H = H + spec.J * pair_xx(n, i, k)
    elif spec.model == "ising-long-range":
        for i in range(n):
            for k in range(i + 1, n):
                H = H + (spec.J / (k - i) ** spec.delta) * pair_xx(n, i, k)
    elif spec.model == "xxz":
        for i, k in bonds:
            H = H + spec.J * (pair_xx(n, i, k) + pair_yy(n, i, k)) + spec.Jz * pair_zz(n, i, k)
    else:
        for i, k in bonds:
            H = H + spec.Jx * pair_xx(n, i, k) + spec.Jy * pair_yy(n, i, k)
        for i in range(n):
            H = H + spec.h * single_z(n, i)
        if spec.model == "txy-longitudinal":
            for i in range(n):
                H = H + spec.h_long * single_x(n, i)
    H.eliminate_zeros()
    return H.tocsr()


@lru_cache(maxsize=4)
def _build_cached(spec: ModelSpec) -> SpectralHamiltonian:
    H = hamiltonian_matrix(spec).toarray()
    lam, vecs = np.linalg.eigh(H)
    for arr in (H, lam, vecs):
        arr.setflags(write=False)
    return SpectralHamiltonian(spec, H, lam, vecs)


def build(spec: ModelSpec, max_sites: int = MAX_SITES) -> SpectralHamiltonian:
    """Dense Hamiltonian plus its eigendecomposition (cached per spec)."""
    if spec.n_sites > max_sites:
        raise ModelError(
            f"n_sites: N={spec.n_sites} exceeds the dense-diagonalization cap N={max_sites}"
        )
    return _build_cached(spec)


def _commutator_norm(H: sp.csr_matrix, diag: np.ndarray) -> float:
    coo = H.tocoo()
    vals = coo.data * (diag[coo.col] - diag[coo.row])
    return float(np.abs(vals).max()) if vals.size else 0.0


def conserves_parity(spec: ModelSpec, tol: float = 1e-10) -> bool:
    """Whether ``H`` commutes with ``prod_l sigma^z_l``."""
    parity = 1.0 - 2.0 * (popcounts(spec.n_sites) % 2)
    return _commutator_norm(hamiltonian_matrix(spec), parity) < tol


def conserves_total_sz(spec: ModelSpec, tol: float = 1e-10) -> bool:
    """Whether ``H`` commutes with ``sum_l sigma^z_l``."""
    total = z_signs(spec.n_sites).sum(axis=1)
    return _commutator_norm(hamiltonian_matrix(spec), total) < tol


def magnon_sector_projector(n_sites: int, magnons: int) -> np.ndarray:
    """Basis codes with exactly ``magnons`` down spins (validation helper)."""
    return np.flatnonzero(popcounts(n_sites) == magnons)
