"""Basis conventions, pure states, branch ensembles and single-site marginals.

Conventions
-----------
Sites are numbered ``1..N``. Site ``n`` is stored in bit ``n - 1`` of a basis
code, so site 1 is the least significant bit. Bit value 0 is ``|0>`` (spin up,
``sigma^z = +1``) and bit value 1 is ``|1>`` (spin down, a magnon).

A mixed state is never stored as a ``2^N x 2^N`` matrix. It is a
:class:`BranchEnsemble`, a short list of unnormalized vectors ``b`` with
``rho = sum_b |b><b|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

ZERO_AMPLITUDE = 1e-12
NORM_TOL = 1e-12


class SiteError(IndexError):
    """Raised when a site index falls outside ``1..N``."""


class PositivityError(ValueError):
    """Raised when a reduced density matrix has a negative eigenvalue."""


class Parity(str, Enum):
    EVEN = "even-only"
    ODD = "odd-only"
    MIXED = "mixed"


def n_sites_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 1 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


def check_site(n: int, n_sites: int) -> None:
    if not 1 <= n <= n_sites:
        raise SiteError(f"site {n} out of range 1..{n_sites}")


def popcounts(n_sites: int) -> np.ndarray:
    """Magnon number of every basis code ``0 .. 2^N - 1``."""
    codes = np.arange(1 << n_sites, dtype=np.int64)
    counts = np.zeros_like(codes)
    for i in range(n_sites):
        counts += (codes >> i) & 1
    return counts


def z_signs(n_sites: int) -> np.ndarray:
    """``(2^N, N)`` table of ``sigma^z_n`` eigenvalues, column ``n-1`` for site ``n``."""
    codes = np.arange(1 << n_sites, dtype=np.int64)[:, None]
    bits = (codes >> np.arange(n_sites)[None, :]) & 1
    return (1 - 2 * bits).astype(float)


def basis_code(down_sites: Iterable[int], n_sites: int) -> int:
    """Basis code with spin down (``|1>``) on each of ``down_sites``."""
    code = 0
    for s in down_sites:
        check_site(s, n_sites)
        code |= 1 << (s - 1)
    return code


def code_from_bitstring(bits: str) -> int:
    """``"0110"`` read left to right as sites 1..N."""
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {bits!r}")
    return sum(1 << i for i, b in enumerate(bits) if b == "1")


@dataclass(frozen=True, eq=False)
class PureState:
    n_sites: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_sites,):
            raise ValueError(
                f"expected {1 << self.n_sites} amplitudes for N={self.n_sites}, got {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_codes(cls, n_sites: int, codes: Sequence[int], weights=None) -> "PureState":
        """Normalized superposition of basis codes (equal weights by default)."""
        amps = np.zeros(1 << n_sites, dtype=complex)
        if weights is None:
            weights = np.ones(len(codes))
        for c, w in zip(codes, weights):
            amps[c] += w
        return cls(n_sites, amps / np.linalg.norm(amps))

    @classmethod
    def basis(cls, n_sites: int, down_sites: Iterable[int] = ()) -> "PureState":
        return cls.from_codes(n_sites, [basis_code(down_sites, n_sites)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() ** 2 - 1.0) < tol


@dataclass(frozen=True, eq=False)
class BranchEnsemble:
    """Mixed state ``rho = sum_b |b><b|`` over unnormalized branches."""

    n_sites: int
    branches: tuple

    def __post_init__(self):
        dim = 1 << self.n_sites
        branches = []
        for b in self.branches:
            b = np.asarray(b, dtype=complex)
            if b.shape != (dim,):
                raise ValueError(f"branch shape {b.shape} does not match N={self.n_sites}")
            b.setflags(write=False)
            branches.append(b)
        if not branches:
            raise ValueError("ensemble needs at least one branch")
        object.__setattr__(self, "branches", tuple(branches))

    @classmethod
    def pure(cls, state: PureState) -> "BranchEnsemble":
        return cls(state.n_sites, (state.amplitudes,))

    def weights(self) -> np.ndarray:
        return np.array([np.vdot(b, b).real for b in self.branches])

    def trace(self) -> float:
        return float(self.weights().sum())

    def density_matrix(self) -> np.ndarray:
        """Explicit ``2^N x 2^N`` matrix; for cross-checks at small N only."""
        return sum(np.outer(b, b.conj()) for b in self.branches)


@dataclass(frozen=True)
class QubitReducedDM:
    """Single-site density matrix in the ``sigma^z`` basis ``(|0>, |1>)``.

    ``m01`` is the matrix element ``<0|rho_n|1>``; the lower-left entry is its
    conjugate.
    """

    m00: float
    m11: float
    m01: complex

    def matrix(self) -> np.ndarray:
        return np.array([[self.m00, self.m01], [np.conj(self.m01), self.m11]], dtype=complex)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix())


@dataclass(frozen=True)
class MeasurementAxis:
    theta: float = 0.0
    phi: float = 0.0

    @property
    def vector(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


Z_AXIS = MeasurementAxis(0.0, 0.0)


# -- vectorized kernels over arrays of shape (..., 2^N) -----------------------

def sz_expectations(amps: np.ndarray) -> np.ndarray:
    """``<sigma^z_n>`` for every site; trailing axis of the result is the site."""
    amps = np.asarray(amps)
    n = n_sites_of(amps.shape[-1])
    return (amps.real**2 + amps.imag**2) @ z_signs(n)


def rho01_elements(amps: np.ndarray) -> np.ndarray:
    """``<0|rho_n|1> = sum_s psi(s with n=0) conj(psi(s with n=1))`` per site."""
    amps = np.asarray(amps)
    n_sites = n_sites_of(amps.shape[-1])
    codes = np.arange(amps.shape[-1])
    out = np.empty(amps.shape[:-1] + (n_sites,), dtype=complex)
    for i in range(n_sites):
        up = codes[((codes >> i) & 1) == 0]
        out[..., i] = np.sum(amps[..., up] * np.conj(amps[..., up | (1 << i)]), axis=-1)
    return out


def entropy_from_marginals(m00: np.ndarray, m01: np.ndarray) -> np.ndarray:
    """Von Neumann entropy (nats) of qubit marginals given ``m00`` and ``m01``.

    Uses the closed-form eigenvalues of the 2x2 Hermitian matrix,
    ``lambda = (1 +- r) / 2`` with ``r = sqrt((2 m00 - 1)^2 + 4 |m01|^2)``.
    """
    m00 = np.asarray(m00, dtype=float)
    r = np.sqrt((2.0 * m00 - 1.0) ** 2 + 4.0 * np.abs(m01) ** 2)
    if np.any(r > 1.0 + 1e-10):
        raise PositivityError(f"negative marginal eigenvalue {(1 - r.max()) / 2:.3e}")
    lam = np.clip(np.stack([(1.0 + r) / 2.0, (1.0 - r) / 2.0]), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0.0, -lam * np.log(lam), 0.0)
    return terms.sum(axis=0)


# -- operations ---------------------------------------------------------------

def magnon_parity(state: PureState, zero_tol: float = ZERO_AMPLITUDE) -> Parity:
    occupied = np.abs(state.amplitudes) > zero_tol
    parities = set((popcounts(state.n_sites)[occupied] % 2).tolist())
    if parities == {0}:
        return Parity.EVEN
    if parities == {1}:
        return Parity.ODD
    return Parity.MIXED


def expectation_sigma_z(rho: BranchEnsemble, n: int) -> float:
    check_site(n, rho.n_sites)
    return float(sum(sz_expectations(b)[n - 1] for b in rho.branches))


def expectation_sigma_plus(rho: BranchEnsemble, n: int) -> complex:
    """``<sigma^+_n>`` with ``sigma^+ = |0><1|``, i.e. ``<1|rho_n|0>``."""
    return complex(np.conj(reduced_qubit_dm(rho, n).m01))


def reduced_qubit_dm(rho: BranchEnsemble, n: int) -> QubitReducedDM:
    check_site(n, rho.n_sites)
    sz = sum(sz_expectations(b)[n - 1] for b in rho.branches)
    m01 = sum(rho01_elements(b)[n - 1] for b in rho.branches)
    tr = rho.trace()
    return QubitReducedDM(m00=float((tr + sz) / 2), m11=float((tr - sz) / 2), m01=complex(m01))


def von_neumann_entropy(dm: QubitReducedDM) -> float:
    """Entropy in nats; ``0 log 0 = 0``. Eigenvalues come from the matrix itself."""
    lam = dm.eigenvalues()
    if lam.min() < -1e-10:
        raise PositivityError(f"negative eigenvalue {lam.min():.3e}")
    lam = np.clip(lam, 0.0, None)
    lam = lam[lam > 0.0]
    return float(-np.sum(lam * np.log(lam)))


def nats_to_bits(s):
    return np.asarray(s) / np.log(2.0)
