"""Free-fermion solver for the transverse-XY chain.

Majorana conventions (0-based site ``l``)::

    g[2l]   = (prod_{m<l} sigma^z_m) sigma^x_l
    g[2l+1] = (prod_{m<l} sigma^z_m) sigma^y_l
    c_l     = (g[2l] + i g[2l+1]) / 2,      sigma^z_l = -i g[2l] g[2l+1] = 1 - 2 n_l

so ``|0...0>`` is the fermion vacuum. A quadratic Hamiltonian is written
``H = (i/4) g^T A g`` with ``A`` real antisymmetric, and the Heisenberg
evolution is ``g(t) = expm(A t) g``.

The detector oracle works on the open chain in real space: the state at the
epoch is Gaussian with correlation matrix ``C_jk = <g_j g_k>``, and each
``F_n`` reduces to two- and six-Majorana expectations evaluated by Wick
contraction (a Pfaffian).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from ..detectors import DetectorTrace


class UnsupportedStateError(ValueError):
    """The free-fermion oracle only handles the vacuum with a z-axis channel."""


# -- momentum space -----------------------------------------------------------

@dataclass(frozen=True)
class BogoliubovMode:
    q: float
    u: float
    v: float
    omega: float
    sign: float = 1.0


def txy_dispersion(q: float, Jx: float, Jy: float, h: float) -> BogoliubovMode:
    """Quasiparticle energy and Bogoliubov coefficients at momentum ``q``.

    ``omega = 2 sqrt([(Jx+Jy) cos q + h]^2 + [(Jx-Jy) sin q]^2)``.
    """
    if abs(q) > np.pi + 1e-12:
        raise ValueError(f"|q| must be <= pi, got {q}")
    a = (Jx + Jy) * np.cos(q) + h
    b = (Jx - Jy) * np.sin(q)
    omega = 2.0 * np.hypot(a, b)
    if omega == 0.0:
        return BogoliubovMode(q, 1.0, 0.0, 0.0)
    # half-angle form keeps u and v accurate when one of them is tiny
    phi = np.arctan2(abs(b), a)
    return BogoliubovMode(q, np.cos(phi / 2), np.sin(phi / 2), omega, 1.0 if b >= 0 else -1.0)


def bdg_block(q: float, Jx: float, Jy: float, h: float) -> np.ndarray:
    """2x2 block in the ``(c_q, c_-q^dagger)`` basis with eigenvalues ``+-omega_q``."""
    a = 2.0 * ((Jx + Jy) * np.cos(q) + h)
    b = 2.0 * (Jx - Jy) * np.sin(q)
    return np.array([[a, 1j * b], [-1j * b, -a]])


def bogoliubov_vector(mode: BogoliubovMode) -> np.ndarray:
    """Eigenvector of :func:`bdg_block` for ``+omega``: ``(u, -i sign v)``."""
    return np.array([mode.u, -1j * mode.sign * mode.v])


def antiperiodic_momenta(n_sites: int) -> np.ndarray:
    """Momenta of the even-parity sector of a periodic chain."""
    m = np.arange(n_sites)
    q = 2.0 * np.pi * (m + 0.5) / n_sites
    return np.where(q > np.pi, q - 2.0 * np.pi, q)


def even_sector_spectrum(n_sites: int, Jx: float, Jy: float, h: float) -> np.ndarray:
    """Many-body energies ``sum_q omega_q (n_q - 1/2)`` with an even number of quasiparticles."""
    omegas = np.array([txy_dispersion(q, Jx, Jy, h).omega for q in antiperiodic_momenta(n_sites)])
    occ = (np.arange(1 << n_sites)[:, None] >> np.arange(n_sites)[None, :]) & 1
    even = occ.sum(axis=1) % 2 == 0
    return np.sort((occ[even] - 0.5) @ omegas)


# -- real space ---------------------------------------------------------------

def majorana_generator(n_sites: int, Jx: float, Jy: float, h: float) -> np.ndarray:
    """Real antisymmetric ``A`` with ``H_txy = (i/4) g^T A g`` on the open chain."""
    A = np.zeros((2 * n_sites, 2 * n_sites))

    def add(j, k, coeff):
        # coeff * (-i) g_j g_k
        A[j, k] += -2.0 * coeff
        A[k, j] += 2.0 * coeff

    for l in range(n_sites):
        add(2 * l, 2 * l + 1, h)
    for l in range(n_sites - 1):
        add(2 * l + 1, 2 * l + 2, Jx)
        add(2 * l, 2 * l + 3, -Jy)
    return A


class MajoranaPropagator:
    """``R(t) = expm(A t)`` for many ``t`` from one eigendecomposition of ``iA``."""

    def __init__(self, A: np.ndarray):
        self.A = A
        self.energies, self.modes = np.linalg.eigh(1j * A)

    def __call__(self, t: float) -> np.ndarray:
        W = self.modes
        R = (W * np.exp(-1j * self.energies * t)) @ W.conj().T
        return R.real


@dataclass(frozen=True, eq=False)
class FermionCovariance:
    """Gaussian state through ``C_jk = <g_j g_k>`` (``C = 1 + i Gamma``)."""

    C: np.ndarray

    @classmethod
    def vacuum(cls, n_sites: int) -> "FermionCovariance":
        C = np.eye(2 * n_sites, dtype=complex)
        for l in range(n_sites):
            C[2 * l, 2 * l + 1] = 1j
            C[2 * l + 1, 2 * l] = -1j
        return cls(C)

    @property
    def n_sites(self) -> int:
        return self.C.shape[0] // 2

    def evolved(self, R: np.ndarray) -> "FermionCovariance":
        return FermionCovariance(R @ self.C @ R.T)

    def _c_coeffs(self):
        n = self.n_sites
        a = np.zeros((n, 2 * n), dtype=complex)
        for l in range(n):
            a[l, 2 * l], a[l, 2 * l + 1] = 0.5, 0.5j
        return a

    def hopping(self) -> np.ndarray:
        """``<c_i^dagger c_j>``."""
        a = self._c_coeffs()
        return a.conj() @ self.C @ a.T

    def pairing(self) -> np.ndarray:
        """``<c_i c_j>``."""
        a = self._c_coeffs()
        return a @ self.C @ a.T

    def blocks(self) -> np.ndarray:
        """``2N x 2N`` matrix ``[[<c^dag c>, <c^dag c^dag>], [<c c>, <c c^dag>]]``."""
        a = self._c_coeffs()
        left, right = np.vstack([a.conj(), a]), np.vstack([a, a.conj()])
        return left @ self.C @ right.T


def pfaffian(M: np.ndarray) -> np.ndarray:
    """Pfaffian of antisymmetric matrices stacked on the leading axes (small sizes)."""
    M = np.asarray(M)
    n = M.shape[-1]
    if n % 2:
        return np.zeros(M.shape[:-2], dtype=M.dtype)
    if n == 0:
        return np.ones(M.shape[:-2], dtype=M.dtype)
    total = np.zeros(M.shape[:-2], dtype=M.dtype)
    for j in range(1, n):
        keep = [k for k in range(1, n) if k != j]
        sub = M[..., keep, :][..., :, keep]
        total = total + (-1) ** (j + 1) * M[..., 0, j] * pfaffian(sub)
    return total


def wick_expectation(ops: np.ndarray, C: np.ndarray) -> np.ndarray:
    """``<f_1 f_2 ... f_2m>`` for linear Majorana combinations ``f_i = ops[..., i, :] . g``."""
    ops = np.asarray(ops)
    k = ops.shape[-2]
    pair = np.einsum("...ia,ab,...jb->...ij", ops, C, ops)
    iu = np.triu(np.ones((k, k), dtype=bool), 1)
    M = np.where(iu, pair, 0) - np.swapaxes(np.where(iu, pair, 0), -1, -2)
    return pfaffian(M)


def ff_protocol_F(
    n_sites: int,
    Jx: float,
    Jy: float,
    h: float,
    t0: float,
    grid,
    initial_state="zero",
    axis=None,
) -> DetectorTrace:
    """``F_n(t)`` for the vacuum start and a z-axis channel on site 1.

    ``grid`` is in units of ``t0``. With ``sigma^z_1 = -i g0 g1`` and
    ``O = sigma^z_n(t - t0) = -i a b``::

        F_n = ( <sigma^z_1 O sigma^z_1> - <O> ) / 2
            = ( i <g0 g1 a b g0 g1> + i <a b> ) / 2

    evaluated in the Gaussian state at ``t0``. Only ``F`` is filled in; ``O``
    and ``D`` are NaN.
    """
    if initial_state != "zero":
        raise UnsupportedStateError("free-fermion oracle needs the |0...0> initial state")
    if axis is not None and not np.allclose(axis.vector, [0.0, 0.0, 1.0]):
        raise UnsupportedStateError("free-fermion oracle needs the z-axis channel")
    grid = np.asarray(grid, dtype=float)
    prop = MajoranaPropagator(majorana_generator(n_sites, Jx, Jy, h))
    state = FermionCovariance.vacuum(n_sites).evolved(prop(t0))
    dim = 2 * n_sites
    e = np.eye(dim)
    F = np.zeros((grid.size, n_sites))
    for j, s in enumerate(grid):
        if s < 1.0:
            continue
        R = prop((s - 1.0) * t0)
        a, b = R[0::2], R[1::2]  # rows: sigma^z_n(tau) = -i a_n b_n
        six = np.stack(
            [np.broadcast_to(e[0], a.shape), np.broadcast_to(e[1], a.shape), a, b,
             np.broadcast_to(e[0], a.shape), np.broadcast_to(e[1], a.shape)],
            axis=1,
        )
        two = np.stack([a, b], axis=1)
        val = 0.5 * (1j * wick_expectation(six, state.C) + 1j * wick_expectation(two, state.C))
        F[j] = val.real
    nan = np.full_like(F, np.nan)
    return DetectorTrace(times=grid.copy(), F=F, O=nan.astype(complex), D=nan)


# -- brute force --------------------------------------------------------------

_PAULI = {
    "x": sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex)),
    "y": sp.csr_matrix(np.array([[0, -1j], [1j, 0]])),
    "z": sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex)),
    "i": sp.identity(2, dtype=complex, format="csr"),
}


def majorana_operators(n_sites: int) -> list:
    """Sparse ``2^N x 2^N`` Majorana matrices, site 1 on the least significant bit."""
    ops = []
    for l in range(n_sites):
        for p in ("x", "y"):
            # kron order: highest site first, so site 1 is the least significant bit
            factors = ["z" if m < l else (p if m == l else "i") for m in range(n_sites)]
            ops.append(reduce(lambda acc, f: sp.kron(_PAULI[f], acc, format="csr"), factors[1:], _PAULI[factors[0]]))
    return ops
