"""One-magnon propagators on the infinite chain.

Times here are in units of ``hbar / 4J``, in which the one-magnon dispersion
is ``cos k`` and the propagator between sites is a Bessel function.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import eigh_tridiagonal

SMALL_ARG = 1e-3


def bessel_j_orders(max_order: int, x: float) -> np.ndarray:
    """``J_k(x)`` for ``k = 0..max_order`` by Miller's downward recurrence.

    Normalized with ``J_0 + 2 sum_k J_2k = 1``.
    """
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    x = float(x)
    out = np.zeros(max_order + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    sign = 1.0
    if x < 0:
        x, sign = -x, -1.0
    if x < SMALL_ARG:
        # the recurrence ratio 2m/x overflows here; three series terms are exact
        out[:] = [bessel_series(k, x, terms=3) for k in range(max_order + 1)]
        out[1::2] *= sign
        return out
    top = max(max_order, int(x)) + 30 + int(math.sqrt(40 * max(max_order, x, 1.0)))
    top += top % 2
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    vals = np.zeros(top + 1)
    vals[top] = j_cur
    for m in range(top, 0, -1):
        j_prev = (2.0 * m / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        vals[m - 1] = j_cur
        if abs(j_cur) > 1e250:
            vals[m - 1 :] *= 1e-250
            j_next *= 1e-250
            j_cur *= 1e-250
    norm = vals[0] + 2.0 * vals[2::2].sum()
    out[:] = vals[: max_order + 1] / norm
    if sign < 0:
        out[1::2] *= -1.0
    return out


def bessel_j(order: int, x: float) -> float:
    """Integer-order Bessel function of the first kind, any sign of ``order``."""
    k = abs(int(order))
    val = bessel_j_orders(k, x)[k]
    return -val if order < 0 and k % 2 else val


def bessel_series(order: int, x: float, terms: int = 80) -> float:
    """Power series ``sum_m (-1)^m (x/2)^(2m+k) / (m! (m+k)!)``; reference only."""
    k = abs(int(order))
    total = math.fsum(
        (-1) ** m * (x / 2.0) ** (2 * m + k) / (math.factorial(m) * math.factorial(m + k))
        for m in range(terms)
    )
    return -total if order < 0 and k % 2 else total


def bessel_propagator(x: int, n: int, t: float) -> complex:
    """``G_x^n(t) = i^(x-n) J_(x-n)(t)``: amplitude to hop from ``x`` to ``n``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    m = x - n
    return (1j ** (m % 4)) * bessel_j(m, t)


def _G(x, n, t):
    return bessel_propagator(x, n, t)


def one_magnon_amplitudes(n: int, t: float, t0: float):
    """``(G, H, K)`` summed over the two source sites 1 and 2 (unnormalized).

    ``H`` is the part of the evolved state whose magnon sat away from site 1
    at ``t0``, ``K`` the part whose magnon sat on site 1; ``G = H + K``.
    """
    if t < t0:
        raise ValueError("one_magnon_F needs t >= t0")
    dt = t - t0
    G = _G(1, n, t) + _G(2, n, t)
    K = (_G(1, 1, t0) + _G(2, 1, t0)) * _G(1, n, dt)
    return G, G - K, K


def one_magnon_F(n: int, t: float, t0: float) -> float:
    """Detector ``F_n`` for ``(|1 on site 1> + |1 on site 2>)/sqrt2`` on the infinite chain.

    The magnon amplitudes add coherently, so
    ``F_n = |G|^2 - |H|^2 - |K|^2`` with ``G, H, K`` summed over both sources
    (each carrying the ``1/sqrt2`` weight squared out as the factor 2 in
    ``<sigma^z_n> = 1 - 2|a_n|^2``).
    """
    G, H, K = one_magnon_amplitudes(n, t, t0)
    return float(abs(G) ** 2 - abs(H) ** 2 - abs(K) ** 2)


def one_magnon_F_grid(sites, times, t0: float) -> np.ndarray:
    return np.array([[one_magnon_F(n, t, t0) for n in sites] for t in times])


def single_magnon_chain_F(sites, times, t0: float, length: int = 200) -> np.ndarray:
    """Same detector from direct evolution of the one-magnon hopping problem.

    A ``length``-site open chain with hopping ``1/2`` (dispersion ``cos k``);
    site 1 of the detector problem sits at the chain centre, so boundaries
    are ``length/2`` sites away.
    """
    origin = length // 2
    diag = np.zeros(length)
    off = np.full(length - 1, 0.5)
    lam, vecs = eigh_tridiagonal(diag, off)

    def propagate(psi, t):
        return vecs @ (np.exp(-1j * lam * t) * (vecs.T @ psi))

    psi0 = np.zeros(length, dtype=complex)
    psi0[origin] = psi0[origin + 1] = 1 / np.sqrt(2)
    psi_t0 = propagate(psi0, t0)
    on1 = np.zeros(length, dtype=complex)
    on1[origin] = psi_t0[origin]
    off1 = psi_t0 - on1
    idx = origin + np.asarray(sites) - 1
    out = np.empty((len(times), len(idx)))
    for j, t in enumerate(times):
        a = propagate(psi0, t)[idx]
        p = propagate(off1, t - t0)[idx]
        k = propagate(on1, t - t0)[idx]
        out[j] = 2 * (np.abs(a) ** 2 - np.abs(p) ** 2 - np.abs(k) ** 2)
    return out
