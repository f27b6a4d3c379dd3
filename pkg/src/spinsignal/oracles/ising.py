"""Closed-form magnetization for the long-range Ising chain from ``|0...0>``."""

import numpy as np


def longrange_ising_sz(n: int, t, N: int, J: float = 1.0, delta: float = 1.0):
    """``<sigma^z_n>(t) = prod_{k != n} cos(2 J t / |n - k|^delta)``."""
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    for k in range(1, N + 1):
        if k != n:
            out = out * np.cos(2.0 * J * t / abs(n - k) ** delta)
    return out
