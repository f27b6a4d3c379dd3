"""Brute-force references built from explicit Kronecker products.

Nothing here reuses the package's bit tricks: operators are dense tensor
products, mixed states are full density matrices, and single-site states
come from an explicit partial trace. Site 1 is the least significant bit.
"""

import numpy as np
import pytest
from scipy.linalg import expm

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.array([[1, 0], [0, -1]], dtype=complex)
SPLUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|


def site_op(op, n, N):
    """``op`` on site ``n`` (1-based) of an ``N``-site chain."""
    factors = [I2] * N
    factors[n - 1] = op
    out = factors[N - 1]
    for k in range(N - 2, -1, -1):
        out = np.kron(out, factors[k])
    return out


def brute_hamiltonian(spec):
    N = spec.n_sites
    x = [site_op(X, n, N) for n in range(1, N + 1)]
    y = [site_op(Y, n, N) for n in range(1, N + 1)]
    z = [site_op(Z, n, N) for n in range(1, N + 1)]
    bonds = [(i, i + 1) for i in range(N - 1)]
    if spec.boundary == "periodic":
        bonds.append((N - 1, 0))
    H = np.zeros((1 << N, 1 << N), dtype=complex)
    if spec.model == "ising-nn":
        for i, k in bonds:
            H += spec.J * x[i] @ x[k]
    elif spec.model == "ising-long-range":
        for i in range(N):
            for k in range(i + 1, N):
                H += spec.J / (k - i) ** spec.delta * x[i] @ x[k]
    elif spec.model == "xxz":
        for i, k in bonds:
            H += spec.J * (x[i] @ x[k] + y[i] @ y[k]) + spec.Jz * z[i] @ z[k]
    else:
        for i, k in bonds:
            H += spec.Jx * x[i] @ x[k] + spec.Jy * y[i] @ y[k]
        for i in range(N):
            H += spec.h * z[i]
            if spec.model == "txy-longitudinal":
                H += spec.h_long * x[i]
    return H


def partial_trace_site(rho, n, N):
    """2x2 reduced density matrix of site ``n``."""
    hi, lo = 1 << (N - n), 1 << (n - 1)
    r = rho.reshape(hi, 2, lo, hi, 2, lo)
    return np.einsum("aibajb->ij", r)


def entropy(dm):
    lam = np.linalg.eigvalsh(dm)
    lam = lam[lam > 1e-15]
    return float(-np.sum(lam * np.log(lam)))


def brute_detectors(spec, psi0):
    """``F, O, D`` on ``spec.grid`` from explicit density matrices."""
    N = spec.model.n_sites
    H = brute_hamiltonian(spec.model)
    nvec = spec.axis.vector
    ndots = nvec[0] * site_op(X, spec.qdp_site, N) + nvec[1] * site_op(Y, spec.qdp_site, N) + nvec[2] * site_op(Z, spec.qdp_site, N)
    eye = np.eye(1 << N)
    P = [(eye + ndots) / 2, (eye - ndots) / 2]
    rho0 = np.outer(psi0, psi0.conj())
    U0 = expm(-1j * H * spec.epoch)
    rho_t0 = U0 @ rho0 @ U0.conj().T
    rho_tilde = sum(p @ rho_t0 @ p for p in P)
    T = spec.grid.size
    F = np.zeros((T, N))
    O = np.zeros((T, N), dtype=complex)
    D = np.zeros((T, N))
    for j, s in enumerate(spec.grid):
        U = expm(-1j * H * s * spec.epoch)
        rho = U @ rho0 @ U.conj().T
        if s >= 1.0:
            V = expm(-1j * H * (s - 1.0) * spec.epoch)
            rt = V @ rho_tilde @ V.conj().T
        else:
            rt = rho
        for n in range(1, N + 1):
            a, b = partial_trace_site(rt, n, N), partial_trace_site(rho, n, N)
            F[j, n - 1] = np.trace((a - b) @ Z).real
            O[j, n - 1] = np.trace((a - b) @ SPLUS)
            D[j, n - 1] = entropy(a) - entropy(b)
    return F, O, D


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
