"""Exact evolution, the single-site measurement channel, and the full protocol.

The protocol is: evolve ``|psi0>`` to the epoch ``t0``, apply the projective
channel ``{P0, P1}`` along an axis on one site, then keep evolving both
branches. The uninterrupted trajectory is carried along for comparison.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .models import ModelSpec, SpectralHamiltonian, build
from .states import (
    Z_AXIS,
    BranchEnsemble,
    MeasurementAxis,
    PureState,
    basis_code,
    check_site,
    code_from_bitstring,
    n_sites_of,
    z_signs,
)

EPOCH_SCALE = 0.1  # J * t0 used when no explicit epoch is given
DEFAULT_GRID = np.linspace(0.0, 20.0, 401)


class ProtocolError(ValueError):
    """Invalid protocol specification; the message names the field."""


class InvariantViolation(RuntimeError):
    """A numerical invariant (trace, norm) drifted past tolerance."""


def make_initial_state(desc, n_sites: int) -> PureState:
    """Build an initial state from a name or an explicit amplitude list.

    Accepted names: ``zero`` (all ``|0>``), ``ones`` (all ``|1>``), ``ghz``,
    ``pair:i,j`` for ``(|0..0> + |1 on i,j>)/sqrt2``, ``magnon:i,j`` for
    ``(|1 on i> + |1 on j>)/sqrt2``, ``basis:i,j,..`` for the product state
    with those sites down, and ``kets:0100+0010`` for an equal superposition
    of bitstrings written left to right as sites 1..N.
    """
    if isinstance(desc, PureState):
        if desc.n_sites != n_sites:
            raise ProtocolError(f"initial_state: state has N={desc.n_sites}, model has N={n_sites}")
        return desc
    if not isinstance(desc, str):
        amps = np.asarray(desc, dtype=complex)
        if amps.shape != (1 << n_sites,):
            raise ProtocolError(f"initial_state: expected {1 << n_sites} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if not np.isclose(norm, 1.0, atol=1e-10):
            raise ProtocolError(f"initial_state: amplitudes not normalized (norm {norm:.6g})")
        return PureState(n_sites, amps)

    name = desc.strip().lower()
    try:
        if name == "zero":
            return PureState.basis(n_sites)
        if name == "ones":
            return PureState.basis(n_sites, range(1, n_sites + 1))
        if name == "ghz":
            return PureState.from_codes(n_sites, [0, (1 << n_sites) - 1])
        kind, _, arg = name.partition(":")
        if kind == "kets":
            bits = [b.strip() for b in re.split(r"[+,]", arg) if b.strip()]
            if any(len(b) != n_sites for b in bits):
                raise ProtocolError(f"initial_state: kets must have {n_sites} digits")
            return PureState.from_codes(n_sites, [code_from_bitstring(b) for b in bits])
        sites = [int(s) for s in arg.split(",") if s.strip()]
        if kind == "pair":
            return PureState.from_codes(n_sites, [0, basis_code(sites, n_sites)])
        if kind == "magnon":
            return PureState.from_codes(n_sites, [basis_code([s], n_sites) for s in sites])
        if kind == "basis":
            return PureState.basis(n_sites, sites)
    except (ValueError, IndexError) as exc:
        if isinstance(exc, ProtocolError):
            raise
        raise ProtocolError(f"initial_state: cannot parse {desc!r}: {exc}") from exc
    raise ProtocolError(f"initial_state: unknown state {desc!r}")


# -- single-site operators on arrays of shape (..., 2^N) ------------------------

def apply_axis_pauli(amps: np.ndarray, site: int, axis: MeasurementAxis) -> np.ndarray:
    """``(n . sigma_site) |psi>`` for a batch of vectors."""
    amps = np.asarray(amps, dtype=complex)
    n_sites = n_sites_of(amps.shape[-1])
    check_site(site, n_sites)
    nx, ny, nz = axis.vector
    z = z_signs(n_sites)[:, site - 1]
    flip = np.arange(amps.shape[-1]) ^ (1 << (site - 1))
    out = nz * z * amps
    # (sigma^x psi)[s] = psi[s ^ m];  (sigma^y psi)[s] = -i z(s) psi[s ^ m]
    out = out + (nx - 1j * ny * z) * amps[..., flip]
    return out


def kraus_projectors(amps: np.ndarray, site: int, axis: MeasurementAxis):
    """``P0 psi, P1 psi`` with ``P0,1 = (1 +- n . sigma) / 2``."""
    flipped = apply_axis_pauli(amps, site, axis)
    return 0.5 * (amps + flipped), 0.5 * (amps - flipped)


def apply_channel(state: PureState, site: int, axis: MeasurementAxis = Z_AXIS) -> BranchEnsemble:
    """Both unnormalized branches ``P0|psi>``, ``P1|psi>``; zero branches are kept."""
    b0, b1 = kraus_projectors(state.amplitudes, site, axis)
    return BranchEnsemble(state.n_sites, (b0, b1))


def rechannel(rho: BranchEnsemble, site: int, axis: MeasurementAxis) -> BranchEnsemble:
    """Apply the channel to every branch and collect all resulting branches."""
    out = []
    for b in rho.branches:
        out.extend(kraus_projectors(b, site, axis))
    return BranchEnsemble(rho.n_sites, tuple(out))


# -- evolution ----------------------------------------------------------------

def _to_eigenbasis(H: SpectralHamiltonian, amps: np.ndarray) -> np.ndarray:
    V = H.eigenvectors
    return (amps.real @ V) + 1j * (amps.imag @ V)


def _from_eigenbasis(H: SpectralHamiltonian, coeffs: np.ndarray) -> np.ndarray:
    Vt = H.eigenvectors.T
    return (coeffs.real @ Vt) + 1j * (coeffs.imag @ Vt)


def evolve_many(H: SpectralHamiltonian, amps: np.ndarray, times) -> np.ndarray:
    """``exp(-i H t) psi`` for every ``t`` in ``times``; result shape ``(T, 2^N)``."""
    amps = np.asarray(amps, dtype=complex)
    if amps.shape != (H.dim,):
        raise ValueError(f"state dimension {amps.shape} does not match Hamiltonian {H.dim}")
    coeffs = _to_eigenbasis(H, amps)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    phases = np.exp(-1j * np.outer(times, H.eigenvalues))
    return _from_eigenbasis(H, phases * coeffs)


def evolve(H: SpectralHamiltonian, state: PureState, dt: float) -> PureState:
    """Exact propagation by ``dt`` (negative ``dt`` runs backwards)."""
    if state.amplitudes.shape != (H.dim,):
        raise ValueError(f"state dimension {state.amplitudes.shape} does not match Hamiltonian {H.dim}")
    return PureState(state.n_sites, evolve_many(H, state.amplitudes, [dt])[0])


# -- protocol -----------------------------------------------------------------

def default_epoch(model: ModelSpec) -> float:
    coupling = model.Jx if model.model.startswith("txy") else model.J
    return EPOCH_SCALE / abs(coupling) if coupling else EPOCH_SCALE


@dataclass(frozen=True, eq=False)
class ProtocolSpec:
    """One protocol run.

    ``grid`` holds sample times in units of the epoch (so ``grid == 1`` is the
    channel time). ``t0`` is an absolute time with ``hbar = 1``; when left as
    None the epoch is ``0.1 / |J|`` with ``J`` the model's leading coupling
    (``Jx`` for the XY models), so sweeping that coupling rescales the epoch.
    """

    model: ModelSpec
    initial_state: object = "zero"
    t0: float | None = None
    axis: MeasurementAxis = Z_AXIS
    qdp_site: int = 1
    grid: np.ndarray = field(default_factory=lambda: DEFAULT_GRID.copy())

    def __post_init__(self):
        if self.t0 is not None and (not np.isfinite(self.t0) or self.t0 <= 0):
            raise ProtocolError(f"t0: epoch time must be > 0, got {self.t0}")
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise ProtocolError("grid: need at least two sample times")
        if np.any(grid < 0) or np.any(np.diff(grid) <= 0):
            raise ProtocolError("grid: times must be >= 0 and strictly increasing")
        if not 1 <= self.qdp_site <= self.model.n_sites:
            raise ProtocolError(f"qdp_site: {self.qdp_site} outside 1..{self.model.n_sites}")
        object.__setattr__(self, "grid", grid)

    @property
    def epoch(self) -> float:
        if self.t0 is not None:
            return float(self.t0)
        return default_epoch(self.model)

    @property
    def times(self) -> np.ndarray:
        return self.grid * self.epoch

    def with_(self, **changes) -> "ProtocolSpec":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class TrajectoryPair:
    """Uninterrupted trajectory and the two-branch trajectory with the channel.

    ``without`` has shape ``(T, 2^N)``. ``with_branches`` has shape
    ``(2, T, 2^N)``: before the epoch branch 0 equals ``without`` and branch 1
    is zero, so the ensembles coincide branch for branch.
    """

    spec: ProtocolSpec
    without: np.ndarray
    with_branches: np.ndarray

    @property
    def grid(self) -> np.ndarray:
        return self.spec.grid

    @property
    def n_sites(self) -> int:
        return self.spec.model.n_sites

    @property
    def after_epoch(self) -> np.ndarray:
        return self.spec.grid >= 1.0

    def ensemble_with(self, j: int) -> BranchEnsemble:
        if not self.after_epoch[j]:
            return BranchEnsemble(self.n_sites, (self.with_branches[0, j],))
        return BranchEnsemble(self.n_sites, tuple(self.with_branches[:, j]))

    def ensemble_without(self, j: int) -> BranchEnsemble:
        return BranchEnsemble(self.n_sites, (self.without[j],))

    def trace_drift(self) -> float:
        tr_without = np.sum(np.abs(self.without) ** 2, axis=-1)
        tr_with = np.sum(np.abs(self.with_branches) ** 2, axis=(0, -1))
        return float(max(np.abs(tr_without - 1).max(), np.abs(tr_with - 1).max()))


def run_protocol(spec: ProtocolSpec, H: SpectralHamiltonian | None = None) -> TrajectoryPair:
    H = build(spec.model) if H is None else H
    psi0 = make_initial_state(spec.initial_state, spec.model.n_sites).amplitudes
    times = spec.times
    without = evolve_many(H, psi0, times)

    after = spec.grid >= 1.0
    branches = np.zeros((2,) + without.shape, dtype=complex)
    branches[0, ~after] = without[~after]
    if after.any():
        psi_t0 = evolve_many(H, psi0, [spec.epoch])[0]
        for i, b in enumerate(kraus_projectors(psi_t0, spec.qdp_site, spec.axis)):
            branches[i, after] = evolve_many(H, b, times[after] - spec.epoch)
    return TrajectoryPair(spec, without, branches)


def check_invariants(pair: TrajectoryPair, tol: float = 1e-8) -> None:
    drift = pair.trace_drift()
    if drift > tol:
        raise InvariantViolation(f"trace drift {drift:.3e} exceeds {tol:g}")
