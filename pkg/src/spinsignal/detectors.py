"""Site-resolved detector functions built from a trajectory pair.

``F_n`` compares ``<sigma^z_n>``, ``O_n`` compares ``<sigma^+_n>`` and ``D_n``
compares the single-site von Neumann entropy (nats), each as
(with channel) minus (without channel).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import build
from .protocol import TrajectoryPair, evolve_many, kraus_projectors, make_initial_state
from .states import check_site, entropy_from_marginals, rho01_elements, sz_expectations


@dataclass(frozen=True, eq=False)
class DetectorTrace:
    """``F``, ``O``, ``D`` on a ``(time, site)`` grid; ``times`` are in units of t0."""

    times: np.ndarray
    F: np.ndarray
    O: np.ndarray
    D: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.F.shape[1]

    @property
    def sites(self) -> np.ndarray:
        return np.arange(1, self.n_sites + 1)

    def column(self, kind: str, n: int) -> np.ndarray:
        check_site(n, self.n_sites)
        if kind == "F":
            return self.F[:, n - 1]
        if kind == "O":
            return self.O[:, n - 1]
        if kind == "ReO":
            return self.O[:, n - 1].real
        if kind == "D":
            return self.D[:, n - 1]
        raise KeyError(kind)


def _marginals(branches: np.ndarray):
    """Summed ``<sigma^z>`` and ``<0|rho|1>`` over a leading branch axis."""
    sz = sz_expectations(branches).sum(axis=0)
    m01 = rho01_elements(branches).sum(axis=0)
    return sz, m01


def detector_trace(pair: TrajectoryPair) -> DetectorTrace:
    sz0, m01_0 = _marginals(pair.without[None])
    sz1, m01_1 = _marginals(pair.with_branches)
    s0 = entropy_from_marginals((1.0 + sz0) / 2.0, m01_0)
    s1 = entropy_from_marginals((1.0 + sz1) / 2.0, m01_1)
    # <sigma^+> = <1|rho|0> = conj(m01)
    return DetectorTrace(
        times=pair.grid.copy(),
        F=sz1 - sz0,
        O=np.conj(m01_1) - np.conj(m01_0),
        D=s1 - s0,
    )


def detector_F_at(pair: TrajectoryPair, n: int, t: float) -> float:
    """``F_n`` at an arbitrary time ``t`` (units of t0), evolved directly."""
    spec = pair.spec
    check_site(n, spec.model.n_sites)
    if t < 1.0:
        return 0.0
    H = build(spec.model)
    psi0 = make_initial_state(spec.initial_state, spec.model.n_sites).amplitudes
    psi_t0 = evolve_many(H, psi0, [spec.epoch])[0]
    psi_t = evolve_many(H, psi0, [t * spec.epoch])
    dt = (t - 1.0) * spec.epoch
    branches = np.stack([evolve_many(H, b, [dt])[0] for b in kraus_projectors(psi_t0, spec.qdp_site, spec.axis)])
    return float(sz_expectations(branches).sum(axis=0)[n - 1] - sz_expectations(psi_t)[0, n - 1])
