"""Waiting times, signal-speed fits and parameter sweeps."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .detectors import DetectorTrace, detector_trace
from .protocol import ProtocolSpec, run_protocol
from .states import check_site

log = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-5


class InsufficientSitesError(ValueError):
    """Fewer than three detected sites inside the fit window."""


def grid_step(trace: DetectorTrace) -> float:
    return float(np.median(np.diff(trace.times)))


def waiting_time(trace: DetectorTrace, n: int, epsilon: float = DEFAULT_EPSILON, kind: str = "F") -> Optional[float]:
    """First grid time (units of t0) with ``|detector_n| > epsilon``, or None."""
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    check_site(n, trace.n_sites)
    values = np.abs(trace.column(kind, n))
    hits = np.flatnonzero((values > epsilon) & (trace.times >= 1.0))
    return float(trace.times[hits[0]]) if hits.size else None


@dataclass
class WaitingTimeTable:
    epsilon: float
    t_star: list  # per site 1..N, None where undetected
    resolution: float
    window: tuple = (3, None)
    slope: Optional[float] = None
    intercept: Optional[float] = None
    residual: Optional[float] = None
    speed: Optional[float] = None
    status: str = "unfitted"

    @property
    def n_sites(self) -> int:
        return len(self.t_star)

    def window_sites(self) -> np.ndarray:
        lo, hi = self.window
        hi = self.n_sites - 2 if hi is None else hi
        return np.arange(max(lo, 1), min(hi, self.n_sites) + 1)

    def detected(self) -> np.ndarray:
        return np.array([t is not None for t in self.t_star])


def waiting_times(
    trace: DetectorTrace,
    epsilon: float = DEFAULT_EPSILON,
    window: tuple = (3, None),
    kind: str = "F",
) -> WaitingTimeTable:
    """Waiting time for every site. ``window=(lo, hi)``; ``hi=None`` means ``N - 2``."""
    t_star = [waiting_time(trace, n, epsilon, kind) for n in trace.sites]
    return WaitingTimeTable(epsilon, t_star, grid_step(trace), window)


def fit_speed(table: WaitingTimeTable) -> float:
    """Least-squares slope ``w`` of ``t*/t0`` against site; speed ``v/v0 = 1/w``.

    Fills the fit fields of ``table`` in place and returns the speed.
    """
    sites = [n for n in table.window_sites() if table.t_star[n - 1] is not None]
    if len(sites) < 3:
        table.status = "insufficient sites"
        raise InsufficientSitesError(
            f"only {len(sites)} detected sites in window {table.window_sites().tolist()}"
        )
    x = np.asarray(sites, dtype=float)
    y = np.array([table.t_star[n - 1] for n in sites])
    slope, intercept = np.polyfit(x, y, 1)
    table.slope, table.intercept = float(slope), float(intercept)
    table.residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    if slope <= 0:
        table.status = "no finite speed"
        table.speed = float("inf")
    else:
        table.status = "ok"
        table.speed = float(1.0 / slope)
    return table.speed


def speed_uncertainty(table: WaitingTimeTable) -> float:
    """Speed change corresponding to the fit residual plus half a grid step per site span."""
    if table.speed is None or not np.isfinite(table.speed):
        return float("nan")
    sites = table.window_sites()
    span = float(sites[-1] - sites[0])
    dw = (table.residual + 0.5 * table.resolution) / span
    return float(table.speed**2 * dw)


def onset_simultaneity(trace: DetectorTrace, epsilon: float = DEFAULT_EPSILON) -> dict:
    """Spread ``max t*_n - min t*_n`` over detected sites ``n >= 2``, in grid steps."""
    step = grid_step(trace)
    detected, missing = {}, []
    for n in trace.sites[1:]:
        t = waiting_time(trace, int(n), epsilon)
        if t is None:
            missing.append(int(n))
        else:
            detected[int(n)] = t
    if not detected:
        return {"spread_steps": float("nan"), "spread": float("nan"), "detected": {}, "undetected": missing}
    spread = max(detected.values()) - min(detected.values())
    return {
        "spread_steps": spread / step,
        "spread": spread,
        "detected": detected,
        "undetected": missing,
    }


def epoch_slopes(trace: DetectorTrace) -> np.ndarray:
    """``t0 dF_n/dt`` just after the epoch, as a forward difference on the grid."""
    j = int(np.flatnonzero(trace.times >= 1.0)[0])
    dt = trace.times[j + 1] - trace.times[j]
    return (trace.F[j + 1] - trace.F[j]) / dt


# -- sweeps -------------------------------------------------------------------

RATIO_AXES = {"Jz/J": ("Jz", "J"), "Jy/Jx": ("Jy", "Jx"), "h/Jx": ("h", "Jx"), "h_long/Jx": ("h_long", "Jx")}
MODEL_AXES = ("J", "delta", "Jz", "Jx", "Jy", "h", "h_long")


def apply_axis(template: ProtocolSpec, name: str, value: float) -> ProtocolSpec:
    """Template with one swept parameter set.

    Ratio axes such as ``Jy/Jx`` scale the numerator by the template's
    denominator. A template without an explicit ``t0`` keeps ``J * t0`` fixed
    when the leading coupling is swept.
    """
    model = template.model
    if name in RATIO_AXES:
        num, den = RATIO_AXES[name]
        model = model.with_(**{num: value * getattr(model, den)})
    elif name in MODEL_AXES:
        model = model.with_(**{name: value})
    else:
        raise KeyError(f"unknown sweep axis {name!r}")
    return template.with_(model=model)


@dataclass
class SweepResult:
    axis_names: tuple
    axis_values: tuple  # one array per axis
    speeds: np.ndarray  # v/v0 per cell, NaN where the fit failed
    status: np.ndarray  # object array of strings
    t0: np.ndarray  # epoch used in each cell
    residuals: np.ndarray
    tables: dict = field(default_factory=dict, repr=False)

    def absolute_speeds(self) -> np.ndarray:
        """Speeds in sites per unit time (``v0 = 1/t0``)."""
        return self.speeds / self.t0

    def rows(self):
        for idx in np.ndindex(self.speeds.shape):
            coords = [float(self.axis_values[k][i]) for k, i in enumerate(idx)]
            if len(coords) == 1:
                coords.append(float("nan"))
            yield coords[0], coords[1], float(self.speeds[idx]), str(self.status[idx])


def _run_cell(spec: ProtocolSpec, epsilon: float, window: tuple):
    trace = detector_trace(run_protocol(spec))
    table = waiting_times(trace, epsilon, window)
    try:
        fit_speed(table)
    except InsufficientSitesError:
        pass
    if table.status == "insufficient sites" and not table.detected()[1:].any():
        table.status = "no propagation"
    return table


def sweep(
    template: ProtocolSpec,
    axes: Sequence[tuple],
    epsilon: float = DEFAULT_EPSILON,
    window: tuple = (3, None),
    workers: int = 1,
) -> SweepResult:
    """Run the full pipeline on every cell of a 1D or 2D parameter grid.

    ``axes`` is a sequence of ``(name, values)``. Failed fits are recorded in
    ``status`` and never abort the sweep.
    """
    if not 1 <= len(axes) <= 2:
        raise ValueError("sweep takes one or two axes")
    names = tuple(a[0] for a in axes)
    values = tuple(np.asarray(a[1], dtype=float) for a in axes)
    for v in values:
        if v.size > 1 and np.any(np.diff(v) <= 0):
            raise ValueError("sweep axis values must be strictly increasing")
    shape = tuple(v.size for v in values)
    specs = {}
    for idx in np.ndindex(shape):
        spec = template
        for k, i in enumerate(idx):
            spec = apply_axis(spec, names[k], values[k][i])
        specs[idx] = spec

    cells = list(specs)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            tables = dict(zip(cells, pool.map(_run_cell, [specs[c] for c in cells], [epsilon] * len(cells), [window] * len(cells))))
    else:
        tables = {}
        for c in cells:
            log.info("sweep cell %s", dict(zip(names, (values[k][i] for k, i in enumerate(c)))))
            tables[c] = _run_cell(specs[c], epsilon, window)

    speeds = np.full(shape, np.nan)
    status = np.empty(shape, dtype=object)
    t0 = np.empty(shape)
    residuals = np.full(shape, np.nan)
    for c, table in tables.items():
        status[c] = table.status
        t0[c] = specs[c].epoch
        if table.status == "ok":
            speeds[c] = table.speed
            residuals[c] = table.residual
    return SweepResult(names, values, speeds, status, t0, residuals, tables)
