"""Run a protocol or a figure preset and write its tables, summary and plot."""

from __future__ import annotations

import logging
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import io, plotting
from .analysis import (
    DEFAULT_EPSILON,
    InsufficientSitesError,
    apply_axis,
    epoch_slopes,
    fit_speed,
    onset_simultaneity,
    speed_uncertainty,
    sweep,
    waiting_times,
)
from .detectors import detector_trace
from .presets import FigurePreset, get_preset
from .protocol import ProtocolSpec, check_invariants, run_protocol
from .states import nats_to_bits

log = logging.getLogger(__name__)


def describe(spec: ProtocolSpec) -> dict:
    state = spec.initial_state if isinstance(spec.initial_state, str) else "explicit"
    return {
        "model": asdict(spec.model),
        "initial_state": state,
        "t0": spec.epoch,
        "axis": {"theta": spec.axis.theta, "phi": spec.axis.phi},
        "qdp_site": spec.qdp_site,
        "grid": {"start": float(spec.grid[0]), "stop": float(spec.grid[-1]), "samples": int(spec.grid.size)},
    }


def _fit_report(table) -> dict:
    try:
        fit_speed(table)
    except InsufficientSitesError as exc:
        log.info("speed fit skipped: %s", exc)
    return {
        "status": table.status,
        "speed": table.speed,
        "speed_uncertainty": speed_uncertainty(table),
        "slope": table.slope,
        "intercept": table.intercept,
        "residual": table.residual,
        "fit_window": table.window_sites().tolist(),
        "epsilon": table.epsilon,
        "resolution": table.resolution,
    }


def simulate(spec: ProtocolSpec, out_dir, epsilon=DEFAULT_EPSILON, window=(3, None), plot=True,
             sites=None, detectors=("F",), title=None):
    """Full pipeline for one protocol; returns ``(trace, table, summary)``."""
    out = Path(out_dir)
    pair = run_protocol(spec)
    check_invariants(pair)
    trace = detector_trace(pair)
    table = waiting_times(trace, epsilon, window)
    summary = {"parameters": describe(spec), "fit": _fit_report(table)}
    summary["trace_drift"] = pair.trace_drift()
    summary["max_abs_F"] = float(np.abs(trace.F).max())
    summary["max_abs_D_nats"] = float(np.abs(trace.D).max())
    summary["max_abs_D_bits"] = float(nats_to_bits(np.abs(trace.D).max()))
    summary["onset_spread"] = onset_simultaneity(trace, epsilon)
    io.write_trace(out / "trace.csv", trace)
    io.write_waiting_times(out / "waiting_times.csv", table)
    io.write_summary(out / "summary.json", summary)
    if plot:
        plotting.plot_trace(out / "plot.svg", trace, sites=sites, detectors=detectors, title=title)
    return trace, table, summary


def _emit_trace(p: FigurePreset, out, epsilon, window, plot, workers):
    return simulate(p.template, out, epsilon, window, plot, p.sites, p.detectors, p.caption)[2]


def _emit_slopes(p: FigurePreset, out, epsilon, window, plot, workers):
    trace, _, summary = simulate(p.template, out, epsilon, window, False)
    slopes = epoch_slopes(trace)
    sites = np.asarray(p.sites)
    io.write_table(out / "slopes.csv", ("site", "t0_dF_dt"), [(int(n), float(slopes[n - 1])) for n in sites])
    summary["epoch_slopes"] = {int(n): float(slopes[n - 1]) for n in sites}
    io.write_summary(out / "summary.json", summary)
    if plot:
        plotting.plot_series(out / "plot.svg", {"slope": (sites, slopes[sites - 1])}, "site n",
                             r"$t_0\, dF_n/dt$ at $t_0^+$", p.caption)
    return summary


def _emit_waiting(p: FigurePreset, out, epsilon, window, plot, workers):
    name, values = p.axes[0]
    rows, curves, fits = [], {}, {}
    for value in values:
        spec = apply_axis(p.template, name, value)
        trace = detector_trace(run_protocol(spec))
        table = waiting_times(trace, epsilon, window)
        fits[f"{name}={value:g}"] = dict(_fit_report(table), t0=spec.epoch)
        for n, t in enumerate(table.t_star, start=1):
            ok = t is not None
            rows.append((float(value), spec.epoch, n, t if ok else float("nan"),
                         t * spec.epoch if ok else float("nan"), int(ok)))
        ts = np.array([np.nan if t is None else t for t in table.t_star])
        curves[f"{name}={value:g}"] = (np.arange(1, ts.size + 1), ts)
    io.write_table(out / f"{p.fig_id}.csv", (name, "t0", "site", "t_star_over_t0", "t_star", "detected"), rows)
    summary = {"parameters": describe(p.template), "axis": name, "fits": fits}
    io.write_summary(out / "summary.json", summary)
    if plot:
        plotting.plot_series(out / "plot.svg", curves, "site n", r"$t^*/t_0$", p.caption)
    return summary


def _emit_sweep(p: FigurePreset, out, epsilon, window, plot, workers):
    result = sweep(p.template, p.axes, epsilon, window, workers)
    return write_sweep_outputs(result, p.template, out, plot, p.caption)


def write_sweep_outputs(result, template, out, plot=True, title=None) -> dict:
    out = Path(out)
    io.write_sweep(out / "sweep.csv", result)
    summary = {
        "parameters": describe(template),
        "axes": {n: v.tolist() for n, v in zip(result.axis_names, result.axis_values)},
        "speeds": result.speeds.tolist(),
        "status": result.status.tolist(),
        "residuals": result.residuals.tolist(),
        "t0": result.t0.tolist(),
    }
    io.write_summary(out / "summary.json", summary)
    if len(result.axis_names) == 2:
        io.write_heatmap(out / "heatmap.csv", result)
        if plot:
            plotting.plot_heatmap(out / "plot.svg", result, title)
    elif plot:
        x = result.axis_values[0]
        plotting.plot_series(out / "plot.svg", {"speed": (x, result.speeds)}, result.axis_names[0], r"$v/v_0$", title)
    return summary


def _emit_states(p: FigurePreset, out, epsilon, window, plot, workers):
    name, values = p.axes[0]
    rows, curves, per_state = [], {}, {}
    for state in p.states:
        result = sweep(p.template.with_(initial_state=state), p.axes, epsilon, window, workers)
        unc = [speed_uncertainty(result.tables[(i,)]) for i in range(len(values))]
        per_state[state] = {"speeds": result.speeds.tolist(), "uncertainty": unc,
                            "residuals": result.residuals.tolist(), "status": result.status.tolist()}
        for i, v in enumerate(values):
            rows.append((state, float(v), float(result.speeds[i]), float(unc[i]), result.status[i]))
        curves[state] = (np.asarray(values), result.speeds)
    io.write_table(out / "speeds.csv", ("state", name, "speed", "speed_uncertainty", "status"), rows)
    summary = {"parameters": describe(p.template), "axis": name, "values": list(values), "states": per_state}
    io.write_summary(out / "summary.json", summary)
    if plot:
        plotting.plot_series(out / "plot.svg", curves, name, r"$v/v_0$", p.caption)
    return summary


EMITTERS = {
    "trace": _emit_trace,
    "slopes": _emit_slopes,
    "waiting": _emit_waiting,
    "sweep": _emit_sweep,
    "states": _emit_states,
}


def emit_figure(fig_id: str, out_dir, epsilon=DEFAULT_EPSILON, window=(3, None), plot=True, workers=1) -> dict:
    """Write the data (and plot) for one figure preset into ``out_dir``."""
    preset = get_preset(fig_id)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = EMITTERS[preset.kind](preset, out, epsilon, window, plot, workers)
    summary["figure"] = fig_id
    summary["caption"] = preset.caption
    io.write_summary(out / "summary.json", summary)
    return summary
