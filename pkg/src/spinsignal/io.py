"""CSV and JSON writers. Column names and order are part of the output contract."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .analysis import SweepResult, WaitingTimeTable
from .detectors import DetectorTrace

TRACE_HEADER = ("t_over_t0", "site", "F", "O_re", "O_im", "D")
WAITING_HEADER = ("site", "t_star_over_t0", "detected")
SWEEP_HEADER = ("axis1", "axis2", "speed", "status")


def fmt(x) -> str:
    """17 significant digits, so values round-trip exactly."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return "%.17g" % float(x)


def _write(path: Path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def write_trace(path, trace: DetectorTrace) -> Path:
    def rows():
        for j, t in enumerate(trace.times):
            for n in trace.sites:
                o = trace.O[j, n - 1]
                yield fmt(t), int(n), fmt(trace.F[j, n - 1]), fmt(o.real), fmt(o.imag), fmt(trace.D[j, n - 1])

    return _write(path, TRACE_HEADER, rows())


def read_trace(path) -> DetectorTrace:
    data = np.genfromtxt(path, delimiter=",", names=True)
    times = np.unique(data["t_over_t0"])
    n = int(data["site"].max())
    shape = (times.size, n)
    return DetectorTrace(
        times=times,
        F=data["F"].reshape(shape),
        O=(data["O_re"] + 1j * data["O_im"]).reshape(shape),
        D=data["D"].reshape(shape),
    )


def write_waiting_times(path, table: WaitingTimeTable) -> Path:
    rows = [
        (n, fmt(t) if t is not None else "nan", int(t is not None))
        for n, t in enumerate(table.t_star, start=1)
    ]
    return _write(path, WAITING_HEADER, rows)


def write_sweep(path, result: SweepResult) -> Path:
    rows = [(fmt(a), fmt(b), fmt(v), s) for a, b, v, s in result.rows()]
    return _write(path, SWEEP_HEADER, rows)


def write_heatmap(path, result: SweepResult) -> Path:
    """Speed matrix: one row per value of axis 1, one column per value of axis 2."""
    if len(result.axis_names) != 2:
        raise ValueError("heatmap needs a two-axis sweep")
    a1, a2 = result.axis_values
    header = [f"{result.axis_names[0]}\\{result.axis_names[1]}"] + [fmt(v) for v in a2]
    rows = [[fmt(a1[i])] + [fmt(v) for v in result.speeds[i]] for i in range(a1.size)]
    return _write(path, header, rows)


def write_table(path, header, rows) -> Path:
    return _write(path, header, [[fmt(v) if isinstance(v, (float, np.floating)) else v for v in r] for r in rows])


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_summary(path, summary: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(summary), indent=2, sort_keys=True) + "\n")
    return path
