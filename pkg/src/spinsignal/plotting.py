"""SVG renderings of detector traces, waiting times and sweeps."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed element ids and no timestamp, so reruns give identical files
matplotlib.rcParams.update({"svg.hashsalt": "spinsignal", "svg.fonttype": "none", "font.size": 9})

LABELS = {"F": r"$F_n$", "ReO": r"Re $O_n$", "D": r"$D_n$"}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_trace(path, trace, sites=None, detectors=("F",), title=None) -> Path:
    sites = trace.sites if sites is None else sites
    fig, axes = plt.subplots(len(detectors), 1, figsize=(5.0, 2.4 * len(detectors)), sharex=True, squeeze=False)
    for ax, kind in zip(axes[:, 0], detectors):
        for n in sites:
            ax.plot(trace.times, trace.column(kind, int(n)), lw=1.0, label=f"n={n}")
        ax.axvline(1.0, color="0.6", lw=0.6, ls=":")
        ax.set_ylabel(LABELS.get(kind, kind))
    axes[0, 0].legend(fontsize=7, ncol=3, frameon=False)
    axes[-1, 0].set_xlabel(r"$t/t_0$")
    if title:
        axes[0, 0].set_title(title, fontsize=9)
    fig.tight_layout()
    return _save(fig, path)


def plot_series(path, curves: dict, xlabel: str, ylabel: str, title=None, marker="o") -> Path:
    """One line per entry of ``curves`` (label -> (x, y))."""
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    for label, (x, y) in curves.items():
        ax.plot(x, y, marker=marker, ms=3, lw=1.0, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if len(curves) > 1:
        ax.legend(fontsize=7, frameon=False)
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    return _save(fig, path)


def plot_heatmap(path, result, title=None) -> Path:
    a1, a2 = result.axis_values
    fig, ax = plt.subplots(figsize=(4.5, 3.6))
    mesh = ax.pcolormesh(a2, a1, np.ma.masked_invalid(result.speeds), shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=r"$v/v_0$")
    ax.set_xlabel(result.axis_names[1])
    ax.set_ylabel(result.axis_names[0])
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    return _save(fig, path)
