"""Built-in parameter sets, one per reproduced figure.

Every preset uses N = 10 and the epoch convention ``J t0 = 0.1`` (``Jx t0``
for the XY models). Trace figures sample ``t/t0`` in ``[0, 20]``; figures
that fit speeds use a longer window so that slow cells still reach the
far end of the fit window.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .models import ModelSpec
from .protocol import DEFAULT_GRID, ProtocolSpec
from .states import MeasurementAxis

N_DEFAULT = 10
SPEED_GRID = np.linspace(0.0, 60.0, 601)


@dataclass(frozen=True, eq=False)
class FigurePreset:
    """A figure recipe.

    ``kind`` selects the emitter: ``trace`` (detector curves), ``slopes``
    (post-epoch slopes against site), ``waiting`` (waiting times per
    coupling value), ``sweep`` (speed over one or two axes) or ``states``
    (speed against one axis for several initial states).
    """

    fig_id: str
    kind: str
    template: ProtocolSpec
    caption: str
    sites: tuple = (1, 2, 3, 4, 5)
    detectors: tuple = ("F",)
    axes: tuple = ()
    states: tuple = ()
    extras: dict = field(default_factory=dict)


def _spec(model: ModelSpec, state="zero", grid=DEFAULT_GRID, **kw) -> ProtocolSpec:
    return ProtocolSpec(model, state, grid=np.array(grid), **kw)


def _presets() -> dict:
    N = N_DEFAULT
    nn = ModelSpec("ising-nn", N, J=1.0)
    lr = ModelSpec("ising-long-range", N, J=1.0, delta=1.0)
    heis = ModelSpec("xxz", N, J=1.0, Jz=1.0)
    txy = ModelSpec("txy", N, Jx=0.7, Jy=0.3, h=1.0)
    ising_x = ModelSpec("txy", N, Jx=1.0, Jy=0.0, h=0.0)
    out = [
        FigurePreset("fig2a", "trace", _spec(nn), "nearest-neighbour Ising, |0...0>; signal stops at site 2",
                     sites=(1, 2, 3, 4)),
        FigurePreset("fig2b", "trace", _spec(lr), "long-range Ising delta=1, |0...0>; all sites respond at once",
                     sites=(2, 3, 5, 10)),
        FigurePreset("fig2c", "trace", _spec(lr, "magnon:1,3"),
                     "long-range Ising, (|100..0> + |0010..0>)/sqrt2; site 3 stays silent", sites=(2, 3, 4, 5)),
        FigurePreset("fig2d", "slopes", _spec(lr), "long-range Ising; t0 dF_n/dt just after the epoch",
                     sites=tuple(range(2, N + 1))),
        FigurePreset("fig3a", "trace", _spec(heis, "pair:1,2"), "isotropic Heisenberg, (|0..0> + |110..0>)/sqrt2",
                     sites=(2, 3, 4, 5, 6)),
        FigurePreset("fig3b", "trace", _spec(heis.with_(boundary="periodic"), "magnon:1,2"),
                     "isotropic Heisenberg ring, (|100..0> + |010..0>)/sqrt2", sites=(2, 3, 4, 5, 6)),
        FigurePreset("fig3c", "waiting", _spec(heis, "pair:1,2", SPEED_GRID),
                     "t*/t0 against site for J = 0.5, 1, 2", axes=(("J", (0.5, 1.0, 2.0)),)),
        FigurePreset("fig3d", "sweep", _spec(heis, "pair:1,2", SPEED_GRID),
                     "speed against Jz/J", axes=(("Jz/J", tuple(np.linspace(-4.0, 4.0, 9))),)),
        FigurePreset("fig4", "trace",
                     _spec(heis.with_(Jz=0.5), "pair:1,2", axis=MeasurementAxis(np.pi / 3, 0.0)),
                     "Heisenberg Jz=0.5, channel axis at theta=pi/3", sites=(2, 3, 4, 5),
                     detectors=("F", "ReO", "D")),
        FigurePreset("fig5a", "trace", _spec(txy), "transverse XY Jx=0.7, Jy=0.3, h=1, |0...0>",
                     sites=(2, 3, 4, 5)),
        FigurePreset("fig5b", "sweep", _spec(ModelSpec("txy", N, Jx=1.0, Jy=0.0, h=0.0), "pair:1,2", SPEED_GRID),
                     "speed over Jy/Jx and h/Jx",
                     axes=(("h/Jx", (0.0, 0.5, 1.0, 1.5, 2.0)), ("Jy/Jx", (0.0, 0.25, 0.5, 0.75, 1.0)))),
        FigurePreset("fig5c", "trace", _spec(txy, "pair:1,2"), "transverse XY Jx=0.7, Jy=0.3, h=1, (|0..0> + |110..0>)/sqrt2",
                     sites=(2, 3, 4, 5)),
        FigurePreset("fig5d", "states", _spec(ising_x, "pair:1,2", SPEED_GRID),
                     "speed against h at Jy=0 for two initial states",
                     axes=(("h/Jx", (0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0)),), states=("pair:1,2", "zero")),
        FigurePreset("fig6", "trace", _spec(ModelSpec("txy-longitudinal", N, Jx=0.7, Jy=0.3, h=1.0, h_long=1.0)),
                     "transverse XY with longitudinal field h'=1, |0...0>", sites=(2, 3, 4, 5, 6, 7, 8, 9, 10)),
    ]
    return {p.fig_id: p for p in out}


PRESETS = _presets()
FIGURE_IDS = tuple(PRESETS)


def get_preset(fig_id: str) -> FigurePreset:
    try:
        return PRESETS[fig_id]
    except KeyError:
        raise KeyError(f"figure: unknown id {fig_id!r}; valid ids: {', '.join(FIGURE_IDS)}") from None
