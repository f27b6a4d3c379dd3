"""Command-line front end.

Subcommands: ``simulate``, ``sweep``, ``oracle-check`` and ``figure``.
Settings come from an optional INI file (``--config``) whose sections are
``[model]``, ``[protocol]``, ``[analysis]``, ``[sweep]`` and ``[output]``;
any flag given on the command line overrides the file.

Exit codes: 0 success, 2 configuration error, 3 numerical invariant violated.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import sys
from pathlib import Path

import numpy as np

from .analysis import DEFAULT_EPSILON, sweep
from .detectors import detector_trace
from .figures import emit_figure, simulate, write_sweep_outputs
from .models import ModelError, ModelSpec
from .presets import FIGURE_IDS
from .protocol import DEFAULT_GRID, InvariantViolation, ProtocolError, ProtocolSpec, run_protocol
from .states import MeasurementAxis

log = logging.getLogger("spinsignal")

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3


class ConfigError(ValueError):
    """Bad configuration value; the message names the field."""


# key -> (section, type); flag dest names match the keys
FIELDS = {
    "model": ("model", str),
    "N": ("model", int),
    "J": ("model", float),
    "delta": ("model", float),
    "Jz": ("model", float),
    "Jx": ("model", float),
    "Jy": ("model", float),
    "h": ("model", float),
    "h_long": ("model", float),
    "boundary": ("model", str),
    "state": ("protocol", str),
    "t0": ("protocol", float),
    "theta": ("protocol", float),
    "phi": ("protocol", float),
    "site": ("protocol", int),
    "tmax": ("protocol", float),
    "steps": ("protocol", int),
    "epsilon": ("analysis", float),
    "window": ("analysis", str),
    "axis": ("sweep", str),
    "workers": ("sweep", int),
    "out": ("output", str),
    "plot": ("output", str),
}

DEFAULTS = {
    "model": "xxz", "N": 10, "J": 1.0, "delta": 1.0, "Jz": 1.0, "Jx": 1.0, "Jy": 1.0, "h": 0.0,
    "h_long": 0.0, "boundary": "open", "state": "zero", "t0": None, "theta": 0.0, "phi": 0.0,
    "site": 1, "tmax": float(DEFAULT_GRID[-1]), "steps": DEFAULT_GRID.size - 1,
    "epsilon": DEFAULT_EPSILON, "window": "3:", "axis": None, "workers": 1, "out": "out", "plot": "yes",
}


def _convert(key, raw):
    typ = FIELDS[key][1]
    try:
        return typ(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected {typ.__name__}, got {raw!r}") from None


def load_config(path) -> dict:
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keys are case-sensitive (Jx vs jx)
    try:
        if not parser.read(path):
            raise ConfigError(f"config: cannot read {path}")
    except configparser.Error as exc:
        raise ConfigError(f"config: {exc}") from exc
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            if key not in FIELDS:
                raise ConfigError(f"{section}.{key}: unknown setting")
            if FIELDS[key][0] != section:
                raise ConfigError(f"{section}.{key}: belongs in section [{FIELDS[key][0]}]")
            values[key] = raw if key == "axis" else _convert(key, raw)
    return values


def resolve(args: argparse.Namespace) -> dict:
    """Defaults, then config file, then flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(load_config(args.config))
    for key in FIELDS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def parse_window(text: str) -> tuple:
    lo, sep, hi = str(text).partition(":")
    try:
        lo_v = int(lo) if lo.strip() else 3
        hi_v = int(hi) if hi.strip() else None
    except ValueError:
        raise ConfigError(f"window: expected 'lo:hi' site range, got {text!r}") from None
    if not sep:
        raise ConfigError(f"window: expected 'lo:hi' site range, got {text!r}")
    return lo_v, hi_v


def parse_axis(text: str) -> tuple:
    """``name=start:stop:num`` or ``name=v1,v2,...``."""
    name, sep, spec = str(text).partition("=")
    if not sep or not name.strip():
        raise ConfigError(f"axis: expected 'name=start:stop:num' or 'name=v1,v2', got {text!r}")
    try:
        if ":" in spec:
            start, stop, num = spec.split(":")
            values = np.linspace(float(start), float(stop), int(num))
        else:
            values = np.array([float(v) for v in spec.split(",") if v.strip()])
    except ValueError:
        raise ConfigError(f"axis: cannot parse values in {text!r}") from None
    if values.size == 0:
        raise ConfigError(f"axis: no values in {text!r}")
    return name.strip(), values


def build_spec(cfg: dict) -> ProtocolSpec:
    model = ModelSpec(
        cfg["model"], cfg["N"], J=cfg["J"], delta=cfg["delta"], Jz=cfg["Jz"], Jx=cfg["Jx"], Jy=cfg["Jy"],
        h=cfg["h"], h_long=cfg["h_long"], boundary=cfg["boundary"],
    )
    if cfg["steps"] < 1:
        raise ConfigError(f"steps: need >= 1, got {cfg['steps']}")
    if not cfg["tmax"] > 1.0:
        raise ConfigError(f"tmax: must exceed the epoch (1 in units of t0), got {cfg['tmax']}")
    grid = np.linspace(0.0, cfg["tmax"], cfg["steps"] + 1)
    axis = MeasurementAxis(cfg["theta"], cfg["phi"])
    return ProtocolSpec(model, cfg["state"], t0=cfg["t0"], axis=axis, qdp_site=cfg["site"], grid=grid)


def _plot_flag(cfg) -> bool:
    return str(cfg["plot"]).lower() not in ("no", "false", "0", "off")


# -- commands ---------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = resolve(args)
    spec = build_spec(cfg)
    _, table, summary = simulate(spec, cfg["out"], cfg["epsilon"], parse_window(cfg["window"]), _plot_flag(cfg))
    fit = summary["fit"]
    print(f"wrote {cfg['out']}/trace.csv, waiting_times.csv, summary.json")
    print(f"speed v/v0 = {fit['speed']}  residual = {fit['residual']}  status = {fit['status']}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = resolve(args)
    raw = args.axis if args.axis else ([cfg["axis"]] if cfg["axis"] else [])
    if isinstance(raw, str):
        raw = [raw]
    # a config file may hold both axes separated by ';'
    texts = [part for item in raw for part in str(item).split(";") if part.strip()]
    if not 1 <= len(texts) <= 2:
        raise ConfigError("axis: give one or two sweep axes")
    axes = [parse_axis(t) for t in texts]
    spec = build_spec(cfg)
    try:
        result = sweep(spec, axes, cfg["epsilon"], parse_window(cfg["window"]), cfg["workers"])
    except KeyError as exc:
        raise ConfigError(f"axis: {exc.args[0]}") from None
    write_sweep_outputs(result, spec, cfg["out"], _plot_flag(cfg))
    for a, b, v, s in result.rows():
        print(f"{a:g}\t{b:g}\t{v:.6g}\t{s}")
    return EXIT_OK


ORACLE_TOL = {"txy": 1e-8, "ising-long-range": 1e-10, "xxz": 1e-8}


def oracle_discrepancy(spec: ProtocolSpec) -> float:
    """Largest deviation between exact diagonalization and the model's oracle."""
    from .oracles import ff_protocol_F, longrange_ising_sz, one_magnon_F_grid, single_magnon_chain_F

    m = spec.model
    if m.model == "txy":
        if m.boundary != "open":
            raise ConfigError("boundary: the free-fermion oracle covers open chains")
        ed = detector_trace(run_protocol(spec)).F
        ff = ff_protocol_F(m.n_sites, m.Jx, m.Jy, m.h, spec.epoch, spec.grid, spec.initial_state, spec.axis).F
        return float(np.abs(ed - ff).max())
    if m.model == "ising-long-range":
        if spec.initial_state != "zero":
            raise ConfigError("state: the long-range Ising oracle needs the zero state")
        pair = run_protocol(spec)
        from .states import sz_expectations

        ed = sz_expectations(pair.without)
        ref = np.stack([longrange_ising_sz(n, spec.times, m.n_sites, m.J, m.delta) for n in range(1, m.n_sites + 1)], axis=1)
        return float(np.abs(ed - ref).max())
    if m.model == "xxz":
        # one-magnon Bessel formula against direct single-magnon evolution
        s0 = 4.0 * m.J * spec.epoch
        times = spec.grid[spec.grid >= 1.0] * s0
        sites = np.arange(1, m.n_sites + 1)
        a = one_magnon_F_grid(sites, times, s0)
        b = single_magnon_chain_F(sites, times, s0)
        return float(np.abs(a - b).max())
    raise ConfigError(f"model: no oracle for {m.model!r}; choose from {sorted(ORACLE_TOL)}")


def cmd_oracle_check(args) -> int:
    cfg = resolve(args)
    spec = build_spec(cfg)
    err = oracle_discrepancy(spec)
    tol = ORACLE_TOL[spec.model.model]
    label = {"txy": "max |F_ED - F_ff|", "ising-long-range": "max |<sz>_ED - <sz>_cos|",
             "xxz": "max |F_bessel - F_chain|"}[spec.model.model]
    print(f"{label} = {err:.3e} (tolerance {tol:g})")
    if err > tol:
        print(f"oracle: discrepancy {err:.3e} exceeds {tol:g}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_figure(args) -> int:
    cfg = resolve(args)
    if args.fig_id not in FIGURE_IDS:
        raise ConfigError(f"figure: unknown id {args.fig_id!r}; valid ids: {', '.join(FIGURE_IDS)}")
    out = Path(cfg["out"])
    emit_figure(args.fig_id, out, cfg["epsilon"], parse_window(cfg["window"]), _plot_flag(cfg), cfg["workers"])
    print(f"wrote {args.fig_id} data to {out}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, model_flags=True):
    p.add_argument("--config", help="INI file; flags override its values")
    p.add_argument("--out", help="output directory")
    p.add_argument("--plot", help="write plot.svg (yes/no)")
    p.add_argument("--epsilon", type=float, help="detection threshold (default 1e-5)")
    p.add_argument("--window", help="fit window as lo:hi site range (default 3:N-2)")
    p.add_argument("--workers", type=int, help="parallel sweep workers")
    if not model_flags:
        return
    g = p.add_argument_group("model")
    g.add_argument("--model", help="ising-nn | ising-long-range | xxz | txy | txy-longitudinal")
    g.add_argument("--N", type=int, help="number of sites")
    for name in ("J", "delta", "Jz", "Jx", "Jy", "h"):
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--h-long", dest="h_long", type=float, help="longitudinal field h'")
    g.add_argument("--boundary", help="open | periodic")
    g = p.add_argument_group("protocol")
    g.add_argument("--state", help="zero, ones, ghz, pair:i,j, magnon:i,j, basis:i,.., kets:0100+0010")
    g.add_argument("--t0", type=float, help="epoch time (default 0.1/J)")
    g.add_argument("--theta", type=float, help="channel axis polar angle")
    g.add_argument("--phi", type=float, help="channel axis azimuth")
    g.add_argument("--site", type=int, help="channel site (1-based)")
    g.add_argument("--tmax", type=float, help="last sample time in units of t0")
    g.add_argument("--steps", type=int, help="number of grid intervals")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinsignal", description="Signal propagation after a local measurement in spin chains.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one protocol and write trace, waiting times and summary")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="fit signal speeds over one or two parameter axes")
    _add_common(p)
    p.add_argument("--axis", action="append", help="name=start:stop:num or name=v1,v2 (repeat for 2D)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle-check", help="compare exact diagonalization with an independent solver")
    _add_common(p)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("figure", help="write data and plot for a figure preset")
    p.add_argument("fig_id", help="one of: " + ", ".join(FIGURE_IDS))
    _add_common(p, model_flags=False)
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags already
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ModelError, ProtocolError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
