"""Acceptance criteria at their stated tolerances, one test per criterion.

Every test records a single PASS/FAIL line (collected in ``ACCEPTANCE_LINES``
and printed in the terminal summary) before asserting. Run on its own with
``pytest tests/test_acceptance.py -v`` or as a script.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ACCEPTANCE_LINES, brute_detectors
from spinsignal.analysis import (
    apply_axis,
    epoch_slopes,
    onset_simultaneity,
    speed_uncertainty,
    sweep,
    waiting_time,
)
from spinsignal.detectors import detector_trace
from spinsignal.models import ModelSpec
from spinsignal.oracles import ff_protocol_F, one_magnon_F_grid, single_magnon_chain_F
from spinsignal.presets import PRESETS, SPEED_GRID, get_preset
from spinsignal.protocol import ProtocolSpec, make_initial_state, run_protocol
from spinsignal.states import MeasurementAxis

FEW_GRID_STEPS = 5  # reading of "within a few grid steps"


def record(cid: str, ok: bool, detail: str):
    line = f"criterion {cid:<3} {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def trace_of(spec):
    return detector_trace(run_protocol(spec))


# 1 -----------------------------------------------------------------------------

def test_criterion_01_no_signalling():
    models = sorted({(p.template.model.model, p.template.model) for p in PRESETS.values()}, key=lambda x: x[0])
    models = [m for _, m in models]
    worst = [0.0]

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(
        k=st.integers(0, len(models) - 1),
        theta=st.floats(0, np.pi),
        phi=st.floats(0, 2 * np.pi),
        state=st.sampled_from(["zero", "pair:1,2", "magnon:1,3", "ghz", "kets:0110000001+1000000000"]),
    )
    def check(k, theta, phi, state):
        spec = ProtocolSpec(models[k], state, axis=MeasurementAxis(theta, phi), grid=[0.0, 1.0])
        F = trace_of(spec).F
        worst[0] = max(worst[0], np.abs(F[1, 1:]).max())

    check()
    for p in PRESETS.values():
        F = trace_of(p.template.with_(grid=np.array([0.0, 1.0]))).F
        worst[0] = max(worst[0], np.abs(F[1, 1:]).max())
    record("1", worst[0] < 1e-12, f"max_(n!=1) |F_n(t0)| = {worst[0]:.2e} over presets and random axes (< 1e-12)")


# 2 -----------------------------------------------------------------------------

def test_criterion_02_ising_nn_locality():
    tr = trace_of(get_preset("fig2a").template)
    after = tr.times >= 1.0
    far = np.abs(tr.F[after][:, 2:]).max()
    near = np.abs(tr.F[:, 1]).max()
    record("2", far < 1e-10 and near > 1e-2, f"max |F_n>=3| = {far:.2e} (< 1e-10), max |F_2| = {near:.3f} (> 1e-2)")


# 3 -----------------------------------------------------------------------------

def test_criterion_03_long_range_instant_and_blocked():
    tr = trace_of(get_preset("fig2b").template)
    first_after = tr.times[tr.times > 1.0][0]
    ts = [waiting_time(tr, n) for n in tr.sites]
    instant = all(t is not None and np.isclose(t, first_after) for t in ts)
    blocked = np.abs(trace_of(get_preset("fig2c").template).F[:, 2]).max()
    record("3", instant and blocked < 1e-10,
           f"t*_n = {sorted(set(ts))} (first grid point after t0 = {first_after:g}); max |F_3| = {blocked:.2e} (< 1e-10)")


# 4 -----------------------------------------------------------------------------

def test_criterion_04_slope_ordering():
    tr = trace_of(get_preset("fig2d").template)
    s = epoch_slopes(tr)[1:]
    ok = bool(np.all(np.diff(s) < 0))
    record("4", ok, "t0 dF_n/dt at t0+ for n=2..10: " + ", ".join(f"{v:.3e}" for v in s))


# 5 -----------------------------------------------------------------------------

def test_criterion_05_silent_states():
    m = ModelSpec("xxz", 10, J=1.0, Jz=1.0)
    worst = 0.0
    for state in ("ghz", "zero", "ones"):
        tr = trace_of(ProtocolSpec(m, state))
        worst = max(worst, np.abs(tr.F).max(), np.abs(tr.O).max(), np.abs(tr.D).max())
    record("5", worst < 1e-12, f"max |F|,|O|,|D| over GHZ, |0..0>, |1..1> = {worst:.2e} (< 1e-12)")


# 6 -----------------------------------------------------------------------------

def test_criterion_06a_one_magnon_vs_chain():
    s0 = 0.4  # J t0 = 0.1 in units of hbar/4J
    times = s0 * np.linspace(1.0, 40.0, 157)
    sites = np.arange(-20, 40)  # front stays > 50 sites from the 200-site chain ends
    err = np.abs(one_magnon_F_grid(sites, times, s0) - single_magnon_chain_F(sites, times, s0, 200)).max()
    record("6a", err < 1e-8, f"Bessel formula vs 200-site one-magnon evolution: max err {err:.2e} (< 1e-8)")


def test_criterion_06b_one_magnon_vs_ed():
    grid = np.linspace(0.0, 40.0, 81)
    s0 = 0.4
    spec = ProtocolSpec(ModelSpec("xxz", 12, J=1.0, Jz=1.0), "magnon:1,2", t0=0.1, grid=grid)
    ed = trace_of(spec).F
    after = grid >= 1.0
    oracle = one_magnon_F_grid(np.arange(1, 13), grid[after] * s0, s0)
    err = np.abs(ed[after] - oracle).max()

    # the same comparison on a ring, where site n > 7 sits at n - 12
    ring = trace_of(spec.with_(model=spec.model.with_(boundary="periodic"))).F
    mapped = np.array([n if n <= 7 else n - 12 for n in range(1, 13)])
    ring_err = np.abs(ring[after] - one_magnon_F_grid(mapped, grid[after] * s0, s0)).max(axis=1)
    tt = grid[after]
    lim = tt[np.flatnonzero(ring_err > 2e-2)[0] - 1] if np.any(ring_err > 2e-2) else tt[-1]
    record("6b", err < 2e-2,
           f"Bessel formula vs ED N=12 open chain, t/t0<=40: max err {err:.3f} (< 2e-2); "
           f"ring agrees within 2e-2 up to t/t0={lim:g}")


# 7 -----------------------------------------------------------------------------

def test_criterion_07_free_fermion_vs_ed():
    spec = get_preset("fig5a").template
    m = spec.model
    ed = trace_of(spec).F
    ff = ff_protocol_F(m.n_sites, m.Jx, m.Jy, m.h, spec.epoch, spec.grid).F
    err = np.abs(ed - ff).max()
    record("7", err < 1e-8, f"max |F_ED - F_ff| = {err:.2e} (< 1e-8), N=10 Jx=0.7 Jy=0.3 h=1")


# 8 -----------------------------------------------------------------------------

def test_criterion_08a_speed_proportional_to_J():
    p = get_preset("fig3c")
    res = sweep(p.template, p.axes)
    J = res.axis_values[0]
    ratio = res.absolute_speeds() / J
    dev = np.abs(ratio / ratio.mean() - 1).max()
    # for reference: the same fit with the epoch held at 0.1 for every J
    fixed = sweep(p.template.with_(t0=0.1), p.axes)
    fixed_ratio = fixed.absolute_speeds() / J
    fixed_dev = np.abs(fixed_ratio / fixed_ratio.mean() - 1).max()
    record("8a", dev < 0.10,
           f"v/J = {np.round(ratio, 4).tolist()} with J t0 = 0.1, deviation {dev:.1%} (< 10%); "
           f"with t0 fixed at 0.1 the deviation is {fixed_dev:.1%}")


def test_criterion_08b_anisotropy_maximum():
    p = get_preset("fig3d")
    res = sweep(p.template, p.axes)
    x, v = res.axis_values[0], res.speeds
    zero = int(np.flatnonzero(x == 0.0)[0])
    at_zero_max = bool(np.all(v[zero] >= v))
    variation = (v.max() - v.min()) / v.max()
    ok = at_zero_max and 0.05 <= variation <= 0.15
    record("8b", ok, f"v(Jz/J) over {x.min():g}..{x.max():g} = {np.round(v, 4).tolist()}; "
           f"max at Jz=0: {at_zero_max}; variation {variation:.1%} (about 10%, accepted 5-15%)")


def test_criterion_08c_txy_ridge():
    p = get_preset("fig5b")
    res = sweep(p.template, p.axes)
    jy = res.axis_values[1]
    argmax = [float(jy[np.nanargmax(row)]) for row in res.speeds]
    ok = all(a == 1.0 for a in argmax)
    record("8c", ok, f"argmax Jy/Jx per h row = {argmax}")


@pytest.fixture(scope="module")
def fig5d_sweeps():
    p = get_preset("fig5d")
    return p, {s: sweep(p.template.with_(initial_state=s), p.axes) for s in p.states}


def _unimodal(v):
    v = v[np.isfinite(v)]
    k = int(np.argmax(v))
    rises = bool(np.all(np.diff(v[: k + 1]) > 0))
    falls = bool(np.all(np.diff(v[k:]) <= 0))
    return 0 < k < v.size - 1 and rises and falls


def test_criterion_08d_field_optimum(fig5d_sweeps):
    p, res = fig5d_sweeps
    h = np.asarray(p.axes[0][1])
    parts, ok = [], True
    for state, r in res.items():
        good = _unimodal(r.speeds)
        ok &= good
        peak = h[np.nanargmax(r.speeds)]
        parts.append(f"{state}: {np.round(r.speeds, 3).tolist()} peak h={peak:g} unimodal={good}")
    record("8d", ok, "; ".join(parts))


def test_criterion_08e_state_independence(fig5d_sweeps):
    p, res = fig5d_sweeps
    a, b = (res[s] for s in p.states)
    h = np.asarray(p.axes[0][1])
    both = np.isfinite(a.speeds) & np.isfinite(b.speeds)
    ua = np.array([speed_uncertainty(a.tables[(i,)]) for i in range(h.size)])
    ub = np.array([speed_uncertainty(b.tables[(i,)]) for i in range(h.size)])
    agree = np.abs(a.speeds - b.speeds) <= ua + ub
    ok = bool(np.all(agree[both]))
    worst = int(np.nanargmax(np.where(both, np.abs(a.speeds - b.speeds) / (ua + ub), np.nan)))
    record("8e", ok, f"speeds agree within fit uncertainty at {int(agree[both].sum())}/{int(both.sum())} fields; "
           f"worst h={h[worst]:g}: {a.speeds[worst]:.3f}+-{ua[worst]:.3f} vs {b.speeds[worst]:.3f}+-{ub[worst]:.3f}")


# 9 -----------------------------------------------------------------------------

def test_criterion_09_mixed_sector_detectors():
    tr = trace_of(get_preset("fig4").template)
    pre = tr.times < 1.0
    zero_before = max(np.abs(tr.F[pre]).max(), np.abs(tr.O[pre]).max(), np.abs(tr.D[pre]).max()) == 0.0
    step = tr.times[1] - tr.times[0]
    sites = range(2, tr.n_sites + 1)
    onsets = {k: [waiting_time(tr, n, kind=k) for n in sites] for k in ("F", "ReO", "D")}
    all_detected = all(t is not None for v in onsets.values() for t in v)
    monotone = {k: all_detected and all(b >= a for a, b in zip(v, v[1:])) for k, v in onsets.items()}
    spread = [
        (max(ts) - min(ts)) / step
        for ts in zip(*onsets.values())
        if all(t is not None for t in ts)
    ]
    close = all_detected and max(spread) <= FEW_GRID_STEPS
    ok = zero_before and all_detected and all(monotone.values()) and close
    record("9", ok, f"zero before t0: {zero_before}; nondecreasing onsets {monotone}; "
           f"largest per-site onset spread {max(spread):.0f} grid steps (<= {FEW_GRID_STEPS}); "
           + "; ".join(f"{k} t*={np.round(v, 2).tolist()}" for k, v in onsets.items()))


# 10 ----------------------------------------------------------------------------

def test_criterion_10_nonintegrable_simultaneity():
    spec = get_preset("fig6").template
    stats = onset_simultaneity(trace_of(spec))
    integrable = trace_of(spec.with_(model=spec.model.with_(h_long=0.0), grid=SPEED_GRID))
    ts = [waiting_time(integrable, n) for n in range(2, 11)]
    grows = all(t is not None for t in ts) and ts[-1] > ts[0] + 5.0
    ok = stats["spread_steps"] <= 2 and not stats["undetected"] and grows
    record("10", ok, f"h'=1 onset spread {stats['spread_steps']:.0f} grid steps (<= 2), onsets "
           f"{[round(stats['detected'][n], 2) for n in sorted(stats['detected'])]}; "
           f"h'=0 onsets grow with n: {grows}")


# 11 ----------------------------------------------------------------------------

def test_criterion_11_brute_force_density_matrix():
    grid = np.linspace(0.0, 10.0, 21)
    worst = 0.0
    for p in PRESETS.values():
        tpl = p.template
        # first and last cell of any swept axis as well
        specs = [tpl] + [apply_axis(tpl, name, v) for name, vals in p.axes for v in (vals[0], vals[-1])]
        for s in specs:
            spec = s.with_(model=s.model.with_(n_sites=6), grid=grid)
            tr = trace_of(spec)
            F, O, D = brute_detectors(spec, make_initial_state(spec.initial_state, 6).amplitudes)
            worst = max(worst, np.abs(tr.F - F).max(), np.abs(tr.O - O).max(), np.abs(tr.D - D).max())
    record("11", worst < 1e-10, f"branch ensemble vs explicit density matrix, all presets at N=6: max err {worst:.2e} (< 1e-10)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
