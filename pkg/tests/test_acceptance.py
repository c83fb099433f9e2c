"""End-to-end acceptance checks.

Each test prints one ``CRITERION n: PASS|FAIL`` line with the measured
values and pinned tolerances; the lines are repeated in the pytest terminal
summary.  Run directly with ``python tests/test_acceptance.py``; the
module is marked ``slow`` so ``-m "not slow"`` skips it.
"""

import math
import os
import sys
import time

import numpy as np
import pytest

from retarded_oscillator.analysis import (LLEConfig, orbit_energy_stats, power_spectrum,
                                          rosenstein_lle)
from retarded_oscillator.basins import (AttractorLibrary, basin_entropy, basin_stability,
                                        compute_basin_grid, mirror_spot_check)
from retarded_oscillator.cli import main as cli_main
from retarded_oscillator.dde import HistorySpec, OscillatorParams, SolverConfig, integrate
from retarded_oscillator.lienard import check_lienard_conditions, integrate_lienard, lienard_F
from retarded_oscillator.rng import draw_history
from retarded_oscillator.sweep import (FIXED_POINT, PERIODIC,
                                       assign_amplitude_classes, group_attractors, run_cell,
                                       run_sweep)

try:
    from conftest import record
except ImportError:  # executed as a script from another directory
    sys.path.insert(0, os.path.dirname(__file__))
    from conftest import record

pytestmark = pytest.mark.slow

SEED = 12345
THREADS = os.cpu_count() or 1

# pinned tolerances
HOPF_BAND_A05 = (0.18, 0.21)
LIENARD_ROOT_BAND = (9.0, 11.0)
PEAK_AMPLITUDE, PEAK_REL = 6.0, 0.15
DEATH_OVERLAP = (4.0, 5.25)
MULTI_ONSET, MULTI_TOL = 6.1, 0.3
E1_TARGET, E2_TARGET, ENERGY_REL = 0.4, 26.0, 0.25
BASIN_MIN_FRACTION = 0.01
NEG_HOPF, NEG_HOPF_TOL = 2.4, 0.2
PITCHFORK, PITCHFORK_TOL = 2.7, 0.3
SUPERPOSITION_ENERGY_REL = 0.10
PEAK_MATCH_REL = 0.05
LOW_BAND_FACTOR = 0.6
LOW_PEAK_BINS = 3
LLE_THRESHOLD = 0.05
LLE_FRACTION = 0.9


def verdict(n, parts, seconds, budget):
    """Record one line; ``parts`` is a list of (description, ok)."""
    parts = parts + [(f"runtime {seconds:.1f}s < {budget:g}s", seconds < budget)]
    ok = all(p for _, p in parts)
    detail = "; ".join(f"{d} [{'ok' if p else 'miss'}]" for d, p in parts)
    record(f"CRITERION {n}: {'PASS' if ok else 'FAIL'} | {detail}")
    return ok


def in_band(v, lo, hi):
    return v is not None and lo <= v <= hi


def within(v, target, rel):
    return v is not None and abs(v - target) <= rel * abs(target)


# ---------------------------------------------------------------- 1

def test_criterion_1_hopf_onset():
    t0 = time.perf_counter()
    d = run_sweep(OscillatorParams(alpha=0.5), (0.1, 0.3), 41, 10, SolverConfig(t_end=2000),
                  SEED, THREADS)
    onset = d.hopf_onset()
    ok = verdict(1, [(f"onset {onset} in {list(HOPF_BAND_A05)}", in_band(onset, *HOPF_BAND_A05))],
                 time.perf_counter() - t0, 120)
    assert ok


# ---------------------------------------------------------------- 2

def test_criterion_2_lienard_report():
    t0 = time.perf_counter()
    p = OscillatorParams(alpha=0.5, tau0=1.0)
    r = check_lienard_conditions(p, x_max=100.0)
    parts = [
        (f"F(0) = {lienard_F(0.0, p)}", lienard_F(0.0, p) == 0.0 and r.F_at_zero == 0.0),
        (f"F'(0) = {r.Fprime_at_zero:.4f} < 0", r.Fprime_at_zero < 0),
        (f"positive roots {r.n_sign_changes} == 1", r.n_sign_changes == 1),
        (f"root a = {r.root_a:.4f} in {list(LIENARD_ROOT_BAND)}", in_band(r.root_a, *LIENARD_ROOT_BAND)),
        (f"monotone to x = {r.x_max:g}", r.monotone_beyond_root and r.x_max >= 100.0),
    ]
    assert verdict(2, parts, time.perf_counter() - t0, 1)


# ---------------------------------------------------------------- 3, 4

@pytest.fixture(scope="module")
def sweep_a05():
    t0 = time.perf_counter()
    d = run_sweep(OscillatorParams(alpha=0.5), (0.0, 11.0), 200, 10, SolverConfig(t_end=2000),
                  SEED, THREADS)
    return d, time.perf_counter() - t0


def test_criterion_3_peak_and_death(sweep_a05):
    d, secs = sweep_a05
    taus, amps = d.tau0_values, d.amplitudes()
    sel = (taus >= 1.5) & (taus <= 2.5)
    k = int(np.argmax(np.where(sel, amps, -np.inf)))
    peak, at = float(amps[k]), float(taus[k])
    wins = d.amplitude_death_windows()
    hit = [w for w in wins if w[1] >= DEATH_OVERLAP[0] and w[0] <= DEATH_OVERLAP[1]]
    parts = [
        (f"max amplitude {peak:.3f} at tau0 {at:.3f} within {PEAK_REL:.0%} of {PEAK_AMPLITUDE}",
         within(peak, PEAK_AMPLITUDE, PEAK_REL)),
        (f"death windows {[[round(a, 3), round(b, 3)] for a, b in wins]} overlap {list(DEATH_OVERLAP)}",
         bool(hit)),
    ]
    assert verdict(3, parts, secs, 900)


def test_criterion_4_multistability(sweep_a05):
    d, secs = sweep_a05
    onset = d.multistability_onset()
    parts = [(f"onset {onset} within {MULTI_TOL} of {MULTI_ONSET}",
              onset is not None and abs(onset - MULTI_ONSET) <= MULTI_TOL)]
    assert verdict(4, parts, secs, 600)


# ---------------------------------------------------------------- 5, 6

def _distinct(params, cfg, seed, n):
    """Representative (cell, label, count) per distinct attractor of n seeded histories."""
    cells = [run_cell(params, HistorySpec(*draw_history(seed, 0, j)), cfg, j) for j in range(n)]
    ok = [c for c in cells if c.label is not None]
    labels = assign_amplitude_classes([c.label for c in ok])
    reps, counts = {}, {}
    for c, lab, k in zip(ok, labels, group_attractors(labels)):
        reps.setdefault(k, (c, lab))
        counts[k] = counts.get(k, 0) + 1
    return [(reps[k][0], reps[k][1], counts[k]) for k in sorted(reps)]


def test_criterion_5_energy_levels():
    t0 = time.perf_counter()
    p = OscillatorParams(alpha=0.9, tau0=5.87)
    cfg = SolverConfig()
    found = [(c, lab, n, orbit_energy_stats(integrate(p, c.history, cfg)))
             for c, lab, n in _distinct(p, cfg, SEED, 20) if lab.kind != FIXED_POINT]
    fund = [f for f in found if f[1].amplitude_class == 1 and f[1].mean_sign != 0]
    exc = [f for f in found if f[1].amplitude_class == 2]
    desc = ", ".join(f"{lab.name}/sign {lab.mean_sign:+d}/E {s.mean_E:.3f}" for _, lab, _, s in found)
    pair = len(fund) == 2 and {f[1].mean_sign for f in fund} == {1, -1}
    parts = [
        (f"distinct attractors {len(found)} == 3 ({desc})", len(found) == 3),
        ("mirror fundamental pair present", pair),
        (f"fundamental E {[round(f[3].mean_E, 3) for f in fund]} within {ENERGY_REL:.0%} of {E1_TARGET}",
         pair and all(within(f[3].mean_E, E1_TARGET, ENERGY_REL) for f in fund)),
        (f"excited E {[round(f[3].mean_E, 3) for f in exc]} within {ENERGY_REL:.0%} of {E2_TARGET}",
         len(exc) == 1 and within(exc[0][3].mean_E, E2_TARGET, ENERGY_REL)),
    ]
    if pair and len(exc) == 1:
        top = max(f[3].max_E for f in fund)
        parts.append((f"shells disjoint: max_E fund {top:.3f} < min_E excited {exc[0][3].min_E:.3f}",
                      top < exc[0][3].min_E))
    assert verdict(5, parts, time.perf_counter() - t0, 60)


def test_criterion_6_basins():
    t0 = time.perf_counter()
    p = OscillatorParams(alpha=0.9, tau0=5.87)
    cfg = SolverConfig()
    lib = AttractorLibrary.from_seed(p, cfg, SEED, n_histories=20)
    grid = compute_basin_grid(p, 0.43, (150, 150), cfg, lib, threads=THREADS)
    stab = basin_stability(grid)
    s_b, s_bb = basin_entropy(grid, 5)
    mirror = mirror_spot_check(grid, p, cfg, n_samples=100, seed=SEED)
    fr = stab["by_label"]
    required = ("E1+", "E1-", "E2")
    fr_txt = ", ".join(f"{k} {v:.4f}" for k, v in fr.items())
    parts = [
        (f"fractions {fr_txt}, unresolved {stab['unresolved']:.4f}", True),
        (f"E1+, E1-, E2 each > {BASIN_MIN_FRACTION}",
         all(fr.get(k, 0.0) > BASIN_MIN_FRACTION for k in required)),
        (f"basin entropy S_b {s_b:.4f} > 0 (S_bb {s_bb:.4f})", s_b > 0),
        (f"mirror spot check {mirror['passed']}/{mirror['checked']}",
         mirror["checked"] == 100 and mirror["passed"] == 100),
    ]
    assert verdict(6, parts, time.perf_counter() - t0, 1800)


# ---------------------------------------------------------------- 7

def test_criterion_7_negative_alpha():
    t0 = time.perf_counter()
    d = run_sweep(OscillatorParams(alpha=-0.9), (0.0, 3.2), 65, 10, SolverConfig(), SEED, THREADS)
    low = d.tau0_values <= 2.0 + 1e-12
    quiet = bool(np.all(d.all_rest()[low]))
    hopf, pf = d.hopf_onset(), d.pitchfork_onset()
    parts = [
        ("all histories rest for tau0 <= 2.0", quiet),
        (f"Hopf onset {hopf} within {NEG_HOPF_TOL} of {NEG_HOPF}",
         hopf is not None and abs(hopf - NEG_HOPF) <= NEG_HOPF_TOL),
        (f"opposite-sign branches from {pf} within {PITCHFORK_TOL} of {PITCHFORK}",
         pf is not None and abs(pf - PITCHFORK) <= PITCHFORK_TOL),
    ]
    assert verdict(7, parts, time.perf_counter() - t0, 600)


# ---------------------------------------------------------------- 8

def _peak_near(f, refs, rel):
    return any(abs(f - r) <= rel * r for r in refs)


def test_criterion_8_superposition():
    t0 = time.perf_counter()
    p = OscillatorParams(alpha=-0.9, tau0=8.5)
    cfg = SolverConfig()
    found = _distinct(p, cfg, 7, 40)
    p6 = [(c, lab) for c, lab, _ in found if lab.kind == PERIODIC and lab.period == 6]
    pair = len(p6) == 2 and {lab.mean_sign for _, lab in p6} == {1, -1}
    sup = None
    for c, lab, _ in found:
        if lab.kind == PERIODIC and lab.period == 6 or lab.kind == FIXED_POINT:
            continue
        tr = integrate(p, c.history, cfg)
        x = tr.x[tr.tail(cfg.transient_fraction)]
        if x.min() < -1.0 and x.max() > 1.0:
            sup = (c, lab, tr)
            break
    parts = [(f"period-6 mirror pair ({len(p6)} periodic(6) found)", pair),
             ("attractor visiting x < -1 and x > 1", sup is not None)]
    if pair and sup is not None:
        tr6 = integrate(p, p6[0][0].history, cfg)
        e6 = orbit_energy_stats(tr6).mean_E
        es = orbit_energy_stats(sup[2]).mean_E
        parts.append((f"superposition ({sup[1].name}) E {es:.4f} vs period-6 E {e6:.4f}, "
                      f"ratio {es / e6:.3f} in [{1 - SUPERPOSITION_ENERGY_REL:.2f}, 1]",
                      e6 * (1 - SUPERPOSITION_ENERGY_REL) <= es <= e6))
        tail = cfg.transient_fraction
        s6 = power_spectrum(tr6.x[tr6.tail(tail)], tr6.dt_stored)
        ss = power_spectrum(sup[2].x[sup[2].tail(tail)], sup[2].dt_stored)
        top6, tops = s6.dominant(3), ss.dominant(5)
        shared = all(_peak_near(f, tops, PEAK_MATCH_REL) for f in top6)
        parts.append((f"period-6 peaks {np.round(top6, 4).tolist()} among superposition peaks "
                      f"{np.round(tops, 4).tolist()} ({PEAK_MATCH_REL:.0%})", shared))
        f_dom = float(top6[0])
        df = s6.frequencies[1]
        lo6 = s6.dominant(5, 0.0)
        lo6 = lo6[lo6 < LOW_BAND_FACTOR * f_dom]
        los = ss.dominant(50, 0.0)
        los = los[los < LOW_BAND_FACTOR * f_dom][:1]
        differ = los.size == 1 and np.all(np.abs(lo6 - los[0]) > LOW_PEAK_BINS * df)
        parts.append((f"low band (< {LOW_BAND_FACTOR} f_dom): superposition peak "
                      f"{np.round(los, 4).tolist()} vs period-6 {np.round(lo6, 4).tolist()}", bool(differ)))
    assert verdict(8, parts, time.perf_counter() - t0, 600)


# ---------------------------------------------------------------- 9

def test_criterion_9_lyapunov():
    t0 = time.perf_counter()
    h = HistorySpec(*draw_history(SEED, 0, 0))
    cfg = SolverConfig(t_end=3000.0, record_stride=20)
    lcfg = LLEConfig(embed_dim=3, embed_lag=10, mean_period=35, max_iter=1500)

    def lle(tau0):
        tr = integrate(OscillatorParams(alpha=-0.9, tau0=tau0), h, cfg)
        return rosenstein_lle(tr.x, tr.dt_stored, lcfg).lambda_max

    l91, l95 = lle(9.1), lle(9.5)
    scan = np.array([lle(float(t)) for t in np.linspace(9.3, 10.5, 20)])
    frac = float(np.mean(scan > LLE_THRESHOLD))
    parts = [
        (f"lambda(9.1) {l91:.4f} < {LLE_THRESHOLD}", l91 < LLE_THRESHOLD),
        (f"lambda(9.5) {l95:.4f} > {LLE_THRESHOLD}", l95 > LLE_THRESHOLD),
        (f"scan [9.3, 10.5]: {frac:.0%} of 20 above threshold (min {scan.min():.4f}), "
         f">= {LLE_FRACTION:.0%}", frac >= LLE_FRACTION),
    ]
    assert verdict(9, parts, time.perf_counter() - t0, 1200)


# ---------------------------------------------------------------- 10

def _reflection_ok():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(5):
        h = HistorySpec(rng.uniform(0.1, 3), rng.uniform(-math.pi, math.pi), rng.uniform(0, math.pi))
        p = OscillatorParams(alpha=0.5, tau0=float(rng.uniform(0.5, 3)))
        a = integrate(p, h, SolverConfig(t_end=60))
        b = integrate(p, h.mirrored(), SolverConfig(t_end=60))
        worst = max(worst, float(np.max(np.abs(a.x + b.x))), float(np.max(np.abs(a.y + b.y))))
    return worst


def _zero_delay_err():
    p = OscillatorParams(alpha=0.5, tau0=0.0)
    h = HistorySpec(1.0, 1.0, 0.0)
    tr = integrate(p, h, SolverConfig(t_end=50))
    g, wd = 0.05, math.sqrt(1.5 - 0.05 ** 2)
    x = np.exp(-g * tr.t) * (1.0 / wd) * np.sin(wd * tr.t)
    return float(np.max(np.abs(tr.x - x)))


def _reduction_err():
    p = OscillatorParams(alpha=0.5, tau0=0.1)
    cfg = SolverConfig(t_end=50)
    worst = 0.0
    for x0, y0 in ((1.0, 0.0), (0.5, 0.5), (2.0, -1.0)):
        a = integrate(p, HistorySpec(math.hypot(x0, y0), 1.0, math.atan2(x0, y0)), cfg)
        b = integrate_lienard(p, x0, y0, cfg)
        worst = max(worst, float(np.max(np.abs(a.x - b.x))), float(np.max(np.abs(a.y - b.y))))
    return worst


def _parseval_worst():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for n in (64, 257, 1000, 4096):
        for kind in ("hann", "rect"):
            sp = power_spectrum(rng.normal(size=n), 0.1, kind)
            worst = max(worst, abs(sp.power.sum() / sp.variance - 1.0))
    return worst


def _lle_scale_gap():
    x = integrate(OscillatorParams(alpha=-0.9, tau0=9.5), HistorySpec(*draw_history(SEED, 0, 0)),
                  SolverConfig(t_end=1500, record_stride=20)).x
    a = rosenstein_lle(x, 0.2).lambda_max
    b = rosenstein_lle(250.0 * x + 3.0, 0.2).lambda_max
    return abs(a - b)


def _entropy_ok():
    rng = np.random.default_rng(SEED)
    for _ in range(20):
        n = int(rng.integers(1, 6))
        lab = rng.integers(0, n, size=(20, 20))
        sb, sbb = basin_entropy(lab, 5)
        if not (0 <= sb <= sbb + 1e-12 and sbb <= math.log(min(n, 25)) + 1e-12):
            return False
        perm = rng.permutation(n) + 10
        sb2, sbb2 = basin_entropy(perm[lab], 5)
        if abs(sb - sb2) > 1e-14 or abs(sbb - sbb2) > 1e-14:
            return False
    return True


def _rerun_identical(tmp):
    import json

    a, b = tmp / "orig", tmp / "replay"
    runs = [
        ["simulate", "--alpha", "0.9", "--tau0", "5.87", "--t-end", "300", "--binary", "true"],
        ["lienard-check", "--tau0", "0.5"],
        ["sweep", "--alpha", "0.5", "--tau0-min", "0.1", "--tau0-max", "0.5", "--points", "3",
         "--histories", "2", "--t-end", "300"],
        ["spectrum", "--alpha", "-0.9", "--tau0", "8.5", "--t-end", "500"],
        ["lle", "--alpha", "-0.9", "--tau0", "9.5", "--t-end", "800", "--max-iter", "300"],
    ]
    for i, argv in enumerate(runs):
        if cli_main(argv + ["--out-dir", str(a / str(i))]) != 0:
            return False
        if cli_main(["rerun", str(a / str(i) / "manifest.json"), "--out-dir", str(b / str(i))]) != 0:
            return False
        outs = json.loads((a / str(i) / "manifest.json").read_text())["outputs"]
        if not all((a / str(i) / f).read_bytes() == (b / str(i) / f).read_bytes() for f in outs):
            return False
    return True


def test_criterion_10_properties(tmp_path):
    t0 = time.perf_counter()
    refl, zd, red = _reflection_ok(), _zero_delay_err(), _reduction_err()
    pars, gap = _parseval_worst(), _lle_scale_gap()
    parts = [
        (f"reflection max deviation {refl:.2e} < 1e-8", refl < 1e-8),
        (f"zero-delay closed form error {zd:.2e} < 1e-8", zd < 1e-8),
        (f"DDE vs reduction at tau0 0.1: {red:.4f} < 0.05", red < 0.05),
        (f"Parseval worst relative gap {pars:.2e} < 1e-2", pars < 1e-2),
        (f"LLE scale invariance gap {gap:.2e} < 1e-6", gap < 1e-6),
        ("entropy bounds and permutation invariance", _entropy_ok()),
        ("bit-identical rerun of five subcommands", _rerun_identical(tmp_path)),
    ]
    assert verdict(10, parts, time.perf_counter() - t0, 300)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
