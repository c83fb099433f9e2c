"""Command-line front end.

Every subcommand resolves its parameters as defaults < preset < config
file < explicit flags, writes its artifacts into ``--out-dir`` and leaves a
``manifest.json`` there.  ``rerun MANIFEST`` replays a run from the
resolved parameters stored in a manifest.

Exit codes: 0 success, 2 usage error, 3 config error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import LLEConfig, cwt_scalogram, orbit_energy_stats, power_spectrum, rosenstein_lle
from .basins import (AttractorLibrary, MatchConfig, basin_entropy, basin_stability,
                     compute_basin_grid, mirror_spot_check)
from .dde import HistorySpec, IntegrationError, OscillatorParams, SolverConfig, Trajectory, integrate
from .io import (read_trajectory_csv, svg_raster, svg_scatter, write_columns, write_json,
                 write_ppm, write_trajectory_binary)
from .lienard import SingularDenominatorError, check_lienard_conditions, lienard_F
from .rng import draw_history
from .sweep import (assign_amplitude_classes, classify_attractor, extract_maxima,
                    group_attractors, run_cell, run_sweep)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4

MANIFEST = "manifest.json"


class ConfigError(Exception):
    pass


class UsageError(Exception):
    pass


def _opt_float(s: str):
    return None if s.lower() in ("none", "") else float(s)


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {s!r}")


# name -> (type, default, help)
MODEL = {
    "alpha": (float, 0.5, "retarded-potential strength"),
    "tau0": (float, 1.0, "maximum delay"),
    "mu": (float, 0.1, "damping rate"),
    "k": (float, 1.0, "stiffness"),
    "m": (float, 1.0, "mass"),
    "sigma": (float, 1.0 / math.sqrt(2.0), "delay-kernel width"),
}
SOLVER = {
    "dt": (float, 0.01, "step size"),
    "t_end": (float, 2000.0, "final time"),
    "transient": (float, 0.7, "fraction of the series discarded as transient"),
    "stride": (int, 1, "record every n-th step"),
    "refine": (_bool, False, "predictor-corrector pass for overlapping delays"),
}
HISTORY = {
    "A": (_opt_float, None, "history amplitude (default: seeded draw)"),
    "omega": (_opt_float, None, "history angular frequency (default: seeded draw)"),
    "phi": (_opt_float, None, "history phase (default: seeded draw)"),
}
COMMON = {
    "seed": (int, 12345, "RNG seed"),
    "threads": (int, 0, "worker processes (0: all cores for sweep/basin, else 1)"),
}
SEARCH = {"search": (int, 0, "if > 0, draw this many seeded histories and report each distinct attractor")}

SPECIFIC = {
    "simulate": {
        "binary": (_bool, False, "also write trajectory.bin"),
        "echo": (_bool, False, "write the history sinusoid continued over [0, t_end] instead"),
    },
    "lienard-check": {
        "x_max": (float, 100.0, "right end of the root scan"),
        "curve_points": (int, 601, "points in the F(x) curve over [-x_curve, x_curve]"),
        "x_curve": (float, 15.0, "half-width of the exported F(x) curve"),
    },
    "sweep": {
        "tau0_min": (float, 0.0, "sweep start"),
        "tau0_max": (float, 11.0, "sweep end"),
        "points": (int, 1200, "tau0 grid points"),
        "histories": (int, 10, "random histories per point"),
        "svg": (_bool, True, "write diagram.svg"),
    },
    "basin": {
        "A": (float, 0.43, "fixed history amplitude"),
        "resolution": (int, 150, "cells per axis"),
        "library_histories": (int, 20, "seeded histories used to build the attractor library"),
        "mirror_samples": (int, 100, "cells checked for mirror symmetry (0 to skip)"),
        "box": (int, 5, "basin-entropy box size"),
        "t_min": (float, 300.0, "earliest assignment time"),
        "chunk": (float, 100.0, "time between matching attempts"),
        "window": (float, 200.0, "trailing window labelled at each attempt"),
        "confirmations": (int, 2, "consecutive matches required"),
    },
    "energy": dict(SEARCH),
    "spectrum": dict(SEARCH, window_kind=(str, "hann", "taper: hann or rect"),
                     input=(str, "", "analyse x from a t,x,y CSV instead of simulating")),
    "cwt": {
        "gamma": (float, 3.0, "Morse symmetry parameter"),
        "time_bandwidth": (float, 60.0, "Morse time-bandwidth product"),
        "n_scales": (int, 96, "number of scales"),
        "f_min": (_opt_float, 0.005, "lowest analysed frequency (cycles/time)"),
        "f_max": (_opt_float, 1.0, "highest analysed frequency (cycles/time)"),
        "time_step": (float, 1.0, "time spacing of exported scalogram rows"),
        "input": (str, "", "analyse x from a t,x,y CSV instead of simulating"),
    },
    "lle": {
        "embed_dim": (int, 3, "embedding dimension"),
        "embed_lag": (int, 10, "embedding delay (samples)"),
        "mean_period": (int, 35, "Theiler window / fit length (samples)"),
        "max_iter": (int, 1500, "divergence horizon (samples)"),
        "fit": (str, "period", "fit rule: period or r2"),
        "sample_dt": (float, 0.2, "spacing of the analysed series"),
        "tau0_min": (_opt_float, None, "scan start (with --points > 1)"),
        "tau0_max": (_opt_float, None, "scan end"),
        "points": (int, 1, "number of tau0 values scanned"),
        "input": (str, "", "analyse x from a t,x,y CSV instead of simulating"),
    },
}

# which shared groups each subcommand uses
GROUPS = {
    "simulate": (MODEL, SOLVER, HISTORY),
    "lienard-check": (MODEL,),
    "sweep": (MODEL, SOLVER),
    "basin": (MODEL, SOLVER),
    "energy": (MODEL, SOLVER, HISTORY),
    "spectrum": (MODEL, SOLVER, HISTORY),
    "cwt": (MODEL, SOLVER, HISTORY),
    "lle": (MODEL, SOLVER, HISTORY),
}

PRESETS = {
    "fig1b": ("sweep", {"alpha": 0.5, "tau0_min": 0.0, "tau0_max": 1.0, "points": 101}),
    "fig2a": ("sweep", {"alpha": 0.5, "tau0_min": 0.0, "tau0_max": 11.0, "points": 1200}),
    "fig2b": ("sweep", {"alpha": 0.9, "tau0_min": 0.0, "tau0_max": 11.0, "points": 1200}),
    "fig4": ("energy", {"alpha": 0.9, "tau0": 5.87, "search": 20}),
    "fig5": ("basin", {"alpha": 0.9, "tau0": 5.87, "A": 0.43, "resolution": 300}),
    "fig6": ("sweep", {"alpha": -0.9, "tau0_min": 0.0, "tau0_max": 11.0, "points": 1200}),
    "fig7": ("spectrum", {"alpha": -0.9, "tau0": 8.5, "search": 40, "seed": 7}),
    "fig8": ("cwt", {"alpha": -0.9, "tau0": 3.35, "t_end": 2000.0}),
    "fig9": ("cwt", {"alpha": -0.9, "tau0": 9.5, "t_end": 3000.0}),
    "fig10": ("lle", {"alpha": -0.9, "tau0_min": 9.1, "tau0_max": 10.5, "points": 15,
                      "t_end": 3000.0}),
}


def _spec(sub: str) -> dict:
    out = {}
    for g in GROUPS.get(sub, ()):
        out.update(g)
    out.update(COMMON)
    out.update(SPECIFIC.get(sub, {}))
    return out


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _add_params(p: argparse.ArgumentParser, spec: dict) -> None:
    for name, (typ, default, help_) in spec.items():
        p.add_argument(_flag(name), dest=name, type=typ, default=argparse.SUPPRESS,
                       help=f"{help_} (default: {default})")
    p.add_argument("--out-dir", dest="out_dir", default=argparse.SUPPRESS,
                   help="artifact directory (default: out/<subcommand>)")
    p.add_argument("--config", dest="config", default=argparse.SUPPRESS,
                   help="flat key = value parameter file")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="retarded-osc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    for name in SPECIFIC:
        _add_params(sub.add_parser(name, help=f"{name} workflow"), _spec(name))
    pp = sub.add_parser("preset", help="run a stored figure bundle")
    pp.add_argument("name", choices=sorted(PRESETS))
    pp.add_argument("rest", nargs=argparse.REMAINDER, help="overrides passed to the underlying subcommand")
    rp = sub.add_parser("rerun", help="replay a run from its manifest")
    rp.add_argument("manifest")
    rp.add_argument("--out-dir", dest="out_dir", default=None)
    return ap


def read_config(path, spec: dict) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment.  Keys use flag names
    with either '-' or '_'."""
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    out = {}
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in spec:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        try:
            out[key] = spec[key][0](val)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"{path}:{n}: bad value for {key}: {exc}") from None
    return out


def resolve(sub: str, given: dict, preset: dict = None) -> dict:
    spec = _spec(sub)
    params = {name: d for name, (_, d, _) in spec.items()}
    params.update(preset or {})
    cfg_path = given.pop("config", None)
    if cfg_path is not None:
        params.update(read_config(cfg_path, spec))
    out_dir = given.pop("out_dir", None)
    params.update(given)
    params["out_dir"] = out_dir or params.get("out_dir") or os.path.join("out", sub)
    return params


# ---------------------------------------------------------------- helpers

def _model(P) -> OscillatorParams:
    return OscillatorParams(alpha=P["alpha"], tau0=P["tau0"], mu=P["mu"], k=P["k"], m=P["m"],
                            sigma=P["sigma"])


def _solver(P, stride=None) -> SolverConfig:
    return SolverConfig(dt=P["dt"], t_end=P["t_end"], transient_fraction=P["transient"],
                        record_stride=P["stride"] if stride is None else stride,
                        refine_overlap=P["refine"])


def _history(P) -> HistorySpec:
    A, w, phi = draw_history(P["seed"], 0, 0)
    return HistorySpec(A if P["A"] is None else P["A"], w if P["omega"] is None else P["omega"],
                       phi if P["phi"] is None else P["phi"])


def _threads(P, parallel: bool) -> int:
    if P["threads"] > 0:
        return P["threads"]
    return (os.cpu_count() or 1) if parallel else 1


def _search(P, model, cfg):
    """Seeded histories grouped into distinct attractors; returns representatives."""
    hists = [HistorySpec(*draw_history(P["seed"], 0, j)) for j in range(P["search"])]
    cells = [run_cell(model, h, cfg, j) for j, h in enumerate(hists)]
    ok = [c for c in cells if c.label is not None]
    labels = assign_amplitude_classes([c.label for c in ok])
    ids = group_attractors(labels)
    reps = {}
    counts = {}
    for c, lab, k in zip(ok, labels, ids):
        counts[k] = counts.get(k, 0) + 1
        reps.setdefault(k, (c, lab))
    return [(k, reps[k][0], reps[k][1], counts[k]) for k in sorted(reps)]


# ---------------------------------------------------------------- handlers

def cmd_simulate(P, out: Path) -> dict:
    model, cfg, h = _model(P), _solver(P), _history(P)
    if P["echo"]:
        t = cfg.dt_stored * np.arange(cfg.n_steps // cfg.record_stride + 1)
        x = h.A * np.sin(h.omega * t + h.phi)
        y = h.A * h.omega * np.cos(h.omega * t + h.phi)
        traj = Trajectory(0.0, cfg.dt_stored, x, y, -h.omega ** 2 * x, {"echo": True})
    else:
        traj = integrate(model, h, cfg)
    traj.to_csv(out / "trajectory.csv")
    files = ["trajectory.csv"]
    if P["binary"]:
        write_trajectory_binary(out / "trajectory.bin", traj)
        files.append("trajectory.bin")
    mx = extract_maxima(traj, cfg.transient_fraction)
    lab = classify_attractor(mx, traj, cfg.transient_fraction)
    summary = {
        "history": h.as_dict(),
        "final_state": [float(traj.x[-1]), float(traj.y[-1])],
        "label": lab.as_dict(),
        "energy": orbit_energy_stats(traj, cfg.transient_fraction).as_dict(),
    }
    write_json(out / "summary.json", summary)
    return {"outputs": files + ["summary.json"], "summary": summary}


def cmd_lienard(P, out: Path) -> dict:
    model = _model(P)
    rep = check_lienard_conditions(model, x_max=P["x_max"])
    x = np.linspace(-P["x_curve"], P["x_curve"], P["curve_points"])
    write_columns(out / "F_curve.csv", ["x", "F_numeric", "F_analytic"], x,
                  lienard_F(x, model, "numeric"), lienard_F(x, model, "analytic"))
    summary = dict(rep.as_dict(), all_conditions=rep.all_conditions)
    write_json(out / "report.json", summary)
    return {"outputs": ["F_curve.csv", "report.json"], "summary": summary}


def cmd_sweep(P, out: Path) -> dict:
    d = run_sweep(_model(P), (P["tau0_min"], P["tau0_max"]), P["points"], P["histories"],
                  _solver(P), P["seed"], threads=_threads(P, True))
    d.to_csv(out / "bifurcation.csv")
    summary = d.summary()
    write_json(out / "summary.json", summary)
    files = ["bifurcation.csv", "summary.json"]
    if P["svg"]:
        xs, ys, cs = [], [], []
        for line in list(d.csv_rows())[1:]:
            t, _, v, kind, c = line.split(",")
            if kind in ("failed", "fixed-point"):
                continue
            xs.append(float(t))
            ys.append(float(v))
            cs.append(int(c))
        svg_scatter(out / "diagram.svg", xs, ys, cs, xlabel="tau0", ylabel="x max")
        files.append("diagram.svg")
    return {"outputs": files, "summary": summary}


def cmd_basin(P, out: Path) -> dict:
    model, cfg = _model(P), _solver(P)
    match = MatchConfig(P["t_min"], P["chunk"], P["window"], P["confirmations"])
    lib = AttractorLibrary.from_seed(model, cfg, P["seed"], P["library_histories"])
    n = P["resolution"]
    grid = compute_basin_grid(model, P["A"], (n, n), cfg, lib, match, threads=_threads(P, True))
    grid.to_csv(out / "labels.csv")
    write_ppm(out / "basin.ppm", grid.labels)
    svg_raster(out / "basin.svg", grid.labels, cell=max(1, 600 // n))
    s_b, s_bb = basin_entropy(grid, P["box"])
    summary = {
        "library": lib.as_dict(),
        "stability": basin_stability(grid),
        "basin_entropy": s_b,
        "boundary_basin_entropy": s_bb,
        "boundary_fraction": grid.boundary_fraction(),
        "mean_stop_time": grid.meta["mean_stop_time"],
    }
    if P["mirror_samples"] > 0:
        summary["mirror_check"] = mirror_spot_check(grid, model, cfg, P["mirror_samples"],
                                                    P["seed"], match)
    write_json(out / "summary.json", summary)
    return {"outputs": ["labels.csv", "basin.ppm", "basin.svg", "summary.json"], "summary": summary}


def _attractor_set(P):
    """Representative trajectories: one per distinct attractor, or the single history."""
    model, cfg = _model(P), _solver(P)
    if P.get("search", 0) > 0:
        out = []
        for k, cell, lab, count in _search(P, model, cfg):
            out.append(({"attractor": k, "label": lab.as_dict(), "count": count,
                         "history": cell.history.as_dict()}, integrate(model, cell.history, cfg)))
        return out, cfg
    h = _history(P)
    return [({"history": h.as_dict()}, integrate(model, h, cfg))], cfg


def cmd_energy(P, out: Path) -> dict:
    items, cfg = _attractor_set(P)
    rows = []
    for info, traj in items:
        rows.append(dict(info, energy=orbit_energy_stats(traj, cfg.transient_fraction).as_dict()))
    summary = {"attractors": rows}
    write_json(out / "energy.json", summary)
    return {"outputs": ["energy.json"], "summary": summary}


def _input_series(path: str):
    t, x, _ = read_trajectory_csv(path)
    if t.shape[0] < 2:
        raise UsageError(f"{path}: need at least two samples")
    return x, float(t[1] - t[0])


def cmd_spectrum(P, out: Path) -> dict:
    if P["input"]:
        x, dt = _input_series(P["input"])
        items = [({"input": P["input"]}, (x, dt))]
    else:
        got, cfg = _attractor_set(P)
        items = [(info, (tr.x[tr.tail(cfg.transient_fraction)], tr.dt_stored)) for info, tr in got]
    rows = []
    files = []
    for n, (info, (x, dt)) in enumerate(items):
        sp = power_spectrum(x, dt, P["window_kind"])
        name = "spectrum.csv" if len(items) == 1 else f"spectrum_{n}.csv"
        write_columns(out / name, ["freq", "power"], sp.frequencies, sp.power)
        files.append(name)
        rows.append(dict(info, file=name, dominant=sp.dominant(5).tolist(), variance=sp.variance,
                         total_power=float(sp.power.sum()), window_kind=sp.window_kind))
    summary = {"spectra": rows}
    write_json(out / "summary.json", summary)
    return {"outputs": files + ["summary.json"], "summary": summary}


def cmd_cwt(P, out: Path) -> dict:
    if P["input"]:
        x, dt = _input_series(P["input"])
    else:
        cfg = _solver(P)
        tr = integrate(_model(P), _history(P), cfg)
        x, dt = tr.x[tr.tail(cfg.transient_fraction)], tr.dt_stored
    step = max(1, int(round(P["time_step"] / dt)))
    sc = cwt_scalogram(x, dt, P["gamma"], P["time_bandwidth"], P["n_scales"], P["f_min"], P["f_max"],
                       time_stride=step)
    with open(out / "cwt.csv", "w", newline="\n") as fh:
        fh.write("t,freq,magnitude\n")
        for i, t in enumerate(sc.times):
            for f, m in zip(sc.frequencies, sc.magnitude[i]):
                fh.write(f"{t!r},{f!r},{m!r}\n")
    col = sc.magnitude.sum(axis=1)
    summary = {
        "n_times": len(sc.times), "n_scales": len(sc.scales),
        "f_band": [float(sc.frequencies.min()), float(sc.frequencies.max())],
        "wavelet": {"gamma": sc.gamma, "time_bandwidth": sc.time_bandwidth},
        "column_power_cv": float(col.std() / col.mean()) if col.mean() > 0 else 0.0,
        "ridge_median_freq": float(np.median(sc.ridge())),
    }
    write_json(out / "summary.json", summary)
    return {"outputs": ["cwt.csv", "summary.json"], "summary": summary}


def cmd_lle(P, out: Path) -> dict:
    lcfg = LLEConfig(P["embed_dim"], P["embed_lag"], P["mean_period"], P["max_iter"], fit=P["fit"])
    if P["input"]:
        x, dt_in = _input_series(P["input"])
        step = max(1, int(round(P["sample_dt"] / dt_in)))
        series = [(None, x[::step], dt_in * step)]
    else:
        stride = max(1, int(round(P["sample_dt"] / P["dt"])))
        cfg = _solver(P, stride=stride)
        if P["points"] > 1:
            lo = P["tau0"] if P["tau0_min"] is None else P["tau0_min"]
            hi = P["tau0"] if P["tau0_max"] is None else P["tau0_max"]
            taus = np.linspace(lo, hi, P["points"])
        else:
            taus = [P["tau0"]]
        h = _history(P)
        series = []
        for t0 in taus:
            tr = integrate(_model(P).replace(tau0=float(t0)), h, cfg)
            series.append((float(t0), tr.x, tr.dt_stored))
    rows = []
    files = []
    for n, (t0, x, dt) in enumerate(series):
        res = rosenstein_lle(x, dt, lcfg)
        name = "divergence.csv" if len(series) == 1 else f"divergence_{n}.csv"
        write_columns(out / name, ["iter", "mean_log_divergence"], np.arange(res.divergence.shape[0]),
                      res.divergence)
        files.append(name)
        rows.append(dict({"tau0": t0} if t0 is not None else {}, **res.as_dict(), file=name))
    summary = {"results": rows} if len(rows) > 1 else rows[0]
    write_json(out / "lle.json", summary)
    return {"outputs": files + ["lle.json"], "summary": summary}


HANDLERS = {
    "simulate": cmd_simulate,
    "lienard-check": cmd_lienard,
    "sweep": cmd_sweep,
    "basin": cmd_basin,
    "energy": cmd_energy,
    "spectrum": cmd_spectrum,
    "cwt": cmd_cwt,
    "lle": cmd_lle,
}


def execute(sub: str, P: dict, preset: str = None) -> dict:
    """Run a resolved parameter set and write its manifest."""
    out = Path(P["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    res = HANDLERS[sub](P, out)
    manifest = {
        "subcommand": sub,
        "preset": preset,
        "params": {k: P[k] for k in sorted(P)},
        "rng_seed": P["seed"],
        "tool_version": __version__,
        "inputs": [P["input"]] if P.get("input") else [],
        "outputs": res["outputs"],
        "out_dir": str(out),
        "wall_clock_seconds": time.perf_counter() - t0,
    }
    write_json(out / MANIFEST, manifest)
    return res


def _load_manifest(path: str) -> dict:
    try:
        with open(path) as fh:
            m = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from None
    if m.get("subcommand") not in HANDLERS or not isinstance(m.get("params"), dict):
        raise ConfigError(f"{path}: not a run manifest")
    return m


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    given = {k: v for k, v in vars(ns).items() if k != "command"}
    try:
        if ns.command == "rerun":
            m = _load_manifest(ns.manifest)
            P = dict(m["params"])
            spec = _spec(m["subcommand"])
            unknown = set(P) - set(spec) - {"out_dir"}
            if unknown:
                raise ConfigError(f"{ns.manifest}: unknown parameters {sorted(unknown)}")
            if ns.out_dir:
                P["out_dir"] = ns.out_dir
            execute(m["subcommand"], P, m.get("preset"))
            return EXIT_OK
        if ns.command == "preset":
            sub, bundle = PRESETS[ns.name]
            sp = _Parser(prog=f"retarded-osc preset {ns.name}")
            _add_params(sp, _spec(sub))
            try:
                extra = vars(sp.parse_args(ns.rest))
            except SystemExit as exc:
                return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
            explicit_out = "out_dir" in extra
            P = resolve(sub, extra, bundle)
            if not explicit_out:
                P["out_dir"] = os.path.join("out", ns.name)
            execute(sub, P, ns.name)
            return EXIT_OK
        P = resolve(ns.command, given)
        execute(ns.command, P)
        return EXIT_OK
    except ConfigError as exc:
        print(f"retarded-osc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, SingularDenominatorError, FloatingPointError) as exc:
        print(f"retarded-osc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError) as exc:
        print(f"retarded-osc: invalid value: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
