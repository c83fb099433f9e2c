"""Maxima-map bifurcation diagrams over the maximum delay tau0.

Each (tau0 point, history) cell is integrated independently, reduced to the
local maxima of its post-transient x series and labelled.  Attractors are
compared through their maxima signatures; energy levels ("amplitude
classes") group attractors whose mean energies lie within a factor
``LEVEL_RATIO`` of each other.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .dde import HistorySpec, IntegrationError, OscillatorParams, SolverConfig, Trajectory, integrate
from .rng import draw_history

FIXED_POINT = "fixed-point"
PERIODIC = "periodic"
IRREGULAR = "quasiperiodic-or-chaotic"

FIXED_POINT_AMPLITUDE = 1e-3
CLUSTER_REL_TOL = 0.02
CLUSTER_ABS_TOL = 1e-3
IRREGULAR_REL_TOL = 0.05
MAX_PERIOD = 12
LEVEL_RATIO = 4.0
# fraction of the post-transient window (from its end) used for the decay test
FINAL_PORTION = 0.25
# relative mean-energy drift between the window halves tolerated for a settled orbit
SETTLED_REL_TOL = 0.05


@dataclass(frozen=True, eq=False)
class MaximaSet:
    """Local maxima of the post-transient series.

    ``values`` is sorted; ``sequence`` keeps time order.
    """

    values: np.ndarray
    sequence: np.ndarray
    count_raw: int
    mean_x: float

    def __len__(self) -> int:
        return self.count_raw

    @property
    def empty(self) -> bool:
        return self.count_raw == 0


@dataclass(frozen=True)
class AttractorLabel:
    kind: str
    period: Optional[int] = None
    amplitude_class: int = -1
    signature: tuple = ()
    mean_x: float = 0.0
    amplitude: float = 0.0
    energy: float = 0.0
    settled: bool = True

    @property
    def name(self) -> str:
        return f"periodic({self.period})" if self.kind == PERIODIC else self.kind

    @property
    def tolerance(self) -> float:
        return max(CLUSTER_REL_TOL * self.amplitude, CLUSTER_ABS_TOL)

    @property
    def mean_sign(self) -> int:
        if abs(self.mean_x) <= self.tolerance:
            return 0
        return 1 if self.mean_x > 0 else -1

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "period": self.period,
            "amplitude_class": self.amplitude_class,
            "signature": list(self.signature),
            "mean_x": self.mean_x,
            "amplitude": self.amplitude,
            "energy": self.energy,
            "settled": self.settled,
        }


def _refined_peak(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    # vertex of the parabola through three equally spaced samples
    curv = a - 2.0 * b + c
    out = b.copy()
    ok = curv < 0.0
    out[ok] = b[ok] - (a[ok] - c[ok]) ** 2 / (8.0 * curv[ok])
    return out


def extract_maxima(traj: Trajectory, transient_fraction: float, minima: bool = False) -> MaximaSet:
    """Local maxima (x_{i-1} < x_i >= x_{i+1}) after discarding the transient.

    Strict peaks are refined by quadratic interpolation; plateaus report their
    first sample.  With ``minima=True`` the local minima are returned instead.
    """
    x = np.asarray(traj.x[traj.tail(transient_fraction)])
    if x.shape[0] < 3:
        raise ValueError("need at least 3 post-transient samples")
    mean_x = float(np.mean(x))
    s = -x if minima else x
    a, b, c = s[:-2], s[1:-1], s[2:]
    hit = (a < b) & (b >= c)
    strict = hit & (b > c)
    vals = b[hit].copy()
    refined = _refined_peak(a[strict], b[strict], c[strict])
    vals[strict[hit]] = refined
    if minima:
        vals = -vals
    return MaximaSet(np.sort(vals), vals, int(vals.shape[0]), mean_x)


def _clusters(values: np.ndarray, tol: float) -> list:
    if values.shape[0] == 0:
        return []
    cuts = np.nonzero(np.diff(values) > tol)[0] + 1
    return np.split(values, cuts)


def classify_attractor(maxima: MaximaSet, traj: Trajectory,
                       transient_fraction: float = 0.7) -> AttractorLabel:
    """Label the post-transient motion as fixed point, periodic(n) or irregular."""
    sl = traj.tail(transient_fraction)
    x = np.asarray(traj.x[sl])
    y = np.asarray(traj.y[sl])
    e = 0.5 * (x * x + y * y)
    energy = float(np.mean(e))
    half = len(e) // 2
    e1, e2 = float(np.mean(e[:half])), float(np.mean(e[half:]))
    settled = abs(e1 - e2) <= SETTLED_REL_TOL * max(e1, e2)
    final = x[int(len(x) * (1.0 - FINAL_PORTION)):]
    if final.size == 0 or np.max(np.abs(final)) < FIXED_POINT_AMPLITUDE or maxima.empty:
        return AttractorLabel(FIXED_POINT, amplitude_class=0, mean_x=maxima.mean_x,
                              amplitude=float(np.max(np.abs(final))) if final.size else 0.0,
                              energy=energy)
    amplitude = float(np.max(np.abs(x)))
    tol = max(CLUSTER_REL_TOL * amplitude, CLUSTER_ABS_TOL)
    groups = _clusters(maxima.values, tol)
    if len(groups) <= MAX_PERIOD and all(g[-1] - g[0] < tol for g in groups):
        sig = tuple(float(np.mean(g)) for g in groups)
        return AttractorLabel(PERIODIC, len(groups), signature=sig, mean_x=maxima.mean_x,
                              amplitude=amplitude, energy=energy, settled=settled)
    sig = tuple(float(q) for q in np.quantile(maxima.values, [0.0, 0.1, 0.5, 0.9, 1.0]))
    return AttractorLabel(IRREGULAR, signature=sig, mean_x=maxima.mean_x,
                          amplitude=amplitude, energy=energy, settled=settled)


def same_attractor(a: AttractorLabel, b: AttractorLabel) -> bool:
    """Identity rule: equal kind and period, matching signatures, same mean_x sign."""
    if a.kind != b.kind or a.period != b.period:
        return False
    if a.kind == FIXED_POINT:
        return True
    if len(a.signature) != len(b.signature):
        return False
    amp = max(a.amplitude, b.amplitude)
    rel = CLUSTER_REL_TOL if a.kind == PERIODIC else IRREGULAR_REL_TOL
    tol = max(rel * amp, CLUSTER_ABS_TOL)
    if any(abs(p - q) > tol for p, q in zip(a.signature, b.signature)):
        return False
    return a.mean_sign == b.mean_sign


def assign_amplitude_classes(labels: list) -> list:
    """Group labels into energy levels: 0 is the rest state, 1.. by rising energy.

    A new level starts when the mean energy jumps by more than LEVEL_RATIO
    over the previous attractor in energy order.
    """
    order = sorted((i for i, lab in enumerate(labels) if lab is not None and lab.kind != FIXED_POINT),
                   key=lambda i: labels[i].energy)
    out = list(labels)
    level = 0
    prev = None
    for i in order:
        e = labels[i].energy
        if prev is None or e > LEVEL_RATIO * prev:
            level += 1
        prev = e
        out[i] = replace(labels[i], amplitude_class=level)
    for i, lab in enumerate(labels):
        if lab is not None and lab.kind == FIXED_POINT:
            out[i] = replace(lab, amplitude_class=0)
    return out


def group_attractors(labels: list) -> list:
    """Attractor index per label (None stays None), first-seen order."""
    reps: list = []
    ids = []
    for lab in labels:
        if lab is None:
            ids.append(None)
            continue
        for k, r in enumerate(reps):
            if same_attractor(lab, r):
                ids.append(k)
                break
        else:
            reps.append(lab)
            ids.append(len(reps) - 1)
    return ids


@dataclass(frozen=True, eq=False)
class SweepCell:
    history_index: int
    history: HistorySpec
    maxima: Optional[MaximaSet]
    label: Optional[AttractorLabel]
    attractor_id: Optional[int] = None
    error: Optional[str] = None


def run_cell(params: OscillatorParams, history: HistorySpec, cfg: SolverConfig, index: int = 0) -> SweepCell:
    """Integrate one history and reduce it to maxima and a label."""
    try:
        traj = integrate(params, history, cfg)
    except IntegrationError as exc:
        return SweepCell(index, history, None, None, error=str(exc))
    mx = extract_maxima(traj, cfg.transient_fraction)
    return SweepCell(index, history, mx, classify_attractor(mx, traj, cfg.transient_fraction))


def _cell_job(job):
    params, history, cfg, j = job
    return run_cell(params, history, cfg, j)


def _finalize_point(cells: list) -> list:
    labels = assign_amplitude_classes([c.label for c in cells])
    ids = group_attractors(labels)
    return [replace(c, label=lab, attractor_id=k) for c, lab, k in zip(cells, labels, ids)]


@dataclass(frozen=True, eq=False)
class BifurcationDiagram:
    params: OscillatorParams
    cfg: SolverConfig
    tau0_values: np.ndarray
    cells: list
    rng_seed: int
    meta: dict = field(default_factory=dict)

    @property
    def n_histories(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    def amplitudes(self) -> np.ndarray:
        """Largest asymptotic maximum of x per tau0 point (0 where all cells rest)."""
        out = np.zeros(len(self.tau0_values))
        for i, row in enumerate(self.cells):
            vals = [c.maxima.values[-1] for c in row
                    if c.label is not None and c.label.kind != FIXED_POINT and not c.maxima.empty]
            out[i] = max(vals) if vals else 0.0
        return out

    def oscillating(self) -> np.ndarray:
        return np.array([any(c.label is not None and c.label.kind != FIXED_POINT for c in row)
                         for row in self.cells])

    def all_rest(self) -> np.ndarray:
        return np.array([all(c.label is not None and c.label.kind == FIXED_POINT for c in row)
                         for row in self.cells])

    def n_levels(self) -> np.ndarray:
        """Distinct energy levels held by settled oscillatory attractors per point."""
        return np.array([len({c.label.amplitude_class for c in row
                              if c.label is not None and c.label.amplitude_class > 0
                              and c.label.settled})
                         for row in self.cells])

    def symmetry_broken(self) -> np.ndarray:
        """Points holding periodic attractors with mean_x of both signs."""
        out = []
        for row in self.cells:
            signs = {c.label.mean_sign for c in row
                     if c.label is not None and c.label.kind == PERIODIC}
            out.append(1 in signs and -1 in signs)
        return np.array(out)

    def hopf_onset(self) -> Optional[float]:
        osc = self.oscillating()
        idx = np.nonzero(osc)[0]
        return float(self.tau0_values[idx[0]]) if idx.size else None

    def pitchfork_onset(self) -> Optional[float]:
        idx = np.nonzero(self.symmetry_broken())[0]
        return float(self.tau0_values[idx[0]]) if idx.size else None

    def _windows(self, mask: np.ndarray) -> list:
        out = []
        i = 0
        n = len(mask)
        while i < n:
            if mask[i]:
                j = i
                while j + 1 < n and mask[j + 1]:
                    j += 1
                out.append([float(self.tau0_values[i]), float(self.tau0_values[j])])
                i = j + 1
            else:
                i += 1
        return out

    def amplitude_death_windows(self) -> list:
        """Runs of all-rest points lying strictly after the first onset."""
        osc = self.oscillating()
        idx = np.nonzero(osc)[0]
        if idx.size == 0:
            return []
        mask = self.all_rest().copy()
        mask[:idx[0]] = False
        # a window must be closed by a renewed onset
        last_osc = idx[-1]
        mask[last_osc:] = False
        return self._windows(mask)

    def multistability_windows(self) -> list:
        return self._windows(self.n_levels() >= 2)

    def multistability_onset(self) -> Optional[float]:
        idx = np.nonzero(self.n_levels() >= 2)[0]
        return float(self.tau0_values[idx[0]]) if idx.size else None

    def failures(self) -> int:
        return sum(1 for row in self.cells for c in row if c.error is not None)

    def summary(self) -> dict:
        amps = self.amplitudes()
        k = int(np.argmax(amps)) if amps.size else 0
        return {
            "hopf_onset": self.hopf_onset(),
            "amplitude_death_windows": self.amplitude_death_windows(),
            "multistability_windows": self.multistability_windows(),
            "multistability_onset": self.multistability_onset(),
            "pitchfork_onset": self.pitchfork_onset(),
            "max_amplitude": float(amps[k]) if amps.size else 0.0,
            "max_amplitude_tau0": float(self.tau0_values[k]) if amps.size else None,
            "n_points": len(self.tau0_values),
            "n_histories": self.n_histories,
            "failed_cells": self.failures(),
            "rng_seed": self.rng_seed,
        }

    def csv_rows(self):
        yield "tau0,history_index,max_value,label_kind,amplitude_class"
        for tau0, row in zip(self.tau0_values, self.cells):
            for c in row:
                if c.label is None:
                    yield f"{tau0:.10g},{c.history_index},nan,failed,-1"
                    continue
                kind = c.label.name
                cls = c.label.amplitude_class
                if c.label.kind == FIXED_POINT:
                    vals = [0.0]
                elif c.label.kind == PERIODIC:
                    vals = c.label.signature
                else:
                    vals = c.maxima.values
                for v in vals:
                    yield f"{tau0:.10g},{c.history_index},{v:.10g},{kind},{cls}"

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            for line in self.csv_rows():
                fh.write(line + "\n")


def sweep_histories(seed: int, n_points: int, n_histories: int) -> list:
    return [[HistorySpec(*draw_history(seed, i, j)) for j in range(n_histories)]
            for i in range(n_points)]


def run_sweep(params_base: OscillatorParams, tau0_range, n_points: int, n_histories: int,
              cfg: SolverConfig, seed: int, threads: int = 1) -> BifurcationDiagram:
    """Maxima-map sweep of tau0 over ``tau0_range`` with seeded random histories."""
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    if n_histories < 1:
        raise ValueError("n_histories must be >= 1")
    lo, hi = tau0_range
    taus = np.linspace(lo, hi, n_points)
    hists = sweep_histories(seed, n_points, n_histories)
    jobs = [(params_base.replace(tau0=float(t)), hists[i][j], cfg, j)
            for i, t in enumerate(taus) for j in range(n_histories)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            flat = list(pool.map(_cell_job, jobs, chunksize=max(1, len(jobs) // (8 * threads))))
    else:
        flat = [_cell_job(job) for job in jobs]
    cells = [_finalize_point(flat[i * n_histories:(i + 1) * n_histories]) for i in range(n_points)]
    return BifurcationDiagram(params_base, cfg, taus, cells, seed)


def mirror_check(params: OscillatorParams, history: HistorySpec, cfg: SolverConfig,
                 exact: bool = True) -> bool:
    """Integrate the mirrored history and compare its maxima with the negated minima.

    ``exact`` selects the bitwise-negated history (see HistorySpec.mirrored);
    with ``exact=False`` the literal phi + pi history is used.

    Periodic orbits compare cluster centres at the cluster tolerance; other
    motions compare maxima quantiles at the irregular-attractor tolerance.
    """
    a = integrate(params, history, cfg)
    b = integrate(params, history.mirrored(exact), cfg)
    tf = cfg.transient_fraction
    la = classify_attractor(extract_maxima(a, tf), a, tf)
    mb = extract_maxima(b, tf)
    lb = classify_attractor(mb, b, tf)
    if la.kind == FIXED_POINT or lb.kind == FIXED_POINT:
        return la.kind == lb.kind
    neg = -extract_maxima(a, tf, minima=True).values[::-1]
    if la.kind == PERIODIC:
        tol = max(la.tolerance, lb.tolerance)
        groups = _clusters(neg, tol)
        ref = np.array([float(np.mean(g)) for g in groups])
        got = np.asarray(lb.signature)
        if lb.kind != PERIODIC or ref.shape != got.shape:
            return False
        return bool(np.all(np.abs(ref - got) <= tol))
    q = [0.0, 0.1, 0.5, 0.9, 1.0]
    tol = max(IRREGULAR_REL_TOL * max(la.amplitude, lb.amplitude), CLUSTER_ABS_TOL)
    return bool(np.all(np.abs(np.quantile(neg, q) - np.quantile(mb.values, q)) <= tol))
