"""Basins of attraction over the history plane (omega, phi) at fixed A.

Each cell is integrated in chunks; after every chunk past ``t_min`` the
trailing window is labelled with the sweep identity rule and compared with
the reference library.  A cell is assigned once the same reference matches
``confirmations`` windows in a row, otherwise it ends ``unresolved``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dde import HistorySpec, IntegrationError, OscillatorParams, SolverConfig, Stepper, Trajectory
from .rng import SplitMix64, cell_seed, draw_history
from .sweep import (FIXED_POINT, AttractorLabel, MaximaSet, assign_amplitude_classes,
                    classify_attractor, extract_maxima, run_cell, same_attractor)

UNRESOLVED = -1


@dataclass(frozen=True)
class MatchConfig:
    """Early-stop schedule for basin cells (times in model units)."""

    t_min: float = 300.0
    chunk: float = 100.0
    window: float = 200.0
    confirmations: int = 2

    def __post_init__(self):
        if self.window <= 0 or self.chunk <= 0 or self.t_min < self.window:
            raise ValueError("need window > 0, chunk > 0 and t_min >= window")
        if self.confirmations < 1:
            raise ValueError("confirmations must be >= 1")

    def as_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


@dataclass(frozen=True, eq=False)
class LibraryEntry:
    label: AttractorLabel
    maxima: Optional[MaximaSet]
    mean_sign: int
    energy: float
    history: Optional[HistorySpec] = None
    name: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "label": self.label.as_dict(),
            "mean_sign": self.mean_sign,
            "energy": self.energy,
            "history": self.history.as_dict() if self.history is not None else None,
        }


def _entry_name(label: AttractorLabel) -> str:
    if label.kind == FIXED_POINT:
        return "rest"
    suffix = {1: "+", -1: "-", 0: ""}[label.mean_sign]
    return f"E{label.amplitude_class}{suffix}"


@dataclass(frozen=True, eq=False)
class AttractorLibrary:
    references: list

    def __post_init__(self):
        if not self.references:
            raise ValueError("library must hold at least one reference")
        refs = self.references
        for i in range(len(refs)):
            for j in range(i + 1, len(refs)):
                if same_attractor(refs[i].label, refs[j].label):
                    raise ValueError(f"references {i} and {j} are the same attractor")

    def __len__(self) -> int:
        return len(self.references)

    @property
    def names(self) -> list:
        return [r.name for r in self.references]

    def match(self, label: AttractorLabel) -> int:
        for k, ref in enumerate(self.references):
            if same_attractor(label, ref.label):
                return k
        return UNRESOLVED

    def mirror_index(self, k: int) -> int:
        """Reference reached by the x -> -x image of reference ``k``."""
        ref = self.references[k].label
        for j, other in enumerate(self.references):
            o = other.label
            if (o.kind == ref.kind and o.period == ref.period
                    and o.amplitude_class == ref.amplitude_class and o.mean_sign == -ref.mean_sign):
                return j
        return UNRESOLVED

    @classmethod
    def from_histories(cls, params: OscillatorParams, histories, cfg: SolverConfig,
                       include_rest: bool = False) -> "AttractorLibrary":
        """Run each history to t_end and keep one reference per distinct attractor.

        References are ordered by (energy level, mean sign) so the order does
        not depend on which history found an attractor first.
        """
        cells = [run_cell(params, h, cfg, j) for j, h in enumerate(histories)]
        ok = [c for c in cells if c.label is not None]
        labels = assign_amplitude_classes([c.label for c in ok])
        found: list = []
        for c, lab in zip(ok, labels):
            if lab.kind == FIXED_POINT and not include_rest:
                continue
            if not any(same_attractor(lab, e.label) for e in found):
                found.append(LibraryEntry(lab, c.maxima, lab.mean_sign, lab.energy, c.history,
                                          _entry_name(lab)))
        found.sort(key=lambda e: (e.label.amplitude_class, e.mean_sign, e.energy))
        if include_rest and not any(e.label.kind == FIXED_POINT for e in found):
            found.insert(0, rest_entry())
        return cls(found)

    @classmethod
    def from_seed(cls, params: OscillatorParams, cfg: SolverConfig, seed: int,
                  n_histories: int = 20, include_rest: bool = False) -> "AttractorLibrary":
        hists = [HistorySpec(*draw_history(seed, 0, j)) for j in range(n_histories)]
        return cls.from_histories(params, hists, cfg, include_rest)

    def as_dict(self) -> dict:
        return {"references": [r.as_dict() for r in self.references]}


def rest_entry() -> LibraryEntry:
    lab = AttractorLabel(FIXED_POINT, amplitude_class=0)
    return LibraryEntry(lab, None, 0, 0.0, None, "rest")


@dataclass(frozen=True, eq=False)
class BasinGrid:
    A_fixed: float
    omega_axis: np.ndarray
    phi_axis: np.ndarray
    labels: np.ndarray  # (n_omega, n_phi) reference indices or UNRESOLVED
    library: AttractorLibrary
    meta: dict = field(default_factory=dict)

    @property
    def resolution(self) -> tuple:
        return (len(self.omega_axis), len(self.phi_axis))

    def history(self, i: int, j: int) -> HistorySpec:
        return HistorySpec(self.A_fixed, float(self.omega_axis[i]), float(self.phi_axis[j]))

    def boundary_fraction(self, window=None) -> float:
        """Fraction of cells with a differently labelled 4-neighbour."""
        lab = self.labels if window is None else self.labels[window]
        diff = np.zeros(lab.shape, dtype=bool)
        d0 = lab[1:, :] != lab[:-1, :]
        d1 = lab[:, 1:] != lab[:, :-1]
        diff[1:, :] |= d0
        diff[:-1, :] |= d0
        diff[:, 1:] |= d1
        diff[:, :-1] |= d1
        return float(diff.mean())

    def csv_rows(self):
        yield ",".join(["omega\\phi"] + [f"{p:.10g}" for p in self.phi_axis])
        for w, row in zip(self.omega_axis, self.labels):
            yield ",".join([f"{w:.10g}"] + [str(int(v)) for v in row])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            for line in self.csv_rows():
                fh.write(line + "\n")


def _window_label(xs, ys, accs, dt: float) -> AttractorLabel:
    tr = Trajectory(0.0, dt, xs, ys, accs)
    mx = extract_maxima(tr, 0.0)
    return classify_attractor(mx, tr, 0.0)


def classify_cell(params: OscillatorParams, history: HistorySpec, cfg: SolverConfig,
                  library: AttractorLibrary, match: MatchConfig = MatchConfig()):
    """Integrate one history until it settles on a library attractor.

    Returns ``(index, t_stop)``; index is UNRESOLVED when t_end is reached
    without ``match.confirmations`` consecutive agreeing windows, or when
    the integration fails.
    """
    dt = cfg.dt_stored
    steps = lambda t: int(round(t / cfg.dt))
    n_end = cfg.n_steps
    win = int(round(match.window / dt))
    try:
        st = Stepper(params, history, cfg)
        xs, ys, acc = st.advance(min(steps(match.t_min), n_end))
        bx, by, ba = xs[-win:], ys[-win:], acc[-win:]
        streak, last = 0, UNRESOLVED
        while True:
            if bx.shape[0] >= 3:
                k = library.match(_window_label(bx, by, ba, dt))
                if k != UNRESOLVED and k == last:
                    streak += 1
                else:
                    streak = 1 if k != UNRESOLVED else 0
                last = k
                if streak >= match.confirmations:
                    return k, st.t
            if st.n >= n_end:
                return UNRESOLVED, st.t
            xs, ys, acc = st.advance(min(steps(match.chunk), n_end - st.n))
            bx = np.concatenate((bx, xs))[-win:]
            by = np.concatenate((by, ys))[-win:]
            ba = np.concatenate((ba, acc))[-win:]
    except IntegrationError as exc:
        return UNRESOLVED, exc.t_fail


def _row_job(job):
    params, A, omega, phis, cfg, library, match = job
    out = np.empty(len(phis), dtype=np.int64)
    tstop = np.empty(len(phis))
    for j, phi in enumerate(phis):
        out[j], tstop[j] = classify_cell(params, HistorySpec(A, float(omega), float(phi)), cfg,
                                         library, match)
    return out, tstop


def basin_axes(resolution) -> tuple:
    """Cell-centred axes over omega in [-pi, pi] and phi in [0, pi]."""
    n_w, n_p = resolution
    omega = -math.pi + (np.arange(n_w) + 0.5) * (2.0 * math.pi / n_w)
    phi = (np.arange(n_p) + 0.5) * (math.pi / n_p)
    return omega, phi


def compute_basin_grid(params: OscillatorParams, A: float, resolution, cfg: SolverConfig,
                       library: AttractorLibrary, match: MatchConfig = MatchConfig(),
                       threads: int = 1, omega_axis=None, phi_axis=None) -> BasinGrid:
    """Label every (omega, phi) cell; rows are independent work items."""
    if len(library) == 0:
        raise ValueError("empty library")
    if omega_axis is None or phi_axis is None:
        w_def, p_def = basin_axes(resolution)
        omega_axis = w_def if omega_axis is None else np.asarray(omega_axis, float)
        phi_axis = p_def if phi_axis is None else np.asarray(phi_axis, float)
    jobs = [(params, float(A), w, phi_axis, cfg, library, match) for w in omega_axis]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_row_job, jobs))
    else:
        rows = [_row_job(j) for j in jobs]
    labels = np.vstack([r[0] for r in rows])
    tstop = np.vstack([r[1] for r in rows])
    meta = {"mean_stop_time": float(tstop.mean()), "match": match.as_dict()}
    return BasinGrid(float(A), np.asarray(omega_axis), np.asarray(phi_axis), labels, library, meta)


def basin_stability(grid: BasinGrid) -> dict:
    """Cell-count fractions per reference, per energy level and unresolved.

    ``by_label`` plus ``unresolved`` sums to 1; ``by_level`` merges mirror
    partners of the same energy level (e.g. both fundamental cycles).
    """
    lab = grid.labels
    total = lab.size
    by_label = {}
    by_level: dict = {}
    for k, ref in enumerate(grid.library.references):
        frac = float(np.count_nonzero(lab == k)) / total
        by_label[ref.name or str(k)] = frac
        lvl = int(ref.label.amplitude_class)
        by_level[lvl] = by_level.get(lvl, 0.0) + frac
    unresolved = float(np.count_nonzero(lab == UNRESOLVED)) / total
    return {"by_label": by_label, "by_level": {str(k): v for k, v in sorted(by_level.items())},
            "unresolved": unresolved}


def _gibbs(block: np.ndarray) -> float:
    _, counts = np.unique(block, return_counts=True)
    p = counts / counts.sum()
    return float(-np.sum(p * np.log(p))) if counts.size > 1 else 0.0


def basin_entropy(labels, box_size: int):
    """Mean Gibbs entropy over box_size x box_size boxes, and the boundary variant.

    Partial edge boxes count with their actual cells.  Returns
    ``(S_b, S_bb)`` where S_bb averages only boxes holding >= 2 labels
    (0 if there are none).  ``unresolved`` counts as a label of its own.
    """
    lab = labels.labels if isinstance(labels, BasinGrid) else np.asarray(labels)
    if lab.size == 0:
        raise ValueError("empty grid")
    if box_size < 1:
        raise ValueError("box_size must be >= 1")
    ents = []
    for i in range(0, lab.shape[0], box_size):
        for j in range(0, lab.shape[1], box_size):
            ents.append(_gibbs(lab[i:i + box_size, j:j + box_size]))
    ents = np.asarray(ents)
    mixed = ents[ents > 0]
    return float(ents.mean()), float(mixed.mean()) if mixed.size else 0.0


def mirror_spot_check(grid: BasinGrid, params: OscillatorParams, cfg: SolverConfig,
                      n_samples: int = 100, seed: int = 0, match: MatchConfig = MatchConfig()) -> dict:
    """Check that (omega, phi + pi) reaches the mirror of the cell's attractor.

    Cells are drawn uniformly among resolved ones with a seeded generator;
    the partner history lies outside the grid and is integrated directly.
    """
    lib = grid.library
    resolved = np.argwhere(grid.labels != UNRESOLVED)
    if resolved.shape[0] == 0:
        return {"checked": 0, "passed": 0, "failures": []}
    g = SplitMix64(cell_seed(seed, 0x6D69))
    n = min(n_samples, resolved.shape[0])
    # partial Fisher-Yates for distinct picks
    pool = list(range(resolved.shape[0]))
    picks = []
    for s in range(n):
        r = s + int(g.random() * (len(pool) - s))
        pool[s], pool[r] = pool[r], pool[s]
        picks.append(pool[s])
    passed = 0
    failures = []
    for p in picks:
        i, j = (int(v) for v in resolved[p])
        k = int(grid.labels[i, j])
        want = lib.mirror_index(k)
        got, _ = classify_cell(params, grid.history(i, j).mirrored(), cfg, lib, match)
        if want != UNRESOLVED and got == want:
            passed += 1
        else:
            failures.append({"cell": [i, j], "label": k, "expected": want, "got": int(got)})
    return {"checked": n, "passed": passed, "failures": failures}
