"""Delay embedding and Rosenstein largest-Lyapunov-exponent estimation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

__all__ = ["LLEConfig", "LLEResult", "embed", "nearest_neighbors", "rosenstein_lle"]


@dataclass(frozen=True)
class LLEConfig:
    """Embedding and tracking settings; lags and periods are in samples."""

    embed_dim: int = 3
    embed_lag: int = 10
    mean_period: int = 35
    max_iter: int = 1500
    min_fit_len: int = 10
    r2_min: float = 0.98
    # "period": fixed window [1, mean_period]; "r2": longest prefix with R^2 >= r2_min
    fit: str = "period"

    def __post_init__(self):
        if self.embed_dim < 2:
            raise ValueError("embed_dim must be >= 2")
        if self.fit not in ("period", "r2"):
            raise ValueError(f"unknown fit rule {self.fit!r}")
        for name in ("embed_lag", "mean_period", "max_iter", "min_fit_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    def as_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


@dataclass(frozen=True)
class LLEResult:
    lambda_max: float
    divergence: np.ndarray
    fit_start: int
    fit_end: int
    r2: float
    dt: float
    auto_fit: bool

    def as_dict(self) -> dict:
        return {
            "lambda_max": self.lambda_max,
            "fit_window": [self.fit_start, self.fit_end],
            "r2": self.r2,
            "dt": self.dt,
            "auto_fit": self.auto_fit,
        }


def embed(series, dim: int, lag: int) -> np.ndarray:
    """Delay vectors [s_i, s_{i+lag}, ..., s_{i+(dim-1)lag}], one per row."""
    s = np.asarray(series, dtype=float)
    if dim < 1 or lag < 1:
        raise ValueError("dim and lag must be positive")
    n = s.shape[0] - (dim - 1) * lag
    if n <= 0:
        raise ValueError(f"series of length {s.shape[0]} too short for dim={dim}, lag={lag}")
    return np.column_stack([s[i * lag:i * lag + n] for i in range(dim)])


def nearest_neighbors(points: np.ndarray, theiler: int):
    """Exact Euclidean nearest neighbour of every point outside |i - j| <= theiler.

    At most 2*theiler + 1 points lie inside the exclusion window, so a query
    for 2*theiler + 2 neighbours always contains an admissible one.
    """
    n = points.shape[0]
    if n <= 2 * theiler + 1:
        raise ValueError("no admissible neighbours: series too short for the Theiler window")
    k = min(2 * theiler + 2, n)
    tree = cKDTree(points)
    dist, idx = tree.query(points, k=k)
    admissible = np.abs(idx - np.arange(n)[:, None]) > theiler
    first = np.argmax(admissible, axis=1)
    rows = np.arange(n)
    return idx[rows, first], dist[rows, first]


def _linfit(y: np.ndarray):
    x = np.arange(y.shape[0], dtype=float)
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    sxy = np.sum((x - xm) * (y - ym))
    slope = sxy / sxx
    resid = y - (ym + slope * (x - xm))
    syy = np.sum((y - ym) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / syy if syy > 0 else 0.0
    return slope, r2


def _select_fit(curve: np.ndarray, cfg: LLEConfig):
    """Pick the fit window on the divergence curve.

    The default covers one mean orbital period after pairing, [1, mean_period],
    which is where the exponential separation lives before the curve
    saturates at the attractor size.  ``fit="r2"`` instead searches the longest
    prefix [1, i2] with R^2 >= r2_min and falls back to [1, max_iter/5].
    """
    if cfg.fit == "period":
        end = min(max(cfg.mean_period, 2), curve.shape[0] - 1)
        slope, r2 = _linfit(curve[1:end + 1])
        return 1, end, slope, r2, False
    best = None
    for end in range(curve.shape[0] - 1, cfg.min_fit_len, -1):
        seg = curve[1:end + 1]
        if not np.all(np.isfinite(seg)):
            continue
        slope, r2 = _linfit(seg)
        if r2 >= cfg.r2_min:
            best = (1, end, slope, r2, True)
            break
    if best is None:
        end = max(cfg.min_fit_len, cfg.max_iter // 5)
        end = min(end, curve.shape[0] - 1)
        slope, r2 = _linfit(curve[1:end + 1])
        best = (1, end, slope, r2, False)
    return best


def rosenstein_lle(series, dt: float, cfg: LLEConfig = LLEConfig()) -> LLEResult:
    """Largest Lyapunov exponent (per unit time) by the Rosenstein et al. method.

    ``dt`` is the sample spacing of ``series``.  ``divergence[i]`` is the mean
    log-distance between neighbour pairs i samples after pairing.
    """
    pts = embed(series, cfg.embed_dim, cfg.embed_lag)
    m = pts.shape[0]
    if m <= cfg.max_iter + 2 * cfg.mean_period + 1:
        raise ValueError("series too short for the embedding plus max_iter horizon")
    nn, _ = nearest_neighbors(pts, cfg.mean_period)
    ref = np.arange(m)
    curve = np.full(cfg.max_iter + 1, np.nan)
    for i in range(cfg.max_iter + 1):
        ok = (ref + i < m) & (nn + i < m)
        a = ref[ok] + i
        b = nn[ok] + i
        d = np.sqrt(np.sum((pts[a] - pts[b]) ** 2, axis=1))
        d = d[d > 0]
        if d.size:
            curve[i] = np.mean(np.log(d))
    start, end, slope, r2, auto = _select_fit(curve, cfg)
    return LLEResult(slope / dt, curve, start, end, float(r2), dt, auto)
