"""Artifact writers: CSV, JSON, binary trajectories, SVG plots and PPM rasters.

CSV files use LF line endings and a header row; JSON keeps insertion
order so summaries diff cleanly between runs.
"""

from __future__ import annotations

import json
import math
import struct
from pathlib import Path

import numpy as np

from .dde import Trajectory

TRAJ_MAGIC = b"RTRJ"
TRAJ_VERSION = 1
# magic, version (u32), dt (f64), count (u64), then count (x, y) f64 pairs
_TRAJ_HEADER = struct.Struct("<4sIdQ")

PALETTE = [
    (31, 119, 180), (214, 39, 40), (44, 160, 44), (255, 127, 14),
    (148, 103, 189), (140, 86, 75), (227, 119, 194), (23, 190, 207),
]
UNRESOLVED_COLOR = (200, 200, 200)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path, data) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(_jsonable(data), fh, indent=2)
        fh.write("\n")


def write_csv(path, header, rows) -> None:
    """Write ``rows`` (iterables of numbers/strings) under a header line."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_columns(path, header, *cols) -> None:
    """Column-wise CSV writer, shortest round-trip float formatting."""
    arrs = [np.asarray(c) for c in cols]
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*(a.tolist() for a in arrs)):
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def read_trajectory_csv(path):
    """Return (t, x, y) arrays from a ``t,x,y`` CSV."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if header[:3] != ["t", "x", "y"]:
        raise ValueError(f"{path}: expected header t,x,y, got {','.join(header)}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1], data[:, 2]


def write_trajectory_binary(path, traj: Trajectory) -> None:
    xy = np.empty(2 * len(traj), dtype="<f8")
    xy[0::2] = traj.x
    xy[1::2] = traj.y
    with open(path, "wb") as fh:
        fh.write(_TRAJ_HEADER.pack(TRAJ_MAGIC, TRAJ_VERSION, float(traj.dt_stored), len(traj)))
        fh.write(xy.tobytes())


def read_trajectory_binary(path):
    """Return (dt, x, y) from the binary layout written above."""
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, version, dt, count = _TRAJ_HEADER.unpack_from(raw, 0)
    if magic != TRAJ_MAGIC or version != TRAJ_VERSION:
        raise ValueError(f"{path}: not a version-{TRAJ_VERSION} trajectory file")
    xy = np.frombuffer(raw, dtype="<f8", offset=_TRAJ_HEADER.size, count=2 * count)
    return dt, xy[0::2].copy(), xy[1::2].copy()


def _color(k: int):
    return UNRESOLVED_COLOR if k < 0 else PALETTE[k % len(PALETTE)]


def write_ppm(path, labels: np.ndarray) -> None:
    """Binary P6 raster, one pixel per cell; rows are the first axis."""
    lab = np.asarray(labels)
    h, w = lab.shape
    img = np.empty((h, w, 3), dtype=np.uint8)
    for k in np.unique(lab):
        img[lab == k] = _color(int(k))
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def _rgb(c) -> str:
    return "rgb({},{},{})".format(*c)


def svg_scatter(path, x, y, cls=None, xlabel="", ylabel="", width=800, height=500,
                radius=1.2) -> None:
    """Static scatter plot; points colored by integer class."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    cls = np.zeros(x.shape, int) if cls is None else np.asarray(cls, int)
    ok = np.isfinite(x) & np.isfinite(y)
    x, y, cls = x[ok], y[ok], cls[ok]
    ml, mr, mt, mb = 60, 20, 20, 45
    pw, ph = width - ml - mr, height - mt - mb
    x0, x1 = (float(x.min()), float(x.max())) if x.size else (0.0, 1.0)
    y0, y1 = (float(y.min()), float(y.max())) if y.size else (0.0, 1.0)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    px = ml + (x - x0) / (x1 - x0) * pw
    py = mt + ph - (y - y0) / (y1 - y0) * ph
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for k in np.unique(cls):
        sel = cls == k
        out.append(f'<g fill="{_rgb(_color(int(k)))}">')
        out.extend(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="{radius}"/>' for a, b in zip(px[sel], py[sel]))
        out.append("</g>")
    out.append(f'<text x="{ml}" y="{height - 12}" font-size="12">{x0:.4g}</text>')
    out.append(f'<text x="{ml + pw}" y="{height - 12}" font-size="12" text-anchor="end">{x1:.4g}</text>')
    out.append(f'<text x="{ml + pw / 2}" y="{height - 12}" font-size="13" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="{ml - 6}" y="{mt + ph}" font-size="12" text-anchor="end">{y0:.4g}</text>')
    out.append(f'<text x="{ml - 6}" y="{mt + 12}" font-size="12" text-anchor="end">{y1:.4g}</text>')
    out.append(f'<text x="14" y="{mt + ph / 2}" font-size="13" '
               f'transform="rotate(-90 14 {mt + ph / 2})" text-anchor="middle">{ylabel}</text>')
    out.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def svg_raster(path, labels: np.ndarray, cell: int = 3) -> None:
    """Label matrix as SVG rectangles (run-length merged along rows)."""
    lab = np.asarray(labels)
    h, w = lab.shape
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * cell}" height="{h * cell}">']
    for i in range(h):
        j = 0
        while j < w:
            k = int(lab[i, j])
            e = j
            while e + 1 < w and lab[i, e + 1] == k:
                e += 1
            out.append(f'<rect x="{j * cell}" y="{i * cell}" width="{(e - j + 1) * cell}" '
                       f'height="{cell}" fill="{_rgb(_color(k))}"/>')
            j = e + 1
    out.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
