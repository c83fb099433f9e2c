"""Energy diagnostics, periodograms and Morse-wavelet scalograms.

Delay embedding and the Rosenstein exponent live in :mod:`.lyapunov` and
are re-exported here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dde import Trajectory
from .lyapunov import LLEConfig, LLEResult, embed, rosenstein_lle

__all__ = [
    "EnergyStats", "Spectrum", "Scalogram", "energy", "orbit_energy_stats",
    "power_spectrum", "morse_wavelet", "cwt_scalogram",
    "LLEConfig", "LLEResult", "embed", "rosenstein_lle",
]

MIN_SPECTRUM_SAMPLES = 64


def energy(x, y):
    """Lyapunov energy (x^2 + y^2) / 2; works elementwise on arrays."""
    return 0.5 * (np.square(x) + np.square(y))


@dataclass(frozen=True)
class EnergyStats:
    mean_E: float
    min_E: float
    max_E: float
    window: tuple

    def as_dict(self) -> dict:
        return {"mean_E": self.mean_E, "min_E": self.min_E, "max_E": self.max_E,
                "window": list(self.window)}


def orbit_energy_stats(traj: Trajectory, transient_fraction: float = 0.7) -> EnergyStats:
    """Trapezoidal time-average of E over the post-transient window.

    ``min_E``/``max_E`` bound the energy shells the orbit visits.
    """
    sl = traj.tail(transient_fraction)
    x = np.asarray(traj.x[sl])
    if x.shape[0] < 2:
        raise ValueError("post-transient window needs at least 2 samples")
    t = traj.t[sl]
    e = energy(x, traj.y[sl])
    span = t[-1] - t[0]
    mean = float(np.trapezoid(e, t) / span)
    lo, hi = float(np.min(e)), float(np.max(e))
    # guard the ordering against last-bit rounding of the quadrature
    mean = min(max(mean, lo), hi)
    return EnergyStats(mean, lo, hi, (float(t[0]), float(t[-1])))


@dataclass(frozen=True)
class Spectrum:
    """One-sided periodogram; ``power`` sums to the tapered-signal variance."""

    frequencies: np.ndarray
    power: np.ndarray
    window_kind: str
    variance: float

    def dominant(self, n: int = 1, exclude_below: float = 0.0) -> np.ndarray:
        """Frequencies of the ``n`` largest local peaks above ``exclude_below``."""
        p = self.power
        ok = np.zeros(p.shape, dtype=bool)
        ok[1:-1] = (p[1:-1] >= p[:-2]) & (p[1:-1] > p[2:])
        ok &= self.frequencies > exclude_below
        idx = np.nonzero(ok)[0]
        idx = idx[np.argsort(p[idx])[::-1][:n]]
        return self.frequencies[idx]

    def band_power(self, f_lo: float, f_hi: float) -> float:
        sel = (self.frequencies >= f_lo) & (self.frequencies < f_hi)
        return float(np.sum(self.power[sel]))


def _taper(n: int, kind: str) -> np.ndarray:
    if kind == "hann":
        return np.hanning(n)
    if kind in ("rect", "rectangular", "boxcar"):
        return np.ones(n)
    raise ValueError(f"unknown window {kind!r}")


def power_spectrum(series, dt: float, window_kind: str = "hann") -> Spectrum:
    """Single-taper periodogram of the mean-removed series.

    With z the tapered series, power[k] = c_k |Z_k|^2 / N^2 where c_k = 2
    except at DC and Nyquist.  DC is zeroed, so sum(power) == var(z).
    """
    s = np.asarray(series, dtype=float)
    n = s.shape[0]
    if n < MIN_SPECTRUM_SAMPLES:
        raise ValueError(f"need at least {MIN_SPECTRUM_SAMPLES} samples, got {n}")
    if dt <= 0:
        raise ValueError("dt must be positive")
    z = (s - s.mean()) * _taper(n, window_kind)
    Z = np.fft.rfft(z)
    p = np.abs(Z) ** 2 / (n * n)
    p[1:] *= 2.0
    if n % 2 == 0:
        p[-1] *= 0.5
    p[0] = 0.0
    return Spectrum(np.fft.rfftfreq(n, dt), p, window_kind, float(np.var(z)))


@dataclass(frozen=True)
class Scalogram:
    times: np.ndarray
    frequencies: np.ndarray
    scales: np.ndarray
    magnitude: np.ndarray  # (len(times), len(scales))
    gamma: float
    time_bandwidth: float

    @property
    def wavelet_params(self) -> tuple:
        return (self.gamma, self.time_bandwidth)

    def ridge(self) -> np.ndarray:
        """Frequency of the per-time magnitude maximum."""
        return self.frequencies[np.argmax(self.magnitude, axis=1)]


def morse_wavelet(w, gamma: float, beta: float) -> np.ndarray:
    """Unit-peak generalized Morse wavelet in the frequency domain.

    Psi(w) = (w / wp)^beta exp(-(w^gamma - wp^gamma)) for w > 0, else 0,
    with peak frequency wp = (beta / gamma)^(1 / gamma).
    """
    w = np.asarray(w, dtype=float)
    wp = (beta / gamma) ** (1.0 / gamma)
    out = np.zeros_like(w)
    pos = w > 0
    r = w[pos] / wp
    # log form keeps large beta from overflowing
    out[pos] = np.exp(beta * np.log(r) - (w[pos] ** gamma - wp ** gamma))
    return out


def cwt_scalogram(series, dt: float, gamma: float = 3.0, time_bandwidth: float = 60.0,
                  n_scales: int = 96, f_min=None, f_max=None, time_stride: int = 1) -> Scalogram:
    """Continuous wavelet transform magnitudes with an analytic Morse wavelet.

    Scales are log-spaced so that the wavelet peak frequencies cover
    [f_min, f_max] (cycles per time unit).  The series is mean-removed and
    reflect-padded by half its length on both sides before the FFT.  Rows
    of ``magnitude`` are kept every ``time_stride`` samples.
    """
    if gamma <= 0 or time_bandwidth <= 0:
        raise ValueError("gamma and time_bandwidth must be positive")
    s = np.asarray(series, dtype=float)
    n = s.shape[0]
    if n < 4:
        raise ValueError("series too short")
    nyq = 0.5 / dt
    f_max = 0.5 * nyq if f_max is None else float(f_max)
    f_min = 4.0 / (n * dt) if f_min is None else float(f_min)
    if not (0 < f_min < f_max):
        raise ValueError(f"degenerate frequency band [{f_min}, {f_max}]")
    beta = time_bandwidth / gamma
    wp = (beta / gamma) ** (1.0 / gamma)
    freqs = np.geomspace(f_max, f_min, n_scales)
    scales = wp / (2.0 * math.pi * freqs)

    pad = n // 2
    x = np.pad(s - s.mean(), pad, mode="reflect") if pad > 0 else s - s.mean()
    X = np.fft.fft(x)
    w = 2.0 * math.pi * np.fft.fftfreq(x.shape[0], dt)
    keep = slice(pad, pad + n, time_stride)
    mag = np.empty((len(range(*keep.indices(x.shape[0]))), n_scales))
    for j, a in enumerate(scales):
        # unit peak Psi(a w); the factor 2 makes a unit tone read ~1
        coef = np.fft.ifft(X * (2.0 * morse_wavelet(a * w, gamma, beta)))
        mag[:, j] = np.abs(coef[keep])
    times = dt * np.arange(n)[::time_stride]
    return Scalogram(times, freqs, scales, mag, float(gamma), float(time_bandwidth))
