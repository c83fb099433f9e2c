"""Fixed-step RK4 integration of the retarded oscillator.

The model is

    m x'' + mu x' + k x + alpha x(t - tau(x)) = 0,   tau(x) = tau0 exp(-x^2 / (2 sigma^2))

integrated in first-order form (x' = y) with a sinusoidal pre-history.  The
delayed position is read from a ring buffer of completed steps through cubic
Hermite interpolation; the slope of x is y, so the interpolant is C1 without
any extra evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

__all__ = [
    "OscillatorParams",
    "HistorySpec",
    "SolverConfig",
    "Trajectory",
    "IntegrationError",
    "delay_tau",
    "history_eval",
    "integrate",
    "Stepper",
    "BLOWUP_LIMIT",
]

BLOWUP_LIMIT = 1.0e6
BUFFER_MARGIN = 1.0

# kernel status codes
_OK = 0
_BLOWUP = 1


class IntegrationError(RuntimeError):
    """Raised when the state leaves the finite range during integration."""

    def __init__(self, message: str, t_fail: float):
        super().__init__(f"{message} at t={t_fail:.6g}")
        self.t_fail = t_fail


@dataclass(frozen=True)
class OscillatorParams:
    """Model constants.  Defaults are the fundamental setting m=1, k=1, mu=0.1."""

    alpha: float = 0.5
    tau0: float = 1.0
    mu: float = 0.1
    k: float = 1.0
    m: float = 1.0
    sigma: float = 1.0 / math.sqrt(2.0)

    def __post_init__(self):
        if not self.tau0 >= 0.0:
            raise ValueError(f"tau0 must be >= 0, got {self.tau0}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if not self.m > 0.0:
            raise ValueError(f"m must be > 0, got {self.m}")
        for name in ("alpha", "mu", "k"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def replace(self, **changes) -> "OscillatorParams":
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values.update(changes)
        return OscillatorParams(**values)

    def as_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


@dataclass(frozen=True)
class HistorySpec:
    """Pre-history x(t) = A sin(omega t + phi) for t <= 0."""

    A: float
    omega: float
    phi: float

    def mirrored(self, exact: bool = False) -> "HistorySpec":
        """The x -> -x image, A sin(wt + phi + pi) = -A sin(wt + phi).

        The default shifts phi by pi, which differs from an exact negation by
        rounding; in transiently chaotic regimes that difference can select a
        different attractor.  ``exact=True`` returns (-A, omega, phi), whose
        trajectory is the bitwise negation of the original.
        """
        if exact:
            return HistorySpec(-self.A, self.omega, self.phi)
        return HistorySpec(self.A, self.omega, self.phi + math.pi)

    def as_dict(self) -> dict:
        return {"A": self.A, "omega": self.omega, "phi": self.phi}


@dataclass(frozen=True)
class SolverConfig:
    """Step size, horizon and storage options.

    ``refine_overlap`` enables a one-pass predictor-corrector for stages whose
    delayed time falls inside the step being computed.
    """

    dt: float = 0.01
    t_end: float = 2000.0
    transient_fraction: float = 0.7
    record_stride: int = 1
    refine_overlap: bool = False

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.t_end > 0.0:
            raise ValueError(f"t_end must be > 0, got {self.t_end}")
        if not 0.0 <= self.transient_fraction < 1.0:
            raise ValueError("transient_fraction must lie in [0, 1)")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError("record_stride must be a positive integer")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def dt_stored(self) -> float:
        return self.dt * self.record_stride

    def replace(self, **changes) -> "SolverConfig":
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values.update(changes)
        return SolverConfig(**values)

    def as_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled solution with C1 cubic Hermite dense output.

    Node slopes are ``y`` for x and ``ydot`` (the acceleration) for y.
    """

    t0: float
    dt_stored: float
    x: np.ndarray
    y: np.ndarray
    ydot: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for arr in (self.x, self.y, self.ydot):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return self.x.shape[0]

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt_stored * np.arange(len(self))

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt_stored * (len(self) - 1)

    @property
    def samples(self) -> np.ndarray:
        return np.column_stack((self.x, self.y))

    @property
    def segment_coeffs(self) -> np.ndarray:
        """Per-segment cubic coefficients, shape (n_segments, 2, 4).

        Row ``[i, c]`` holds (c0, c1, c2, c3) such that component c on segment i
        equals c0 + c1 s + c2 s^2 + c3 s^3 with s = (t - t_i) / dt_stored.
        """
        h = self.dt_stored
        out = np.empty((len(self) - 1, 2, 4))
        for c, (v, d) in enumerate(((self.x, self.y), (self.y, self.ydot))):
            p0, p1 = v[:-1], v[1:]
            m0, m1 = h * d[:-1], h * d[1:]
            out[:, c, 0] = p0
            out[:, c, 1] = m0
            out[:, c, 2] = 3.0 * (p1 - p0) - 2.0 * m0 - m1
            out[:, c, 3] = 2.0 * (p0 - p1) + m0 + m1
        return out

    def evaluate(self, t) -> np.ndarray:
        """Dense (x, y) at arbitrary times within the stored span."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if np.any(t < self.t0 - 1e-12) or np.any(t > self.t_end + 1e-12):
            raise ValueError("evaluation time outside trajectory span")
        u = (t - self.t0) / self.dt_stored
        # snap round-off so stored nodes are reproduced exactly
        r = np.rint(u)
        u = np.where(np.abs(u - r) < 1e-9, r, u)
        i = np.clip(np.floor(u).astype(np.int64), 0, len(self) - 2)
        s = u - i
        h = self.dt_stored
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        x = h00 * self.x[i] + h10 * h * self.y[i] + h01 * self.x[i + 1] + h11 * h * self.y[i + 1]
        y = (h00 * self.y[i] + h10 * h * self.ydot[i] + h01 * self.y[i + 1]
             + h11 * h * self.ydot[i + 1])
        out = np.column_stack((x, y))
        return out[0] if scalar else out

    def tail(self, transient_fraction: float) -> slice:
        """Index slice of the post-transient window."""
        if not 0.0 <= transient_fraction < 1.0:
            raise ValueError("transient_fraction must lie in [0, 1)")
        return slice(int(math.floor(transient_fraction * (len(self) - 1))), len(self))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write("t,x,y\n")
            for ti, xi, yi in zip(self.t, self.x, self.y):
                fh.write(f"{ti:.10g},{xi:.17g},{yi:.17g}\n")


def delay_tau(x, params: OscillatorParams):
    """Gaussian state-dependent delay, tau0 exp(-x^2 / (2 sigma^2))."""
    return params.tau0 * np.exp(-np.square(x) / (2.0 * params.sigma ** 2))


def history_eval(h: HistorySpec, t):
    """Return (x, y) of the sinusoidal history at t <= 0."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr > 0.0):
        raise ValueError("history is only defined for t <= 0")
    arg = h.omega * t_arr + h.phi
    x = h.A * np.sin(arg)
    y = h.A * h.omega * np.cos(arg)
    if t_arr.ndim == 0:
        return float(x), float(y)
    return x, y


@njit(cache=True, inline="always")
def _hermite(theta, h, x0, v0, x1, v1):
    om = 1.0 - theta
    return ((1.0 + 2.0 * theta) * om * om * x0 + theta * om * om * h * v0
            + theta * theta * (3.0 - 2.0 * theta) * x1 + theta * theta * (theta - 1.0) * h * v1)


@njit(cache=True)
def _delayed_x(s, n, dt, bx, by, nb, hA, hw, hphi, use_trial, xt, yt):
    """x at time s, given completed nodes 0..n stored in the ring buffer.

    Times past node n are served by the last completed segment (extrapolated)
    or, when ``use_trial`` is set, by the trial segment [n, n+1] with end
    values (xt, yt).
    """
    if s <= 0.0:
        return hA * math.sin(hw * s + hphi)
    j = int(math.floor(s / dt))
    if j >= n:
        if use_trial:
            theta = (s - n * dt) / dt
            i0 = n % nb
            return _hermite(theta, dt, bx[i0], by[i0], xt, yt)
        j = n - 1
    if j < 0:
        # first step: extrapolate the history segment [-dt, 0]
        a = hw * (-dt) + hphi
        x0 = hA * math.sin(a)
        v0 = hA * hw * math.cos(a)
        x1 = hA * math.sin(hphi)
        v1 = hA * hw * math.cos(hphi)
        return _hermite((s + dt) / dt, dt, x0, v0, x1, v1)
    theta = (s - j * dt) / dt
    i0 = j % nb
    i1 = (j + 1) % nb
    return _hermite(theta, dt, bx[i0], by[i0], bx[i1], by[i1])


@njit(cache=True, inline="always")
def _accel(t, X, Y, n, dt, bx, by, nb, mu, k, alpha, m, tau0, inv2s2,
           hA, hw, hphi, use_trial, xt, yt):
    tau = tau0 * math.exp(-X * X * inv2s2)
    if tau == 0.0:
        xd = X
    else:
        xd = _delayed_x(t - tau, n, dt, bx, by, nb, hA, hw, hphi, use_trial, xt, yt)
    return (-mu * Y - k * X - alpha * xd) / m


@njit(cache=True)
def _rk4_step(n, x, y, a1, dt, bx, by, nb, mu, k, alpha, m, tau0, inv2s2,
              hA, hw, hphi, use_trial, xt, yt):
    tn = n * dt
    half = 0.5 * dt
    x2 = x + half * y
    y2 = y + half * a1
    a2 = _accel(tn + half, x2, y2, n, dt, bx, by, nb, mu, k, alpha, m, tau0, inv2s2,
                hA, hw, hphi, use_trial, xt, yt)
    x3 = x + half * y2
    y3 = y + half * a2
    a3 = _accel(tn + half, x3, y3, n, dt, bx, by, nb, mu, k, alpha, m, tau0, inv2s2,
                hA, hw, hphi, use_trial, xt, yt)
    x4 = x + dt * y3
    y4 = y + dt * a3
    a4 = _accel(tn + dt, x4, y4, n, dt, bx, by, nb, mu, k, alpha, m, tau0, inv2s2,
                hA, hw, hphi, use_trial, xt, yt)
    xn = x + dt / 6.0 * (y + 2.0 * y2 + 2.0 * y3 + y4)
    yn = y + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    return xn, yn


@njit(cache=True)
def _advance(prm, hist, dt, n_from, n_to, stride, refine, limit, bx, by, state,
             out_x, out_y, out_a, rec):
    """Step nodes n_from -> n_to in place, recording nodes with n % stride == 0.

    ``state`` holds (x, y, acceleration) at node n_from, which must already be
    in the ring buffer.  Returns (status, last completed node, records written).
    """
    mu, k, alpha, m, tau0, inv2s2 = prm[0], prm[1], prm[2], prm[3], prm[4], prm[5]
    hA, hw, hphi = hist[0], hist[1], hist[2]
    nb = bx.shape[0]
    x, y, a1 = state[0], state[1], state[2]
    for n in range(n_from, n_to):
        xn, yn = _rk4_step(n, x, y, a1, dt, bx, by, nb, mu, k, alpha, m, tau0, inv2s2,
                           hA, hw, hphi, False, 0.0, 0.0)
        if refine:
            xn, yn = _rk4_step(n, x, y, a1, dt, bx, by, nb, mu, k, alpha, m, tau0, inv2s2,
                               hA, hw, hphi, True, xn, yn)
        if not (abs(xn) <= limit and abs(yn) <= limit):
            state[0], state[1], state[2] = x, y, a1
            return _BLOWUP, n, rec
        x = xn
        y = yn
        i = (n + 1) % nb
        bx[i] = x
        by[i] = y
        a1 = _accel((n + 1) * dt, x, y, n + 1, dt, bx, by, nb, mu, k, alpha, m, tau0, inv2s2,
                    hA, hw, hphi, False, 0.0, 0.0)
        if (n + 1) % stride == 0:
            out_x[rec] = x
            out_y[rec] = y
            out_a[rec] = a1
            rec += 1
    state[0], state[1], state[2] = x, y, a1
    return _OK, n_to, rec


@njit(cache=True)
def _start(prm, hist, dt, bx, by, state):
    """Seed node 0 from the history and return its acceleration."""
    x = hist[0] * math.sin(hist[2])
    y = hist[0] * hist[1] * math.cos(hist[2])
    bx[0] = x
    by[0] = y
    a = _accel(0.0, x, y, 0, dt, bx, by, bx.shape[0], prm[0], prm[1], prm[2], prm[3],
               prm[4], prm[5], hist[0], hist[1], hist[2], False, 0.0, 0.0)
    state[0], state[1], state[2] = x, y, a
    return a


class Stepper:
    """Resumable integrator holding its own ring buffer.

    Each instance is independent; separate instances may run concurrently.
    """

    def __init__(self, params: OscillatorParams, history: HistorySpec, cfg: SolverConfig):
        self.params = params
        self.history = history
        self.cfg = cfg
        self._prm = np.array([params.mu, params.k, params.alpha, params.m, params.tau0,
                              1.0 / (2.0 * params.sigma ** 2)])
        self._hist = np.array([history.A, history.omega, history.phi], dtype=float)
        nb = int(math.ceil((params.tau0 + BUFFER_MARGIN) / cfg.dt)) + 4
        self._bx = np.zeros(nb)
        self._by = np.zeros(nb)
        self._state = np.zeros(3)
        _start(self._prm, self._hist, float(cfg.dt), self._bx, self._by, self._state)
        self.n = 0

    @property
    def t(self) -> float:
        return self.n * self.cfg.dt

    @property
    def state(self) -> tuple:
        return float(self._state[0]), float(self._state[1])

    def initial_record(self):
        return self._state.copy()

    def advance(self, n_steps: int):
        """Advance ``n_steps`` steps; return recorded (x, y, ydot) arrays.

        Nodes are recorded when their global index is a multiple of the
        record stride.
        """
        stride = int(self.cfg.record_stride)
        n_to = self.n + n_steps
        n_rec = n_to // stride - self.n // stride
        out_x = np.empty(n_rec)
        out_y = np.empty(n_rec)
        out_a = np.empty(n_rec)
        status, n_done, _ = _advance(
            self._prm, self._hist, float(self.cfg.dt), self.n, n_to, stride,
            bool(self.cfg.refine_overlap), BLOWUP_LIMIT, self._bx, self._by, self._state,
            out_x, out_y, out_a, 0,
        )
        if status != _OK:
            self.n = n_done
            raise IntegrationError("state left the finite range", (n_done + 1) * self.cfg.dt)
        self.n = n_to
        return out_x, out_y, out_a


def integrate(params: OscillatorParams, history: HistorySpec, cfg: SolverConfig) -> Trajectory:
    """Integrate on [0, t_end] and return the recorded trajectory.

    Raises
    ------
    IntegrationError
        If |x| or |y| exceeds ``BLOWUP_LIMIT`` or becomes non-finite.
    """
    stepper = Stepper(params, history, cfg)
    x0, y0, a0 = stepper.initial_record()
    xs, ys, acc = stepper.advance(cfg.n_steps)
    return Trajectory(
        0.0,
        cfg.dt_stored,
        np.concatenate(([x0], xs)),
        np.concatenate(([y0], ys)),
        np.concatenate(([a0], acc)),
    )
