import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from retarded_oscillator.dde import (HistorySpec, IntegrationError, OscillatorParams, SolverConfig,
                                     Stepper, Trajectory, delay_tau, history_eval, integrate)
from retarded_oscillator.io import read_trajectory_binary, read_trajectory_csv, write_trajectory_binary
from retarded_oscillator.sweep import extract_maxima


def damped_closed_form(t, x0, y0, stiffness, mu, m=1.0):
    """Underdamped m x'' + mu x' + stiffness x = 0."""
    g = mu / (2.0 * m)
    wd = math.sqrt(stiffness / m - g * g)
    e = np.exp(-g * t)
    x = e * (x0 * np.cos(wd * t) + (y0 + g * x0) / wd * np.sin(wd * t))
    c1 = (y0 + g * x0) / wd
    y = e * ((-g * x0 + wd * c1) * np.cos(wd * t) + (-g * c1 - wd * x0) * np.sin(wd * t))
    return x, y


# ---- delay kernel and history

def test_delay_at_zero_is_tau0():
    assert delay_tau(0.0, OscillatorParams(tau0=5.87)) == 5.87


@given(st.floats(-20, 20, allow_nan=False), st.floats(0, 12), st.floats(0.05, 5))
def test_delay_even_and_bounded(x, tau0, sigma):
    p = OscillatorParams(tau0=tau0, sigma=sigma)
    v = delay_tau(x, p)
    assert v == delay_tau(-x, p)
    assert 0.0 <= v <= tau0


def test_delay_high_precision():
    mpmath.mp.dps = 40
    ref = mpmath.e ** (-1)
    got = delay_tau(1.0, OscillatorParams(tau0=1.0))
    assert abs(got - float(ref)) < 1e-15


def test_history_trivial_cases():
    assert history_eval(HistorySpec(0.0, 1.3, 0.2), -3.0) == (0.0, 0.0)
    assert history_eval(HistorySpec(1.0, 1.0, 0.0), 0.0) == (0.0, 1.0)


def test_history_high_precision():
    mpmath.mp.dps = 40
    h = HistorySpec(0.43, 2.0, math.pi / 2)
    arg = mpmath.mpf(-2) + mpmath.pi / 2
    x, y = history_eval(h, -1.0)
    assert abs(x - float(mpmath.mpf("0.43") * mpmath.sin(arg))) < 1e-15
    assert abs(y - float(mpmath.mpf("0.86") * mpmath.cos(arg))) < 1e-15


def test_history_rejects_positive_time():
    with pytest.raises(ValueError):
        history_eval(HistorySpec(1, 1, 0), 0.5)


@pytest.mark.parametrize("kw", [{"tau0": -1.0}, {"sigma": 0.0}, {"m": 0.0}, {"mu": math.nan}])
def test_params_validation(kw):
    with pytest.raises(ValueError):
        OscillatorParams(**kw)


@pytest.mark.parametrize("kw", [{"dt": 0.0}, {"t_end": -1.0}, {"transient_fraction": 1.0},
                                {"record_stride": 0}, {"record_stride": 1.5}])
def test_solver_validation(kw):
    with pytest.raises(ValueError):
        SolverConfig(**kw)


# ---- integration examples

def test_no_feedback_decays():
    tr = integrate(OscillatorParams(alpha=0.0, tau0=3.0), HistorySpec(1, 1, 0), SolverConfig(t_end=300))
    n = len(tr)
    tail = slice(int(0.9 * n), n)
    assert np.all(tr.x[tail] ** 2 + tr.y[tail] ** 2 < 1e-4)


def test_rest_state_stable_below_threshold():
    tr = integrate(OscillatorParams(alpha=0.5, tau0=0.1), HistorySpec(1.5, 1.0, 0.3),
                   SolverConfig(t_end=2000))
    assert np.max(np.abs(tr.x[tr.tail(0.9)])) < 1e-3


def test_step_halving_maxima():
    p = OscillatorParams(alpha=0.5, tau0=1.0)
    h = HistorySpec(1.0, 1.0, 0.0)
    a = extract_maxima(integrate(p, h, SolverConfig(dt=0.01)), 0.7)
    b = extract_maxima(integrate(p, h, SolverConfig(dt=0.005)), 0.7)
    assert abs(a.values.max() - b.values.max()) / b.values.max() < 0.01
    assert abs(np.median(a.values) - np.median(b.values)) / np.median(b.values) < 0.01


def test_zero_delay_matches_closed_form():
    p = OscillatorParams(alpha=0.5, tau0=0.0)
    h = HistorySpec(1.2, 0.7, 0.4)
    x0, y0 = history_eval(h, 0.0)
    errs = []
    for dt in (0.02, 0.01):
        tr = integrate(p, h, SolverConfig(dt=dt, t_end=50))
        xr, yr = damped_closed_form(tr.t, x0, y0, p.k + p.alpha, p.mu)
        errs.append(max(np.max(np.abs(tr.x - xr)), np.max(np.abs(tr.y - yr))))
    assert errs[1] < 1e-8
    # fourth order: halving dt cuts the error ~16x
    assert 10.0 < errs[0] / errs[1] < 24.0


@settings(max_examples=12, deadline=None)
@given(A=st.floats(0.1, 3.0), omega=st.floats(-math.pi, math.pi), phi=st.floats(0.0, math.pi),
       tau0=st.sampled_from([0.5, 1.0, 2.0, 3.0]))
def test_reflection_equivariance(A, omega, phi, tau0):
    p = OscillatorParams(alpha=0.5, tau0=tau0)
    cfg = SolverConfig(t_end=60)
    h = HistorySpec(A, omega, phi)
    a = integrate(p, h, cfg)
    b = integrate(p, h.mirrored(), cfg)
    assert np.max(np.abs(a.x + b.x)) < 1e-8
    assert np.max(np.abs(a.y + b.y)) < 1e-8


def test_determinism_bit_identical():
    p = OscillatorParams(alpha=-0.9, tau0=9.5)
    h = HistorySpec(1.1, -0.4, 2.0)
    a = integrate(p, h, SolverConfig(t_end=300))
    b = integrate(p, h, SolverConfig(t_end=300))
    assert a.x.tobytes() == b.x.tobytes() and a.y.tobytes() == b.y.tobytes()


@pytest.mark.parametrize("tau0", [0.5, 2.0, 4.5, 6.5, 8.0, 10.5])
def test_bounded_for_positive_alpha(tau0):
    tr = integrate(OscillatorParams(alpha=0.5, tau0=tau0), HistorySpec(3.0, 2.0, 1.0),
                   SolverConfig(t_end=1000))
    assert np.max(np.abs(tr.x)) <= 50.0


def test_stepper_chunks_match_integrate():
    p = OscillatorParams(alpha=0.9, tau0=5.87)
    h = HistorySpec(0.43, 1.0, 0.5)
    cfg = SolverConfig(t_end=100)
    full = integrate(p, h, cfg)
    st_ = Stepper(p, h, cfg)
    parts = [st_.advance(k)[0] for k in (1, 999, 3000, 6000)]
    assert np.array_equal(np.concatenate(parts), full.x[1:])


def test_record_stride_subsamples():
    p = OscillatorParams(alpha=0.5, tau0=1.0)
    h = HistorySpec(1.0, 1.0, 0.0)
    a = integrate(p, h, SolverConfig(t_end=50))
    b = integrate(p, h, SolverConfig(t_end=50, record_stride=20))
    assert b.dt_stored == pytest.approx(0.2)
    assert np.array_equal(a.x[::20], b.x)


def test_refine_flag_close_to_default():
    # large |x| makes tau small, exercising the overlap path
    p = OscillatorParams(alpha=0.5, tau0=0.5, sigma=0.2)
    h = HistorySpec(3.0, 1.0, 1.0)
    a = integrate(p, h, SolverConfig(t_end=50))
    b = integrate(p, h, SolverConfig(t_end=50, refine_overlap=True))
    assert np.max(np.abs(a.x - b.x)) < 1e-6


def test_blowup_reports_failure_time():
    with pytest.raises(IntegrationError) as exc:
        integrate(OscillatorParams(alpha=-50.0, tau0=3.0), HistorySpec(1, 1, 0), SolverConfig(t_end=100))
    assert 0.0 < exc.value.t_fail < 100.0


# ---- dense output

def _sample_traj():
    return integrate(OscillatorParams(alpha=0.5, tau0=1.0), HistorySpec(1.0, 1.0, 0.0),
                     SolverConfig(t_end=20))


def test_dense_output_reproduces_nodes():
    tr = _sample_traj()
    ev = tr.evaluate(tr.t)
    assert np.array_equal(ev[:, 0], tr.x)
    assert np.array_equal(ev[:, 1], tr.y)


def test_dense_output_c1():
    tr = _sample_traj()
    c = tr.segment_coeffs
    # value and slope at s=1 of segment i equal those at s=0 of segment i+1
    end_val = c[:-1, :, :].sum(axis=2)
    end_der = c[:-1, :, 1] + 2 * c[:-1, :, 2] + 3 * c[:-1, :, 3]
    assert np.max(np.abs(end_val - c[1:, :, 0])) < 1e-13
    assert np.max(np.abs(end_der - c[1:, :, 1])) < 1e-13


def test_dense_output_accuracy_between_nodes():
    p = OscillatorParams(alpha=0.5, tau0=0.0)
    h = HistorySpec(1.0, 1.0, 0.0)
    tr = integrate(p, h, SolverConfig(t_end=10))
    tq = np.linspace(0.003, 9.997, 777)
    xr, _ = damped_closed_form(tq, 0.0, 1.0, 1.5, 0.1)
    assert np.max(np.abs(tr.evaluate(tq)[:, 0] - xr)) < 1e-8


def test_evaluate_outside_span():
    with pytest.raises(ValueError):
        _sample_traj().evaluate(25.0)


def test_trajectory_is_read_only():
    tr = _sample_traj()
    with pytest.raises(ValueError):
        tr.x[0] = 1.0


def test_csv_and_binary_roundtrip(tmp_path):
    tr = _sample_traj()
    tr.to_csv(tmp_path / "t.csv")
    t, x, y = read_trajectory_csv(tmp_path / "t.csv")
    assert np.array_equal(x, tr.x) and np.array_equal(y, tr.y)
    assert np.allclose(t, tr.t)
    write_trajectory_binary(tmp_path / "t.bin", tr)
    raw = (tmp_path / "t.bin").read_bytes()
    assert raw[:4] == b"RTRJ"
    dt, xb, yb = read_trajectory_binary(tmp_path / "t.bin")
    assert dt == tr.dt_stored and np.array_equal(xb, tr.x) and np.array_equal(yb, tr.y)
    assert len(raw) == 24 + 16 * len(tr)


def test_exact_mirror_is_bitwise_negation():
    p = OscillatorParams(alpha=-0.9, tau0=8.5)
    h = HistorySpec(2.872, -3.1196, 0.7774)
    a = integrate(p, h, SolverConfig(t_end=1500))
    b = integrate(p, h.mirrored(exact=True), SolverConfig(t_end=1500))
    assert np.array_equal(a.x, -b.x) and np.array_equal(a.y, -b.y)
