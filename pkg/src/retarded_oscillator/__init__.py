"""Damped oscillator with a state-dependent retarded potential.

Integration, Lienard reduction, maxima-map sweeps, basins of attraction and
time-series diagnostics.
"""

__version__ = "0.1.0"

from .dde import (HistorySpec, IntegrationError, OscillatorParams, SolverConfig, Trajectory,
                  delay_tau, history_eval, integrate)

__all__ = [
    "__version__", "HistorySpec", "IntegrationError", "OscillatorParams", "SolverConfig",
    "Trajectory", "delay_tau", "history_eval", "integrate",
]
