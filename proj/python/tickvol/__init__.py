"""Spot volatility and trading intensity estimation from tick data.

Configs are plain dicts with the same keys as the command-line JSON files.
"""

import json

from ._tickvol import (
    TickSeries,
    TickvolError,
    __version__,
    intensity_variance_target,
    read_series,
    spread_same_timestamp,
    tick_variance_target,
    write_series,
)
from . import _tickvol

ESTIMATORS = ("intensity", "clock_pavg", "tick_pavg", "decomposed", "noise_var", "realized_vol")


def simulate(config=None, arrivals=None):
    """Simulate a tick series. ``arrivals`` replaces the Poisson arrival times."""
    text = json.dumps(config or {})
    if arrivals is not None:
        return _tickvol._simulate_on_arrivals(text, [float(t) for t in arrivals])
    return _tickvol._simulate(text)


def estimate(series, u0, estimator="clock_pavg", config=None):
    return _tickvol._estimate(series, float(u0), json.dumps(config or {}), estimator)


def estimate_curve(series, estimator="clock_pavg", config=None):
    """Estimates over the config grid as a list of (u, value or None, reason_code)."""
    out = json.loads(_tickvol._estimate_curve(series, json.dumps(config or {}), estimator))
    return [(p["u"], p["value"], p["reason_code"]) for p in out["points"]]


def clean_csv(path, session_start=34200.0, session_end=57600.0, bad_conditions=()):
    """Clean a raw ``timestamp,price,condition`` file. Returns (series, report)."""
    return _tickvol._clean_csv(str(path), session_start, session_end, list(bad_conditions))


def run_scenario(registry, name, threads=0, include_samples=False):
    """Run one registry scenario; the report dict carries ``pass`` and ``message``."""
    return json.loads(_tickvol._run_scenario(str(registry), name, threads, include_samples))


__all__ = [
    "ESTIMATORS",
    "TickSeries",
    "TickvolError",
    "__version__",
    "clean_csv",
    "estimate",
    "estimate_curve",
    "intensity_variance_target",
    "read_series",
    "run_scenario",
    "simulate",
    "spread_same_timestamp",
    "tick_variance_target",
    "write_series",
]
