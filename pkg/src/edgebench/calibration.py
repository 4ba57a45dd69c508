"""
FLOPs -> latency calibration and repeated-run reliability statistics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .core import Calibration, ProcessorProfile
from .errors import DegenerateDesignError, UncalibratedError

DEFAULT_CV_THRESHOLD = 0.05


class NegativeLatencyWarning(UserWarning):
    """A calibration line predicted a negative latency; the value was clamped to 0."""


@dataclass(frozen=True)
class CalibrationPoint:
    """One (model, processor) measurement feeding the latency regression.

    ``active_duration`` is the total marker-high time behind the point and
    weights the calibration's active current; it defaults to
    ``inference_time``.
    """

    model_id: str
    flops: float
    inference_time: float
    active_current: float
    inference_energy: float
    active_duration: float | None = None
    idle_current: float | None = None
    idle_duration: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.flops) and self.flops > 0):
            raise ValueError(f"{self.model_id}: flops must be > 0")
        if not (math.isfinite(self.inference_time) and self.inference_time > 0):
            raise ValueError(f"{self.model_id}: inference_time must be > 0")


class Metric(str, Enum):
    INFERENCE_TIME = "inference_time"
    ACTIVE_CURRENT = "active_current"
    INFERENCE_ENERGY = "inference_energy"


@dataclass(frozen=True)
class ReliabilityReport:
    """Spread of one metric over repeated runs.

    ``cv`` is None when the mean is zero but the spread is not; such a report
    never passes.
    """

    metric: Metric
    mean: float
    sample_stddev: float
    cv: float | None
    n_runs: int
    threshold: float
    passed: bool


def fit_latency_model(points: Sequence[CalibrationPoint]) -> Calibration:
    """Ordinary least squares of inference time on FLOPs, with intercept.

    R² is ``1 - SS_res / SS_tot`` and is taken as 1 when both sums vanish.
    The calibration's active current is the duration-weighted mean of the
    points' currents; idle current likewise over points that carry one.

    Raises:
        DegenerateDesignError: fewer than two distinct FLOP counts.
    """
    if len(points) < 2:
        raise DegenerateDesignError(f"need at least 2 calibration points, got {len(points)}")
    x = np.array([p.flops for p in points], dtype=float)
    y = np.array([p.inference_time for p in points], dtype=float)
    if np.unique(x).size < 2:
        raise DegenerateDesignError("all calibration points share one flops value; slope is not identifiable")

    # Center before solving; raw FLOP counts (~1e6..1e9) would make the normal equations ill-conditioned.
    x_mean, y_mean = x.mean(), y.mean()
    dx, dy = x - x_mean, y - y_mean
    slope = float(np.dot(dx, dy) / np.dot(dx, dx))
    intercept = float(y_mean - slope * x_mean)

    residuals = y - (slope * x + intercept)
    ss_res = float(np.dot(residuals, residuals))
    ss_tot = float(np.dot(dy, dy))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res == 0.0 else 0.0
    else:
        r_squared = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))

    weights = np.array([p.active_duration or p.inference_time for p in points])
    currents = np.array([p.active_current for p in points])
    active_current = float(np.dot(weights, currents) / weights.sum())

    idle = [(p.idle_current, p.idle_duration or 1.0) for p in points if p.idle_current is not None]
    idle_current = None
    if idle:
        idle_current = sum(i * d for i, d in idle) / sum(d for _, d in idle)

    return Calibration(
        latency_slope=slope,
        latency_intercept=intercept,
        r_squared=r_squared,
        active_current=active_current,
        n_points=len(points),
        idle_current=idle_current,
    )


def predict_latency(calibration: Calibration | None, flops: float) -> float:
    """``slope * flops + intercept``, clamped at 0 with a :class:`NegativeLatencyWarning`."""
    if calibration is None:
        raise UncalibratedError("no calibration available for latency prediction")
    if not (math.isfinite(flops) and flops > 0):
        raise ValueError(f"flops must be > 0, got {flops!r}")
    t = calibration.latency_slope * flops + calibration.latency_intercept
    if t < 0:
        warnings.warn(f"predicted latency {t:.3e} s for {flops:g} FLOPs clamped to 0", NegativeLatencyWarning, stacklevel=2)
        return 0.0
    return t


def predict_inference_energy(calibration: Calibration | None, profile: ProcessorProfile, flops: float) -> float:
    """Predicted energy of one inference in mJ."""
    if calibration is None:
        raise UncalibratedError(f"processor {profile.id!r} has no calibration")
    return profile.supply_voltage * calibration.active_current * predict_latency(calibration, flops)


def reliability_of(values: Sequence[float], metric: Metric | str, threshold: float = DEFAULT_CV_THRESHOLD) -> ReliabilityReport:
    """Mean, sample standard deviation (n-1) and coefficient of variation of ``values``."""
    metric = Metric(metric)
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise ValueError(f"reliability needs at least 2 runs, got {v.size}")
    mean = float(v.mean())
    # Identical runs must give exactly zero spread, whatever the rounding in mean().
    std = 0.0 if np.all(v == v[0]) else float(v.std(ddof=1))
    if mean == 0.0:
        cv = 0.0 if std == 0.0 else None
    else:
        cv = std / abs(mean)
    return ReliabilityReport(
        metric=metric,
        mean=mean,
        sample_stddev=std,
        cv=cv,
        n_runs=int(v.size),
        threshold=threshold,
        passed=cv is not None and cv <= threshold,
    )


def reliability(runs, metric: Metric | str, threshold: float = DEFAULT_CV_THRESHOLD) -> ReliabilityReport:
    """Reliability of ``metric`` across a list of :class:`PhaseMetrics`."""
    metric = Metric(metric)
    return reliability_of([getattr(r, metric.value) for r in runs], metric, threshold)
