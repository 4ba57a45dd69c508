"""
Marker-driven segmentation of a current trace into active windows and idle spans.

Conventions:

* A window is a maximal run of marker-high samples; it starts at the first
  and ends at the last high sample of the run. Runs of a single sample cannot
  be integrated and are dropped with a warning.
* Every sample belongs to the phase of its own marker value. Mean currents
  are trapezoidal integrals over a run's own samples divided by the run's
  duration, so the short intervals that straddle a marker edge contribute to
  neither mean.
* Time accounting is exhaustive: ``idle_duration = total_duration - sum of
  window durations``, i.e. edge intervals and rejected runs count as idle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SegmentationError
from .traceio import CurrentTrace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ActiveWindow:
    start: float
    end: float
    mean_current: float
    sample_count: int
    start_index: int
    end_index: int
    energy: float | None = None  # mJ, set when a supply voltage is known

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class PhaseMetrics:
    """Per-inference figures recovered from one trace.

    ``idle_current`` is None when the trace has no idle run of two or more
    samples.
    """

    windows: tuple[ActiveWindow, ...]
    inferences_per_window: int
    inference_time: float
    inference_energy: float
    active_current: float
    idle_current: float | None
    total_duration: float
    idle_duration: float
    voltage: float
    warnings: tuple[str, ...] = ()

    @property
    def active_duration(self) -> float:
        return sum(w.duration for w in self.windows)


def _trapz(t: np.ndarray, c: np.ndarray) -> float:
    return float(0.5 * np.sum((c[1:] + c[:-1]) * np.diff(t)))


def integrate_energy(timestamps, currents, voltage: float) -> float:
    """Energy in mJ: ``voltage`` times the trapezoidal integral of current over time.

    Raises:
        ValueError: fewer than 2 samples, mismatched lengths, or
            non-increasing timestamps.
    """
    t = np.asarray(timestamps, dtype=float)
    c = np.asarray(currents, dtype=float)
    if t.shape != c.shape or t.ndim != 1:
        raise ValueError("timestamps and currents must be 1-D arrays of equal length")
    if len(t) < 2:
        raise ValueError("energy integration needs at least 2 samples")
    if np.any(np.diff(t) <= 0):
        raise ValueError("timestamps must be strictly increasing")
    return voltage * _trapz(t, c)


def _runs(marker: np.ndarray) -> list[tuple[bool, int, int]]:
    """Maximal runs of equal marker value as (value, first index, last index)."""
    edges = np.flatnonzero(marker[1:] != marker[:-1]) + 1
    starts = np.concatenate(([0], edges))
    ends = np.concatenate((edges - 1, [len(marker) - 1]))
    return [(bool(marker[a]), int(a), int(b)) for a, b in zip(starts, ends)]


def _scan(trace: CurrentTrace, voltage: float | None):
    t, c = trace.timestamps, trace.currents
    windows: list[ActiveWindow] = []
    idle_charge = 0.0
    idle_time = 0.0
    warnings: list[str] = []
    for value, a, b in _runs(trace.marker):
        if b == a:
            if value:
                msg = f"single-sample marker pulse at t={t[a]:.6f} s ignored"
                warnings.append(msg)
                logger.warning(msg)
            continue
        charge = _trapz(t[a : b + 1], c[a : b + 1])
        duration = float(t[b] - t[a])
        if value:
            windows.append(
                ActiveWindow(
                    start=float(t[a]),
                    end=float(t[b]),
                    mean_current=charge / duration,
                    sample_count=b - a + 1,
                    start_index=a,
                    end_index=b,
                    energy=None if voltage is None else voltage * charge,
                )
            )
        else:
            idle_charge += charge
            idle_time += duration
    idle_current = idle_charge / idle_time if idle_time > 0 else None
    return windows, idle_current, warnings


def detect_windows(trace: CurrentTrace, voltage: float | None = None) -> list[ActiveWindow]:
    """Active windows of ``trace`` in time order; empty if the marker never goes high."""
    return _scan(trace, voltage)[0]


def compute_phase_metrics(trace: CurrentTrace, inferences_per_window: int, voltage: float) -> PhaseMetrics:
    """Segment ``trace`` and reduce it to per-inference time, current and energy.

    ``inference_time`` is the mean window duration divided by
    ``inferences_per_window``; ``active_current`` is the duration-weighted
    mean over windows; ``inference_energy = voltage * active_current *
    inference_time``.

    Raises:
        SegmentationError: the trace contains no usable active window.
        ValueError: ``inferences_per_window < 1`` or ``voltage <= 0``.
    """
    if not isinstance(inferences_per_window, (int, np.integer)) or inferences_per_window < 1:
        raise ValueError(f"inferences_per_window must be a positive integer, got {inferences_per_window!r}")
    if not (math.isfinite(voltage) and voltage > 0):
        raise ValueError(f"voltage must be > 0, got {voltage!r}")
    windows, idle_current, warnings = _scan(trace, voltage)
    if not windows:
        raise SegmentationError("no active window (marker never high for 2+ samples); trace unusable")

    active_time = sum(w.duration for w in windows)
    active_charge = sum(w.mean_current * w.duration for w in windows)
    active_current = active_charge / active_time
    inference_time = active_time / len(windows) / inferences_per_window
    total = trace.duration
    return PhaseMetrics(
        windows=tuple(windows),
        inferences_per_window=int(inferences_per_window),
        inference_time=inference_time,
        inference_energy=voltage * active_current * inference_time,
        active_current=active_current,
        idle_current=idle_current,
        total_duration=total,
        idle_duration=total - active_time,
        voltage=voltage,
        warnings=tuple(warnings),
    )


def merge_phase_metrics(runs: Sequence[PhaseMetrics]) -> PhaseMetrics:
    """Pool repeated measurements of the same (processor, model) pair.

    Windows from all runs are concatenated; currents are duration-weighted.
    All runs must share ``inferences_per_window`` and ``voltage``.
    """
    if not runs:
        raise ValueError("nothing to merge")
    k = runs[0].inferences_per_window
    v = runs[0].voltage
    if any(r.inferences_per_window != k or r.voltage != v for r in runs):
        raise ValueError("runs disagree on inferences_per_window or voltage")
    windows = tuple(w for r in runs for w in r.windows)
    active_time = sum(w.duration for w in windows)
    active_current = sum(w.mean_current * w.duration for w in windows) / active_time
    inference_time = active_time / len(windows) / k
    idle = [(r.idle_current, r.idle_duration) for r in runs if r.idle_current is not None]
    idle_time = sum(d for _, d in idle)
    idle_current = sum(i * d for i, d in idle) / idle_time if idle_time > 0 else None
    return PhaseMetrics(
        windows=windows,
        inferences_per_window=k,
        inference_time=inference_time,
        inference_energy=v * active_current * inference_time,
        active_current=active_current,
        idle_current=idle_current,
        total_duration=sum(r.total_duration for r in runs),
        idle_duration=sum(r.idle_duration for r in runs),
        voltage=v,
        warnings=tuple(w for r in runs for w in r.warnings),
    )
