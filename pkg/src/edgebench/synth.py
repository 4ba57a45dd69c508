"""
Synthetic device-under-test: square-wave current traces with known ground truth.

A scenario describes ``n_windows`` active phases, each running
``inferences_per_window`` back-to-back inferences at ``true_active_current``,
separated by ``idle_gap`` seconds at ``true_idle_current``. Sample ``i`` sits at
``i / sample_rate``; the marker is high on every sample inside a window,
endpoints included, and each sample's current is the plateau of its own
phase plus Gaussian noise (clipped at 0 mA). Sample layout::

    n_gap idle | n_win+1 active | n_gap-1 idle | n_win+1 active | ... | n_gap-1 idle

with ``n_win = round(inferences_per_window * true_inference_time * fs)`` and
``n_gap = round(idle_gap * fs)``, so window boundaries and idle gaps land
exactly on the sample grid and the file holds ``round(total * fs)`` samples.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .calibration import CalibrationPoint
from .errors import DegenerateDesignError
from .rng import SplitMix64
from .traceio import TIME_DECIMALS, CURRENT_DECIMALS, CurrentTrace, write_trace

TRUTH_SUFFIX = ".truth.json"


@dataclass(frozen=True)
class SynthScenario:
    processor_id: str
    model_id: str
    true_inference_time: float
    true_active_current: float
    true_idle_current: float
    inferences_per_window: int
    n_windows: int
    idle_gap: float
    sample_rate: float
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("true_inference_time", "true_active_current", "true_idle_current", "idle_gap", "sample_rate"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be > 0, got {value!r}")
        for name in ("inferences_per_window", "n_windows"):
            value = getattr(self, name)
            if not (isinstance(value, int) and value >= 1):
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if not (math.isfinite(self.noise_sigma) and self.noise_sigma >= 0):
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma!r}")
        if self.sample_rate * self.true_inference_time < 10:
            raise ValueError("sample_rate * true_inference_time must be >= 10 samples per inference")
        if round(self.idle_gap * self.sample_rate) < 3:
            raise ValueError("idle_gap must span at least 3 sample periods")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SynthScenario":
        return cls(**d)


@dataclass(frozen=True)
class GroundTruth:
    """What the generator actually emitted, in trace timestamps."""

    scenario: SynthScenario
    windows: tuple[tuple[float, float], ...]
    n_samples: int
    sample_period: float
    inference_time: float
    total_duration: float
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": asdict(self.scenario),
            "windows": [list(w) for w in self.windows],
            "n_samples": self.n_samples,
            "sample_period": self.sample_period,
            "inference_time": self.inference_time,
            "total_duration": self.total_duration,
            "extra": dict(self.extra),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GroundTruth":
        return cls(
            scenario=SynthScenario.from_dict(d["scenario"]),
            windows=tuple((float(a), float(b)) for a, b in d["windows"]),
            n_samples=int(d["n_samples"]),
            sample_period=float(d["sample_period"]),
            inference_time=float(d["inference_time"]),
            total_duration=float(d["total_duration"]),
            extra=dict(d.get("extra", {})),
        )


def _meta_value(v: Any) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def generate_trace(
    scenario: SynthScenario, extra_meta: dict[str, Any] | None = None
) -> tuple[CurrentTrace, GroundTruth]:
    """Render ``scenario`` as a trace. Deterministic in ``scenario.seed``."""
    fs = scenario.sample_rate
    k = scenario.inferences_per_window
    n_win = int(round(k * scenario.true_inference_time * fs))
    n_gap = int(round(scenario.idle_gap * fs))
    n = (scenario.n_windows + 1) * n_gap + scenario.n_windows * n_win

    idx = np.arange(n)
    t = np.round(idx / fs, TIME_DECIMALS)
    marker = np.zeros(n, dtype=bool)
    starts = [n_gap + j * (n_win + n_gap) for j in range(scenario.n_windows)]
    for a in starts:
        marker[a : a + n_win + 1] = True

    current = np.where(marker, scenario.true_active_current, scenario.true_idle_current)
    if scenario.noise_sigma > 0:
        current = current + scenario.noise_sigma * SplitMix64(scenario.seed).normal(n)
    current = np.round(np.clip(current, 0.0, None), CURRENT_DECIMALS)

    windows = tuple((float(t[a]), float(t[a + n_win])) for a in starts)
    inference_time = float(np.mean([(b - a) for a, b in windows])) / k

    meta = {
        "source": "synth-bench",
        "processor": scenario.processor_id,
        "model": scenario.model_id,
        "inferences_per_window": str(k),
    }
    for key, value in asdict(scenario).items():
        meta[key] = _meta_value(value)
    for key, value in (extra_meta or {}).items():
        meta[key] = _meta_value(value)

    trace = CurrentTrace(t, current, marker, meta)
    truth = GroundTruth(
        scenario=scenario,
        windows=windows,
        n_samples=n,
        sample_period=1.0 / fs,
        inference_time=inference_time,
        total_duration=float(t[-1] - t[0]),
        extra=dict(extra_meta or {}),
    )
    return trace, truth


def write_synth(trace: CurrentTrace, truth: GroundTruth, directory: str | Path, basename: str) -> Path:
    """Write ``<basename>.csv`` and its ``<basename>.truth.json`` sidecar; return the CSV path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / f"{basename}.csv"
    write_trace(trace, csv_path)
    with open(directory / f"{basename}{TRUTH_SUFFIX}", "w", encoding="utf-8") as fh:
        json.dump(truth.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path


def read_truth(csv_path: str | Path) -> GroundTruth:
    with open(Path(csv_path).with_suffix(TRUTH_SUFFIX), encoding="utf-8") as fh:
        return GroundTruth.from_dict(json.load(fh))


def generate_calibration_suite(
    slope: float,
    intercept: float,
    flops: Sequence[float],
    *,
    rel_noise: float = 0.0,
    seed: int = 0,
    processor_id: str = "synth-core",
    model_ids: Sequence[str] | None = None,
    voltage: float = 3.3,
    active_current: float = 10.0,
    idle_current: float = 1.0,
    inferences_per_window: int = 10,
    n_windows: int = 3,
    idle_gap: float = 0.02,
    sample_rate: float = 10_000.0,
    noise_sigma: float = 0.0,
) -> list[tuple[CurrentTrace, CalibrationPoint]]:
    """One trace per model whose true latency is ``slope * flops + intercept``.

    With ``rel_noise > 0`` each latency is multiplied by ``1 + rel_noise * z``,
    ``z`` a standard normal drawn from ``SplitMix64(seed)``; the next outputs of
    the same stream seed the per-trace current noise. The returned points hold
    the latency each trace actually encodes (after snapping to the sample grid).

    Raises:
        DegenerateDesignError: fewer than two distinct FLOP counts.
    """
    flops = [float(f) for f in flops]
    if len(set(flops)) < 2:
        raise DegenerateDesignError("calibration suite needs at least 2 distinct flops values")
    if model_ids is None:
        model_ids = [f"model{i:02d}" for i in range(len(flops))]
    if len(model_ids) != len(flops):
        raise ValueError("model_ids and flops differ in length")

    rng = SplitMix64(seed)
    z = rng.normal(len(flops)) if rel_noise > 0 else np.zeros(len(flops))
    trace_seeds = rng.next_u64(len(flops)) >> np.uint64(1)

    out = []
    for i, (mid, f) in enumerate(zip(model_ids, flops)):
        latency = (slope * f + intercept) * (1.0 + rel_noise * z[i])
        scenario = SynthScenario(
            processor_id=processor_id,
            model_id=mid,
            true_inference_time=latency,
            true_active_current=active_current,
            true_idle_current=idle_current,
            inferences_per_window=inferences_per_window,
            n_windows=n_windows,
            idle_gap=idle_gap,
            sample_rate=sample_rate,
            noise_sigma=noise_sigma,
            seed=int(trace_seeds[i]),
        )
        trace, truth = generate_trace(scenario, extra_meta={"flops": f})
        point = CalibrationPoint(
            model_id=mid,
            flops=f,
            inference_time=truth.inference_time,
            active_current=active_current,
            inference_energy=voltage * active_current * truth.inference_time,
        )
        out.append((trace, point))
    return out
