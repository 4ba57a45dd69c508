"""
JSON report assembly for the command-line tools.

Reports and calibration files are plain JSON with a ``schema_version`` key;
their JSON Schemas ship in ``edgebench/data``. Non-finite floats are written
as null so every report is strict JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Iterable, Mapping

from .calibration import CalibrationPoint, ReliabilityReport
from .core import SCHEMA_VERSION, Calibration, Registry, calibration_from_dict, calibration_to_dict, dump_registry
from .cycle import CyclePoint
from .pareto import Measurement, ParetoEntry
from .segmentation import PhaseMetrics

REPORT_SCHEMA = "report.schema.json"
CALIBRATION_SCHEMA = "calibration.schema.json"
REGISTRY_SCHEMA = "registry.schema.json"


def load_schema(name: str) -> dict[str, Any]:
    return json.loads(resources.files("edgebench").joinpath("data", name).read_text(encoding="utf-8"))


def _num(x: float | None) -> float | None:
    if x is None or not math.isfinite(x):
        return None
    return float(x)


def phase_metrics_to_dict(pm: PhaseMetrics, **labels: Any) -> dict[str, Any]:
    return {
        **labels,
        "inferences_per_window": pm.inferences_per_window,
        "inference_time": pm.inference_time,
        "inference_energy": pm.inference_energy,
        "active_current": pm.active_current,
        "idle_current": _num(pm.idle_current),
        "total_duration": pm.total_duration,
        "idle_duration": pm.idle_duration,
        "voltage": pm.voltage,
        "windows": [
            {
                "start": w.start,
                "end": w.end,
                "mean_current": w.mean_current,
                "energy": _num(w.energy),
                "sample_count": w.sample_count,
            }
            for w in pm.windows
        ],
        "warnings": list(pm.warnings),
    }


def reliability_to_dict(r: ReliabilityReport, **labels: Any) -> dict[str, Any]:
    return {
        **labels,
        "metric": r.metric.value,
        "mean": r.mean,
        "sample_stddev": r.sample_stddev,
        "cv": _num(r.cv),
        "n_runs": r.n_runs,
        "threshold": r.threshold,
        "passed": r.passed,
    }


def cycle_point_to_dict(c: CyclePoint) -> dict[str, Any]:
    return {
        "cycle_time": c.cycle_time,
        "cycle_energy": c.cycle_energy,
        "mean_cycle_current": c.mean_cycle_current,
        "active_fraction": c.active_fraction,
    }


def pareto_entry_to_dict(e: ParetoEntry) -> dict[str, Any]:
    return {
        "processor_id": e.processor_id,
        "model_id": e.model_id,
        "cycle_time": e.cycle_time,
        "cycle_energy": _num(e.cycle_energy),
        "quality": e.quality,
        "on_front": e.on_front,
        "feasible": e.feasible,
        "infeasibility_reason": e.infeasibility_reason,
        "inference_time": _num(e.inference_time),
        "energy_source": e.energy_source,
    }


def calibration_point_to_dict(p: CalibrationPoint) -> dict[str, Any]:
    return {
        "model_id": p.model_id,
        "flops": p.flops,
        "inference_time": p.inference_time,
        "active_current": p.active_current,
        "inference_energy": p.inference_energy,
        "active_duration": _num(p.active_duration),
        "idle_current": _num(p.idle_current),
        "idle_duration": _num(p.idle_duration),
    }


@dataclass
class RunReport:
    """Everything one CLI invocation produced, plus the configuration that produced it."""

    command: str
    config: dict[str, Any]
    registry: Registry | None = None
    phase_metrics: list[dict[str, Any]] = field(default_factory=list)
    calibrations: dict[str, Calibration] = field(default_factory=dict)
    reliability: list[dict[str, Any]] = field(default_factory=list)
    sweeps: list[dict[str, Any]] = field(default_factory=list)
    fronts: list[dict[str, Any]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "registry": None if self.registry is None else dump_registry(self.registry),
            "phase_metrics": self.phase_metrics,
            "calibrations": {k: calibration_to_dict(v) for k, v in sorted(self.calibrations.items())},
            "reliability": self.reliability,
            "sweeps": self.sweeps,
            "fronts": self.fronts,
            "warnings": list(self.warnings),
        }

    def dangling_ids(self) -> list[str]:
        """Processor/model ids referenced by the report but absent from its registry snapshot."""
        if self.registry is None:
            return []
        procs = {p.id for p in self.registry.processors}
        models = {m.id for m in self.registry.models}
        missing = set()
        for pid in self.calibrations:
            if pid not in procs:
                missing.add(pid)
        for item in (*self.sweeps, *(e for f in self.fronts for e in f["entries"]), *self.phase_metrics, *self.reliability):
            pid, mid = item.get("processor_id"), item.get("model_id")
            if pid is not None and pid not in procs:
                missing.add(pid)
            if mid is not None and mid not in models:
                missing.add(mid)
        return sorted(missing)


def dumps(doc: Mapping[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


def calibration_document(
    calibrations: Mapping[str, Calibration],
    points: Mapping[str, Iterable[CalibrationPoint]],
    measurements: Mapping[tuple[str, str], tuple[Measurement, int]],
) -> dict[str, Any]:
    """The JSON written by ``edgebench calibrate``."""
    return {
        "schema_version": SCHEMA_VERSION,
        "calibrations": {pid: calibration_to_dict(c) for pid, c in sorted(calibrations.items())},
        "points": {pid: [calibration_point_to_dict(p) for p in pts] for pid, pts in sorted(points.items())},
        "measurements": [
            {
                "processor_id": pid,
                "model_id": mid,
                "inference_time": m.inference_time,
                "active_current": m.active_current,
                "idle_current": _num(m.idle_current),
                "n_runs": n,
            }
            for (pid, mid), (m, n) in sorted(measurements.items())
        ],
    }


def read_calibration_document(doc: Mapping[str, Any]):
    """Inverse of :func:`calibration_document`: (calibrations, measurements)."""
    if not isinstance(doc, Mapping) or "calibrations" not in doc:
        raise ValueError("calibration document must be an object with a 'calibrations' key")
    calibrations = {pid: calibration_from_dict(d) for pid, d in doc["calibrations"].items()}
    measurements = {
        (m["processor_id"], m["model_id"]): Measurement(
            inference_time=float(m["inference_time"]),
            active_current=float(m["active_current"]),
            idle_current=None if m.get("idle_current") is None else float(m["idle_current"]),
        )
        for m in doc.get("measurements", [])
    }
    return calibrations, measurements
