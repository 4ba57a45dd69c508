"""
Shared domain types and the processor/model registry.

Unit conventions used throughout the package:

    time     seconds (s)
    current  milliamps (mA)
    voltage  volts (V)
    energy   millijoules (mJ)   -- V * mA * s = mJ
    memory   bytes

All records are frozen dataclasses; derive modified copies with
``dataclasses.replace``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, NamedTuple

from .errors import RegistryError

SCHEMA_VERSION = "1.0"

# Compression ratio of float32 -> int8 weights.
QUANTIZATION_RATIO = 4


class QualityKind(str, Enum):
    ACCURACY = "accuracy"
    AUC = "auc"


def _finite_positive(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value) and value > 0


def _in_unit_interval(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and 0.0 <= value <= 1.0


@dataclass(frozen=True)
class Calibration:
    """Fitted FLOPs->latency line plus the mean active current of a processor.

    ``idle_current`` is the measured idle current (mA) when the calibration
    traces contained usable idle spans, otherwise None.
    """

    latency_slope: float
    latency_intercept: float
    r_squared: float
    active_current: float
    n_points: int
    idle_current: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.latency_slope) and math.isfinite(self.latency_intercept)):
            raise ValueError("calibration slope and intercept must be finite")
        if not _in_unit_interval(self.r_squared):
            raise ValueError(f"r_squared must lie in [0, 1], got {self.r_squared!r}")
        if not _finite_positive(self.active_current):
            raise ValueError(f"active_current must be > 0, got {self.active_current!r}")
        if not isinstance(self.n_points, int) or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        if self.idle_current is not None and not _finite_positive(self.idle_current):
            raise ValueError(f"idle_current must be > 0 when given, got {self.idle_current!r}")


@dataclass(frozen=True)
class ProcessorProfile:
    """Electrical and memory constants of one target core."""

    id: str
    idle_current: float
    supply_voltage: float
    ram_capacity: int
    rom_capacity: int
    calibration: Calibration | None = None

    def __post_init__(self):
        _check_id(self.id, "processor")
        for name in ("idle_current", "supply_voltage", "ram_capacity", "rom_capacity"):
            if not _finite_positive(getattr(self, name)):
                raise ValueError(f"processor {self.id!r}: {name} must be > 0, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class ModelDescriptor:
    """One candidate model. FLOPs and footprints are declared, not measured here."""

    id: str
    use_case: str
    params: int
    flops: float
    ram_bytes: int
    rom_bytes: int
    quality: float
    quality_kind: QualityKind = QualityKind.ACCURACY
    quantized: bool = False

    def __post_init__(self):
        _check_id(self.id, "model")
        object.__setattr__(self, "quality_kind", QualityKind(self.quality_kind))
        if not _finite_positive(self.flops):
            raise ValueError(f"model {self.id!r}: flops must be > 0, got {self.flops!r}")
        if not _finite_positive(self.params):
            raise ValueError(f"model {self.id!r}: params must be > 0, got {self.params!r}")
        if not _in_unit_interval(self.quality):
            raise ValueError(f"model {self.id!r}: quality must lie in [0, 1], got {self.quality!r}")
        for name in ("ram_bytes", "rom_bytes"):
            value = getattr(self, name)
            if not (isinstance(value, int) and not isinstance(value, bool) and value >= 0):
                raise ValueError(f"model {self.id!r}: {name} must be a non-negative integer, got {value!r}")


@dataclass(frozen=True)
class UseCaseTarget:
    use_case: str
    quality_threshold: float
    quality_kind: QualityKind = QualityKind.ACCURACY

    def __post_init__(self):
        _check_id(self.use_case, "use_case")
        object.__setattr__(self, "quality_kind", QualityKind(self.quality_kind))
        t = self.quality_threshold
        if not (_in_unit_interval(t) and t > 0):
            raise ValueError(f"target {self.use_case!r}: quality_threshold must lie in (0, 1], got {t!r}")


def _check_id(value: Any, what: str) -> None:
    if not isinstance(value, str) or not value:
        raise ValueError(f"{what} id must be a non-empty string, got {value!r}")


class Registry(NamedTuple):
    """Processors, models and quality targets loaded from one document."""

    processors: tuple[ProcessorProfile, ...]
    models: tuple[ModelDescriptor, ...]
    targets: tuple[UseCaseTarget, ...] = ()

    def processor(self, processor_id: str) -> ProcessorProfile:
        for p in self.processors:
            if p.id == processor_id:
                return p
        raise KeyError(f"unknown processor {processor_id!r}")

    def model(self, model_id: str) -> ModelDescriptor:
        for m in self.models:
            if m.id == model_id:
                return m
        raise KeyError(f"unknown model {model_id!r}")

    def target(self, use_case: str) -> UseCaseTarget | None:
        for t in self.targets:
            if t.use_case == use_case:
                return t
        return None


_PROCESSOR_FIELDS = ("id", "idle_current", "supply_voltage", "ram_capacity", "rom_capacity")
_CALIBRATION_FIELDS = ("latency_slope", "latency_intercept", "r_squared", "active_current", "n_points")
_MODEL_FIELDS = ("id", "use_case", "params", "flops", "ram_bytes", "rom_bytes", "quality", "quality_kind")
_TARGET_FIELDS = ("use_case", "quality_threshold", "quality_kind")


def _build(kind: str, index: int, record: Any, required: Iterable[str], optional: Iterable[str], factory):
    label = f"{kind}[{index}]"
    if not isinstance(record, dict):
        raise RegistryError(f"{label}: expected an object, got {type(record).__name__}")
    if isinstance(record.get("id"), str):
        label += f" ({record['id']!r})"
    elif isinstance(record.get("use_case"), str) and kind == "targets":
        label += f" ({record['use_case']!r})"
    missing = [k for k in required if k not in record]
    if missing:
        raise RegistryError(f"{label}: missing required field(s) {', '.join(missing)}")
    allowed = set(required) | set(optional)
    unknown = sorted(set(record) - allowed)
    if unknown:
        raise RegistryError(f"{label}: unknown field(s) {', '.join(unknown)}")
    try:
        return factory(record)
    except (TypeError, ValueError) as exc:
        raise RegistryError(f"{label}: {exc}") from exc


def calibration_from_dict(d: dict[str, Any]) -> Calibration:
    return Calibration(
        latency_slope=float(d["latency_slope"]),
        latency_intercept=float(d["latency_intercept"]),
        r_squared=float(d["r_squared"]),
        active_current=float(d["active_current"]),
        n_points=d["n_points"],
        idle_current=None if d.get("idle_current") is None else float(d["idle_current"]),
    )


def calibration_to_dict(c: Calibration) -> dict[str, Any]:
    out = {
        "latency_slope": c.latency_slope,
        "latency_intercept": c.latency_intercept,
        "r_squared": c.r_squared,
        "active_current": c.active_current,
        "n_points": c.n_points,
    }
    if c.idle_current is not None:
        out["idle_current"] = c.idle_current
    return out


def _processor_from_dict(d: dict[str, Any]) -> ProcessorProfile:
    cal = d.get("calibration")
    if cal is not None:
        if not isinstance(cal, dict):
            raise ValueError("calibration must be an object")
        missing = [k for k in _CALIBRATION_FIELDS if k not in cal]
        if missing:
            raise ValueError(f"calibration missing field(s) {', '.join(missing)}")
        cal = calibration_from_dict(cal)
    return ProcessorProfile(
        id=d["id"],
        idle_current=d["idle_current"],
        supply_voltage=d["supply_voltage"],
        ram_capacity=d["ram_capacity"],
        rom_capacity=d["rom_capacity"],
        calibration=cal,
    )


def _model_from_dict(d: dict[str, Any]) -> ModelDescriptor:
    quantized = d.get("quantized", False)
    if not isinstance(quantized, bool):
        raise ValueError(f"quantized must be a boolean, got {quantized!r}")
    return ModelDescriptor(
        id=d["id"],
        use_case=d["use_case"],
        params=d["params"],
        flops=d["flops"],
        ram_bytes=d["ram_bytes"],
        rom_bytes=d["rom_bytes"],
        quality=d["quality"],
        quality_kind=d["quality_kind"],
        quantized=quantized,
    )


def _target_from_dict(d: dict[str, Any]) -> UseCaseTarget:
    return UseCaseTarget(
        use_case=d["use_case"],
        quality_threshold=d["quality_threshold"],
        quality_kind=d["quality_kind"],
    )


def load_registry(config: dict[str, Any] | str | Path) -> Registry:
    """Validate a registry document and build its records.

    ``config`` is either an already-parsed JSON object or a path to a JSON
    file. The document has the top-level keys ``processors``, ``models`` and
    ``targets`` (the last one optional); an optional ``notes`` list of
    strings is accepted and ignored.

    Raises:
        RegistryError: on a missing field, an unknown field, an invariant
            violation or a duplicate id. The message names the record.
    """
    if isinstance(config, (str, Path)):
        with open(config, encoding="utf-8") as fh:
            try:
                config = json.load(fh)
            except json.JSONDecodeError as exc:
                raise RegistryError(f"{config}: invalid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise RegistryError("registry document must be a JSON object")
    unknown = sorted(set(config) - {"processors", "models", "targets", "notes", "schema_version"})
    if unknown:
        raise RegistryError(f"unknown top-level key(s) {', '.join(unknown)}")
    for key in ("processors", "models"):
        if key not in config:
            raise RegistryError(f"missing top-level key {key!r}")
    sections = {}
    for key in ("processors", "models", "targets"):
        value = config.get(key, [])
        if not isinstance(value, list):
            raise RegistryError(f"{key!r} must be a list")
        sections[key] = value

    processors = tuple(
        _build("processors", i, r, _PROCESSOR_FIELDS, ("calibration",), _processor_from_dict)
        for i, r in enumerate(sections["processors"])
    )
    models = tuple(
        _build("models", i, r, _MODEL_FIELDS, ("quantized",), _model_from_dict)
        for i, r in enumerate(sections["models"])
    )
    targets = tuple(
        _build("targets", i, r, _TARGET_FIELDS, (), _target_from_dict)
        for i, r in enumerate(sections["targets"])
    )
    _check_unique("processors", [p.id for p in processors])
    _check_unique("models", [m.id for m in models])
    _check_unique("targets", [t.use_case for t in targets])
    return Registry(processors, models, targets)


def _check_unique(kind: str, ids: list[str]) -> None:
    seen: set[str] = set()
    for i, ident in enumerate(ids):
        if ident in seen:
            raise RegistryError(f"{kind}[{i}] ({ident!r}): duplicate id")
        seen.add(ident)


def dump_registry(registry: Registry) -> dict[str, Any]:
    """Inverse of :func:`load_registry`; returns a JSON-ready dict."""
    processors = []
    for p in registry.processors:
        d: dict[str, Any] = {
            "id": p.id,
            "idle_current": p.idle_current,
            "supply_voltage": p.supply_voltage,
            "ram_capacity": p.ram_capacity,
            "rom_capacity": p.rom_capacity,
        }
        if p.calibration is not None:
            d["calibration"] = calibration_to_dict(p.calibration)
        processors.append(d)
    models = [
        {
            "id": m.id,
            "use_case": m.use_case,
            "params": m.params,
            "flops": m.flops,
            "ram_bytes": m.ram_bytes,
            "rom_bytes": m.rom_bytes,
            "quality": m.quality,
            "quality_kind": m.quality_kind.value,
            "quantized": m.quantized,
        }
        for m in registry.models
    ]
    targets = [
        {"use_case": t.use_case, "quality_threshold": t.quality_threshold, "quality_kind": t.quality_kind.value}
        for t in registry.targets
    ]
    return {"processors": processors, "models": models, "targets": targets}


def reference_registry() -> Registry:
    """The bundled registry of three Cortex-M cores and the benchmark models.

    Idle currents and the 3.3 V rail are published values; memory capacities,
    FLOP counts, footprints and model qualities are placeholders (see the
    ``notes`` entry of ``data/reference_registry.json``).
    """
    text = resources.files("edgebench").joinpath("data/reference_registry.json").read_text(encoding="utf-8")
    return load_registry(json.loads(text))


def estimate_quantized_rom(descriptor: ModelDescriptor) -> int:
    """Planning estimate of ROM after 8-bit quantization: ``ceil(rom_bytes / 4)``.

    The descriptor is not modified.
    """
    if descriptor.quantized:
        raise ValueError(f"model {descriptor.id!r} is already quantized")
    return -(-descriptor.rom_bytes // QUANTIZATION_RATIO)
