"""
Energy/quality Pareto fronts and the processor-model recommendation flow.

The selection flow for one cycle time is: RAM/ROM gate, quality target,
latency and energy (measured or predicted from the FLOPs calibration), cycle
energy, then the front of (minimize cycle energy, maximize quality).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from .calibration import predict_latency
from .core import Calibration, ModelDescriptor, ProcessorProfile, Registry
from .cycle import cycle_energy
from .errors import EdgeBenchError, InfeasibleCycleError, NoFeasibleCandidateError, UncalibratedError

ENERGY_SOURCES = ("auto", "measured", "predicted")
IDLE_SOURCES = ("auto", "measured", "datasheet")


@dataclass(frozen=True)
class ParetoEntry:
    processor_id: str
    model_id: str
    cycle_time: float
    cycle_energy: float
    quality: float
    on_front: bool = False
    feasible: bool = True
    infeasibility_reason: str | None = None
    inference_time: float | None = None
    energy_source: str | None = None

    def __post_init__(self):
        if self.on_front and not self.feasible:
            raise ValueError("an infeasible entry cannot be on the front")
        if not (0.0 <= self.quality <= 1.0):
            raise ValueError(f"quality must lie in [0, 1], got {self.quality!r}")


@dataclass(frozen=True)
class Measurement:
    """Measured per-inference figures for one (processor, model) pair.

    :class:`~edgebench.segmentation.PhaseMetrics` has the same attributes and
    can be passed wherever a Measurement is expected.
    """

    inference_time: float
    active_current: float
    idle_current: float | None = None


def feasibility_gate(model: ModelDescriptor, profile: ProcessorProfile) -> tuple[bool, str | None]:
    """Check the model's RAM and ROM footprint against the processor (inclusive).

    The reason string names the violated resource(s): ``"ram"``, ``"rom"`` or
    ``"ram,rom"``.
    """
    violated = []
    if model.ram_bytes > profile.ram_capacity:
        violated.append("ram")
    if model.rom_bytes > profile.rom_capacity:
        violated.append("rom")
    if violated:
        return False, ",".join(violated)
    return True, None


def dominates(a: ParetoEntry, b: ParetoEntry) -> bool:
    """True if ``a`` is no worse than ``b`` on both objectives and better on one."""
    return (
        a.cycle_energy <= b.cycle_energy
        and a.quality >= b.quality
        and (a.cycle_energy < b.cycle_energy or a.quality > b.quality)
    )


def pareto_front(entries: Sequence[ParetoEntry]) -> list[ParetoEntry]:
    """Return ``entries`` (input order) with ``on_front`` set.

    Entries that tie on both objectives are represented on the front only by
    the one with the lexically smallest ``(processor_id, model_id)``.

    Raises:
        ValueError: entries mix cycle times or include infeasible entries.
    """
    entries = list(entries)
    if not entries:
        return []
    cycle_times = {e.cycle_time for e in entries}
    if len(cycle_times) > 1:
        raise ValueError(f"pareto_front needs a single cycle_time, got {sorted(cycle_times)}")
    if any(not e.feasible for e in entries):
        raise ValueError("infeasible entries must be removed before computing the front")
    if any(not math.isfinite(e.cycle_energy) for e in entries):
        raise ValueError("cycle_energy must be finite on every entry")

    order = sorted(
        range(len(entries)),
        key=lambda i: (entries[i].cycle_energy, -entries[i].quality, entries[i].processor_id, entries[i].model_id),
    )
    on_front = [False] * len(entries)
    best_quality = -math.inf
    for i in order:
        if entries[i].quality > best_quality:
            on_front[i] = True
            best_quality = entries[i].quality
    return [replace(e, on_front=f) for e, f in zip(entries, on_front)]


def front_members(entries: Sequence[ParetoEntry]) -> list[ParetoEntry]:
    """Front of ``entries`` sorted by ascending cycle energy."""
    return sorted((e for e in pareto_front(entries) if e.on_front), key=lambda e: e.cycle_energy)


def _quality_threshold(registry: Registry, model: ModelDescriptor, quality_threshold: float | None) -> float:
    if quality_threshold is not None:
        return quality_threshold
    target = registry.target(model.use_case)
    return 0.0 if target is None else target.quality_threshold


class CandidateExcluded(EdgeBenchError):
    """A (processor, model) pair cannot be evaluated under the chosen sources."""


@dataclass(frozen=True)
class OperatingPoint:
    """Latency and currents used to evaluate one (processor, model) pair.

    ``idle_current`` None means the processor's datasheet value applies.
    """

    inference_time: float
    active_current: float
    idle_current: float | None
    source: str


def resolve_operating_point(
    profile: ProcessorProfile,
    model: ModelDescriptor,
    calibration: Calibration | None,
    measurement: Measurement | None,
    energy_source: str = "auto",
    idle_source: str = "auto",
) -> OperatingPoint:
    """Pick measured or predicted figures for a pair.

    ``energy_source="auto"`` prefers a measurement and falls back to the
    calibration. ``idle_source="auto"`` prefers a measured idle current and
    falls back to the datasheet.

    Raises:
        UncalibratedError: a prediction is required but ``calibration`` is None.
        CandidateExcluded: the pair cannot be evaluated; ``str(exc)`` says why.
    """
    if energy_source == "measured" or (energy_source == "auto" and measurement is not None):
        if measurement is None:
            raise CandidateExcluded("no measurement")
        t_inf, i_act, measured_idle, source = (
            measurement.inference_time,
            measurement.active_current,
            measurement.idle_current,
            "measured",
        )
    else:
        if calibration is None:
            raise UncalibratedError(f"processor {profile.id!r} has no calibration")
        t_inf = predict_latency(calibration, model.flops)
        i_act, measured_idle, source = calibration.active_current, calibration.idle_current, "predicted"

    if idle_source == "datasheet":
        idle = None
    elif idle_source == "measured" and measured_idle is None:
        raise CandidateExcluded("no measured idle current")
    else:
        idle = measured_idle
    if t_inf <= 0:
        raise CandidateExcluded("non-positive latency")
    return OperatingPoint(t_inf, i_act, idle, source)


def evaluate_candidates(
    registry: Registry,
    calibrations: Mapping[str, Calibration] | None,
    cycle_time: float,
    quality_threshold: float | None = None,
    *,
    use_case: str | None = None,
    measurements: Mapping[tuple[str, str], Measurement] | None = None,
    energy_source: str = "auto",
    idle_source: str = "auto",
) -> list[ParetoEntry]:
    """Every (processor, model) pair at ``cycle_time``, with front flags set.

    Excluded pairs come back with ``feasible=False`` and a reason. Output is
    sorted by ``(processor_id, model_id)`` so it does not depend on registry
    order. ``quality_threshold=None`` applies each model's use-case target
    from the registry.

    Raises:
        UncalibratedError: a pair needs a predicted latency but its processor
            has no calibration.
    """
    if energy_source not in ENERGY_SOURCES:
        raise ValueError(f"energy_source must be one of {ENERGY_SOURCES}")
    if idle_source not in IDLE_SOURCES:
        raise ValueError(f"idle_source must be one of {IDLE_SOURCES}")
    calibrations = dict(calibrations or {})
    measurements = dict(measurements or {})

    entries: list[ParetoEntry] = []
    processors = sorted(registry.processors, key=lambda p: p.id)
    models = sorted(registry.models, key=lambda m: m.id)
    if use_case is not None:
        models = [m for m in models if m.use_case == use_case]

    for p in processors:
        cal = calibrations.get(p.id, p.calibration)
        for m in models:
            base = dict(processor_id=p.id, model_id=m.id, cycle_time=cycle_time, quality=m.quality)

            ok, reason = feasibility_gate(m, p)
            if not ok:
                entries.append(ParetoEntry(cycle_energy=math.nan, feasible=False, infeasibility_reason=reason, **base))
                continue
            threshold = _quality_threshold(registry, m, quality_threshold)
            if m.quality < threshold:
                entries.append(
                    ParetoEntry(
                        cycle_energy=math.nan,
                        feasible=False,
                        infeasibility_reason=f"quality {m.quality:g} below target {threshold:g}",
                        **base,
                    )
                )
                continue

            try:
                op = resolve_operating_point(p, m, cal, measurements.get((p.id, m.id)), energy_source, idle_source)
            except CandidateExcluded as exc:
                entries.append(ParetoEntry(cycle_energy=math.nan, feasible=False, infeasibility_reason=str(exc), **base))
                continue
            t_inf, i_act, idle, source = op.inference_time, op.active_current, op.idle_current, op.source
            try:
                point = cycle_energy(p, t_inf, i_act, cycle_time, idle_current=idle)
            except InfeasibleCycleError:
                entries.append(
                    ParetoEntry(
                        cycle_energy=math.nan,
                        feasible=False,
                        infeasibility_reason=f"inference time {t_inf:g} s exceeds cycle time",
                        inference_time=t_inf,
                        energy_source=source,
                        **base,
                    )
                )
                continue
            entries.append(
                ParetoEntry(cycle_energy=point.cycle_energy, inference_time=t_inf, energy_source=source, **base)
            )

    feasible = [e for e in entries if e.feasible]
    flagged = iter(pareto_front(feasible))
    return [next(flagged) if e.feasible else e for e in entries]


def recommend(
    registry: Registry,
    calibrations: Mapping[str, Calibration] | None,
    cycle_time: float,
    quality_threshold: float | None = None,
    **kwargs,
) -> list[ParetoEntry]:
    """Front members at ``cycle_time`` ranked by ascending cycle energy.

    Takes the same keyword arguments as :func:`evaluate_candidates`.

    Raises:
        NoFeasibleCandidateError: nothing survives gating; ``reasons`` lists
            why each pair was dropped.
    """
    entries = evaluate_candidates(registry, calibrations, cycle_time, quality_threshold, **kwargs)
    return rank_front(entries)


def rank_front(entries: Iterable[ParetoEntry]) -> list[ParetoEntry]:
    entries = list(entries)
    front = sorted((e for e in entries if e.on_front), key=lambda e: (e.cycle_energy, e.processor_id, e.model_id))
    if not front:
        reasons = {(e.processor_id, e.model_id): e.infeasibility_reason or "excluded" for e in entries}
        raise NoFeasibleCandidateError("no feasible candidate after gating", reasons)
    return front
