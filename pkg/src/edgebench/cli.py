"""
edgebench command-line interface.

    edgebench synth SCENARIO.json OUTDIR
    edgebench segment TRACE.csv [TRACE.csv ...] [--reliability]
    edgebench calibrate TRACE_DIR --registry R.json -o calibration.json [--force]
    edgebench sweep --registry R.json --calibration C.json --cycle-min 0 --cycle-max 5 --steps 11
    edgebench pareto --registry R.json --calibration C.json --cycle-times 0.5,2.5,5.0

The registry path may also come from the EDGEBENCH_CONFIG environment
variable. Reports are JSON on stdout unless ``--output`` is given.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from collections import defaultdict
from pathlib import Path
from typing import Sequence

from .calibration import DEFAULT_CV_THRESHOLD, CalibrationPoint, Metric, fit_latency_model, reliability
from .core import Registry, load_registry
from .cycle import cycle_grid, sweep_cycle_energy
from .errors import (
    DegenerateDesignError,
    EdgeBenchError,
    InfeasibleCycleError,
    NoFeasibleCandidateError,
    RegistryError,
    SegmentationError,
    TraceFormatError,
    UncalibratedError,
)
from .pareto import (
    ENERGY_SOURCES,
    IDLE_SOURCES,
    CandidateExcluded,
    Measurement,
    evaluate_candidates,
    feasibility_gate,
    rank_front,
    resolve_operating_point,
)
from .report import (
    RunReport,
    calibration_document,
    cycle_point_to_dict,
    dumps,
    pareto_entry_to_dict,
    phase_metrics_to_dict,
    read_calibration_document,
    reliability_to_dict,
)
from .segmentation import PhaseMetrics, compute_phase_metrics, merge_phase_metrics
from .synth import SynthScenario, generate_trace, write_synth
from .traceio import read_trace

logger = logging.getLogger("edgebench")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3
EXIT_PARSE = 4
EXIT_ANALYSIS = 5

DEFAULT_VOLTAGE = 3.3
CONFIG_ENV = "EDGEBENCH_CONFIG"

EXIT_HELP = f"""\
exit status:
  {EXIT_OK}  success
  {EXIT_USAGE}  usage error (bad flags, missing registry, refusing to overwrite)
  {EXIT_NOT_FOUND}  input file or directory not found
  {EXIT_PARSE}  input could not be parsed (trace CSV, registry, calibration, scenario)
  {EXIT_ANALYSIS}  analysis error (unusable trace, degenerate calibration, no feasible candidate)

environment:
  {CONFIG_ENV}  registry JSON path used when --registry is omitted
"""


class UsageError(EdgeBenchError):
    pass


class InputParseError(EdgeBenchError):
    pass


def _load_json(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputParseError(f"{path}: invalid JSON: {exc}") from exc


def _registry(args) -> Registry:
    path = args.registry or os.environ.get(CONFIG_ENV)
    if not path:
        raise UsageError(f"no registry given (use --registry or set {CONFIG_ENV})")
    args.registry = path
    return load_registry(_load_json(path))


def _calibration_file(path: str):
    try:
        return read_calibration_document(_load_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputParseError(f"{path}: malformed calibration file: {exc}") from exc


def _emit(report: RunReport, output: str | None) -> None:
    text = dumps(report.to_dict())
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _config(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _ipw(trace, override: int | None, path) -> int:
    if override is not None:
        return override
    raw = trace.meta.get("inferences_per_window")
    if raw is None:
        raise UsageError(f"{path}: no inferences_per_window in trace meta; pass --inferences-per-window")
    try:
        return int(raw)
    except ValueError:
        raise InputParseError(f"{path}: inferences_per_window meta is not an integer: {raw!r}") from None


def _voltage(trace, override: float | None, registry: Registry | None) -> float:
    if override is not None:
        return override
    pid = trace.meta.get("processor")
    if registry is not None and pid is not None:
        try:
            return registry.processor(pid).supply_voltage
        except KeyError:
            pass
    return DEFAULT_VOLTAGE


# ---------------------------------------------------------------- commands


def cmd_synth(args) -> int:
    doc = _load_json(args.scenario)
    items = doc["scenarios"] if isinstance(doc, dict) and "scenarios" in doc else [doc]
    report = RunReport("synth", _config(args))
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise InputParseError(f"{args.scenario}: scenario {i} is not an object")
        item = dict(item)
        name = item.pop("name", None)
        extra = item.pop("meta", {})
        try:
            scenario = SynthScenario.from_dict(item)
        except (TypeError, ValueError) as exc:
            raise InputParseError(f"{args.scenario}: scenario {i}: {exc}") from exc
        if name is None:
            name = f"{scenario.processor_id}__{scenario.model_id}__seed{scenario.seed}"
        trace, truth = generate_trace(scenario, extra_meta=extra)
        path = write_synth(trace, truth, args.outdir, name)
        logger.info("wrote %s (%d samples)", path, len(trace))
    _emit(report, args.output)
    return EXIT_OK


def _segment_paths(paths, ipw, voltage, registry):
    """Parse and segment each trace; returns [(path, trace, PhaseMetrics)]."""
    out = []
    for path in paths:
        trace = read_trace(path)
        pm = compute_phase_metrics(trace, _ipw(trace, ipw, path), _voltage(trace, voltage, registry))
        out.append((str(path), trace, pm))
    return out


def cmd_segment(args) -> int:
    registry = _registry(args) if (args.registry or os.environ.get(CONFIG_ENV)) else None
    results = _segment_paths(args.traces, args.inferences_per_window, args.voltage, registry)
    report = RunReport("segment", _config(args), registry=registry)
    groups: dict[tuple, list[PhaseMetrics]] = defaultdict(list)
    for path, trace, pm in results:
        pid, mid = trace.meta.get("processor"), trace.meta.get("model")
        report.phase_metrics.append(phase_metrics_to_dict(pm, trace=path, processor_id=pid, model_id=mid))
        report.warnings.extend(f"{path}: {w}" for w in pm.warnings)
        groups[(pid, mid)].append(pm)
    if args.reliability:
        for (pid, mid), runs in sorted(groups.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))):
            if len(runs) < 2:
                report.warnings.append(f"reliability skipped for ({pid}, {mid}): only {len(runs)} run")
                continue
            for metric in Metric:
                r = reliability(runs, metric, args.cv_threshold)
                report.reliability.append(reliability_to_dict(r, processor_id=pid, model_id=mid))
    if report.dangling_ids():
        report.warnings.append(f"ids not in registry: {', '.join(report.dangling_ids())}")
    _emit(report, args.output)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    registry = _registry(args)
    out = Path(args.output)
    if out.exists() and not args.force:
        raise UsageError(f"{out} exists; pass --force to overwrite")
    trace_dir = Path(args.trace_dir)
    if not trace_dir.is_dir():
        raise FileNotFoundError(f"trace directory not found: {trace_dir}")
    paths = sorted(trace_dir.glob("*.csv"))
    if not paths:
        raise SegmentationError(f"no *.csv traces in {trace_dir}")

    runs: dict[str, dict[str, list[PhaseMetrics]]] = defaultdict(lambda: defaultdict(list))
    for path in paths:
        trace = read_trace(path)
        pid, mid = trace.meta.get("processor"), trace.meta.get("model")
        if pid is None or mid is None:
            raise InputParseError(f"{path}: trace meta must name 'processor' and 'model'")
        try:
            profile = registry.processor(pid)
            registry.model(mid)
        except KeyError as exc:
            raise InputParseError(f"{path}: {exc.args[0]}") from None
        pm = compute_phase_metrics(trace, _ipw(trace, args.inferences_per_window, path), profile.supply_voltage)
        runs[pid][mid].append(pm)

    calibrations, points, measurements, degenerate = {}, {}, {}, {}
    for pid in sorted(runs):
        pts = []
        for mid in sorted(runs[pid]):
            merged = merge_phase_metrics(runs[pid][mid])
            measurements[(pid, mid)] = (
                Measurement(merged.inference_time, merged.active_current, merged.idle_current),
                len(runs[pid][mid]),
            )
            pts.append(
                CalibrationPoint(
                    model_id=mid,
                    flops=registry.model(mid).flops,
                    inference_time=merged.inference_time,
                    active_current=merged.active_current,
                    inference_energy=merged.inference_energy,
                    active_duration=merged.active_duration,
                    idle_current=merged.idle_current,
                    idle_duration=merged.idle_duration if merged.idle_current is not None else None,
                )
            )
        points[pid] = pts
        try:
            calibrations[pid] = fit_latency_model(pts)
        except DegenerateDesignError as exc:
            degenerate[pid] = str(exc)
    if degenerate:
        detail = "; ".join(f"{pid}: {why}" for pid, why in sorted(degenerate.items()))
        raise DegenerateDesignError(f"cannot calibrate {len(degenerate)} processor(s): {detail}")

    doc = calibration_document(calibrations, points, measurements)
    out.write_text(dumps(doc), encoding="utf-8")
    report = RunReport("calibrate", _config(args), registry=registry, calibrations=calibrations)
    for pid, cal in sorted(calibrations.items()):
        logger.info("%s: slope=%.4e s/FLOP intercept=%.4e s R2=%.4f", pid, cal.latency_slope, cal.latency_intercept, cal.r_squared)
    _emit(report, args.report)
    return EXIT_OK


def cmd_sweep(args) -> int:
    registry = _registry(args)
    calibrations, measurements = _calibration_file(args.calibration) if args.calibration else ({}, {})
    report = RunReport("sweep", _config(args), registry=registry, calibrations=calibrations)
    csv_dir = Path(args.csv_dir) if args.csv_dir else None
    for p in sorted(registry.processors, key=lambda p: p.id):
        cal = calibrations.get(p.id, p.calibration)
        for m in sorted(registry.models, key=lambda m: m.id):
            ok, reason = feasibility_gate(m, p)
            if not ok:
                report.warnings.append(f"({p.id}, {m.id}) skipped: exceeds {reason}")
                continue
            try:
                op = resolve_operating_point(p, m, cal, measurements.get((p.id, m.id)), args.energy_source, args.idle_source)
                grid = cycle_grid(op.inference_time, args.cycle_min, args.cycle_max, args.steps)
            except (CandidateExcluded, InfeasibleCycleError) as exc:
                report.warnings.append(f"({p.id}, {m.id}) skipped: {exc}")
                continue
            points = sweep_cycle_energy(p, op.inference_time, op.active_current, grid.tolist(), op.idle_current)
            entry = {
                "processor_id": p.id,
                "model_id": m.id,
                "inference_time": op.inference_time,
                "active_current": op.active_current,
                "idle_current": p.idle_current if op.idle_current is None else op.idle_current,
                "energy_source": op.source,
                "points": [cycle_point_to_dict(c) for c in points],
            }
            if csv_dir is not None:
                csv_dir.mkdir(parents=True, exist_ok=True)
                path = csv_dir / f"{p.id}__{m.id}.csv"
                with open(path, "w", newline="", encoding="utf-8") as fh:
                    w = csv.writer(fh, lineterminator="\n")
                    w.writerow(["cycle_time_s", "energy_mj", "mean_current_ma"])
                    for c in points:
                        w.writerow([repr(c.cycle_time), repr(c.cycle_energy), repr(c.mean_cycle_current)])
                entry["csv"] = str(path)
            report.sweeps.append(entry)
    _emit(report, args.output)
    return EXIT_OK


def cmd_pareto(args) -> int:
    registry = _registry(args)
    calibrations, measurements = _calibration_file(args.calibration) if args.calibration else ({}, {})
    report = RunReport("pareto", _config(args), registry=registry, calibrations=calibrations)
    for T in args.cycle_times:
        entries = evaluate_candidates(
            registry,
            calibrations,
            T,
            args.quality_threshold,
            use_case=args.use_case,
            measurements=measurements,
            energy_source=args.energy_source,
            idle_source=args.idle_source,
        )
        ranking = rank_front(entries)
        report.fronts.append(
            {
                "cycle_time": T,
                "entries": [pareto_entry_to_dict(e) for e in entries],
                "ranking": [pareto_entry_to_dict(e) for e in ranking],
                "recommendation": pareto_entry_to_dict(ranking[0]),
            }
        )
        logger.info("T=%g s: recommend %s / %s (%.4f mJ)", T, ranking[0].processor_id, ranking[0].model_id, ranking[0].cycle_energy)
    _emit(report, args.output)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def _cycle_times(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("cycle times must be positive")
    return values


def _unit(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgebench",
        description="Energy, latency and Pareto analysis of embedded AI inference traces.",
        epilog=EXIT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, registry=True):
        if registry:
            p.add_argument("--registry", help=f"registry JSON (default: ${CONFIG_ENV})")
        p.add_argument("-o", "--output", help="write the JSON report here instead of stdout")

    p = sub.add_parser("synth", help="generate synthetic traces with ground-truth sidecars", epilog=EXIT_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("scenario", help="scenario JSON: one scenario object or {\"scenarios\": [...]}")
    p.add_argument("outdir")
    common(p, registry=False)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("segment", help="segment traces into per-inference metrics", epilog=EXIT_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("traces", nargs="+")
    p.add_argument("--inferences-per-window", type=_positive_int, help="overrides the trace meta value")
    p.add_argument("--voltage", type=float, help=f"supply voltage in V (default: registry, else {DEFAULT_VOLTAGE})")
    p.add_argument("--reliability", action="store_true", help="add cv statistics over repeated runs")
    p.add_argument("--cv-threshold", type=float, default=DEFAULT_CV_THRESHOLD)
    common(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("calibrate", help="fit FLOPs->latency per processor from a trace directory", epilog=EXIT_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("trace_dir")
    p.add_argument("--registry", help=f"registry JSON (default: ${CONFIG_ENV})")
    p.add_argument("-o", "--output", required=True, help="calibration JSON to write")
    p.add_argument("--report", help="write the run report here instead of stdout")
    p.add_argument("--force", action="store_true", help="overwrite an existing calibration file")
    p.add_argument("--inferences-per-window", type=_positive_int)
    p.set_defaults(func=cmd_calibrate)

    def sources(p):
        p.add_argument("--calibration", help="calibration JSON written by 'edgebench calibrate'")
        p.add_argument("--energy-source", choices=ENERGY_SOURCES, default="auto")
        p.add_argument("--idle-source", choices=IDLE_SOURCES, default="auto")

    p = sub.add_parser("sweep", help="cycle energy vs cycle time for every feasible pair", epilog=EXIT_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    sources(p)
    p.add_argument("--cycle-min", type=float, default=0.0)
    p.add_argument("--cycle-max", type=float, default=5.0)
    p.add_argument("--steps", type=_positive_int, default=11)
    p.add_argument("--csv-dir", help="also write one CSV series per pair")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pareto", help="energy/quality fronts and recommendations", epilog=EXIT_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    sources(p)
    p.add_argument("--cycle-times", type=_cycle_times, default=[0.5, 2.5, 5.0])
    p.add_argument("--quality-threshold", type=_unit, help="uniform threshold (default: registry use-case targets)")
    p.add_argument("--use-case", help="restrict candidates to one use case")
    common(p)
    p.set_defaults(func=cmd_pareto)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"edgebench: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"edgebench: not found: {exc.filename or exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (InputParseError, TraceFormatError, RegistryError) as exc:
        print(f"edgebench: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NoFeasibleCandidateError as exc:
        print(f"edgebench: {exc}", file=sys.stderr)
        for (pid, mid), why in sorted(exc.reasons.items()):
            print(f"  {pid} / {mid}: {why}", file=sys.stderr)
        return EXIT_ANALYSIS
    except (SegmentationError, DegenerateDesignError, UncalibratedError, InfeasibleCycleError) as exc:
        print(f"edgebench: analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
