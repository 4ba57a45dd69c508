"""Energy and latency analysis of embedded AI inference from marker-annotated current traces."""

from .calibration import (
    CalibrationPoint,
    Metric,
    NegativeLatencyWarning,
    ReliabilityReport,
    fit_latency_model,
    predict_inference_energy,
    predict_latency,
    reliability,
    reliability_of,
)
from .core import (
    SCHEMA_VERSION,
    Calibration,
    ModelDescriptor,
    ProcessorProfile,
    QualityKind,
    Registry,
    UseCaseTarget,
    dump_registry,
    estimate_quantized_rom,
    load_registry,
    reference_registry,
)
from .cycle import CyclePoint, crossover_time, cycle_energy, cycle_grid, sweep_cycle_energy
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
    Measurement,
    ParetoEntry,
    dominates,
    evaluate_candidates,
    feasibility_gate,
    front_members,
    pareto_front,
    recommend,
)
from .segmentation import ActiveWindow, PhaseMetrics, compute_phase_metrics, detect_windows, integrate_energy
from .synth import GroundTruth, SynthScenario, generate_calibration_suite, generate_trace
from .traceio import CurrentTrace, read_trace, write_trace

__version__ = "0.1.0"
