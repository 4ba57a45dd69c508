"""Exception hierarchy shared by all edgebench modules."""

from __future__ import annotations


class EdgeBenchError(Exception):
    """Base class for every error raised by edgebench."""


class RegistryError(EdgeBenchError, ValueError):
    """A registry document is malformed or violates a record invariant."""


class TraceFormatError(EdgeBenchError, ValueError):
    """A trace file could not be parsed.

    ``line`` is the 1-based physical line in the file; ``row`` is the 1-based
    data row (header and comments excluded), or None for non-row errors.
    """

    def __init__(self, message: str, line: int | None = None, row: int | None = None):
        self.line = line
        self.row = row
        where = ""
        if line is not None:
            where = f"line {line}"
            if row is not None:
                where += f" (data row {row})"
            where += ": "
        super().__init__(where + message)


class SegmentationError(EdgeBenchError, ValueError):
    """A trace holds no usable active windows."""


class DegenerateDesignError(EdgeBenchError, ValueError):
    """A regression was requested with fewer than two distinct FLOP counts."""


class UncalibratedError(EdgeBenchError, LookupError):
    """A prediction needs a processor calibration that does not exist."""


class InfeasibleCycleError(EdgeBenchError, ValueError):
    """The requested cycle time is shorter than the inference time."""


class NoFeasibleCandidateError(EdgeBenchError):
    """Every candidate was removed by the RAM/ROM gate or the quality filter.

    ``reasons`` maps ``(processor_id, model_id)`` to a short explanation.
    """

    def __init__(self, message: str, reasons: dict[tuple[str, str], str]):
        self.reasons = dict(reasons)
        super().__init__(message)
