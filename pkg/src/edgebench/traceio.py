"""
Canonical CSV format for marker-annotated current traces.

Layout (UTF-8, LF line endings, no trailing whitespace)::

    # source=synth-bench          <- optional meta lines, "# key=value"
    # processor=cortex-m4
    timestamp_s,current_ma,marker
    0.000000,1.00,0
    0.000100,10.00,1
    ...

Timestamps are written with exactly 6 fractional digits. Currents are written
with 6 fractional digits, trailing zeros stripped down to a minimum of 2
(``0.3`` -> ``0.30``, ``0.123456`` -> ``0.123456``). Markers are ``0``/``1``.
Any trace whose values already sit on that decimal grid round-trips exactly,
and ``write(read(write(t)))`` is byte-identical to ``write(t)`` for every
valid trace.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from os import PathLike
from typing import BinaryIO, Mapping

import numpy as np

from .errors import TraceFormatError

HEADER = "timestamp_s,current_ma,marker"
TIME_DECIMALS = 6
CURRENT_DECIMALS = 6
CURRENT_MIN_DECIMALS = 2

_NUMBER = re.compile(r"-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?\Z")
_META_KEY = re.compile(r"[A-Za-z0-9_.\-]+\Z")


@dataclass(frozen=True, eq=False)
class CurrentTrace:
    """Time series of (timestamp, current) samples with a boolean marker channel.

    ``marker[i]`` is True while the device executes inference (the GPIO/D0
    channel). Arrays are stored read-only.
    """

    timestamps: np.ndarray
    currents: np.ndarray
    marker: np.ndarray
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        t = np.array(self.timestamps, dtype=float)
        c = np.array(self.currents, dtype=float)
        m = np.array(self.marker, dtype=bool)
        if t.ndim != 1 or c.ndim != 1 or m.ndim != 1:
            raise ValueError("timestamps, currents and marker must be one-dimensional")
        if not (len(t) == len(c) == len(m)):
            raise ValueError(f"length mismatch: {len(t)} timestamps, {len(c)} currents, {len(m)} markers")
        if len(t) < 2:
            raise ValueError("a trace needs at least 2 samples")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(c))):
            raise ValueError("timestamps and currents must be finite")
        bad = np.flatnonzero(np.diff(t) <= 0)
        if bad.size:
            raise ValueError(f"timestamps not strictly increasing at sample {bad[0] + 1}")
        neg = np.flatnonzero(c < 0)
        if neg.size:
            raise ValueError(f"negative current at sample {neg[0]}")
        meta = dict(self.meta)
        for k, v in meta.items():
            _check_meta(k, v)
        for a in (t, c, m):
            a.setflags(write=False)
        object.__setattr__(self, "timestamps", t)
        object.__setattr__(self, "currents", c)
        object.__setattr__(self, "marker", m)
        object.__setattr__(self, "meta", meta)

    def __len__(self) -> int:
        return len(self.timestamps)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CurrentTrace):
            return NotImplemented
        return (
            np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.currents, other.currents)
            and np.array_equal(self.marker, other.marker)
            and dict(self.meta) == dict(other.meta)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def duration(self) -> float:
        return float(self.timestamps[-1] - self.timestamps[0])


def _check_meta(key: str, value: str) -> None:
    if not isinstance(key, str) or not _META_KEY.match(key):
        raise ValueError(f"invalid meta key {key!r}")
    if not isinstance(value, str):
        raise ValueError(f"meta value for {key!r} must be a string")
    if "\n" in value or "\r" in value or value != value.strip():
        raise ValueError(f"meta value for {key!r} must be a single line without surrounding whitespace")


def format_timestamp(value: float) -> str:
    return f"{value + 0.0:.{TIME_DECIMALS}f}"


def format_current(value: float) -> str:
    text = f"{value + 0.0:.{CURRENT_DECIMALS}f}"
    head, frac = text.split(".")
    frac = frac.rstrip("0").ljust(CURRENT_MIN_DECIMALS, "0")
    return f"{head}.{frac}"


def _open_sink(sink):
    if isinstance(sink, (str, PathLike)):
        return open(sink, "wb"), True
    return sink, False


def dumps_trace(trace: CurrentTrace) -> bytes:
    lines = [f"# {k}={v}" for k, v in trace.meta.items()]
    lines.append(HEADER)
    ts = [format_timestamp(v) for v in trace.timestamps]
    for i in range(1, len(ts)):
        if float(ts[i]) <= float(ts[i - 1]):
            raise ValueError(
                f"timestamps {trace.timestamps[i - 1]!r} and {trace.timestamps[i]!r} collide "
                f"at {TIME_DECIMALS} fractional digits"
            )
    lines.extend(
        f"{t},{format_current(c)},{int(m)}" for t, c, m in zip(ts, trace.currents.tolist(), trace.marker.tolist())
    )
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_trace(trace: CurrentTrace, sink: str | PathLike | BinaryIO) -> None:
    """Serialize ``trace`` to a path or a binary stream."""
    data = dumps_trace(trace)
    fh, owned = _open_sink(sink)
    try:
        fh.write(data)
    finally:
        if owned:
            fh.close()


def _parse_number(text: str, what: str, line: int, row: int) -> float:
    if not _NUMBER.match(text):
        raise TraceFormatError(f"{what} {text!r} is not a decimal number", line, row)
    return float(text)


def loads_trace(data: bytes | str) -> CurrentTrace:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TraceFormatError(f"not valid UTF-8: {exc}") from exc
    lines = data.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    meta: dict[str, str] = {}
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        lineno = i + 1
        text = lines[i]
        if not text.startswith("# ") or "=" not in text:
            raise TraceFormatError("meta line must look like '# key=value'", lineno)
        key, value = text[2:].split("=", 1)
        try:
            _check_meta(key, value)
        except ValueError as exc:
            raise TraceFormatError(str(exc), lineno) from None
        if key in meta:
            raise TraceFormatError(f"duplicate meta key {key!r}", lineno)
        meta[key] = value
        i += 1
    if i >= len(lines):
        raise TraceFormatError("missing header line", i + 1)
    if lines[i] != HEADER:
        raise TraceFormatError(f"expected header {HEADER!r}, got {lines[i]!r}", i + 1)
    i += 1

    n = len(lines) - i
    t = np.empty(n)
    c = np.empty(n)
    m = np.empty(n, dtype=bool)
    for row in range(n):
        lineno = i + row + 1
        text = lines[i + row]
        if "\r" in text:
            raise TraceFormatError("carriage return in line (LF endings required)", lineno, row + 1)
        if text != text.strip():
            raise TraceFormatError("leading or trailing whitespace", lineno, row + 1)
        fields = text.split(",")
        if len(fields) != 3:
            raise TraceFormatError(f"expected 3 fields, got {len(fields)}", lineno, row + 1)
        ts = _parse_number(fields[0], "timestamp", lineno, row + 1)
        cur = _parse_number(fields[1], "current", lineno, row + 1)
        if fields[2] not in ("0", "1"):
            raise TraceFormatError(f"marker must be 0 or 1, got {fields[2]!r}", lineno, row + 1)
        if not (math.isfinite(ts) and math.isfinite(cur)):
            raise TraceFormatError("non-finite value", lineno, row + 1)
        if cur < 0:
            raise TraceFormatError(f"negative current {fields[1]}", lineno, row + 1)
        if row and ts <= t[row - 1]:
            raise TraceFormatError(
                f"timestamp {fields[0]} not greater than previous {t[row - 1]!r}", lineno, row + 1
            )
        t[row], c[row], m[row] = ts, cur, fields[2] == "1"
    if n < 2:
        raise TraceFormatError(f"a trace needs at least 2 data rows, got {n}", len(lines) + 1)
    return CurrentTrace(t, c, m, meta)


def read_trace(source: str | PathLike | BinaryIO | bytes) -> CurrentTrace:
    """Parse a trace from a path, a binary/text stream, or raw bytes.

    Raises:
        TraceFormatError: with the offending physical line (and data row).
        OSError: when a path cannot be opened.
    """
    if isinstance(source, (bytes, bytearray)):
        return loads_trace(bytes(source))
    if isinstance(source, (str, PathLike)):
        with open(source, "rb") as fh:
            return loads_trace(fh.read())
    return loads_trace(source.read())
