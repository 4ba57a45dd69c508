import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgebench import CurrentTrace, TraceFormatError, generate_trace, read_trace, write_trace
from edgebench.traceio import dumps_trace, format_current, loads_trace

from conftest import make_scenario

MINIMAL = "timestamp_s,current_ma,marker\n0.0,1.0,0\n0.001,1.0,1\n0.002,1.0,0\n"


def test_minimal_file():
    tr = read_trace(io.BytesIO(MINIMAL.encode()))
    assert len(tr) == 3
    assert tr.marker.tolist() == [False, True, False]
    assert tr.meta == {}


def test_non_monotone_reports_row_and_line():
    text = "timestamp_s,current_ma,marker\n0.0,1.0,0\n0.002,1.0,1\n0.001,1.0,0\n"
    with pytest.raises(TraceFormatError) as exc:
        read_trace(text.encode())
    assert exc.value.row == 3
    assert exc.value.line == 4  # header occupies physical line 1


def test_meta_header_comments(tmp_path):
    text = "# source=ppk\n# processor=cortex-m4\n" + MINIMAL
    p = tmp_path / "t.csv"
    p.write_text(text)
    tr = read_trace(p)
    assert tr.meta == {"source": "ppk", "processor": "cortex-m4"}
    assert dumps_trace(tr).decode() == "# source=ppk\n# processor=cortex-m4\ntimestamp_s,current_ma,marker\n" \
        "0.000000,1.00,0\n0.001000,1.00,1\n0.002000,1.00,0\n"


def test_synth_file_sample_count(tmp_path):
    # 4 windows of 10 x 10 ms plus 5 gaps of 0.32 s = 2.0 s at 10 kHz.
    sc = make_scenario(n_windows=4, idle_gap=0.32)
    trace, truth = generate_trace(sc)
    p = tmp_path / "s.csv"
    write_trace(trace, p)
    back = read_trace(p)
    assert len(back) == truth.n_samples == 20_000
    assert back.meta["sample_rate"] == "10000.0"
    assert back.meta["n_windows"] == "4"
    assert back == trace


def test_current_formatting():
    assert format_current(0.30) == "0.30"
    assert format_current(0.3) == "0.30"
    assert format_current(10) == "10.00"
    assert format_current(0.123456) == "0.123456"
    assert format_current(1.5e-7) == "0.00"
    tr = CurrentTrace([0.0, 0.1], [0.30, 0.30], [False, True])
    assert b"0.000000,0.30,0\n0.100000,0.30,1\n" in dumps_trace(tr)


def test_write_to_stream_round_trip():
    tr = CurrentTrace([0.0, 0.5, 1.25], [0.3, 12.345678, 0.0], [0, 1, 0], {"model": "lenet5"})
    buf = io.BytesIO()
    write_trace(tr, buf)
    buf.seek(0)
    assert read_trace(buf) == tr


def test_double_round_trip_synth(tmp_path):
    trace, _ = generate_trace(make_scenario(n_windows=4, idle_gap=0.32, noise_sigma=0.1))
    first = dumps_trace(trace)
    again = dumps_trace(loads_trace(first))
    assert first == again
    assert len(loads_trace(again)) == 20_000


def test_writer_rejects_timestamps_colliding_at_six_decimals():
    tr = CurrentTrace([0.0, 1e-7, 1.0], [1, 1, 1], [0, 0, 0])
    with pytest.raises(ValueError, match="collide"):
        dumps_trace(tr)


@pytest.mark.parametrize(
    "text,line",
    [
        ("", 1),
        ("timestamp,current,marker\n0,1,0\n1,1,0\n", 1),
        ("#nope\n" + MINIMAL, 1),
        ("# a=1\n# a=2\n" + MINIMAL, 2),
        ("timestamp_s,current_ma,marker\n0.0,1.0,0\n", 3),
        ("timestamp_s,current_ma,marker\n0.0,1.0,0\n0.1,1.0\n", 3),
        ("timestamp_s,current_ma,marker\n0.0,1.0,0\n0.1,1.0,0,7\n", 3),
        ("timestamp_s,current_ma,marker\n0.0,1.0,0\n0.1,nan,0\n", 3),
        ("timestamp_s,current_ma,marker\n0.0,1.0,0\n0.1,-1.0,0\n", 3),
        ("timestamp_s,current_ma,marker\n0.0,1.0,0\n0.1,1.0,2\n", 3),
        ("timestamp_s,current_ma,marker\n0.0,1.0,0\n0.1,1.0,0 \n", 3),
        ("timestamp_s,current_ma,marker\n0.0,1.0,0\r\n0.1,1.0,0\n", 2),
        ("timestamp_s,current_ma,marker\n0.0,1.0,0\n\n0.1,1.0,0\n", 3),
    ],
)
def test_malformed_inputs(text, line):
    with pytest.raises(TraceFormatError) as exc:
        loads_trace(text)
    assert exc.value.line == line


def test_length_mismatch_in_constructor():
    with pytest.raises(ValueError, match="length mismatch"):
        CurrentTrace([0, 1, 2], [1, 1], [0, 0, 0])


def test_trace_arrays_read_only():
    tr = CurrentTrace([0, 1], [1, 1], [0, 1])
    with pytest.raises(ValueError):
        tr.currents[0] = 5


@st.composite
def traces(draw):
    n = draw(st.integers(min_value=2, max_value=60))
    steps = draw(st.lists(st.integers(min_value=1, max_value=10**6), min_size=n - 1, max_size=n - 1))
    t0 = draw(st.integers(min_value=0, max_value=10**6))
    t = (t0 + np.concatenate(([0], np.cumsum(steps)))) / 1e6
    c = np.array(draw(st.lists(st.floats(min_value=0, max_value=500, allow_nan=False), min_size=n, max_size=n)))
    m = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    keys = draw(st.lists(st.from_regex(r"[a-z_]{1,6}", fullmatch=True), max_size=3, unique=True))
    meta = {k: draw(st.from_regex(r"[a-z0-9=.]{1,8}", fullmatch=True)) for k in keys}
    return CurrentTrace(t, c, m, meta)


@settings(max_examples=200)
@given(traces())
def test_write_read_write_is_byte_identical(tr):
    once = dumps_trace(tr)
    assert dumps_trace(loads_trace(once)) == once


@settings(max_examples=100)
@given(traces())
def test_values_on_grid_round_trip_exactly(tr):
    on_grid = CurrentTrace(tr.timestamps, np.round(tr.currents, 6), tr.marker, tr.meta)
    assert loads_trace(dumps_trace(on_grid)) == on_grid
