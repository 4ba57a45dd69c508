import math
import statistics
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import stats

from edgebench import (
    Calibration,
    CalibrationPoint,
    DegenerateDesignError,
    Metric,
    NegativeLatencyWarning,
    ProcessorProfile,
    UncalibratedError,
    compute_phase_metrics,
    fit_latency_model,
    generate_calibration_suite,
    predict_inference_energy,
    predict_latency,
    reliability,
    reliability_of,
)


def pts(xs, ys, current=10.0):
    return [CalibrationPoint(f"m{i}", x, y, current, 3.3 * current * y) for i, (x, y) in enumerate(zip(xs, ys))]


def test_exact_line():
    xs = [1e5, 1e6, 3e6, 7e6]
    cal = fit_latency_model(pts(xs, [2e-9 * x + 0.001 for x in xs]))
    assert cal.latency_slope == pytest.approx(2e-9, rel=1e-9)
    assert cal.latency_intercept == pytest.approx(0.001, rel=1e-9)
    assert cal.r_squared == pytest.approx(1.0, abs=1e-12)
    assert cal.n_points == 4


def test_two_points_interpolate():
    cal = fit_latency_model(pts([1e6, 2e6], [0.004, 0.007]))
    assert cal.r_squared == 1.0
    assert predict_latency(cal, 1e6) == pytest.approx(0.004, rel=1e-12)
    assert predict_latency(cal, 2e6) == pytest.approx(0.007, rel=1e-12)


def test_degenerate_design():
    with pytest.raises(DegenerateDesignError):
        fit_latency_model(pts([1e6, 1e6, 1e6], [0.01, 0.011, 0.012]))
    with pytest.raises(DegenerateDesignError):
        fit_latency_model(pts([1e6], [0.01]))


def test_matches_scipy_linregress():
    rng = np.random.default_rng(3)
    x = rng.uniform(1e5, 1e8, 30)
    y = 3e-9 * x + 0.002 + rng.normal(0, 0.01, 30)
    cal = fit_latency_model(pts(x, y))
    ref = stats.linregress(x, y)
    assert cal.latency_slope == pytest.approx(ref.slope, rel=1e-9)
    assert cal.latency_intercept == pytest.approx(ref.intercept, rel=1e-9)
    assert cal.r_squared == pytest.approx(ref.rvalue**2, rel=1e-9)


def test_active_current_is_duration_weighted():
    points = [
        CalibrationPoint("a", 1e6, 0.01, 10.0, 0.33, active_duration=3.0),
        CalibrationPoint("b", 2e6, 0.02, 20.0, 1.32, active_duration=1.0),
    ]
    assert fit_latency_model(points).active_current == pytest.approx(12.5)
    # Without explicit durations the inference time is the weight.
    assert fit_latency_model(pts([1e6, 2e6], [0.01, 0.03], current=5.0)).active_current == pytest.approx(5.0)


xs_strategy = st.lists(st.floats(min_value=1e3, max_value=1e9), min_size=3, max_size=25)


@settings(max_examples=200)
@given(xs_strategy, st.data())
def test_normal_equations_and_r2_range(xs, data):
    assume(len(set(xs)) >= 2 and np.ptp(xs) > 1e-3 * max(xs))
    ys = data.draw(st.lists(st.floats(min_value=1e-4, max_value=10), min_size=len(xs), max_size=len(xs)))
    cal = fit_latency_model(pts(xs, ys))
    x, y = np.array(xs), np.array(ys)
    r = y - (cal.latency_slope * x + cal.latency_intercept)
    assert abs(r.sum()) <= 1e-9 * np.abs(y).sum()
    assert abs((r * x).sum()) <= 1e-9 * np.abs(x * y).sum()
    assert 0.0 <= cal.r_squared <= 1.0


@settings(max_examples=100)
@given(xs_strategy, st.data())
def test_flops_rescaling_invariance(xs, data):
    assume(len(set(xs)) >= 2 and np.ptp(xs) > 1e-3 * max(xs))
    ys = data.draw(st.lists(st.floats(min_value=1e-4, max_value=10), min_size=len(xs), max_size=len(xs)))
    a = fit_latency_model(pts(xs, ys))
    b = fit_latency_model(pts([x / 1e6 for x in xs], ys))  # MFLOPs
    assert b.latency_slope == pytest.approx(a.latency_slope * 1e6, rel=1e-7, abs=1e-15)
    for x in xs:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NegativeLatencyWarning)
            assert predict_latency(b, x / 1e6) == pytest.approx(predict_latency(a, x), rel=1e-7, abs=1e-12)


def test_r2_one_iff_zero_residuals():
    cal = fit_latency_model(pts([1, 2, 3], [1.0, 2.0, 3.5]))
    assert cal.r_squared < 1.0


def test_predict_latency():
    cal = Calibration(2e-9, 0.001, 0.99, 10.0, 5)
    assert predict_latency(cal, 1e6) == pytest.approx(0.003, rel=1e-12)
    with pytest.raises(ValueError):
        predict_latency(cal, 0)
    with pytest.raises(UncalibratedError):
        predict_latency(None, 1e6)


def test_negative_prediction_clamped_with_warning():
    cal = Calibration(1e-9, -0.01, 0.99, 10.0, 5)
    with pytest.warns(NegativeLatencyWarning):
        assert predict_latency(cal, 1e6) == 0.0


def test_prediction_monotone_in_flops():
    cal = Calibration(2e-9, 0.001, 0.99, 10.0, 5)
    values = [predict_latency(cal, f) for f in np.geomspace(1, 1e10, 50)]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_leave_one_out_within_residual_band():
    suite = generate_calibration_suite(2e-9, 0.001, [1e5, 5e5, 1e6, 2e6, 3e6, 5e6, 8e6, 1e7], rel_noise=0.02, seed=8)
    points = []
    for trace, truth in suite:
        pm = compute_phase_metrics(trace, 10, 3.3)
        points.append(CalibrationPoint(truth.model_id, truth.flops, pm.inference_time, pm.active_current, pm.inference_energy))
    full = fit_latency_model(points)
    res = [p.inference_time - predict_latency(full, p.flops) for p in points]
    band = 4 * math.sqrt(sum(r * r for r in res) / (len(res) - 2))
    for i, held in enumerate(points):
        cal = fit_latency_model(points[:i] + points[i + 1 :])
        assert abs(predict_latency(cal, held.flops) - held.inference_time) <= band


def test_predict_inference_energy():
    profile = ProcessorProfile("p", 0.3, 3.3, 1, 1)
    cal = Calibration(2e-9, 0.001, 0.99, 10.0, 5)  # predicts 0.003 s at 1e6 FLOPs
    assert predict_inference_energy(cal, profile, 1e6) == pytest.approx(0.099, rel=1e-12)
    zero_intercept = Calibration(2e-9, 0.0, 0.99, 10.0, 5)
    e1 = predict_inference_energy(zero_intercept, profile, 1e6)
    assert predict_inference_energy(zero_intercept, profile, 2e6) == pytest.approx(2 * e1, rel=1e-12)
    with pytest.warns(NegativeLatencyWarning):
        assert predict_inference_energy(Calibration(1e-9, -1.0, 0.9, 10.0, 2), profile, 1e6) == 0.0
    with pytest.raises(UncalibratedError):
        predict_inference_energy(None, profile, 1e6)


# cv of [10, 10.1, 9.9, 10.05, 9.95] from the statistics module (n-1 stdev / mean).
WORKED_CV = statistics.stdev([10, 10.1, 9.9, 10.05, 9.95]) / statistics.mean([10, 10.1, 9.9, 10.05, 9.95])


def test_reliability_worked_example():
    r = reliability_of([10, 10.1, 9.9, 10.05, 9.95], Metric.INFERENCE_ENERGY)
    assert r.mean == pytest.approx(10.0, rel=1e-12)
    assert r.cv == pytest.approx(WORKED_CV, abs=1e-12)
    assert r.cv == pytest.approx(0.0079056941504209, abs=1e-12)
    assert r.n_runs == 5 and r.passed


def test_reliability_identical_runs():
    r = reliability_of([0.1] * 5, "inference_time")
    assert r.cv == 0.0 and r.sample_stddev == 0.0 and r.passed


def test_reliability_gross_violation():
    r = reliability_of([1, 100], Metric.ACTIVE_CURRENT, threshold=0.05)
    assert not r.passed


def test_reliability_zero_mean():
    r = reliability_of([-1.0, 1.0], Metric.ACTIVE_CURRENT)
    assert r.cv is None and not r.passed
    assert reliability_of([0.0, 0.0], Metric.ACTIVE_CURRENT).passed


def test_reliability_needs_two_runs():
    with pytest.raises(ValueError):
        reliability_of([1.0], Metric.ACTIVE_CURRENT)


@given(
    st.lists(st.floats(min_value=0.1, max_value=100), min_size=2, max_size=10),
    st.floats(min_value=1e-3, max_value=1e3),
)
def test_cv_scale_invariant(values, c):
    a = reliability_of(values, Metric.INFERENCE_ENERGY)
    b = reliability_of([v * c for v in values], Metric.INFERENCE_ENERGY)
    assert b.cv == pytest.approx(a.cv, rel=1e-9, abs=1e-12)


def test_reliability_over_phase_metrics():
    from conftest import make_scenario
    from edgebench import generate_trace

    runs = [compute_phase_metrics(generate_trace(make_scenario(seed=s))[0], 10, 3.3) for s in range(5)]
    for metric in Metric:
        r = reliability(runs, metric)
        assert r.cv == 0.0 and r.passed
