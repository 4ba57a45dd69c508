from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from edgebench import (
    InfeasibleCycleError,
    ProcessorProfile,
    compute_phase_metrics,
    crossover_time,
    cycle_energy,
    cycle_grid,
    generate_trace,
    integrate_energy,
    sweep_cycle_energy,
)

from conftest import make_scenario


def closed_form(v, i_act, t_inf, i_idle, t_cycle):
    """Exact rational evaluation of the cycle-energy formula."""
    v, i_act, t_inf, i_idle, t_cycle = map(Fraction, map(str, (v, i_act, t_inf, i_idle, t_cycle)))
    return float(v * (i_act * t_inf + i_idle * (t_cycle - t_inf)))


def test_reference_point(m4):
    point = cycle_energy(m4, inference_time=0.1, active_current=10.0, cycle_time=1.0)
    assert closed_form(3.3, 10.0, 0.1, 0.30, 1.0) == 4.191
    assert point.cycle_energy == pytest.approx(4.191, rel=1e-9)
    assert point.active_fraction == pytest.approx(0.1)
    assert point.mean_cycle_current == pytest.approx(4.191 / 3.3, rel=1e-12)


def test_zero_idle_span(m4):
    p = cycle_energy(m4, 0.25, 7.0, 0.25)
    assert p.cycle_energy == 3.3 * 7.0 * 0.25
    assert p.active_fraction == 1.0


def test_constant_current(m4):
    p = cycle_energy(m4, 0.2, 0.30, 3.0)
    assert p.cycle_energy == pytest.approx(3.3 * 0.30 * 3.0, rel=1e-12)


def test_infeasible_cycle_is_error(m4):
    with pytest.raises(InfeasibleCycleError):
        cycle_energy(m4, 0.5, 10.0, 0.4)


def test_measured_idle_override(m4):
    p = cycle_energy(m4, 0.1, 10.0, 1.0, idle_current=1.0)
    assert p.cycle_energy == pytest.approx(3.3 * (1.0 + 0.9), rel=1e-12)


def test_sweep_standard_cycle_times(m4):
    pts = sweep_cycle_energy(m4, 0.1, 10.0, [0.5, 2.5, 5.0])
    assert [p.cycle_time for p in pts] == [0.5, 2.5, 5.0]
    assert pts[0].cycle_energy < pts[1].cycle_energy < pts[2].cycle_energy


def test_single_element_sweep_equals_pointwise(m4):
    assert sweep_cycle_energy(m4, 0.1, 10.0, [2.0]) == [cycle_energy(m4, 0.1, 10.0, 2.0)]


def test_sweep_requires_increasing(m4):
    with pytest.raises(ValueError):
        sweep_cycle_energy(m4, 0.1, 10.0, [1.0, 1.0])
    with pytest.raises(InfeasibleCycleError):
        sweep_cycle_energy(m4, 0.1, 10.0, [0.05, 1.0])


profiles = st.builds(
    lambda idle, v: ProcessorProfile("p", idle, v, 1, 1),
    st.floats(min_value=0.01, max_value=10),
    st.floats(min_value=1.0, max_value=5.0),
)


@given(
    profiles,
    st.floats(min_value=1e-4, max_value=0.5),
    st.floats(min_value=0.1, max_value=100),
    st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=3, max_size=20, unique=True),
)
def test_affine_sweep_properties(profile, t_inf, i_act, offsets):
    times = sorted(t_inf + o for o in offsets)
    if any(b - a < 1e-6 for a, b in zip(times, times[1:])):
        return
    pts = sweep_cycle_energy(profile, t_inf, i_act, times)
    slope = profile.supply_voltage * profile.idle_current
    e = np.array([p.cycle_energy for p in pts])
    T = np.array(times)
    fd = np.diff(e) / np.diff(T)
    scale = max(1.0, e.max() / max(np.diff(T).min(), 1e-12))
    np.testing.assert_allclose(fd, slope, rtol=1e-9, atol=1e-12 * scale)
    assert np.all(np.diff(e) > 0)
    lo, hi = min(profile.idle_current, i_act), max(profile.idle_current, i_act)
    for p in pts:
        assert lo * (1 - 1e-12) <= p.mean_cycle_current <= hi * (1 + 1e-12)
        assert 0 < p.active_fraction <= 1


def test_three_points_collinear(m7):
    a, b, c = sweep_cycle_energy(m7, 0.02, 25.0, [0.5, 2.5, 5.0])
    lhs = (b.cycle_energy - a.cycle_energy) * (c.cycle_time - a.cycle_time)
    rhs = (c.cycle_energy - a.cycle_energy) * (b.cycle_time - a.cycle_time)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_idle_limit(m4):
    p = cycle_energy(m4, 0.1, 10.0, 1e7)
    assert p.mean_cycle_current == pytest.approx(0.30, rel=1e-6)


def test_crossover_identical_parameters(m4):
    assert crossover_time(m4, m4, 0.1, 10.0, 0.1, 10.0) is None


def test_crossover_parallel_offset(m4):
    other = ProcessorProfile("other", 0.30, 3.3, 1, 1)
    assert crossover_time(m4, other, 0.1, 10.0, 0.2, 10.0) is None


def test_crossover_constructed_backwards(m4, m7):
    # Fix M7 and solve for the M4 active current that equalises energies at T = 1 s:
    # 3.3*(I*t4 + 0.3*(1 - t4)) = E7(1)  =>  I = (E7/3.3 - 0.3*(1 - t4)) / t4
    t7, i7, t4 = 0.02, 30.0, 0.1
    e7 = closed_form(3.3, i7, t7, 1.60, 1.0)
    i4 = (e7 / 3.3 - 0.30 * (1 - t4)) / t4
    t_star = crossover_time(m7, m4, t7, i7, t4, i4)
    assert t_star == pytest.approx(1.0, abs=1e-9)


def test_crossover_below_feasible_range_is_absent(m4, m7):
    # M4 cheaper everywhere: intersection lies below the inference times.
    assert crossover_time(m7, m4, 0.05, 30.0, 0.05, 5.0) is None


def test_m7_vs_m4_flip_matches_sweep(m4, m7):
    t7, i7, t4, i4 = 0.02, 30.0, 0.08, 12.0
    grid = np.linspace(0.08, 5.0, 4921)
    e7 = np.array([p.cycle_energy for p in sweep_cycle_energy(m7, t7, i7, grid.tolist())])
    e4 = np.array([p.cycle_energy for p in sweep_cycle_energy(m4, t4, i4, grid.tolist())])
    assert e7[0] < e4[0] and e4[-1] < e7[-1]
    sign_change = np.flatnonzero(np.diff(np.sign(e7 - e4)) != 0)
    assert len(sign_change) == 1
    t_star = crossover_time(m7, m4, t7, i7, t4, i4)
    k = sign_change[0]
    assert grid[k] <= t_star <= grid[k + 1]


def test_cycle_grid():
    g = cycle_grid(0.01, 0.0, 5.0, 11)
    assert len(g) == 11 and g[0] == 0.01 and g[-1] == 5.0
    assert cycle_grid(0.01, 0.0, 5.0, 1).tolist() == [0.01]
    with pytest.raises(InfeasibleCycleError):
        cycle_grid(6.0, 0.0, 5.0, 11)


def test_consistent_with_integrated_synth_cycle():
    # One inference per window; the span from one window start to the next is one cycle.
    sc = make_scenario(inferences_per_window=1, true_inference_time=0.05, idle_gap=0.45, n_windows=3)
    trace, truth = generate_trace(sc)
    pm = compute_phase_metrics(trace, 1, 3.3)
    profile = ProcessorProfile("p", sc.true_idle_current, 3.3, 1, 1)
    T = truth.windows[1][0] - truth.windows[0][0]
    model = cycle_energy(profile, pm.inference_time, pm.active_current, T, idle_current=pm.idle_current)
    a = pm.windows[0].start_index
    b = pm.windows[1].start_index
    measured = integrate_energy(trace.timestamps[a : b + 1], trace.currents[a : b + 1], 3.3)
    # Two edge intervals mix the plateaus; their trapezoids differ from the step model by
    # V * (I_act - I_idle) * dt in total.
    bound = 3.3 * (sc.true_active_current - sc.true_idle_current) * truth.sample_period
    assert abs(model.cycle_energy - measured) <= bound * (1 + 1e-9)
