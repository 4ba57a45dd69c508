"""
Energy of one inference cycle: an active inference followed by idle time.

For cycle time ``T``, inference time ``t``, active current ``I_act``, idle
current ``I_idle`` and supply voltage ``V``::

    E(T) = V * (I_act * t + I_idle * (T - t))

so ``E`` is affine in ``T`` with slope ``V * I_idle``. Wake-up transients are
not modeled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ProcessorProfile
from .errors import InfeasibleCycleError

# Relative tolerance under which two energy lines count as parallel.
PARALLEL_RTOL = 1e-12


@dataclass(frozen=True)
class CyclePoint:
    cycle_time: float
    cycle_energy: float
    mean_cycle_current: float
    active_fraction: float


def _idle(profile: ProcessorProfile, idle_current: float | None) -> float:
    return profile.idle_current if idle_current is None else idle_current


def cycle_energy(
    profile: ProcessorProfile,
    inference_time: float,
    active_current: float,
    cycle_time: float,
    idle_current: float | None = None,
) -> CyclePoint:
    """Evaluate the cycle-energy model at one cycle time.

    ``idle_current`` overrides the profile's datasheet idle current, e.g. with
    a value measured from idle spans.

    Raises:
        InfeasibleCycleError: ``cycle_time < inference_time``.
        ValueError: non-positive inference time or negative currents.
    """
    if not (math.isfinite(inference_time) and inference_time > 0):
        raise ValueError(f"inference_time must be > 0, got {inference_time!r}")
    if not (math.isfinite(active_current) and active_current > 0):
        raise ValueError(f"active_current must be > 0, got {active_current!r}")
    if cycle_time < inference_time:
        raise InfeasibleCycleError(
            f"cycle_time {cycle_time:g} s is shorter than inference_time {inference_time:g} s on {profile.id!r}"
        )
    i_idle = _idle(profile, idle_current)
    if not (math.isfinite(i_idle) and i_idle >= 0):
        raise ValueError(f"idle_current must be >= 0, got {i_idle!r}")
    v = profile.supply_voltage
    energy = v * (active_current * inference_time + i_idle * (cycle_time - inference_time))
    return CyclePoint(
        cycle_time=cycle_time,
        cycle_energy=energy,
        mean_cycle_current=energy / (v * cycle_time),
        active_fraction=inference_time / cycle_time,
    )


def sweep_cycle_energy(
    profile: ProcessorProfile,
    inference_time: float,
    active_current: float,
    cycle_times: Sequence[float],
    idle_current: float | None = None,
) -> list[CyclePoint]:
    """:func:`cycle_energy` at each of a strictly increasing list of cycle times."""
    ct = list(cycle_times)
    if any(b <= a for a, b in zip(ct, ct[1:])):
        raise ValueError("cycle_times must be strictly increasing")
    return [cycle_energy(profile, inference_time, active_current, T, idle_current) for T in ct]


def cycle_grid(inference_time: float, cycle_min: float, cycle_max: float, steps: int) -> np.ndarray:
    """``steps`` evenly spaced cycle times from ``max(cycle_min, inference_time)`` to ``cycle_max``.

    Raises:
        InfeasibleCycleError: ``cycle_max < inference_time``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    start = max(cycle_min, inference_time)
    if cycle_max < start:
        raise InfeasibleCycleError(f"cycle_max {cycle_max:g} s is below the first feasible cycle time {start:g} s")
    if steps == 1:
        return np.array([start])
    return np.linspace(start, cycle_max, steps)


def energy_line(profile: ProcessorProfile, inference_time: float, active_current: float, idle_current: float | None = None):
    """(slope, intercept) of ``E(T) = slope * T + intercept``."""
    v = profile.supply_voltage
    i_idle = _idle(profile, idle_current)
    return v * i_idle, v * inference_time * (active_current - i_idle)


def crossover_time(
    profile_a: ProcessorProfile,
    profile_b: ProcessorProfile,
    t_inf_a: float,
    i_act_a: float,
    t_inf_b: float,
    i_act_b: float,
    idle_a: float | None = None,
    idle_b: float | None = None,
) -> float | None:
    """Cycle time at which the two cycle-energy lines intersect.

    Returns None when the lines are parallel (coincident or offset) or when
    the intersection lies below ``max(t_inf_a, t_inf_b)``.
    """
    sa, ca = energy_line(profile_a, t_inf_a, i_act_a, idle_a)
    sb, cb = energy_line(profile_b, t_inf_b, i_act_b, idle_b)
    if abs(sa - sb) <= PARALLEL_RTOL * max(abs(sa), abs(sb)):
        return None
    t_star = (cb - ca) / (sa - sb)
    if not math.isfinite(t_star) or t_star < max(t_inf_a, t_inf_b):
        return None
    return t_star
