"""
FLOPs to latency calibration
============================

Inference time on a given core grows roughly linearly with the model's FLOP
count. Fitting that line once per processor lets us predict the latency and
energy of models that were never measured on it.
"""

import numpy as np

from edgebench import (
    CalibrationPoint,
    ProcessorProfile,
    compute_phase_metrics,
    fit_latency_model,
    generate_calibration_suite,
    predict_inference_energy,
    predict_latency,
    reliability_of,
)

# %%
# Eight synthetic models on a core that needs 2 ns per FLOP plus 1 ms of
# fixed overhead, with 2% multiplicative jitter on every latency.

flops = [1e5, 5e5, 1e6, 2e6, 3e6, 5e6, 8e6, 1e7]
suite = generate_calibration_suite(2e-9, 1e-3, flops, rel_noise=0.02, seed=11, active_current=12.0, idle_current=0.3)

points = []
for trace, truth in suite:
    pm = compute_phase_metrics(trace, 10, voltage=3.3)
    points.append(
        CalibrationPoint(truth.model_id, truth.flops, pm.inference_time, pm.active_current, pm.inference_energy,
                         pm.active_duration, pm.idle_current, pm.idle_duration)
    )

cal = fit_latency_model(points)
print(f"slope {cal.latency_slope:.3e} s/FLOP, intercept {cal.latency_intercept * 1e3:.3f} ms, R^2 {cal.r_squared:.4f}")
print(f"active current {cal.active_current:.3f} mA, measured idle {cal.idle_current:.3f} mA")

# %%
# Predictions for an unseen 4 MFLOP model.

core = ProcessorProfile("synth-core", idle_current=0.3, supply_voltage=3.3, ram_capacity=262144, rom_capacity=1048576)
print(f"predicted latency {predict_latency(cal, 4e6) * 1e3:.3f} ms")
print(f"predicted energy  {predict_inference_energy(cal, core, 4e6):.4f} mJ")

# %%
# Repeating a benchmark several times shows whether a measurement is stable.
# The coefficient of variation (sample standard deviation over the mean) is
# checked against a 5% threshold by default.

runs = np.array([10, 10.1, 9.9, 10.05, 9.95])
r = reliability_of(runs, "inference_energy")
print(f"cv {r.cv:.5f} over {r.n_runs} runs, passed={r.passed}")
