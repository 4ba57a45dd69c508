"""
The command-line pipeline
=========================

``edgebench`` chains the steps above on files: synthesize traces, segment
them, calibrate each processor, then sweep cycle energy and build fronts.
This demo drives it in-process through :func:`edgebench.cli.main`; the same
arguments work from a shell.
"""

import json
import tempfile
from pathlib import Path

from edgebench.cli import main

# %%
# Two cores, three models each. The M7 is fast but idles at 1.6 mA, the M4 is
# slow but idles at 0.3 mA.

cores = {"cortex-m7": (2e-9, 1e-3, 30.0, 1.60), "cortex-m4": (5e-8, 0.05, 12.0, 0.30)}
models = {"tiny": (1e6, 0.82), "base": (4e6, 0.88), "large": (1e7, 0.93)}

registry = {
    "schema_version": "1.0",
    "processors": [
        {"id": pid, "idle_current": idle, "supply_voltage": 3.3, "ram_capacity": 262144, "rom_capacity": 1048576}
        for pid, (_, _, _, idle) in cores.items()
    ],
    "models": [
        {"id": mid, "use_case": "keyword_spotting", "params": 50000, "flops": f, "ram_bytes": 20000,
         "rom_bytes": 60000, "quality": q, "quality_kind": "accuracy", "quantized": True}
        for mid, (f, q) in models.items()
    ],
}
scenarios = {
    "scenarios": [
        {"processor_id": pid, "model_id": mid, "true_inference_time": slope * f + icpt,
         "true_active_current": act, "true_idle_current": idle, "inferences_per_window": 3, "n_windows": 2,
         "idle_gap": 0.02, "sample_rate": 5000.0, "noise_sigma": 0.05, "seed": i}
        for pid, (slope, icpt, act, idle) in cores.items()
        for i, (mid, (f, _)) in enumerate(models.items())
    ]
}

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    (tmp / "registry.json").write_text(json.dumps(registry))
    (tmp / "scenarios.json").write_text(json.dumps(scenarios))
    reg = str(tmp / "registry.json")

    # %%
    # Each command returns a documented exit status; 0 is success.
    assert main(["synth", str(tmp / "scenarios.json"), str(tmp / "traces"), "-o", str(tmp / "synth.json")]) == 0
    assert main(["calibrate", str(tmp / "traces"), "--registry", reg, "-o", str(tmp / "cal.json"),
                 "--report", str(tmp / "calibrate.json")]) == 0
    cal = json.loads((tmp / "cal.json").read_text())
    for pid, c in cal["calibrations"].items():
        print(f"{pid}: {c['latency_slope']:.3e} s/FLOP, R^2 {c['r_squared']:.4f}")

    # %%
    # Sweeps also come out as plot-ready CSV series, one file per pair.
    assert main(["sweep", "--registry", reg, "--calibration", str(tmp / "cal.json"), "--csv-dir",
                 str(tmp / "series"), "-o", str(tmp / "sweep.json")]) == 0
    print(sorted(p.name for p in (tmp / "series").iterdir()))

    # %%
    # Fronts at the three standard cycle times; the top pick moves from the
    # fast core to the low-idle core as the cycle grows.
    assert main(["pareto", "--registry", reg, "--calibration", str(tmp / "cal.json"), "-o",
                 str(tmp / "pareto.json")]) == 0
    for front in json.loads((tmp / "pareto.json").read_text())["fronts"]:
        r = front["recommendation"]
        print(f"T={front['cycle_time']} s -> {r['processor_id']} / {r['model_id']} ({r['cycle_energy']:.3f} mJ)")
