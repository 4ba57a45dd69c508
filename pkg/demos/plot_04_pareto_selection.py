"""
Choosing a processor and model
==============================

Every (processor, model) pair is gated on RAM and ROM, filtered by the
use case's quality target, costed at a given cycle time and placed on an
energy/quality Pareto front.
"""

from edgebench import Calibration, estimate_quantized_rom, evaluate_candidates, feasibility_gate, reference_registry, recommend

registry = reference_registry()

# %%
# The bundled registry lists three cores and five models. Memory capacities,
# FLOP counts and model footprints in it are placeholders. The unquantized
# wake-word network fits none of the cores, while int8 quantization shrinks
# ROM to about a quarter.

fp32 = registry.model("mobilenetv1_vww_fp32")
for p in registry.processors:
    print(p.id, feasibility_gate(fp32, p))
print("quantized ROM estimate:", estimate_quantized_rom(fp32), "bytes")

# %%
# Attach a latency calibration to each core. These numbers are illustrative.

calibrations = {
    "cortex-m0plus": Calibration(4e-8, 5e-3, 0.95, 4.0, 8),
    "cortex-m4": Calibration(1e-8, 2e-3, 0.97, 12.0, 8),
    "cortex-m7": Calibration(2e-9, 1e-3, 0.98, 30.0, 8),
}

# %%
# The full candidate table at a 0.5 s cycle. Excluded pairs carry a reason.

for e in evaluate_candidates(registry, calibrations, 0.5):
    status = "front" if e.on_front else ("ok" if e.feasible else f"out: {e.infeasibility_reason}")
    energy = f"{e.cycle_energy:8.3f} mJ" if e.feasible else " " * 11
    print(f"  {e.processor_id:14s} {e.model_id:22s} {energy}  q={e.quality:.2f}  {status}")

# %%
# Models only compete within a use case, so recommend one pair per use case
# and cycle time. Each use case's quality target comes from the registry.

for T in (0.5, 2.5, 5.0):
    for target in registry.targets:
        best = recommend(registry, calibrations, T, use_case=target.use_case)[0]
        print(f"T={T} s  {target.use_case:21s} -> {best.processor_id} / {best.model_id} ({best.cycle_energy:.3f} mJ)")
