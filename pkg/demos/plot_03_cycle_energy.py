"""
Energy per inference cycle
==========================

A sensor node wakes up, runs one inference and idles until the next sample.
Over a cycle of length ``T`` the energy is

    E(T) = V * (I_act * t_inf + I_idle * (T - t_inf))

so a fast core with a high idle current wins at short cycles and a slower
core with a frugal idle state wins at long ones.
"""

import numpy as np

from edgebench import ProcessorProfile, crossover_time, cycle_energy, cycle_grid, sweep_cycle_energy

m4 = ProcessorProfile("cortex-m4", idle_current=0.30, supply_voltage=3.3, ram_capacity=262144, rom_capacity=1048576)
m7 = ProcessorProfile("cortex-m7", idle_current=1.60, supply_voltage=3.3, ram_capacity=1048576, rom_capacity=4194304)

# %%
# 10 mA for 100 ms, then idle at 0.30 mA for the rest of a 1 s cycle.

print(f"{cycle_energy(m4, 0.1, 10.0, 1.0).cycle_energy:.3f} mJ")

# %%
# Sweep both cores from their inference time up to 5 s. The M7 here needs
# 20 ms at 30 mA, the M4 150 ms at 12 mA.

fast, slow = (0.02, 30.0), (0.15, 12.0)
grid = cycle_grid(max(fast[0], slow[0]), 0.0, 5.0, 11)
e7 = [p.cycle_energy for p in sweep_cycle_energy(m7, *fast, grid.tolist())]
e4 = [p.cycle_energy for p in sweep_cycle_energy(m4, *slow, grid.tolist())]
for T, a, b in zip(grid, e7, e4):
    print(f"T={T:5.2f} s  M7 {a:7.3f} mJ  M4 {b:7.3f} mJ  -> {'M7' if a < b else 'M4'}")

# %%
# The crossover follows directly from the two lines.

t_star = crossover_time(m7, m4, *fast, *slow)
print(f"crossover at {t_star:.3f} s")
assert np.isclose(cycle_energy(m7, *fast, t_star).cycle_energy, cycle_energy(m4, *slow, t_star).cycle_energy)
