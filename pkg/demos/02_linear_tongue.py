"""Synchronization tongue of two dissipative harmonic oscillators.

A coarse sweep (for speed) over detuning and coupling with a common bath,
against the separate-bath control where no normal mode outlives the rest.
Writes the two maps to demo-out/ and prints ASCII pictures.
"""

import os

import numpy as np

from qsync.linear_osc import TongueScenario, tongue_diagram

OUT = "demo-out"
os.makedirs(OUT, exist_ok=True)

omega2 = tuple(np.linspace(0.6, 1.4, 11))
lams = tuple(np.linspace(0.0, 0.3, 7))


def ascii_map(grid, layer, hi, mid):
    values = grid.layers[layer]
    print(f"      omega2: {grid.values1[0]:.2f} ... {grid.values1[-1]:.2f}")
    for j in range(grid.values2.size - 1, -1, -1):
        row = "".join(
            "#" if abs(values[i, j]) > hi else ("+" if abs(values[i, j]) > mid else ".")
            for i in range(grid.values1.size)
        )
        print(f"lam={grid.values2[j]:4.2f} {row}")


for bath in ("common", "separate"):
    scn = TongueScenario(bath=bath, omega2_values=omega2, lambda_values=lams)
    grid = tongue_diagram(scn)
    grid.to_csv(os.path.join(OUT, f"tongue_{bath}.csv"))
    print(f"\n== {bath} bath: Pearson of <x^2> ('#' is |C|>0.9) ==")
    ascii_map(grid, "pearson", 0.9, 0.5)
    if bath == "common":
        print("\n   Gaussian discord at the same time ('#' above half max)")
        dmax = np.nanmax(grid.layers["discord"])
        print(f"   max discord {dmax:.3f}")
        ascii_map(grid, "discord", 0.5 * dmax, 0.25 * dmax)
