"""Cross-validate the series against an independent time integrator.

The series construction and the exponential Runge-Kutta integrator share
no numerics beyond the grid and field containers, so their agreement is a
strong end-to-end check.  The gap is dominated by the series' piecewise-
linear quadrature of the memory integral and shrinks at second order as
the time step is halved.

Run from the repository root:

    python3 demos/02_oracle_crosscheck.py
"""

import numpy as np

from nsseries import (TimeGrid, build_grid, build_v0, compare_trajectories,
                      gaussian_initial_data, recurse_terms, run_oracle,
                      smallness_ratio, sum_series)

grid = build_grid(d=3, h=0.5, R=1.0)
u0 = gaussian_initial_data(grid, amplitude=0.1, width=1.0)
nu = 1.0
u0_l2 = float(np.sqrt(grid.cell_measure * np.sum(np.abs(u0.values) ** 2)))
print(f"rho = {smallness_ratio(u0, nu):.4f}, ||u0||_2 = {u0_l2:.4f}\n")

print(" M    sup-time gap    relative        order")
prev = None
for M in (16, 32, 64, 128):
    tg = TimeGrid.uniform(t_max=0.25, M=M)
    series = sum_series(recurse_terms(build_v0(u0, nu, tg), K=8, nu=nu))
    oracle = run_oracle(u0, nu, tg, substeps=4)
    gap = compare_trajectories(series, oracle)["sup_gap"]
    order = f"{np.log2(prev / gap):5.2f}" if prev else "    -"
    print(f"{M:3d}    {gap:.4e}     {gap / u0_l2:.4e}    {order}")
    prev = gap
print("\nthe gap halves twice per time-step halving: both discretizations"
      "\nare second order, and they bracket the same continuum solution")
