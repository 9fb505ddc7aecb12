"""Build a small-data solution as a Catalan-indexed series.

Walks through the core pipeline: set up a truncated frequency lattice,
project Gaussian initial data to a divergence-free field, march the
heat-product recursion, pick a truncation order from the tail rule, and
sanity-check the result (fixed-point residual, energy decay, physical
reconstruction at a few points).

Run from the repository root:

    python3 demos/01_series_solution.py
"""

import numpy as np

from nsseries import (TimeGrid, build_grid, build_v0, energy,
                      fixed_point_residual, gaussian_initial_data,
                      pressure_symbol, reconstruct_physical, recurse_terms,
                      smallness_ratio, sum_series, trajectory_norm_1p2_sup,
                      truncation_order)

# --- lattice and data ------------------------------------------------------
# 9^3 modes: xi = 0.5 * n for integer n in [-4, 4]^3
grid = build_grid(d=3, h=0.5, R=2.0)
u0 = gaussian_initial_data(grid, amplitude=0.1, width=1.0,
                           recipe={"kind": "constant",
                                   "direction": [1.0, 0.0, 0.0]})
nu = 1.0
rho = smallness_ratio(u0, nu)
print(f"lattice: {grid.n_modes} modes, h={grid.h}, R={grid.radius}")
print(f"smallness ratio rho = {rho:.4f}  (series converges for small rho)")

# --- series recursion ------------------------------------------------------
tg = TimeGrid.uniform(t_max=0.5, M=16)
v0 = build_v0(u0, nu, tg)          # heat flow of the initial data
exp = recurse_terms(v0, K=8, nu=nu)  # v_k = sum_{j<k} v_j (.) v_{k-1-j}
print("\nterm norms ||v_k|| and ratios ||v_{k+1}||/||v_k||:")
for k, nk in enumerate(exp.term_norms):
    ratio = f"  ratio {exp.ratios()[k]:.3e}" if k < exp.K else ""
    print(f"  k={k}: {nk:.3e}{ratio}")

K = truncation_order(exp, rho, tail_tol=1e-8)
v = sum_series(exp, K)
print(f"\ntail rule selects K = {K} terms")

# --- consistency checks ----------------------------------------------------
resid = fixed_point_residual(v, v0, nu)
scale = trajectory_norm_1p2_sup(v0)
print(f"fixed-point residual: {resid:.3e}  ({resid / scale:.3e} of ||v0||)")

E = energy(v)
print(f"energy: E(0) = {E[0, 1]:.4e}, E(t_max) = {E[-1, 1]:.4e} "
      f"(non-increasing: {bool(np.all(np.diff(E[:, 1]) <= 1e-12))})")

# --- physical-space samples ------------------------------------------------
q = pressure_symbol(v)
pts = np.array([[0.0, 0.0, 0.0], [0.25, 0.0, 0.0], [0.5, 0.5, 0.5]])
sample = reconstruct_physical(v, q, pts, t=0.5)
print("\nvelocity and pressure at t = 0.5:")
for p, u, pr in zip(sample.points, sample.u_values, sample.p_values):
    print(f"  x={p}  u={np.array2string(u, formatter={'float': '{:.3e}'.format})}"
          f"  p={pr:.3e}")
