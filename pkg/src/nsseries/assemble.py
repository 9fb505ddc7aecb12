"""Pressure symbol, momentum residual, physical reconstruction, energy.

This is the layer that checks the series output against the frequency-side
momentum equation

    dv/dt = -4 pi^2 nu |xi|^2 v + 2 pi i (v*v)(xi,t) xi - q(xi,t),

with the pressure numerator q(xi,t) = 2 pi i (xi xi^T / |xi|^2)(v*v)(xi,t) xi,
and reconstructs (u, p) by the inverse quadrature

    u(x,t) = sum h^d v(xi,t) e^{-2 pi i x.xi},
    p(x,t) = -(1/(2 pi i)) sum h^d (xi^T q / |xi|^2) e^{-2 pi i x.xi}.

Note the e^{-2 pi i x.xi} sign in the inverse direction is the convention
used consistently throughout (it matches the forward transform the fields
were built with); it is documented rather than normalized away.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .convolve import convolve_contract_trajectory
from .fields import SpectralField, SpectralTrajectory, norm_1p2
from .grid import FrequencyGrid

__all__ = [
    "PhysicalSample",
    "pressure_symbol",
    "momentum_residual",
    "reconstruct_physical",
    "energy",
    "mode_sum",
]


@dataclass(eq=False)
class PhysicalSample:
    points: np.ndarray    # (P, d) real positions
    u_values: np.ndarray  # (P, d) real velocities
    p_values: np.ndarray  # (P,) real pressures
    time: float

    def to_csv(self, path) -> None:
        d = self.points.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"x{i + 1}" for i in range(d)] + ["t"]
                       + [f"u{i + 1}" for i in range(d)] + ["p"])
            for p, u, pr in zip(self.points, self.u_values, self.p_values):
                w.writerow([repr(float(c)) for c in p]
                           + [repr(float(self.time))]
                           + [repr(float(c)) for c in u]
                           + [repr(float(pr))])


def _contracted(v: SpectralTrajectory, method: str) -> np.ndarray:
    return convolve_contract_trajectory(v.grid, v.values, v.values, method)


def pressure_symbol(v: SpectralTrajectory,
                    method: str = "fft") -> SpectralTrajectory:
    """q(xi,t) = 2 pi i (xi xi^T / |xi|^2) (v*v)(xi,t) xi; parallel to xi
    at every mode, zero at the zero mode."""
    grid = v.grid
    conv = _contracted(v, method)
    xs = grid.xi_sq.copy()
    xs[grid.zero_index] = 1.0
    dot = np.sum(grid.xi * conv, axis=-1)
    parallel = grid.xi * (dot / xs)[..., None]
    q = 2j * np.pi * parallel
    q[:, grid.zero_index, :] = 0.0
    return SpectralTrajectory(grid, v.time_grid, q)


def momentum_residual(v: SpectralTrajectory, nu: float,
                      method: str = "fft") -> float:
    """sup over interior times of the L1+L2 norm of

        D_t v + 4 pi^2 nu |xi|^2 v - 2 pi i (v*v) xi + q,

    with D_t the centered difference (endpoints excluded)."""
    t = v.time_grid.times
    if t.size < 3:
        raise ValueError("need at least 3 time points for centered D_t")
    grid = v.grid
    conv = _contracted(v, method)
    q = pressure_symbol(v, method).values
    kappa = (4.0 * np.pi ** 2 * nu * grid.xi_sq)[None, :, None]
    worst = 0.0
    for m in range(1, t.size - 1):
        dt_v = (v.values[m + 1] - v.values[m - 1]) / (t[m + 1] - t[m - 1])
        resid = dt_v + kappa[0] * v.values[m] \
            - 2j * np.pi * conv[m] + q[m]
        worst = max(worst, norm_1p2(SpectralField(grid, resid)))
    return worst


def mode_sum(grid: FrequencyGrid, vals: np.ndarray,
             zpoints: np.ndarray) -> np.ndarray:
    """Quadrature sum h^d sum_xi vals(xi) e^{-2 pi i z.xi} at (complex)
    points (P, d).  The exponent is evaluated fused (one complex exp per
    term), and its real part is range-checked before exponentiation so an
    overly deep excursion into imaginary space fails loudly instead of
    overflowing."""
    # normalize to complex dtype up front so real and complex callers go
    # through the identical arithmetic (bit-for-bit restriction)
    zpoints = np.atleast_2d(np.asarray(zpoints, dtype=complex))
    # exponent: -2 pi i z.xi = -2 pi i x.xi + 2 pi y.xi for z = x + i y
    expo = -2j * np.pi * (zpoints @ grid.xi.T.astype(complex))
    max_real = float(np.max(expo.real)) if expo.size else 0.0
    if max_real > 690.0:
        raise OverflowError(
            "summand exponent exceeds float range; reduce |Im z| or "
            "evaluate at larger time")
    phase = np.exp(expo)  # (P, M)
    return grid.cell_measure * (phase @ vals)


def reconstruct_physical(v: SpectralTrajectory, q: SpectralTrajectory,
                         points, t: float,
                         tol_real: float = 1e-10) -> PhysicalSample:
    """Evaluate (u, p) at the requested spatial points and time (t must be
    a node of the trajectory's time grid)."""
    grid = v.grid
    times = v.time_grid.times
    m = int(np.argmin(np.abs(times - t)))
    if abs(times[m] - t) > 1e-12 * max(1.0, abs(t)):
        raise ValueError(f"t={t} is not a node of the time grid")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    u_c = mode_sum(grid, v.values[m], points)
    xs = grid.xi_sq.copy()
    xs[grid.zero_index] = 1.0
    p_symbol = np.sum(grid.xi * q.values[m], axis=-1) / xs
    p_symbol[grid.zero_index] = 0.0
    p_c = -mode_sum(grid, p_symbol, points) / (2j * np.pi)
    scale_u = max(float(np.max(np.abs(u_c))), np.finfo(float).tiny)
    scale_p = max(float(np.max(np.abs(p_c))), np.finfo(float).tiny)
    if np.max(np.abs(u_c.imag)) > tol_real * scale_u \
            or np.max(np.abs(p_c.imag)) > tol_real * scale_p:
        raise ValueError("reconstruction has non-negligible imaginary part; "
                         "initial data is not Hermitian-symmetric")
    return PhysicalSample(points=points, u_values=u_c.real,
                          p_values=p_c.real, time=float(times[m]))


def energy(v: SpectralTrajectory) -> np.ndarray:
    """E(t_m) = sum h^d |v(xi, t_m)|^2, returned as an (T, 2) array of
    (t, E) rows."""
    hm = v.grid.cell_measure
    E = hm * np.sum(np.abs(v.values) ** 2, axis=(1, 2))
    return np.column_stack([v.time_grid.times, E])
