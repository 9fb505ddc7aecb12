"""Independent pseudo-spectral cross-check integrator.

Integrates the stiff frequency-side momentum equation in mild form with a
two-stage exponential Runge-Kutta scheme (second order): the linear heat
part is handled exactly by the integrating factor, the quadratic term by a
predictor/corrector with the standard phi_1 / phi_2 weights.

Deliberately independent of the main path: the quadratic term is evaluated
with scipy.signal.fftconvolve on the mode cube rather than the library's
own convolution kernels, so agreement between this integrator and the
series is a genuine cross-validation.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve

from .fields import SpectralField, SpectralTrajectory, TimeGrid, norm_1p2
from .grid import FrequencyGrid

__all__ = [
    "nonlinear_term",
    "step_integrating_factor",
    "run_oracle",
    "compare_trajectories",
    "BlowUpError",
]


class BlowUpError(RuntimeError):
    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


def _crop(full: np.ndarray, side: int, d: int) -> np.ndarray:
    n = (side - 1) // 2
    return full[tuple(slice(n, 3 * n + 1) for _ in range(d))]


def nonlinear_term(grid: FrequencyGrid, vals: np.ndarray) -> np.ndarray:
    """N(v)(xi) = 2 pi i K(xi) (v*v)(xi) xi for one time slice (M, d)."""
    d = grid.d
    side = grid.side
    cubes = [grid.cube(vals[:, i].astype(complex)) for i in range(d)]
    contracted = np.zeros((grid.n_modes, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            conv = _crop(fftconvolve(cubes[i], cubes[j], mode="full"),
                         side, d)
            contracted[:, i] += grid.xi[:, j] * conv.reshape(grid.n_modes)
    contracted *= grid.cell_measure
    xs = grid.xi_sq.copy()
    xs[grid.zero_index] = 1.0
    dot = np.sum(grid.xi * contracted, axis=-1)
    proj = contracted - grid.xi * (dot / xs)[:, None]
    out = 2j * np.pi * proj
    out[grid.zero_index] = 0.0
    return out


def _phi1(x: np.ndarray) -> np.ndarray:
    """(1 - e^{-x}) / x, stable via expm1; value 1 at x = 0."""
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0.0, 1.0, x)
    out = -np.expm1(-safe) / safe
    return np.where(x == 0.0, 1.0, out)


def _phi2(x: np.ndarray) -> np.ndarray:
    """(e^{-x} - 1 + x) / x^2, series below the cancellation regime."""
    x = np.asarray(x, dtype=float)
    small = x < 0.05
    xs = np.where(small, x, 1.0)
    series = np.zeros_like(xs)
    term = np.ones_like(xs)
    for m in range(9):
        if m > 0:
            term = term * (-xs) / m
        series = series + term / ((m + 1) * (m + 2))
    xl = np.where(small, 1.0, x)
    closed = (np.exp(-xl) - 1.0 + xl) / (xl * xl)
    return np.where(small, series, closed)


def step_integrating_factor(grid: FrequencyGrid, vals: np.ndarray,
                            dt: float, nu: float) -> np.ndarray:
    """One second-order exponential RK step of dv/dt = -kappa v + N(v)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    kappa = (4.0 * np.pi ** 2 * nu * grid.xi_sq)[:, None]
    x = kappa * dt
    decay = np.exp(-x)
    n0 = nonlinear_term(grid, vals)
    predictor = decay * vals + dt * _phi1(x) * n0
    n1 = nonlinear_term(grid, predictor)
    return predictor + dt * _phi2(x) * (n1 - n0)


def run_oracle(u0: SpectralField, nu: float, time_grid: TimeGrid,
               substeps: int = 1,
               blowup_cap: float = 1e6) -> SpectralTrajectory:
    """Integrate from u0_hat over the requested output times, taking
    `substeps` equal substeps inside each output interval."""
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    grid = u0.grid
    t = time_grid.times
    vals = np.empty((t.size, grid.n_modes, grid.d), dtype=complex)
    vals[0] = u0.values
    cap = blowup_cap * max(norm_1p2(u0), 1.0)
    current = u0.values.astype(complex)
    for m in range(t.size - 1):
        dt = (t[m + 1] - t[m]) / substeps
        for _ in range(substeps):
            current = step_integrating_factor(grid, current, dt, nu)
        if not np.all(np.isfinite(current.view(float))) \
                or norm_1p2(SpectralField(grid, current)) > cap:
            raise BlowUpError(
                f"integration blew up before t={t[m + 1]:.4g}", t[m + 1])
        vals[m + 1] = current
    return SpectralTrajectory(grid, time_grid, vals)


def compare_trajectories(a: SpectralTrajectory,
                         b: SpectralTrajectory) -> dict:
    """Per-time and sup L1+L2 gaps between two trajectories."""
    if a.values.shape != b.values.shape or not np.array_equal(
            a.time_grid.times, b.time_grid.times):
        raise ValueError("trajectories are not comparable")
    gaps = []
    for m in range(a.time_grid.n_times):
        diff = SpectralField(a.grid, a.values[m] - b.values[m])
        gaps.append(norm_1p2(diff))
    return {
        "times": a.time_grid.times.tolist(),
        "gaps": gaps,
        "sup_gap": max(gaps),
    }
