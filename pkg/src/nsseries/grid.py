"""Truncated cubic frequency lattice with exact index arithmetic.

The solver works on the lattice xi = h * n, n in {-N, ..., N}^d with
N = floor(R / h).  The lattice is *not* periodic: convolution shifts that
leave the cube are dropped (truncation error rather than aliasing).  Each
mode carries the quadrature weight h^d.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["FrequencyGrid", "build_grid", "OUT_OF_RANGE"]

#: Marker returned by shift_index when xi_i - xi_j falls off the lattice.
OUT_OF_RANGE = -1

#: Default cap on the number of modes a grid may hold (memory guard).
DEFAULT_MAX_MODES = 4_000_000


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    d: int
    h: float
    radius: float
    n_axis: int                      # N: modes run over n in [-N, N]^d
    modes: np.ndarray = field(repr=False)   # (M, d) integer lattice points n
    xi: np.ndarray = field(repr=False)      # (M, d) frequencies h * n
    xi_sq: np.ndarray = field(repr=False)   # (M,) |xi|^2

    @property
    def side(self) -> int:
        return 2 * self.n_axis + 1

    @property
    def n_modes(self) -> int:
        return self.side ** self.d

    @property
    def cell_measure(self) -> float:
        return self.h ** self.d

    @property
    def zero_index(self) -> int:
        # Center of the C-ordered cube.
        return (self.n_modes - 1) // 2

    @property
    def cube_shape(self) -> tuple:
        return (self.side,) * self.d

    @property
    def xi_norm(self) -> np.ndarray:
        return np.sqrt(self.xi_sq)

    # -- index arithmetic ---------------------------------------------------

    def _strides(self) -> np.ndarray:
        return np.array([self.side ** (self.d - 1 - k)
                         for k in range(self.d)], dtype=np.int64)

    def index_of(self, n) -> np.ndarray | int:
        """Flat index of integer lattice point(s) n, C-ordered."""
        n = np.asarray(n, dtype=np.int64)
        flat = (n + self.n_axis) @ self._strides()
        return flat if flat.ndim else int(flat)

    def shift_index(self, i, j):
        """Index of xi_i - xi_j, or OUT_OF_RANGE if it leaves the lattice.

        Accepts scalars or integer arrays (broadcast elementwise).
        """
        ni = self.modes[np.asarray(i)]
        nj = self.modes[np.asarray(j)]
        diff = ni - nj
        inside = np.all(np.abs(diff) <= self.n_axis, axis=-1)
        flat = (diff + self.n_axis) @ self._strides()
        out = np.where(inside, flat, OUT_OF_RANGE)
        return out if out.ndim else int(out)

    @property
    def neg_index(self) -> np.ndarray:
        """Permutation mapping each mode index to the index of -xi."""
        return self.index_of(-self.modes)

    # -- reshaping helpers --------------------------------------------------

    def cube(self, values: np.ndarray) -> np.ndarray:
        """View flat per-mode values (M, ...) as a cube (L,)*d + (...)."""
        return values.reshape(self.cube_shape + values.shape[1:])

    def flat(self, cube_values: np.ndarray) -> np.ndarray:
        return cube_values.reshape((self.n_modes,)
                                   + cube_values.shape[self.d:])


def build_grid(d: int, h: float, R: float,
               max_modes: int = DEFAULT_MAX_MODES) -> FrequencyGrid:
    """Construct the lattice {h*n : |n_i| <= floor(R/h)} with (2N+1)^d modes."""
    if d < 3:
        raise ValueError(f"dimension must be >= 3, got {d}")
    if h <= 0:
        raise ValueError(f"spacing must be positive, got {h}")
    if R < h:
        raise ValueError(f"radius {R} must be at least the spacing {h}")
    n_axis = int(np.floor(R / h + 1e-12))
    side = 2 * n_axis + 1
    n_modes = side ** d
    if n_modes > max_modes:
        raise MemoryError(
            f"grid would hold {n_modes} modes, exceeding budget {max_modes}")
    axes = np.arange(-n_axis, n_axis + 1, dtype=np.int64)
    mesh = np.meshgrid(*([axes] * d), indexing="ij")
    modes = np.stack([m.ravel() for m in mesh], axis=-1)
    xi = h * modes.astype(float)
    xi_sq = np.sum(xi * xi, axis=-1)
    return FrequencyGrid(d=d, h=float(h), radius=float(R), n_axis=n_axis,
                         modes=modes, xi=xi, xi_sq=xi_sq)
