import csv

import numpy as np
import pytest

from nsseries import (SpectralField, SpectralTrajectory, TimeGrid, build_v0,
                      energy, gaussian_initial_data, momentum_residual,
                      pressure_symbol, recurse_terms, reconstruct_physical,
                      sum_series)
from nsseries.assemble import mode_sum
from nsseries.convolve import convolve_contract_trajectory
from nsseries.heatprod import apply_leray


@pytest.fixture(scope="module")
def solution(grid9, u0_small):
    tg = TimeGrid.uniform(0.5, 8)
    v0 = build_v0(u0_small, 1.0, tg)
    exp = recurse_terms(v0, 3, 1.0)
    return sum_series(exp)


class TestPressureSymbol:
    def test_parallel_to_xi(self, solution):
        q = pressure_symbol(solution)
        g = q.grid
        # cross product with xi vanishes mode by mode
        cross = np.cross(np.broadcast_to(g.xi, q.values.shape), q.values)
        scale = max(float(np.max(np.abs(q.values))), 1e-300)
        assert np.max(np.abs(cross)) < 1e-12 * scale

    def test_zero_mode_zero(self, solution):
        q = pressure_symbol(solution)
        assert np.all(q.values[:, q.grid.zero_index] == 0.0)

    def test_complements_leray_part(self, solution):
        # 2 pi i (v*v) xi splits exactly into its projection plus q
        g = solution.grid
        conv = convolve_contract_trajectory(g, solution.values,
                                            solution.values)
        total = 2j * np.pi * conv
        proj = 2j * np.pi * apply_leray(g, conv.copy())
        q = pressure_symbol(solution).values
        gap = total - proj - q
        gap[:, g.zero_index] = 0.0  # zero mode handled by convention
        assert np.max(np.abs(gap)) < 1e-12 * np.max(np.abs(total))


class TestMomentumResidual:
    def test_needs_three_times(self, grid9, u0_small):
        tg = TimeGrid.uniform(0.1, 1)
        v0 = build_v0(u0_small, 1.0, tg)
        with pytest.raises(ValueError):
            momentum_residual(v0, 1.0)

    def test_decreases_under_refinement(self, grid5):
        # needs kappa_max * dt <~ 1 before the centered difference is in
        # its quadratic regime, hence the small lattice and fine time grid
        u0 = gaussian_initial_data(grid5, 0.2, 1.0)
        resids = []
        for K, M in ((4, 128), (8, 256)):
            tg = TimeGrid.uniform(0.5, M)
            exp = recurse_terms(build_v0(u0, 1.0, tg), K, 1.0)
            resids.append(momentum_residual(sum_series(exp), 1.0))
        assert resids[1] < resids[0] / 3.0


class TestModeSum:
    def test_single_mode(self, grid9):
        vals = np.zeros(grid9.n_modes, dtype=complex)
        i = grid9.index_of([1, -1, 0])
        vals[i] = 2.0 + 1.0j
        x = np.array([[0.3, 0.1, -0.2]])
        out = mode_sum(grid9, vals, x)
        expected = grid9.cell_measure * vals[i] * np.exp(
            -2j * np.pi * float(x[0] @ grid9.xi[i]))
        assert out[0] == pytest.approx(expected, rel=1e-14)

    def test_origin_sums_everything(self, grid9, rng):
        vals = rng.normal(size=grid9.n_modes) + 0j
        out = mode_sum(grid9, vals, np.zeros((1, 3)))
        assert out[0] == pytest.approx(grid9.cell_measure * vals.sum(),
                                       rel=1e-12)

    def test_vector_values(self, grid9, rng):
        vals = rng.normal(size=(grid9.n_modes, 3)) + 0j
        x = rng.normal(size=(2, 3))
        out = mode_sum(grid9, vals, x)
        assert out.shape == (2, 3)
        for c in range(3):
            comp = mode_sum(grid9, vals[:, c], x)
            assert np.allclose(out[:, c], comp, rtol=1e-13)

    def test_deep_imaginary_excursion_fails_loudly(self, grid9):
        vals = np.ones(grid9.n_modes, dtype=complex)
        z = np.array([[200.0j, 0.0, 0.0]])
        with pytest.raises(OverflowError):
            mode_sum(grid9, vals, z)


class TestReconstruction:
    def test_real_output_for_hermitian_data(self, solution, rng):
        q = pressure_symbol(solution)
        pts = rng.uniform(-1.0, 1.0, size=(5, 3))
        sample = reconstruct_physical(solution, q, pts, 0.25)
        assert sample.u_values.dtype == np.float64
        assert sample.u_values.shape == (5, 3)
        assert sample.p_values.shape == (5,)
        assert sample.time == 0.25

    def test_u_matches_mode_sum(self, solution, rng):
        q = pressure_symbol(solution)
        pts = rng.uniform(-0.5, 0.5, size=(3, 3))
        sample = reconstruct_physical(solution, q, pts, 0.5)
        direct = mode_sum(solution.grid, solution.values[-1], pts)
        assert np.allclose(sample.u_values, direct.real, atol=1e-14)

    def test_off_node_time_rejected(self, solution):
        q = pressure_symbol(solution)
        with pytest.raises(ValueError):
            reconstruct_physical(solution, q, np.zeros((1, 3)), 0.271)

    def test_non_hermitian_data_detected(self, grid9):
        tg = TimeGrid.uniform(0.2, 2)
        vals = np.zeros((3, grid9.n_modes, 3), dtype=complex)
        vals[:, grid9.index_of([1, 0, 0]), 1] = 1.0j  # no conjugate partner
        v = SpectralTrajectory(grid9, tg, vals)
        q = SpectralTrajectory(grid9, tg, np.zeros_like(vals))
        with pytest.raises(ValueError, match="imaginary"):
            reconstruct_physical(v, q, np.array([[0.3, 0.0, 0.0]]), 0.1)

    def test_csv_roundtrip(self, solution, rng, tmp_path):
        q = pressure_symbol(solution)
        pts = rng.uniform(-1.0, 1.0, size=(4, 3))
        sample = reconstruct_physical(solution, q, pts, 0.25)
        path = tmp_path / "sample.csv"
        sample.to_csv(path)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["x1", "x2", "x3", "t", "u1", "u2", "u3", "p"]
        assert len(rows) == 5
        # repr round-trips exactly through float()
        assert float(rows[1][7]) == sample.p_values[0]


class TestEnergy:
    def test_shape_and_times(self, solution):
        E = energy(solution)
        assert E.shape == (9, 2)
        assert np.array_equal(E[:, 0], solution.time_grid.times)

    def test_single_mode_value(self, grid9):
        tg = TimeGrid.uniform(0.1, 1)
        vals = np.zeros((2, grid9.n_modes, 3), dtype=complex)
        vals[:, 4, 0] = 3.0j
        traj = SpectralTrajectory(grid9, tg, vals)
        E = energy(traj)
        assert np.allclose(E[:, 1], 9.0 * grid9.cell_measure)

    def test_nonincreasing_for_heat_flow(self, grid9, u0_small, tgrid8):
        v0 = build_v0(u0_small, 1.0, tgrid8)
        E = energy(v0)[:, 1]
        assert np.all(np.diff(E) <= 0.0)
