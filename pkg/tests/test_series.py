import numpy as np
import pytest

from nsseries import (DivergencePredicted, SpectralField, TimeGrid,
                      build_v0, catalan_envelope_rhs, divergence_error,
                      envelope_profile, fixed_point_residual,
                      gaussian_initial_data, norm_1p2, recurse_terms,
                      smallness_ratio, sum_series, truncation_order)
from nsseries.fields import envelope_weight
from nsseries.series import SeriesExpansion


@pytest.fixture(scope="module")
def expansion(grid9, u0_small):
    tg = TimeGrid.uniform(0.5, 8)
    v0 = build_v0(u0_small, 1.0, tg)
    return v0, recurse_terms(v0, 4, 1.0)


class TestBuildV0:
    def test_initial_slice_is_u0(self, grid9, u0_small, tgrid8):
        v0 = build_v0(u0_small, 1.0, tgrid8)
        assert np.array_equal(v0.values[0], u0_small.values)

    def test_per_mode_decay_exact(self, grid9, u0_small, tgrid8):
        v0 = build_v0(u0_small, 0.7, tgrid8)
        m, i = 3, grid9.index_of([1, -1, 0])
        lam = 4.0 * np.pi ** 2 * 0.7
        factor = np.exp(-lam * tgrid8.times[m] * grid9.xi_sq[i])
        assert np.allclose(v0.values[m, i], factor * u0_small.values[i],
                           rtol=1e-14)


class TestRecursion:
    def test_higher_terms_vanish_at_t0(self, expansion):
        _, exp = expansion
        for k in range(1, exp.K + 1):
            assert np.all(exp.terms[k].values[0] == 0.0)

    def test_terms_divergence_free(self, expansion):
        _, exp = expansion
        for k in range(1, exp.K + 1):
            for m in range(1, exp.terms[k].time_grid.n_times):
                assert divergence_error(exp.terms[k].slice_at(m)) < 1e-12

    def test_term_norms_decrease_for_small_data(self, expansion):
        _, exp = expansion
        norms = exp.term_norms
        assert all(b < a for a, b in zip(norms, norms[1:]))

    def test_ratios_shape(self, expansion):
        _, exp = expansion
        assert len(exp.ratios()) == exp.K

    def test_memory_budget_names_term(self, expansion):
        v0, _ = expansion
        with pytest.raises(MemoryError, match="v_1"):
            recurse_terms(v0, 2, 1.0, max_bytes=2 * v0.nbytes() - 1)

    def test_negative_K_rejected(self, expansion):
        v0, _ = expansion
        with pytest.raises(ValueError):
            recurse_terms(v0, -1, 1.0)

    def test_first_term_is_v0_product(self, expansion):
        from nsseries import odot_product
        v0, exp = expansion
        direct = odot_product(v0, v0, 1.0)
        assert np.allclose(exp.terms[1].values, direct.values, atol=1e-15)


class TestEnvelopeProfile:
    def test_k0_is_weighted_magnitude(self, grid9, u0_small):
        prof = envelope_profile(u0_small, 0, m=1, n=1)
        expected = envelope_weight(grid9, 3.0) * u0_small.magnitude()
        assert np.allclose(prof.values, expected, rtol=1e-13)

    def test_nonnegative(self, grid9, u0_small):
        for k in (1, 2):
            prof = envelope_profile(u0_small, k)
            assert np.all(prof.values >= 0.0)

    def test_monotone_in_weight_budget(self, grid9, u0_small):
        # larger weight budgets can only enlarge the pointwise max
        a = envelope_profile(u0_small, 1, m=0, n=0)
        b = envelope_profile(u0_small, 1, m=2, n=0)
        assert np.all(b.values >= a.values - 1e-15)

    def test_validation(self, u0_small):
        with pytest.raises(ValueError):
            envelope_profile(u0_small, -1)


class TestCatalanEnvelope:
    def test_scale_and_exponent(self, grid9, u0_small):
        nu = 1.0
        lam = 4.0 * np.pi ** 2 * nu
        prof = envelope_profile(u0_small, 2)
        env = catalan_envelope_rhs(2, 0, 0, nu, grid9, prof)
        assert env.lambda_exp == pytest.approx(lam / 4.0)
        expected_scale = 2.0 / (2.0 * np.pi * nu) ** 2  # c_2 = 2
        assert np.allclose(env.profile.values,
                           expected_scale * prof.values.real, rtol=1e-13)

    def test_dominates_low_orders(self, grid9, u0_small):
        # the k = 0 and k = 1 printed bounds hold pointwise for small data,
        # on a time grid fine enough that the stiffest mode's first-interval
        # quadrature overshoot (factor e^{lam |xi|^2 dt / 2}) stays tame
        tg = TimeGrid.uniform(0.5, 64)
        exp = recurse_terms(build_v0(u0_small, 1.0, tg), 1, 1.0)
        for k in (0, 1):
            prof = envelope_profile(u0_small, k)
            env = catalan_envelope_rhs(k, 0, 0, 1.0, grid9, prof)
            floor = 1e-12 * float(np.max(np.abs(exp.terms[k].values)))
            count, worst = env.violations(exp.terms[k], rtol=1e-9,
                                          atol=floor)
            assert count == 0, (k, count, worst)


class TestTruncation:
    def _fake_expansion(self, norms):
        return SeriesExpansion(terms=[None] * len(norms),
                               exponents=[1.0] * len(norms),
                               term_norms=list(norms), K=len(norms) - 1)

    def test_selects_first_qualifying_order(self):
        exp = self._fake_expansion([1.0, 0.1, 0.01, 0.001])
        # factor = rho/(1-rho) = 1/9; the first norm with norm/9 < 1e-3
        # is 0.001 at k = 3 (0.01/9 = 1.1e-3 just misses)
        assert truncation_order(exp, 0.1, 1e-3) == 3

    def test_rho_ge_one_raises(self):
        exp = self._fake_expansion([1.0, 2.0])
        with pytest.raises(DivergencePredicted) as exc:
            truncation_order(exp, 1.5, 1e-3)
        assert exc.value.diagnostics["rho"] == 1.5

    def test_no_qualifying_order_raises(self):
        exp = self._fake_expansion([1.0, 1.0, 1.0])
        with pytest.raises(DivergencePredicted):
            truncation_order(exp, 0.5, 1e-12)


class TestSummation:
    def test_partial_sums_nest(self, expansion):
        _, exp = expansion
        s2 = sum_series(exp, 2)
        s3 = sum_series(exp, 3)
        assert np.allclose(s3.values - s2.values, exp.terms[3].values,
                           atol=1e-18)

    def test_default_is_full_sum(self, expansion):
        _, exp = expansion
        assert np.array_equal(sum_series(exp).values,
                              sum_series(exp, exp.K).values)

    def test_out_of_range_K(self, expansion):
        _, exp = expansion
        with pytest.raises(ValueError):
            sum_series(exp, exp.K + 1)


class TestFixedPoint:
    def test_residual_decreases_with_K(self, expansion):
        v0, exp = expansion
        resids = [fixed_point_residual(sum_series(exp, K), v0, 1.0)
                  for K in range(exp.K + 1)]
        assert all(b < a for a, b in zip(resids, resids[1:]))

    def test_v0_alone_residual_is_first_product(self, expansion):
        from nsseries import odot_product, trajectory_norm_1p2_sup
        v0, _ = expansion
        r = fixed_point_residual(v0, v0, 1.0)
        quad = odot_product(v0, v0, 1.0)
        assert r == pytest.approx(trajectory_norm_1p2_sup(quad), rel=1e-12)


class TestSmallnessInteraction:
    def test_small_data_ratio_below_one(self, u0_small):
        assert smallness_ratio(u0_small, 1.0) < 1.0

    def test_term_ratio_tracks_rho_scaling(self, grid9):
        # doubling the data roughly doubles the empirical term ratio
        tg = TimeGrid.uniform(0.5, 6)
        ratios = []
        for amp in (0.1, 0.2):
            u0 = gaussian_initial_data(grid9, amp, 1.0)
            exp = recurse_terms(build_v0(u0, 1.0, tg), 2, 1.0)
            ratios.append(exp.ratios()[0])
        assert ratios[1] == pytest.approx(2.0 * ratios[0], rel=1e-6)
