import math

import numpy as np
import pytest

from cubecover.coverage import CoverageQuery, coverage_design_averaged
from cubecover.geometry import unit_ball_volume
from cubecover.sampling import SamplingScheme, TargetPrior
from cubecover.solvers import (
    GammaLevel,
    asymptotic_radius,
    default_delta_grid,
    delta_sweep,
    empirical_n_gamma,
    empirical_n_gamma_best_delta,
    empirical_radius_quantile,
    n_gamma_asymptotic,
    n_gamma_classical,
    worst_case_n_mixture,
)
from cubecover.streams import SeededStream


class TestGammaLevel:
    def test_validation(self):
        for bad in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValueError):
                GammaLevel(bad)

    def test_quantile(self):
        g = GammaLevel(0.1)
        assert g.normalized_quantile(1) == pytest.approx(-math.log(0.1))
        assert g.normalized_quantile(10) == pytest.approx((-math.log(0.1)) ** 0.1)


class TestClassicalCount:
    def test_textbook_value(self):
        assert n_gamma_classical(0.01, 0.1) == 230

    def test_one_fair_trial(self):
        assert n_gamma_classical(0.5, 0.5) == 1

    def test_gamma_near_one(self):
        assert n_gamma_classical(0.3, 0.999999) == 1

    def test_validation(self):
        for p in (0.0, 1.0, -0.1, 1.1):
            with pytest.raises(ValueError):
                n_gamma_classical(p, 0.1)

    def test_sits_just_below_asymptotic_for_interior_ball(self):
        # -ln(1-p) > p, so the exact count never exceeds the asymptotic one
        # and trails it by at most (-ln gamma)/2 + 1 (the p/2 expansion term)
        gamma = 0.1
        for d, eps in ((3, 0.3), (5, 0.25), (10, 0.4)):
            p = eps**d * unit_ball_volume(d)
            exact = n_gamma_classical(p, gamma)
            asym = n_gamma_asymptotic(d, eps, gamma).value
            assert exact <= math.ceil(asym)
            assert exact >= asym - (-math.log(gamma)) / 2.0 - 1.0


class TestAsymptoticCount:
    def test_d20_unit_radius(self):
        got = n_gamma_asymptotic(20, 1.0, 0.1)
        assert got.value == pytest.approx(89.2237, abs=2e-3)
        assert round(got.value) == 89

    def test_table_row_d20(self):
        row = [round(n_gamma_asymptotic(20, r, 0.1).value) for r in (0.9, 0.95, 1.0, 1.05, 1.1, 1.15)]
        assert row == [734, 249, 89, 34, 13, 5]

    def test_small_ball_d10(self):
        assert n_gamma_asymptotic(10, 0.1, 0.1).value == pytest.approx(9.029e9, rel=1e-3)

    def test_unit_count_at_balance(self):
        # choose eps with eps^d V_d = -ln(gamma)
        d, gamma = 6, 0.1
        eps = (-math.log(gamma) / unit_ball_volume(d)) ** (1.0 / d)
        assert n_gamma_asymptotic(d, eps, gamma).value == pytest.approx(1.0, rel=1e-12)

    def test_overflow_goes_to_log10(self):
        big = n_gamma_asymptotic(100, 1e-4, 0.1)
        assert big.overflowed
        assert big.value == math.inf
        assert math.isfinite(big.log10)

    def test_validation(self):
        with pytest.raises(ValueError):
            n_gamma_asymptotic(5, 0.0, 0.1)


class TestWorstCaseCount:
    def test_d3_matches_reported_magnitude(self):
        assert 238.0 <= worst_case_n_mixture(3, 0.1, 0.1) <= 240.0

    def test_d10_exponent(self):
        assert worst_case_n_mixture(10, 0.1, 0.1) == pytest.approx(3.921e9, rel=1e-3)
        assert worst_case_n_mixture(10, 0.1, 0.1) > 1e9  # "larger than 10^1000000000"

    def test_bounded_when_ball_probability_large(self):
        # P_U(B) >= -ln(gamma) implies log10 n <= log10 e
        d, gamma = 2, 0.5
        eps = 0.6
        assert eps**d * unit_ball_volume(d) >= -math.log(gamma)
        assert worst_case_n_mixture(d, eps, gamma) <= math.log10(math.e) + 1e-12


class TestAsymptoticRadius:
    def test_d10_reference(self):
        assert asymptotic_radius(10, 1000, 0.1) == pytest.approx(0.4961, abs=1e-4)

    def test_unit_quantile(self):
        d = 7
        assert asymptotic_radius(d, 1, math.exp(-1.0)) == pytest.approx(
            unit_ball_volume(d) ** (-1.0 / d), rel=1e-12
        )

    def test_d1(self):
        assert asymptotic_radius(1, 10, 0.1) == pytest.approx(2.302585 / 20.0, rel=1e-6)

    def test_inverse_of_asymptotic_count(self):
        for d, n in ((3, 17), (10, 1000), (25, 4096), (50, 10**6)):
            r = asymptotic_radius(d, n, 0.1)
            assert n_gamma_asymptotic(d, r, 0.1).value == pytest.approx(n, rel=1e-12)


class TestEmpiricalRadius:
    def test_d1_large_n_near_asymptotic(self):
        # the bracket tolerance must be well below the radius scale ~ln(10)/(2n)
        r = empirical_radius_quantile(1, 2000, SamplingScheme.uniform(1), TargetPrior.uniform(1),
                                      0.1, SeededStream(1), n_targets=100_000, n_designs=8,
                                      r_tol=1e-6)
        assert r == pytest.approx(asymptotic_radius(1, 2000, 0.1), rel=0.05)

    def test_matches_direct_coverage_bisection(self):
        d, n = 4, 60
        scheme, prior = SamplingScheme.uniform(d), TargetPrior.uniform(d)
        r = empirical_radius_quantile(d, n, scheme, prior, 0.1, SeededStream(2),
                                      n_targets=30_000, n_designs=4)
        est = coverage_design_averaged(CoverageQuery(d, r, n, scheme, prior), 8, 30_000, SeededStream(3))
        assert abs(est.value - 0.9) <= 0.01 + 3 * est.std_error

    def test_nonincreasing_in_n(self):
        scheme, prior = SamplingScheme.uniform(5), TargetPrior.uniform(5)
        rs = [empirical_radius_quantile(5, n, scheme, prior, 0.1, SeededStream(4),
                                        n_targets=20_000, n_designs=2) for n in (50, 200, 800)]
        assert rs[0] >= rs[1] >= rs[2]

    def test_delta_effect_radius_never_worse(self):
        # min over a grid containing delta=1 cannot exceed the delta=1 radius
        # beyond solver noise; at d=20 the sub-cube should win outright
        d, n = 20, 2000
        prior = TargetPrior.uniform(d)
        r_by_delta = {
            delta: empirical_radius_quantile(d, n, SamplingScheme.uniform(d, delta), prior, 0.1,
                                             SeededStream(40 + int(10 * delta)),
                                             n_targets=10_000, n_designs=2)
            for delta in (0.6, 0.7, 0.8, 1.0)
        }
        assert min(r_by_delta.values()) <= r_by_delta[1.0] + 0.01
        assert min(r_by_delta, key=r_by_delta.get) < 1.0


class TestDeltaSweep:
    def test_single_cell_grid(self):
        res = delta_sweep(5, 100, 0.4, TargetPrior.uniform(5), 1.0, [0.7], SeededStream(5),
                          n_targets=4000)
        assert res.best_delta == 0.7
        assert len(res.grid) == 1

    def test_reference_cell_d20(self):
        res = delta_sweep(20, 10_000, 0.97, TargetPrior.uniform(20), 1.0,
                          [0.6, 0.7, 0.8, 0.9, 1.0], SeededStream(6), n_targets=5000)
        assert res.best_delta == pytest.approx(0.8, abs=0.1)
        assert res.best_coverage == pytest.approx(0.9, abs=0.03)

    def test_no_delta_effect_in_small_dimension(self):
        res = delta_sweep(5, 1000, 0.24, TargetPrior.uniform(5), 1.0,
                          [0.8, 0.9, 1.0], SeededStream(7), n_targets=20_000)
        assert res.best_delta == 1.0

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            delta_sweep(3, 10, 0.3, TargetPrior.uniform(3), 1.0, [], SeededStream(8))
        with pytest.raises(ValueError):
            delta_sweep(3, 10, 0.3, TargetPrior.uniform(3), 1.0, [0.0, 0.5], SeededStream(9))

    def test_default_grid(self):
        grid = default_delta_grid()
        assert grid[0] == pytest.approx(0.05)
        assert grid[-1] == pytest.approx(1.0)
        assert len(grid) == 20


class TestEmpiricalNGamma:
    def test_matches_independent_coverage_scan(self):
        d, r = 2, 0.35
        scheme, prior = SamplingScheme.uniform(d), TargetPrior.uniform(d)
        res = empirical_n_gamma(d, r, scheme, 0.1, SeededStream(10), n_targets=30_000, n_designs=4)
        assert res.status == "ok"
        # independent oracle: direct design-averaged coverage on both sides
        below = coverage_design_averaged(CoverageQuery(d, r, max(res.n - 2, 1), scheme, prior),
                                         60, 4000, SeededStream(11))
        above = coverage_design_averaged(CoverageQuery(d, r, res.n + 2, scheme, prior),
                                         60, 4000, SeededStream(12))
        assert below.value <= 0.9 + 0.01 + 3 * below.std_error
        assert above.value >= 0.9 - 0.01 - 3 * above.std_error

    def test_monotone_in_radius(self):
        scheme = SamplingScheme.uniform(3)
        ns = [empirical_n_gamma(3, r, scheme, 0.1, SeededStream(13), n_targets=20_000, n_designs=2).n
              for r in (0.2, 0.3, 0.4)]
        assert ns[0] > ns[1] > ns[2]

    def test_infeasible_cap(self):
        res = empirical_n_gamma(10, 0.3, SamplingScheme.uniform(10, 0.2), 0.1, SeededStream(14),
                                n_targets=2000, n_designs=1, n_cap=64)
        assert res.status == "infeasible"
        assert res.csv_value() == "NA"

    def test_geometrically_unreachable_is_instant_na(self):
        res = empirical_n_gamma(30, 0.5, SamplingScheme.uniform(30, 0.05), 0.1, SeededStream(15),
                                n_targets=2000, n_designs=1)
        assert res.status == "infeasible"

    def test_degenerate_single_point_reports_na(self):
        best, per_delta = empirical_n_gamma_best_delta(
            50, 2.3, 0.1, SeededStream(16), deltas=[0.1, 0.2, 0.3],
            n_targets=3000, n_designs=1)
        assert best.status == "degenerate"
        assert best.csv_value() == "NA"
        assert any(res.status == "ok" for _, res in per_delta)

    def test_radius_validation(self):
        with pytest.raises(ValueError):
            empirical_n_gamma(3, 0.0, SamplingScheme.uniform(3), 0.1, SeededStream(17))
