"""Tests for adaptive integration and the mean-value points d and e."""

import math

import numpy as np
import pytest

from zladder import (DomainError, Integrand, PointKind, ZetaSqWindow,
                     find_d_point, find_e_point, integrate_composed,
                     integrate_zeta_sq, u_of_t_theta, z_tilde_squared,
                     zeta_euler_maclaurin, zeta_two_sigma)
from zladder.quadrature import adaptive_panels


class TestAdaptivePanels:
    def test_polynomial_exact(self):
        val, err, _ = adaptive_panels(lambda x: x ** 3 - 2 * x, 0.0, 2.0, 1e-12)
        assert val == pytest.approx(0.0, abs=1e-12)

    def test_estimates_bound_true_error(self):
        # sharply peaked rational integrand with a closed form
        c, w2 = 0.31, 1e-3
        f = lambda x: 1.0 / (w2 + (x - c) ** 2)
        exact = (math.atan((1 - c) / math.sqrt(w2))
                 + math.atan((1 + c) / math.sqrt(w2))) / math.sqrt(w2)
        val, est, _ = adaptive_panels(f, -1.0, 1.0, 1e-6, init_panels=1,
                                      max_depth=30)
        assert abs(val - exact) <= est
        assert abs(val - exact) <= 1e-6

    def test_halving_tolerance(self):
        # halving tol halves the disagreement with a tight reference run,
        # or the disagreement is already below the new tolerance
        c, w2 = 0.31, 1e-3
        f = lambda x: 1.0 / (w2 + (x - c) ** 2)
        ref, _, _ = adaptive_panels(f, -1.0, 1.0, 1e-12, init_panels=4,
                                    max_depth=40)
        tols = [1e-2 / 2 ** i for i in range(8)]
        ds = [abs(adaptive_panels(f, -1.0, 1.0, tol, init_panels=1,
                                  max_depth=40)[0] - ref) for tol in tols]
        for tol, d in zip(tols, ds):
            assert d <= tol
        for tol, d1, d2 in zip(tols[1:], ds, ds[1:]):
            assert d2 <= max(0.5 * d1, tol)


class TestIntegrateZetaSq:
    def test_large_sigma_limit(self):
        res = integrate_zeta_sq(10.0, 1e4, 1e4 + 20.0)
        assert res.integrand_id is Integrand.ZETA_SQ_SIGMA
        assert res.value == pytest.approx(20.0, rel=1e-3)

    def test_mean_value_band_at_1e4(self):
        t, sigma = 1e4, 1.5
        u = u_of_t_theta(t, 1.0)
        res = integrate_zeta_sq(sigma, t, t + u)
        ratio = res.value / (zeta_two_sigma(sigma) * u)
        assert 0.9 <= ratio <= 1.1

    def test_additivity(self):
        a, b, c = 1e4, 1e4 + 7.0, 1e4 + 20.0
        tol = 1e-8
        whole = integrate_zeta_sq(1.5, a, c, tol=tol).value
        parts = (integrate_zeta_sq(1.5, a, b, tol=tol).value
                 + integrate_zeta_sq(1.5, b, c, tol=tol).value)
        assert abs(whole - parts) <= 2 * tol

    def test_domain(self):
        with pytest.raises(DomainError):
            integrate_zeta_sq(0.9, 1e4, 1e4 + 1)
        with pytest.raises(DomainError):
            integrate_zeta_sq(1.5, 1e4, 1e4)


class TestZetaSqWindow:
    def test_matches_scalar_euler_maclaurin(self):
        win = ZetaSqWindow(1.5, 1e5, 1e5 + 20.0)
        for t in (1e5 + 1.234, 1e5 + 7.77, 1e5 + 19.5):
            ref = abs(zeta_euler_maclaurin(1.5, t).value) ** 2
            assert float(win(t)) == pytest.approx(ref, rel=1e-8, abs=1e-9)

    def test_rejects_outside(self):
        win = ZetaSqWindow(1.5, 1e5, 1e5 + 5.0)
        with pytest.raises(DomainError):
            win(1e5 + 6.0)


class TestIntegrateComposed:
    def test_change_of_variables_k1(self, chain_factory):
        table, chain = chain_factory(1e4, 1)
        res = integrate_composed(chain, table)
        assert res.integrand_id is Integrand.ZTILDE_PRODUCT
        assert abs(res.value - chain.u) <= max(1e-6, 1e-4 * chain.u)

    def test_change_of_variables_k2(self, chain_factory):
        table, chain = chain_factory(1e4, 2)
        res = integrate_composed(chain, table)
        assert abs(res.value - chain.u) <= max(1e-6, 1e-4 * chain.u)

    def test_sigma_weighted_tracks_direct_integral(self, chain_factory):
        # the composed sigma integral equals the direct window integral up
        # to table and quadrature error, far inside the asymptotic band
        table, chain = chain_factory(1e5, 2)
        sigma = 1.5
        composed = integrate_composed(chain, table, sigma=sigma)
        direct = integrate_zeta_sq(sigma, chain.base[0], chain.base[1])
        assert composed.integrand_id is Integrand.COMPOSED_PRODUCT
        assert composed.value == pytest.approx(direct.value, rel=2e-2)
        ratio = composed.value / (zeta_two_sigma(sigma) * chain.u)
        assert 0.8 <= ratio <= 1.25

    def test_sigma_validation(self, chain_factory):
        table, chain = chain_factory(1e4, 1)
        with pytest.raises(DomainError):
            integrate_composed(chain, table, sigma=0.99)


class TestMeanValuePoints:
    def test_d_point_contract(self, chain_factory):
        table, chain = chain_factory(1e5, 2)
        sigma = 1.5
        integral = integrate_composed(chain, table, sigma=sigma)
        d = find_d_point(chain, table, sigma, integral=integral)
        assert d.kind is PointKind.D_POINT
        a, b = chain.segment(chain.k)
        assert a < d.location < b
        assert d.residual <= 1e-6 * integral.value
        assert len(d.iterate_images) == chain.k + 1
        for r, img in enumerate(d.iterate_images):
            assert chain.contains(chain.k - r, float(img))
        lo, hi = chain.base
        assert lo < d.iterate_images[-1] < hi  # alpha_0 in the base segment

    def test_e_point_contract(self, chain_factory):
        table, chain = chain_factory(1e5, 2)
        e = find_e_point(chain, table)
        assert e.kind is PointKind.E_POINT
        a, b = chain.segment(chain.k)
        assert a < e.location < b
        assert e.residual <= 1e-6 * chain.u
        assert len(e.iterate_images) == chain.k

    def test_e_point_k1_against_scan_oracle(self, chain_factory):
        # brute-force scan minimization of |Ztilde^2 - U/L| must not beat
        # the root residual
        table, chain = chain_factory(1e4, 1)
        e = find_e_point(chain, table)
        a, b = chain.iterates[0]
        target = chain.u / (b - a)
        xs = np.linspace(a, b, 20001)[1:-1]
        scan_min = np.min(np.abs(z_tilde_squared(xs) - target))
        res_at_e = abs(z_tilde_squared(e.location) - target)
        assert res_at_e <= scan_min + 1e-8

    def test_mean_value_bracketing(self, chain_factory):
        # necessary condition for the root: the scan sees values on both
        # sides of the mean
        table, chain = chain_factory(1e5, 2)
        integral = integrate_composed(chain, table, sigma=1.5)
        win = ZetaSqWindow(1.5, chain.base[0] - 1, chain.base[1] + 1)
        a, b = chain.segment(chain.k)
        xs = np.linspace(a, b, 514)[1:-1]
        vals = np.ones_like(xs)
        cur = xs
        for _ in range(chain.k):
            vals *= z_tilde_squared(cur)
            cur = table.phi(cur)
        vals *= win(cur)
        mean = integral.value / (b - a)
        assert vals.min() < mean < vals.max()

    def test_d_and_e_are_distinct_generically(self, chain_factory):
        table, chain = chain_factory(1e5, 2)
        integral = integrate_composed(chain, table, sigma=1.5)
        d = find_d_point(chain, table, 1.5, integral=integral)
        e = find_e_point(chain, table)
        # no assertion on the size: just report through the test name
        assert math.isfinite(abs(d.location - e.location))

    def test_csv_exports(self, chain_factory, tmp_path):
        from zladder import integrals_to_csv, points_to_csv

        table, chain = chain_factory(1e4, 1)
        res = integrate_composed(chain, table)
        e = find_e_point(chain, table)
        integrals_to_csv([res], tmp_path / "integrals.csv")
        points_to_csv([e], tmp_path / "points.csv")
        lines = (tmp_path / "integrals.csv").read_text().splitlines()
        assert lines[0] == "value,abs_error_estimate,panels,integrand_id"
        assert lines[1].endswith("ztilde_product")
        lines = (tmp_path / "points.csv").read_text().splitlines()
        assert lines[0] == "location,kind,residual,iterate_images"
        assert ",e_point," in lines[1]
