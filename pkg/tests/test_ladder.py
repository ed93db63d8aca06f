"""Tests for the ladder surrogate, its inversion, and the segment chains."""

import math

import numpy as np
import pytest
from scipy.integrate import simpson
from scipy.optimize import brentq

from zladder import (DomainError, TableRangeError, build_ladder, expected_lag,
                     ladder_inverse, reverse_iterates, rs_z_points,
                     u_of_t_theta, validate_chain, z_tilde_squared)
from zladder.ladder import LadderTable

# frozen: Euler's constant by the standard series oracle, 10 digits
EULER_C_10 = 0.5772156649


class TestUOfTTheta:
    def test_unit_value_at_e_to_e(self):
        assert u_of_t_theta(math.e ** math.e, 0.0) == pytest.approx(1.0, rel=1e-12)

    def test_formula(self):
        t = 1e5
        assert u_of_t_theta(t, 1.0) == pytest.approx(
            math.log(math.log(t)) + math.log(t), rel=1e-14)

    def test_vanishing_against_t_over_lnt(self):
        vals = [u_of_t_theta(t, 1.0) * math.log(t) / t
                for t in (1e4, 1e5, 1e6, 1e7, 1e8)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-5

    def test_theta_bounds(self):
        with pytest.raises(DomainError):
            u_of_t_theta(1e5, 1.5)
        with pytest.raises(DomainError):
            u_of_t_theta(1e5, -0.1)
        with pytest.raises(DomainError):
            u_of_t_theta(2.0, 0.5)


class TestZTildeSquared:
    def test_vanishes_at_zero_of_z(self):
        # bracket a zero of Z by sign change, then bisect it down
        f = lambda t: float(rs_z_points(t, corrected=True))
        lo, hi = 1e4 + 0.0, 1e4 + 2.0
        grid = np.linspace(lo, hi, 64)
        z = rs_z_points(grid, corrected=True)
        flips = np.flatnonzero(np.diff(np.sign(z)) != 0)
        assert len(flips)
        root = brentq(f, grid[flips[0]], grid[flips[0] + 1], xtol=1e-12)
        assert z_tilde_squared(root) < 1e-10

    def test_matches_definition(self):
        t = 1e4
        z = float(rs_z_points(t, corrected=True))
        assert z_tilde_squared(t) == pytest.approx(z * z / math.log(t), rel=1e-12)

    def test_cross_check_against_oracle(self):
        from zladder import zeta_euler_maclaurin

        t = 1e4
        ref = abs(zeta_euler_maclaurin(0.5, t).value) ** 2 / math.log(t)
        assert z_tilde_squared(t) == pytest.approx(ref, abs=3e-4)

    def test_unit_mean_over_long_window(self):
        # independent quadrature oracle: dense Simpson over [1e5, 1e5+1e3]
        t0, span = 1e5, 1e3
        ts = t0 + np.linspace(0.0, span, 2 ** 16 + 1)
        mean = simpson(z_tilde_squared(ts), x=ts) / span
        assert abs(mean - 1.0) < 0.2

    def test_floor(self):
        with pytest.raises(DomainError):
            z_tilde_squared(500.0)


@pytest.fixture(scope="module")
def table_1e4(ladder_factory):
    return ladder_factory(1e4, 3)


class TestBuildLadder:
    def test_monotone_and_lagging(self, table_1e4):
        t = table_1e4
        assert np.all(np.diff(t.phi_values) > 0)
        assert np.all(t.phi_values < t.t_grid)

    def test_anchor_formula(self, table_1e4):
        t_low = table_1e4.t_low
        offset = (1.0 - EULER_C_10) * t_low / math.log(t_low)
        assert t_low - table_1e4.anchor[1] == pytest.approx(offset, rel=1e-9)

    def test_interpolant_reproduces_nodes(self, table_1e4):
        vals = table_1e4.phi(table_1e4.t_grid)
        assert np.max(np.abs(vals - table_1e4.phi_values)) < 1e-9

    def test_no_overshoot_between_nodes(self, table_1e4):
        # monotone interpolation: midpoints stay inside neighboring values
        t = table_1e4
        mids = 0.5 * (t.t_grid[:-1] + t.t_grid[1:])
        v = t.phi(mids)
        assert np.all(v >= t.phi_values[:-1]) and np.all(v <= t.phi_values[1:])

    def test_telescoping(self, table_1e4):
        # phi(b) - phi(a) telescopes the stored increments exactly
        t = table_1e4
        rng = np.random.default_rng(3)
        idx = rng.integers(0, len(t.t_grid) - 1, size=20)
        for i in idx:
            j = int(rng.integers(i + 1, len(t.t_grid)))
            diff = t.phi_values[j] - t.phi_values[int(i)]
            direct = float(t.phi(t.t_grid[j]) - t.phi(t.t_grid[int(i)]))
            assert diff == pytest.approx(direct, abs=1e-9)

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            build_ladder(500.0, 2000.0)
        with pytest.raises(DomainError):
            build_ladder(2000.0, 1500.0)


class TestInverse:
    def test_round_trip_on_grid(self, table_1e4):
        t = table_1e4
        rng = np.random.default_rng(5)
        xs = rng.uniform(t.t_low + 1, t.t_high - 1, 100)
        for x in xs:
            x = float(x)
            target = float(t.phi(x))
            back = ladder_inverse(t, target)
            assert abs(t.phi(back) - target) < 1e-7
            assert abs(back - x) < 1e-6

    def test_first_preimage_of_base(self, table_1e4):
        t_base = 1e4
        t1 = ladder_inverse(table_1e4, t_base)
        lag = expected_lag(t_base)
        assert abs((t1 - t_base) / lag - 1.0) < 0.25

    def test_iterated_forward_map(self, table_1e4):
        t = 1e4 + 900.0
        once = float(table_1e4.phi(t))
        twice = float(table_1e4.phi(once))
        assert float(table_1e4.phi_iterated(t, 2)) == pytest.approx(twice, abs=1e-12)

    def test_out_of_range(self, table_1e4):
        with pytest.raises(TableRangeError):
            ladder_inverse(table_1e4, table_1e4.phi_values[0] - 10.0)
        with pytest.raises(TableRangeError):
            ladder_inverse(table_1e4, table_1e4.phi_values[-1] + 10.0)


class TestReverseIterates:
    def test_single_inversion(self, chain_factory):
        table, chain = chain_factory(1e4, 1)
        a, b = chain.iterates[0]
        assert table.phi(a) == pytest.approx(1e4, abs=1e-7)
        assert table.phi(b) == pytest.approx(1e4 + chain.u, abs=1e-7)

    def test_gap_law_band(self, chain_factory):
        _, chain = chain_factory(1e5, 3)
        ratios = chain.gap_law_ratios()
        assert np.all(ratios > 0.7) and np.all(ratios < 1.3)

    def test_iterate_lengths_near_u(self, chain_factory):
        _, chain = chain_factory(1e5, 3)
        for a, b in chain.iterates:
            assert chain.u / 3 < b - a < 3 * chain.u

    def test_ordering_is_strict(self, chain_factory):
        _, chain = chain_factory(1e5, 3)
        segs = [chain.base] + chain.iterates
        for (a0, b0), (a1, b1) in zip(segs, segs[1:]):
            assert b0 < a1

    def test_ln_stability(self, chain_factory):
        _, chain = chain_factory(1e5, 3)
        ln_t = math.log(1e5)
        bound = 3 * 2.0 / ln_t / (1.0 - EULER_C_10)
        for r in range(4):
            for x in chain.segment(r):
                assert abs(math.log(x) / ln_t - 1.0) <= bound

    def test_validate_chain_diagnostics(self, chain_factory):
        table, chain = chain_factory(1e4, 2)
        diag = validate_chain(chain, table)
        assert diag["map_residual"] < 1e-6

    def test_table_too_short_names_extension(self, table_1e4):
        with pytest.raises(TableRangeError, match="rebuild with t_high"):
            reverse_iterates(table_1e4, 1e4, u_of_t_theta(1e4, 1.0), 9)

    def test_coarse_and_fine_sampling_agree(self):
        # chain geometry is insensitive to the evaluation density
        lo, hi = 1e4 - 2, 1e4 + 1600
        u = u_of_t_theta(1e4, 1.0)
        gaps = []
        for spo in (8, 64):
            table = build_ladder(lo, hi, samples_per_osc=spo)
            chain = reverse_iterates(table, 1e4, u, 2)
            gaps.append(chain.gaps)
        assert np.max(np.abs(gaps[0] - gaps[1])) < 0.05


class TestSerialization:
    def test_text_round_trip_exact(self, tmp_path):
        table = build_ladder(1e4 - 2, 1e4 + 30, samples_per_osc=8)
        path = tmp_path / "table.tsv"
        table.save(path)
        loaded = LadderTable.load(path)
        assert np.array_equal(loaded.t_grid, table.t_grid)
        assert np.array_equal(loaded.phi_values, table.phi_values)
        assert np.array_equal(loaded.slopes, table.slopes)
        assert loaded.quadrature_tol == table.quadrature_tol
        x = 1e4 + 11.0
        assert loaded.phi(x) == table.phi(x)

    def test_version_header_enforced(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("nonsense\n1 2 3\n")
        with pytest.raises(DomainError, match="zladder-table"):
            LadderTable.load(path)
