import math

import numpy as np
import pytest

import hmtlab as hl
from hmtlab import (
    ConvergenceError,
    CorruptTableError,
    ExtractionUnstableError,
    Potential,
    PotentialInstabilityError,
    check_boundary_bound,
    comparison_supersolution,
    extract_c_g,
    extrapolate_c_g,
    make_constants,
    make_grid,
    make_maps,
    solve_green,
    solve_green_continued,
)
from hmtlab.green import image_t_grid
from hmtlab.quad_core import cumulative_from_origin
from scipy.interpolate import PchipInterpolator


class TestZeroPotential:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_log_solution_exact(self, green_tables, n):
        table = green_tables(n, "zero", 2048, 1e-6)
        gam = make_constants(n).gamma
        exact = -gam * np.log(table.grid.nodes / table.grid.nodes[-1])
        rel = np.abs(table.g_values - exact) / np.maximum(np.abs(exact), 1e-30)
        rel[-1] = 0.0  # both sides vanish at the boundary node
        assert rel.max() < 1e-8

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_c_g_vanishes(self, green_tables, n):
        table = green_tables(n, "zero", 2048, 1e-6)
        assert abs(table.c_g) < 1e-6

    def test_remainder_vanishes(self, green_tables):
        table = green_tables(2, "zero", 2048, 1e-6)
        assert np.max(np.abs(table.remainder)) < 1e-14


class TestHardyCritical:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_invariants(self, green_tables, n):
        table = green_tables(n, "hardy", 2048, 1e-6)
        table.validate()
        c = make_constants(n)
        assert np.all(np.diff(table.g_values) < 0)
        assert np.all(table.g_deriv < 0)
        flux = -(c.omega ** (1 / (n - 1))) * table.g_deriv * table.grid.nodes
        assert np.all(flux >= 1.0 - 1e-12)
        assert table.residual <= table.tol

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_flux_identity_residual_recomputed(self, green_tables, n):
        table = green_tables(n, "hardy", 2048, 1e-6)
        c = make_constants(n)
        v = Potential.hardy_critical().values(table.grid, n)
        m = cumulative_from_origin(
            c.omega * v * table.g_values ** (n - 1) * table.grid.nodes ** (n - 1), table.grid
        )
        flux_stored = -(c.omega ** (1 / (n - 1))) * table.g_deriv * table.grid.nodes
        defect = np.abs(flux_stored - (1 + m) ** (1 / (n - 1)))
        assert defect.max() <= 10 * table.tol

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_pole_normalization(self, green_tables, n):
        table = green_tables(n, "hardy", 2048, 1e-6)
        gam = make_constants(n).gamma
        val = -table.g_deriv[:4] * table.grid.nodes[:4]
        assert np.all(np.abs(val - gam) / gam < 1e-4)

    @pytest.mark.parametrize("n", [2, 3])
    def test_c_g_matches_fine_mesh_oracle(self, green_tables, oracles, n):
        table = green_tables(n, "hardy", 2048, 1e-5, 1e-10)
        ref = oracles["c_g_hardy"][str(n)]["per_eps"]["1e-05"]
        assert abs(table.c_g - ref) < 1e-4

    @pytest.mark.parametrize("n", [2, 3])
    def test_c_g_stable_under_refinement(self, green_tables, n):
        a = green_tables(n, "hardy", 2048, 1e-5, 1e-10).c_g
        b = green_tables(n, "hardy", 4096, 1e-5, 1e-10).c_g
        assert abs(a - b) < 1e-4

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_remainder_slope(self, green_tables, n):
        table = green_tables(n, "hardy", 2048, 1e-6)
        g = table.grid
        mask = (g.nodes >= 1e-6) & (g.nodes <= 1e-3)
        slope = np.polyfit(np.log(g.nodes[mask]),
                           np.log(np.abs(table.remainder[mask]) + 1e-300), 1)[0]
        assert slope >= 1.5

    def test_extract_c_g_matches_table(self, green_tables):
        table = green_tables(2, "hardy", 2048, 1e-6)
        assert extract_c_g(table) == pytest.approx(table.c_g, abs=1e-12)

    def test_extract_c_g_rejects_corrupt(self, green_tables):
        import dataclasses

        table = green_tables(2, "hardy", 2048, 1e-6)
        g_bad = table.g_values.copy()
        g_bad[3] += 0.05
        bad = dataclasses.replace(table, g_values=g_bad)
        with pytest.raises(ExtractionUnstableError):
            extract_c_g(bad)

    def test_boundary_bound(self, green_tables):
        fitted = {}
        for n_points in (2048, 4096):
            fitted[n_points] = check_boundary_bound(green_tables(2, "hardy", n_points, 1e-6))
        assert np.isfinite(fitted[2048])
        assert fitted[2048] == pytest.approx(fitted[4096], rel=0.10)
        # pointwise ratio at r = 1/2 is a lower bound for the fitted sup
        table = green_tables(2, "hardy", 2048, 1e-6)
        i = np.searchsorted(table.grid.nodes, 0.5)
        ratio = table.g_values[i] / table.grid.one_minus_r2[i] ** 0.5
        assert ratio <= fitted[2048] + 1e-12

    def test_boundary_bound_zero_potential(self, green_tables):
        assert np.isfinite(check_boundary_bound(green_tables(2, "zero", 2048, 1e-6)))


class TestSolverErrors:
    def test_convergence_error(self, grids):
        with pytest.raises(ConvergenceError) as err:
            solve_green(2, Potential.hardy_critical(), grids(512, 1e-6), max_iter=2)
        assert err.value.residual is not None
        assert err.value.iterations == 2

    def test_instability_error(self, grids):
        with pytest.raises(PotentialInstabilityError):
            solve_green(2, Potential.constant(1e8), grids(512, 1e-3), max_iter=400)


class TestContinuation:
    def test_warm_start_and_extrapolation(self):
        tables = solve_green_continued(
            2, Potential.hardy_critical(), 1024, [1e-2, 1e-3, 1e-4], tol=1e-9, max_iter=2000
        )
        cgs = [t.c_g for t in tables]
        assert cgs[0] < cgs[1] < cgs[2]
        fit = extrapolate_c_g([1e-2, 1e-3, 1e-4], cgs)
        assert fit["limit"] > cgs[-1]
        assert math.isfinite(fit["slope"])


class TestMaps:
    def test_zero_potential_identity(self):
        grid = make_grid(8192, 1e-10)
        table = solve_green(2, Potential.zero(), grid)
        maps = make_maps(table, beta=0.0, n_t=8192)
        assert np.max(np.abs(maps.a_over_t - 1.0)) < 1e-8
        assert np.max(np.abs(maps.phi)) == 0.0
        assert np.max(np.abs(maps.psi - 1.0)) < 1e-8

    def test_image_grid_is_exact_inverse(self, green_tables):
        table = green_tables(2, "hardy", 2048, 1e-6)
        maps = make_maps(table, beta=0.0, t_grid=image_t_grid(table))
        assert np.allclose(maps.a, table.grid.nodes, rtol=1e-12)

    @pytest.mark.parametrize("n", [2, 3])
    def test_hardy_maps_invariants(self, transplant_maps, n):
        maps = transplant_maps(n)
        assert np.all(maps.phi > 0.0)
        ratio = maps.a_over_t
        assert np.all(np.diff(ratio) <= 1e-9 * ratio[:-1])
        gam = make_constants(n).gamma
        assert np.all(ratio < math.exp(maps.c_g / gam) + 1e-6)

    @pytest.mark.parametrize("n", [2, 3])
    def test_a_over_t_matches_remainder_form(self, green_tables, transplant_maps, n):
        # ln(a/t) = (c_g + H(a)) / gamma holds with the table's own remainder
        table = green_tables(n, "hardy", 4096, 1e-6, 1e-10)
        maps = transplant_maps(n)
        gam = make_constants(n).gamma
        h_at_a = PchipInterpolator(np.log(table.grid.nodes), table.remainder)(np.log(maps.a))
        predicted = np.exp((maps.c_g + h_at_a) / gam)
        rel = np.abs(maps.a_over_t - predicted) / predicted
        assert rel.max() < 1e-3
        # and the t -> 0 limit is e^(c_g / gamma)
        assert maps.a_over_t[0] == pytest.approx(math.exp(maps.c_g / gam), rel=1e-3)

    @pytest.mark.parametrize("n", [2, 3])
    def test_phi_prime_consistent_with_numeric_derivative(self, transplant_maps, n):
        # fourth-order stencil on the uniform zone, subsampled wide enough to
        # average over sub-node interpolation wiggle in the phi table
        maps = transplant_maps(n)
        t = maps.t
        idx = np.where((t >= 0.1) & (t <= 0.9))[0][::12]
        h = t[idx[1]] - t[idx[0]]
        core = idx[2:-2]
        stride = idx[1] - idx[0]
        num = (-maps.phi[core + 2 * stride] + 8 * maps.phi[core + stride]
               - 8 * maps.phi[core - stride] + maps.phi[core - 2 * stride]) / (12 * h)
        rel = np.abs(num - maps.phi_prime[core]) / np.abs(maps.phi_prime[core])
        assert np.max(rel) < 1e-3

    def test_corrupt_table_rejected(self, green_tables):
        import dataclasses

        table = green_tables(2, "hardy", 2048, 1e-6)
        g_bad = table.g_values.copy()
        g_bad[100] = g_bad[99] + 1.0  # break monotonicity
        bad = dataclasses.replace(table, g_values=g_bad)
        with pytest.raises(CorruptTableError):
            make_maps(bad)


class TestComparisonSupersolution:
    @pytest.mark.parametrize("n", [2, 3])
    def test_supersolution_margins(self, grids, n):
        out = comparison_supersolution(grids(2048, 1e-6), n)
        assert out["elementary_min"] >= -1e-12  # equality only as r -> 1
        assert out["analytic_min"] > 0.0
        assert out["discrete_min"] > 0.0
