import math

import numpy as np
import pytest

import hmtlab as hl
from hmtlab import (
    Potential,
    PreconditionError,
    RadialProfile,
    check_hardy_lemma,
    check_key_inequality,
    check_mt_comparison,
    make_constants,
    make_grid,
    make_maps,
    normalize_h,
    pushforward,
    solve_green,
    transplant_report,
    verify_grad_identity,
    verify_hardy_identity,
)
from hmtlab.extremal import MoserParams, smoothed_moser_profile
from hmtlab.green import image_t_grid


@pytest.fixture(scope="module")
def zero_setup():
    from hmtlab import GridGrading

    grid = make_grid(8192, 1e-10, GridGrading(r_min=1e-12))
    table = solve_green(2, Potential.zero(), grid)
    maps = make_maps(table, beta=0.0, n_t=8192, t_min=1e-11)
    return grid, table, maps


class TestPushforward:
    def test_zero_potential_resamples_identity(self, zero_setup):
        grid, _, maps = zero_setup
        u = RadialProfile(grid, grid.one_minus_r2**2)
        v = pushforward(u, maps)
        expected = u(maps.t)
        assert np.max(np.abs(v.values - expected)) < 1e-8

    def test_plateau_preserved(self, transplant_maps, grids):
        maps = transplant_maps(2)
        g = grids(4096, 1e-6)
        u = smoothed_moser_profile(MoserParams(rho=0.3, n=2), g)
        v = pushforward(u, maps)
        assert v.values[0] == pytest.approx(u.values[0], rel=1e-9)
        assert v.is_nonincreasing()
        assert v.values[-1] == 0.0

    def test_matches_direct_composition(self, transplant_maps, grids):
        maps = transplant_maps(2)
        g = grids(4096, 1e-6)
        u = smoothed_moser_profile(MoserParams(rho=0.3, n=2), g)
        v = pushforward(u, maps)
        t_samples = np.linspace(0.05, 0.95, 1000)
        a_interp = np.interp(t_samples, maps.t, maps.a)
        direct = u(a_interp)
        via_profile = v(t_samples)
        assert np.max(np.abs(direct - via_profile)) < 1e-5

    def test_increasing_profile_rejected(self, transplant_maps, grids):
        maps = transplant_maps(2)
        g = grids(4096, 1e-6)
        u = RadialProfile(g, g.nodes * (1 - g.nodes))
        with pytest.raises(PreconditionError):
            pushforward(u, maps)


class TestGradIdentity:
    def test_zero_potential_defect_tiny(self, zero_setup):
        grid, _, maps = zero_setup
        u = RadialProfile(grid, 1.0 - grid.nodes)
        v = pushforward(u, maps)
        assert verify_grad_identity(u, v, maps) < 1e-10

    def test_hardy_quadratic(self, green_tables):
        table = green_tables(2, "hardy", 8192, 1e-6, 1e-10)
        maps = hl.make_maps(table, beta=0.0, n_t=16384)
        u = RadialProfile(table.grid, table.grid.one_minus_r2)
        v = pushforward(u, maps)
        assert verify_grad_identity(u, v, maps) < 1e-5

    def test_defect_decreases_with_t_refinement(self, green_tables):
        # window where the t-grid error dominates the fixed r-grid floor
        table = green_tables(2, "hardy", 8192, 1e-6, 1e-10)
        u = RadialProfile(table.grid, table.grid.one_minus_r2)
        defects = []
        for n_t in (1024, 2048, 4096):
            maps = hl.make_maps(table, beta=0.0, n_t=n_t)
            defects.append(verify_grad_identity(u, pushforward(u, maps), maps))
        order = math.log2(defects[0] / defects[-1]) / 2
        assert order >= 1.5


class TestHardyIdentity:
    def test_zero_potential_both_sides_vanish(self, zero_setup):
        grid, _, maps = zero_setup
        u = RadialProfile(grid, grid.one_minus_r2)
        v = pushforward(u, maps)
        assert verify_hardy_identity(u, v, maps) == 0.0

    def test_hardy_quadratic(self, green_tables):
        table = green_tables(2, "hardy", 8192, 1e-6, 1e-10)
        maps = hl.make_maps(table, beta=0.0, n_t=16384)
        u = RadialProfile(table.grid, table.grid.one_minus_r2)
        v = pushforward(u, maps)
        assert hl.hardy_term(u, 2) == pytest.approx(math.pi, abs=2e-4)
        assert verify_hardy_identity(u, v, maps) < 1e-4

    def test_defect_halves_under_t_refinement(self, green_tables):
        table = green_tables(2, "hardy", 8192, 1e-6, 1e-10)
        u = RadialProfile(table.grid, table.grid.one_minus_r2)
        defects = []
        for n_t in (2048, 4096):
            maps = hl.make_maps(table, beta=0.0, n_t=n_t)
            defects.append(verify_hardy_identity(u, pushforward(u, maps), maps))
        assert defects[1] <= 0.5 * defects[0]


class TestHardyLemma:
    def test_zero_profile(self, transplant_maps):
        maps = transplant_maps(2)
        v = RadialProfile(maps.t_grid, np.zeros_like(maps.t))
        assert check_hardy_lemma(v, maps) == 0.0

    def test_zero_potential_maps(self, zero_setup):
        grid, _, maps = zero_setup
        u = RadialProfile(grid, grid.one_minus_r2)
        v = pushforward(u, maps)
        assert check_hardy_lemma(v, maps) == 0.0

    @pytest.mark.parametrize("n", [2, 3])
    def test_corpus_margins(self, transplant_maps, corpora, n):
        maps = transplant_maps(n)
        for u in corpora(n, size=50, seed=1234):
            v = pushforward(u, maps)
            assert check_hardy_lemma(v, maps) >= -1e-6


class TestKeyInequality:
    def test_zero_profile(self, transplant_maps, grids):
        maps = transplant_maps(2)
        g = grids(4096, 1e-6)
        u = RadialProfile(g, np.zeros_like(g.nodes))
        assert check_key_inequality(u, maps) == pytest.approx(0.0, abs=1e-12)

    def test_quadratic_normalized(self, transplant_maps, grids):
        maps = transplant_maps(2)
        g = grids(4096, 1e-6)
        u = normalize_h(RadialProfile(g, g.one_minus_r2), 2)
        assert check_key_inequality(u, maps) >= 0.0

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_corpus_grad_v_below_one(self, green_tables, corpora, n):
        table = green_tables(n, "hardy", 4096, 1e-6, 1e-10)
        maps = hl.make_maps(table, beta=0.0, n_t=8192)
        for u in corpora(n, size=50, seed=1234):
            v = pushforward(u, maps)
            assert hl.grad_energy(v, n) <= 1.0 + 1e-6


class TestMTComparison:
    def test_zero_potential_equality(self, zero_setup):
        grid, _, maps = zero_setup
        u = RadialProfile(grid, np.zeros_like(grid.nodes))
        v = pushforward(u, maps)
        res = check_mt_comparison(u, v, maps, 0.0)
        assert abs(res.margin) < 1e-8

    def test_moser_margin(self, transplant_maps, grids):
        maps = transplant_maps(2)
        g = grids(4096, 1e-6)
        u = normalize_h(smoothed_moser_profile(MoserParams(rho=0.1, n=2), g), 2)
        res = check_mt_comparison(u, pushforward(u, maps), maps, 0.0)
        assert res.margin >= 0.0
        assert res.identity_defect < 1e-4

    @pytest.mark.parametrize("n,beta", [(2, 0.0), (2, 1.0), (3, 0.0), (3, 1.5)])
    def test_corpus_margins(self, transplant_maps, corpora, n, beta):
        maps = transplant_maps(n, beta=beta)
        for u in corpora(n, size=25, seed=555):
            v = pushforward(u, maps)
            res = check_mt_comparison(u, v, maps, beta)
            mt_u = hl.singular_mt(u, n, beta).value
            assert res.margin >= -1e-6 * max(1.0, mt_u)
            assert res.identity_defect < 1e-4

    def test_psi_bounds(self, transplant_maps):
        maps = transplant_maps(2, beta=0.0)
        gam = make_constants(2).gamma
        assert np.all(maps.psi < maps.a_over_t ** (2 - 0.0))
        assert np.all(maps.a_over_t < math.exp(maps.c_g / gam) + 1e-6)


class TestReportChain:
    @pytest.mark.parametrize("n", [2, 3])
    def test_chain_consistency(self, transplant_maps, corpora, n):
        maps = transplant_maps(n)
        for u in corpora(n, size=10, seed=999):
            rep = transplant_report(u, maps)
            recombined = (rep.hardy_lemma_margin + rep.grad_defect_signed
                          - rep.hardy_defect_signed)
            scale = max(1.0, abs(rep.grad_u))
            assert abs(rep.key_margin - recombined) <= 1e-4 * scale

    def test_report_fields(self, transplant_maps, corpora):
        maps = transplant_maps(2)
        rep = transplant_report(corpora(2, size=2, seed=1)[0], maps)
        d = rep.to_dict()
        for key in ("grad_u", "grad_v", "hardy_u", "identity_grad_defect",
                    "identity_hardy_defect", "hardy_lemma_margin", "key_margin",
                    "mt_comparison_margin"):
            assert key in d
            assert np.isfinite(d[key])
