import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from illposed import (BesovIndex, DataSpec1D, DataSpec2D, Field,
                      UniformPeriodicGrid, besov_norm, build_appendix_u0,
                      build_perturbation_1d, build_perturbation_2d,
                      build_profiles, build_u0_1d, build_u0_2d, dyadic_block,
                      gamma_factor, lp_norm, time_sequence)
from illposed.data1d import (ShellSum1D, build_bump_perturbation,
                             shell_summand_1d)
from illposed.data2d import (ShellSum2D, appendix_shell_2d,
                             build_perturbation_field, shell_velocity_2d)
from illposed.profiles import band_hat, low_bump_hat

from conftest import BOX, rel_l2


class TestProfiles:
    def test_low_bump_plateau_value(self):
        assert low_bump_hat(0.2) == 1.0
        assert low_bump_hat(0.25) == 1.0
        assert low_bump_hat(0.5) == 0.0

    def test_band_plateau_values(self):
        assert band_hat(0.55) == pytest.approx(1.0, abs=1e-15)
        assert band_hat(0.3) == 0.0
        assert band_hat(0.8) == 0.0

    def test_peak_at_origin(self, profiles1d):
        for name in ("phi", "psi", "phi1", "psi1"):
            t = profiles1d.axis(name).table
            c = profiles1d.normalizations[name]
            assert c > 0.0
            assert np.abs(t).max() == pytest.approx(c, rel=1e-12)
            assert t[t.size // 2] == pytest.approx(c, rel=1e-12)

    def test_plateau_scan(self, profiles1d):
        # oracle: direct scan over the fine table
        ax = profiles1d.axis("phi")
        width = 2.0 * np.pi * 2.0 ** (-profiles1d.plateau_n0)
        sel = (ax.x_axis >= 0.0) & (ax.x_axis <= width)
        assert np.min(ax.table[sel]) >= 0.5 * profiles1d.normalizations["phi"]
        if profiles1d.plateau_n0 > 0:
            wider = 2.0 * np.pi * 2.0 ** (-(profiles1d.plateau_n0 - 1))
            sel2 = (ax.x_axis >= 0.0) & (ax.x_axis <= wider)
            assert np.min(ax.table[sel2]) < 0.5 * profiles1d.normalizations["phi"]

    def test_lp_mass_is_order_one(self, profiles1d, grid1d_med):
        f = Field(grid1d_med,
                  profiles1d.axis("phi").sample_axis(grid1d_med.shape[0])
                  / profiles1d.normalizations["phi"])
        for p in (1.0, 2.0, np.inf):
            v = lp_norm(f, p)
            assert 0.1 < v < 50.0


class TestTimeSequence:
    def test_reference_values(self):
        seq = time_sequence(10)
        assert seq.lambda_n == pytest.approx(1408.0, rel=1e-15)
        # oracle: independent arithmetic of the defining formula
        assert seq.t_n == pytest.approx(80.0 * np.pi / (11.0 * 1024.0), rel=1e-14)

    @given(n=st.integers(min_value=1, max_value=40))
    def test_phase_product(self, n):
        seq = time_sequence(n)
        assert abs(seq.lambda_n * seq.t_n - n * np.pi) <= 1e-13 * n * np.pi

    def test_times_decrease(self):
        ts = [time_sequence(n).t_n for n in range(2, 20)]
        assert all(b < a for a, b in zip(ts, ts[1:]))

    def test_gamma_at_two(self):
        assert gamma_factor(2.0) == 48.0


class TestData1D:
    def test_peak_value(self, grid1d_med, profiles1d):
        spec = DataSpec1D(s=2.0, j_max=9)
        u0 = build_u0_1d(spec, profiles1d, grid1d_med)
        assert abs(u0.value_at_origin() - 1.0) <= spec.tail_bound() + 1e-10
        assert np.abs(u0.samples).max() <= 1.0 + 1e-12

    def test_blocks_match_closed_form_oracle(self, grid1d_med, profiles1d):
        # oracle: physical-space product of the sampled envelope and cosine
        spec = DataSpec1D(s=2.0, j_max=9)
        u0 = build_u0_1d(spec, profiles1d, grid1d_med)
        x = grid1d_med.axis(0)
        envelope = (spec.gamma / profiles1d.normalizations["phi"]) \
            * profiles1d.axis("phi").sample_axis(grid1d_med.shape[0])
        for n in range(3, 10):
            oracle = 2.0 ** (-n * spec.s) * envelope * np.cos(1.375 * 2.0**n * x)
            got = dyadic_block(u0, n)
            assert rel_l2(got.samples, oracle) <= 1e-9

    def test_besov_norm_bound(self, grid1d_med, profiles1d):
        spec = DataSpec1D(s=2.0, j_max=9)
        u0 = build_u0_1d(spec, profiles1d, grid1d_med)
        env = Field(grid1d_med,
                    profiles1d.axis("phi").sample_axis(grid1d_med.shape[0])
                    / profiles1d.normalizations["phi"])
        for p in (2.0, np.inf):
            v = besov_norm(u0, BesovIndex(spec.s, p), 9)
            assert v <= spec.gamma * lp_norm(env, p) * 1.01

    def test_sup_besov_equals_gamma(self, grid1d_med, profiles1d):
        # for p = inf each shell contributes its own sup = gamma(s)
        spec = DataSpec1D(s=2.0, j_max=9)
        u0 = build_u0_1d(spec, profiles1d, grid1d_med)
        v = besov_norm(u0, BesovIndex(2.0, np.inf), 9)
        assert v == pytest.approx(48.0, rel=1e-6)

    def test_shell_summand_matches_datum_block(self, grid1d_med, profiles1d):
        spec = DataSpec1D(s=2.0, j_max=9)
        u0 = build_u0_1d(spec, profiles1d, grid1d_med)
        f6 = shell_summand_1d(spec, 6, profiles1d, grid1d_med)
        assert np.abs(dyadic_block(u0, 6).samples - f6.samples).max() <= 1e-12

    def test_evaluator_matches_grid(self, grid1d_med, profiles1d):
        spec = DataSpec1D(s=2.0, j_max=9)
        u0 = build_u0_1d(spec, profiles1d, grid1d_med)
        ev = ShellSum1D(spec, profiles1d)
        x = grid1d_med.axis(0)
        assert np.abs(ev.value(x) - u0.samples).max() <= 1e-11


class TestPerturbation1D:
    def test_bump_is_unit_peak(self, grid1d_med, profiles1d):
        bump = build_bump_perturbation(profiles1d, grid1d_med)
        assert bump.value_at_origin() == pytest.approx(1.0, abs=1e-10)

    def test_distance_decays_like_inverse_n(self, grid1d_med, profiles1d):
        spec = DataSpec1D(s=2.0, j_max=9)
        u0 = build_u0_1d(spec, profiles1d, grid1d_med)
        idx = BesovIndex(spec.s, 2.0)
        dist = {}
        for n in (4, 8):
            un = build_perturbation_1d(spec, n, profiles1d, grid1d_med)
            dist[n] = besov_norm(un - u0, idx, 9)
        assert dist[4] / dist[8] == pytest.approx(2.0, abs=0.01)

    def test_distance_closed_form(self, grid1d_med, profiles1d):
        # only the lowest block fires: distance = (1/n) 2^{-s} ||bump||_p
        spec = DataSpec1D(s=2.0, j_max=9)
        bump = build_bump_perturbation(profiles1d, grid1d_med)
        idx = BesovIndex(spec.s, 2.0)
        got = besov_norm(bump * (1.0 / 6.0), idx, 9)
        expected = (1.0 / 6.0) * 2.0 ** (-spec.s) * lp_norm(bump, 2.0)
        assert got == pytest.approx(expected, rel=1e-12)

    def test_high_blocks_unchanged(self, grid1d_med, profiles1d):
        spec = DataSpec1D(s=2.0, j_max=9)
        u0 = build_u0_1d(spec, profiles1d, grid1d_med)
        un = build_perturbation_1d(spec, 7, profiles1d, grid1d_med)
        for k in (5, 7, 9):
            d = dyadic_block(un, k).samples - dyadic_block(u0, k).samples
            assert np.abs(d).max() <= 1e-12


class TestData2D:
    def test_divergence_free(self, u0_2d_small):
        assert u0_2d_small.spectral_divergence_max() <= 1e-10

    def test_first_component_vanishes_at_origin(self, u0_2d_small):
        assert abs(u0_2d_small.component(0).value_at_origin()) <= 1e-10

    def test_blocks_match_shell_oracle(self, grid2d_small, profiles2d):
        # oracle: physical-space outer product of sampled axis factors
        from illposed.profiles import derivative_multiplier
        spec = DataSpec2D(s=2.5, j_max=4)
        u0 = build_u0_2d(spec, profiles2d, grid2d_small)
        ax = profiles2d.axis("phi1")
        c = profiles2d.normalizations["phi1"]
        b0 = ax.sample_axis(grid2d_small.shape[0]) / c
        b1 = ax.sample_axis(grid2d_small.shape[1]) / c
        db0 = ax.sample_axis(grid2d_small.shape[0], derivative_multiplier) / c
        db1 = ax.sample_axis(grid2d_small.shape[1], derivative_multiplier) / c
        x0 = grid2d_small.axis(0)
        for n in (3, 4):
            lam = 1.375 * 2.0**n
            amp = 2.0 ** (-n * (spec.s + 1.0)) / 1.375
            o1 = amp * np.outer(np.sin(lam * x0) * b0, db1)
            o2 = -amp * np.outer(lam * np.cos(lam * x0) * b0 + np.sin(lam * x0) * db0, b1)
            g1 = dyadic_block(u0.component(0), n)
            g2 = dyadic_block(u0.component(1), n)
            assert rel_l2(g1.samples, o1) <= 1e-9
            assert rel_l2(g2.samples, o2) <= 1e-9

    def test_shell_velocity_matches_block(self, grid2d_small, profiles2d, u0_2d_small):
        spec = DataSpec2D(s=2.5, j_max=4)
        sh = shell_velocity_2d(spec, 3, profiles2d, grid2d_small)
        for i in range(2):
            d = dyadic_block(u0_2d_small.component(i), 3).samples - sh.samples(i)
            assert np.abs(d).max() <= 1e-12 * np.abs(sh.samples(i)).max()


class TestPerturbation2D:
    def test_divergence_free(self, grid2d_small, profiles2d):
        pert = build_perturbation_field(profiles2d, grid2d_small)
        assert pert.spectral_divergence_max() <= 1e-10

    def test_slope_normalisation_at_origin(self, grid2d_small, profiles2d):
        pert = build_perturbation_field(profiles2d, grid2d_small)
        assert abs(pert.component(0).value_at_origin() - 1.0) <= 1e-9

    def test_slope_lipschitz_with_fitted_constant(self, grid2d_small, profiles2d):
        pert = build_perturbation_field(profiles2d, grid2d_small)
        g1 = pert.component(0)
        from illposed.spectral import derivative
        grad_sup = max(lp_norm(derivative(g1, 0), np.inf),
                       lp_norm(derivative(g1, 1), np.inf)) * np.sqrt(2.0)
        x0 = grid2d_small.axis(0)[:, None]
        x1 = grid2d_small.axis(1)[None, :]
        dist = np.sqrt(x0**2 + x1**2)
        devs = np.abs(g1.samples - 1.0)
        sel = dist > 1e-8
        fitted = np.max(devs[sel] / dist[sel])
        assert fitted <= grad_sup * 1.01

    def test_distance_decays_like_inverse_n(self, grid2d_small, profiles2d, u0_2d_small):
        spec = DataSpec2D(s=2.5, j_max=4)
        idx = BesovIndex(spec.s, 2.0)
        dist = {}
        for n in (4, 8):
            un = build_perturbation_2d(spec, n, profiles2d, grid2d_small)
            dist[n] = (un - u0_2d_small).besov_norm(idx, 4)
        assert dist[4] / dist[8] == pytest.approx(2.0, abs=0.01)

    def test_blocks_unchanged(self, grid2d_small, profiles2d, u0_2d_small):
        spec = DataSpec2D(s=2.5, j_max=4)
        un = build_perturbation_2d(spec, 5, profiles2d, grid2d_small)
        for i in range(2):
            d = (dyadic_block(un.component(i), 4).samples
                 - dyadic_block(u0_2d_small.component(i), 4).samples)
            assert np.abs(d).max() <= 1e-12


class TestAppendixData:
    def test_divergence_free(self, grid2d_small, profiles2d):
        u0 = build_appendix_u0(2.5, profiles2d, grid2d_small, j_max=4)
        assert u0.spectral_divergence_max() <= 1e-10

    def test_block_identity(self, grid2d_small, profiles2d):
        u0 = build_appendix_u0(2.5, profiles2d, grid2d_small, j_max=4)
        sh = appendix_shell_2d(2.5, 4, profiles2d, grid2d_small)
        for i in range(2):
            got = dyadic_block(u0.component(i), 4)
            assert rel_l2(got.samples, sh.samples(i)) <= 1e-9

    def test_norm_stable_under_truncation_growth(self, grid2d_small, profiles2d):
        # truncation-tail oracle: extending the sum moves the norm by at most
        # the tail scale 2^{-s (j_max+1)} * normalisation
        idx = BesovIndex(2.5, 2.0)
        a = build_appendix_u0(2.5, profiles2d, grid2d_small, j_max=3)
        b = build_appendix_u0(2.5, profiles2d, grid2d_small, j_max=4)
        na = a.besov_norm(idx, 4)
        nb = b.besov_norm(idx, 4)
        assert np.isfinite(na) and np.isfinite(nb)
        from illposed.data2d import slope_normalisation
        tail_scale = slope_normalisation(2.5) * 2.0 ** (-2.5 * 4)
        assert abs(nb - na) <= tail_scale * 10.0

    def test_evaluator_matches_grid(self, grid2d_small, profiles2d):
        u0 = build_appendix_u0(2.5, profiles2d, grid2d_small, j_max=4)
        ev = ShellSum2D(DataSpec2D(s=2.5, j_max=4), profiles2d, appendix=True)
        X0 = grid2d_small.axis(0)[:, None] + 0.0 * grid2d_small.axis(1)[None, :]
        X1 = grid2d_small.axis(1)[None, :] + 0.0 * grid2d_small.axis(0)[:, None]
        v1, v2 = ev.value(X0, X1)
        scale = max(np.abs(u0.samples(0)).max(), np.abs(u0.samples(1)).max())
        assert np.abs(v1 - u0.samples(0)).max() <= 1e-9 * scale
        assert np.abs(v2 - u0.samples(1)).max() <= 1e-9 * scale
