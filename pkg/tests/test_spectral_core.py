import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from illposed import (BesovIndex, Field, IllposedError, UniformPeriodicGrid,
                      UnresolvedShell, besov_norm, commutator, decompose,
                      dyadic_block, lp_norm, make_cutoff_pair, read_field,
                      write_field)
from illposed.grid import field_to_csv
from illposed.spectral import (block_multiplier, max_resolved_shell,
                               partition_of_unity_deviation, smooth_ramp)

from conftest import BOX, rel_l2


class TestCutoffPair:
    def test_low_pass_plateau(self):
        prof = make_cutoff_pair()
        assert prof.theta_hat(0.5) == 1.0
        assert prof.theta_hat(np.array([0.0, 0.74, 0.75])).tolist() == [1.0, 1.0, 1.0]
        assert prof.theta_hat(4.0 / 3.0) == 0.0
        assert prof.theta_hat(5.0) == 0.0

    def test_band_plateau(self):
        prof = make_cutoff_pair()
        assert prof.phi_hat(1.4) == pytest.approx(1.0, abs=1e-15)
        for r in (4.0 / 3.0, 1.45, 1.5):
            assert prof.phi_hat(r) == pytest.approx(1.0, abs=1e-15)
        assert prof.phi_hat(0.75) == 0.0
        assert prof.phi_hat(8.0 / 3.0) == 0.0

    def test_telescoping_sum_at_large_frequency(self):
        prof = make_cutoff_pair()
        xi = 100.0
        total = prof.theta_hat(xi) + sum(prof.phi_hat(xi / 2.0**j) for j in range(21))
        assert abs(total - 1.0) <= 1e-12

    @given(st.floats(min_value=-5.0, max_value=5.0))
    def test_ramp_range(self, t):
        v = float(smooth_ramp(t))
        assert 0.0 <= v <= 1.0

    @given(st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.0, max_value=1.0))
    def test_ramp_monotone(self, a, b):
        lo, hi = min(a, b), max(a, b)
        assert float(smooth_ramp(lo)) <= float(smooth_ramp(hi)) + 1e-15


class TestGrid:
    def test_rejects_bad_sizes(self):
        with pytest.raises(IllposedError):
            UniformPeriodicGrid(1, 1000)
        with pytest.raises(IllposedError):
            UniformPeriodicGrid(1, 8)
        with pytest.raises(IllposedError):
            UniformPeriodicGrid(3, 64)

    def test_axis_and_spacing(self, grid1d_small):
        x = grid1d_small.axis(0)
        h = grid1d_small.spacing[0]
        assert x[0] == pytest.approx(-BOX * np.pi)
        assert np.allclose(np.diff(x), h)
        assert x[grid1d_small.origin_index[0]] == pytest.approx(0.0, abs=1e-12)

    def test_frequencies_are_multiples_of_inverse_box(self, grid1d_small):
        k = grid1d_small.freq_axis(0)
        assert k[1] == pytest.approx(1.0 / BOX)

    def test_roundtrip_dft(self, grid1d_small):
        rng = np.random.default_rng(7)
        f = Field(grid1d_small, rng.standard_normal(grid1d_small.shape))
        back = Field.from_spectrum(grid1d_small, f.spectrum)
        assert np.abs(back.samples - f.samples).max() <= 1e-12 * np.abs(f.samples).max()


class TestDyadicBlocks:
    def test_zero_field(self, grid1d_med):
        z = Field.zeros(grid1d_med)
        assert np.all(dyadic_block(z, 5).samples == 0.0)

    def test_pure_mode_passes_through_own_shell(self, grid1d_med):
        x = grid1d_med.axis(0)
        mode = Field(grid1d_med, np.cos(1.375 * 2.0**7 * x))
        out = dyadic_block(mode, 7)
        assert rel_l2(out.samples, mode.samples) <= 1e-10

    def test_pure_mode_vanishes_two_shells_up(self, grid1d_med):
        x = grid1d_med.axis(0)
        mode = Field(grid1d_med, np.cos(1.375 * 2.0**7 * x))
        out = dyadic_block(mode, 9)
        assert np.abs(out.samples).max() <= 1e-12

    def test_unresolved_shell_raises(self, grid1d_small):
        j_bad = max_resolved_shell(grid1d_small) + 1
        f = Field.zeros(grid1d_small)
        with pytest.raises(UnresolvedShell):
            dyadic_block(f, j_bad)

    def test_below_minus_one_rejected(self, grid1d_small):
        with pytest.raises(IllposedError):
            dyadic_block(Field.zeros(grid1d_small), -2)

    def test_partition_of_unity(self, grid1d_med):
        assert partition_of_unity_deviation(grid1d_med) <= 1e-12

    def test_reconstruction_band_limited(self, grid1d_med):
        x = grid1d_med.axis(0)
        f = Field(grid1d_med, np.cos(44.8125 * x) + 0.25 * np.sin(3.0 * x))
        total = decompose(f, max_resolved_shell(grid1d_med)).reconstruct()
        assert rel_l2(total.samples, f.samples) <= 1e-10

    @given(j=st.integers(min_value=-1, max_value=7), gap=st.integers(min_value=2, max_value=4))
    @settings(max_examples=12, deadline=None)
    def test_annihilation_two_apart(self, j, gap, grid1d_med):
        k = j + gap
        if (8.0 / 3.0) * 2.0**k > grid1d_med.nyquist():
            return
        rng = np.random.default_rng(17)
        f = Field(grid1d_med, rng.standard_normal(grid1d_med.shape))
        out = dyadic_block(dyadic_block(f, j), k)
        assert np.abs(out.samples).max() <= 1e-12 * np.abs(f.samples).max()

    def test_multiplier_annulus_support(self, grid1d_med):
        rng = np.random.default_rng(3)
        f = Field(grid1d_med, rng.standard_normal(grid1d_med.shape))
        j = 6
        blocked = dyadic_block(f, j)
        r = grid1d_med.freq_radius()
        outside = (r < 0.75 * 2.0**j) | (r > (8.0 / 3.0) * 2.0**j)
        scale = np.abs(f.spectrum).max()
        assert np.abs(blocked.spectrum[outside]).max() <= 1e-14 * scale


class TestLpNorm:
    def test_constant_sup(self, grid1d_small):
        one = Field(grid1d_small, np.ones(grid1d_small.shape))
        assert lp_norm(one, np.inf) == 1.0

    def test_zero_l1(self, grid1d_small):
        assert lp_norm(Field.zeros(grid1d_small), 1.0) == 0.0

    def test_cosine_l2_against_quadrature_oracle(self, grid1d_small):
        # oracle: dense midpoint quadrature of cos^2 on an unrelated lattice
        m = 1 << 21
        xq = -BOX * np.pi + 2 * BOX * np.pi * (np.arange(m) + 0.5) / m
        oracle = np.sqrt(np.sum(np.cos(xq) ** 2) * (2 * BOX * np.pi / m))
        f = Field(grid1d_small, np.cos(grid1d_small.axis(0)))
        got = lp_norm(f, 2.0)
        assert got == pytest.approx(oracle, rel=1e-12)
        assert got == pytest.approx(np.sqrt(16.0 * np.pi), rel=1e-12)

    def test_refinement_invariance_band_limited(self):
        vals = []
        for n in (1 << 12, 1 << 13):
            g = UniformPeriodicGrid(1, n, BOX)
            f = Field(g, np.cos(11.0 * g.axis(0)) + 0.3 * np.sin(2.5 * g.axis(0)))
            vals.append(lp_norm(f, 2.0))
        assert abs(vals[0] - vals[1]) <= 1e-10 * vals[1]

    @given(c=st.floats(min_value=-8.0, max_value=8.0),
           p=st.sampled_from([1.0, 2.0, 3.0, np.inf]))
    @settings(max_examples=20, deadline=None)
    def test_homogeneity(self, c, p):
        g = UniformPeriodicGrid(1, 64, BOX)
        rng = np.random.default_rng(5)
        f = rng.standard_normal(g.shape)
        assert lp_norm(Field(g, c * f), p) == pytest.approx(
            abs(c) * lp_norm(Field(g, f), p), rel=1e-12, abs=1e-300)


class TestBesovNorm:
    def test_zero_field(self, grid1d_small):
        assert besov_norm(Field.zeros(grid1d_small), BesovIndex(2.0, 2.0), 5) == 0.0

    def test_single_mode_brute_force(self, grid1d_med):
        # grid frequency 1.40625 * 2^5 = 45; only shell 5 should fire
        g = grid1d_med
        j = 5
        mode = Field(g, np.cos(1.40625 * 2.0**j * g.axis(0)))
        idx = BesovIndex(2.0, 2.0)
        per_block = [2.0 ** (k * idx.s) * lp_norm(dyadic_block(mode, k), idx.p)
                     for k in range(-1, 9)]
        fired = int(np.argmax(per_block)) - 1
        assert fired == j
        others = sorted(per_block)[:-1]
        assert max(others) <= 1e-10 * per_block[j + 1]
        expected = 2.0 ** (j * idx.s) * lp_norm(mode, idx.p)
        assert besov_norm(mode, idx, 8) == pytest.approx(expected, rel=1e-12)

    def test_monotone_in_j_max(self, grid1d_med, u0_med):
        idx = BesovIndex(2.0, 2.0)
        a = besov_norm(u0_med, idx, 6)
        b = besov_norm(u0_med, idx, 9)
        assert b >= a - 1e-14


class TestCommutator:
    def test_constant_velocity_commutes(self, grid1d_med):
        g = grid1d_med
        f = Field(g, np.sin(1.375 * 2.0**5 * g.axis(0)))
        v = Field(g, np.full(g.shape, 1.7))
        out = commutator(v, f, 5)
        scale = np.abs(f.samples).max()
        assert np.abs(out.samples).max() <= 1e-12 * scale

    def test_against_definitional_oracle(self, grid1d_med):
        # independent implementation with plain numpy transforms
        g = grid1d_med
        x = g.axis(0)
        v = np.cos(1.40625 * 2.0**5 * x) * np.exp(-((x / 30.0) ** 2))
        f = v.copy()
        k = 5

        xi = np.fft.rfftfreq(g.shape[0], d=g.spacing[0]) * 2 * np.pi
        prof = make_cutoff_pair()
        mult = prof.phi_hat(xi / 2.0**k)
        cut = np.abs(xi) <= (2.0 / 3.0) * g.nyquist()

        def dealias_arr(a):
            return np.fft.irfft(np.fft.rfft(a) * cut, n=g.shape[0])

        def block_arr(a):
            return np.fft.irfft(np.fft.rfft(a) * mult, n=g.shape[0])

        fx = np.fft.irfft(1j * xi * np.fft.rfft(f), n=g.shape[0])
        oracle = (block_arr(dealias_arr(dealias_arr(v) * dealias_arr(fx)))
                  - dealias_arr(dealias_arr(v) * dealias_arr(block_arr(fx))))
        got = commutator(Field(g, v), Field(g, f), k)
        assert np.abs(got.samples - oracle).max() <= 1e-10 * max(np.abs(oracle).max(), 1e-30)


class TestFieldIO:
    def test_binary_roundtrip_1d(self, grid1d_small, tmp_path):
        rng = np.random.default_rng(11)
        f = Field(grid1d_small, rng.standard_normal(grid1d_small.shape))
        path = tmp_path / "f.bin"
        write_field(f, path)
        back = read_field(path)
        assert back.grid == f.grid
        assert np.array_equal(back.samples, f.samples)

    @given(n0=st.sampled_from([16, 32]), n1=st.sampled_from([16, 64]),
           seed=st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=10, deadline=None)
    def test_binary_roundtrip_2d(self, n0, n1, seed, tmp_path_factory):
        g = UniformPeriodicGrid(2, (n0, n1), 2.0)
        f = Field(g, np.random.default_rng(seed).standard_normal(g.shape))
        path = tmp_path_factory.mktemp("fields") / "f.bin"
        write_field(f, path)
        back = read_field(path)
        assert back.grid == g
        assert np.array_equal(back.samples, f.samples)

    def test_csv_export(self, tmp_path):
        g = UniformPeriodicGrid(1, 16, 1.0)
        f = Field(g, np.arange(16.0))
        path = tmp_path / "f.csv"
        field_to_csv(f, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "i,value"
        assert lines[1] == "0,0.0"
        assert len(lines) == 17

    def test_header_layout_little_endian(self, tmp_path):
        g = UniformPeriodicGrid(1, 16, 2.0)
        f = Field(g, np.zeros(16))
        path = tmp_path / "f.bin"
        write_field(f, path)
        raw = path.read_bytes()
        assert np.frombuffer(raw[:8], dtype="<i8")[0] == 1
        assert np.frombuffer(raw[8:16], dtype="<i8")[0] == 16
        assert np.frombuffer(raw[16:24], dtype="<f8")[0] == 2.0
        assert len(raw) == 24 + 16 * 8
