"""Synthetic generator tests: exact ranks, spectra, determinism."""

import numpy as np
import pytest

from lcsvd import (
    SyntheticSpec,
    TruncationRule,
    apply_plan,
    flatten,
    gen_exact_rank,
    gen_noisy,
    gen_oscillatory_wake,
    lcsvd_run,
    make_plan_equidistant,
    rrmse,
    svd_truncated,
)


class TestExactRank:
    def test_rank_one_minors_vanish(self):
        m = gen_exact_rank(SyntheticSpec(kind="exact_rank", j=30, k=12, rank=1, seed=0))
        v = m.values
        scale = np.abs(v).max() ** 2
        rng = np.random.default_rng(1)
        for _ in range(200):
            i, p = rng.choice(30, 2, replace=False)
            j, q = rng.choice(12, 2, replace=False)
            minor = v[i, j] * v[p, q] - v[i, q] * v[p, j]
            assert abs(minor) < 1e-10 * scale

    def test_spectrum_gap(self):
        m = gen_exact_rank(SyntheticSpec(kind="exact_rank", j=400, k=60, rank=5, seed=3))
        s = np.linalg.svd(m.values, compute_uv=False)
        assert s[4] / s[0] > 1e-6
        assert s[5] / s[0] < 1e-10

    def test_determinism(self):
        spec = SyntheticSpec(kind="exact_rank", j=50, k=20, rank=3, seed=42)
        np.testing.assert_array_equal(gen_exact_rank(spec).values, gen_exact_rank(spec).values)

    def test_rank_validation(self):
        with pytest.raises(ValueError):
            SyntheticSpec(kind="exact_rank", j=10, k=5, rank=6)


class TestNoisy:
    def test_zero_noise_matches_exact_bitwise(self):
        clean = SyntheticSpec(kind="exact_rank", j=40, k=15, rank=4, seed=5)
        noisy = SyntheticSpec(kind="noisy_low_rank", j=40, k=15, rank=4, seed=5)
        np.testing.assert_array_equal(gen_exact_rank(clean).values, gen_noisy(noisy).values)

    def test_noise_floor_in_spectrum(self):
        spec = SyntheticSpec(
            kind="noisy_low_rank", j=400, k=60, rank=5, noise_level=0.1, seed=7
        )
        s = np.linalg.svd(gen_noisy(spec).values, compute_uv=False)
        assert s[5] / s[4] < 0.5

    def test_noise_scale(self):
        spec = SyntheticSpec(
            kind="noisy_low_rank", j=500, k=100, rank=3, noise_level=0.05, seed=2
        )
        clean = gen_exact_rank(
            SyntheticSpec(kind="exact_rank", j=500, k=100, rank=3, seed=2)
        )
        noise = gen_noisy(spec).values - clean.values
        rel = np.linalg.norm(noise) / np.linalg.norm(clean.values)
        assert rel == pytest.approx(0.05, rel=0.05)

    def test_reconstruction_error_tracks_noise_fraction(self):
        spec = SyntheticSpec(
            kind="noisy_low_rank", j=300, k=80, rank=5, noise_level=0.1, seed=9
        )
        m = gen_noisy(spec)
        plan = make_plan_equidistant(m.j, m.k, m.j, m.k)  # full plan: pure truncation
        res = lcsvd_run(apply_plan(m, plan), TruncationRule(n_modes=5))
        err = rrmse(m.values, res.reconstruction) / 100.0
        assert 0.05 < err < 0.2  # within a factor 2 of the 10% noise fraction


class TestOscillatoryWake:
    def test_rank_bound(self):
        spec = SyntheticSpec(kind="oscillatory_wake", shape=(2, 40, 30), k=64, rank=2, seed=1)
        fact = svd_truncated(flatten(gen_oscillatory_wake(spec)), 1e-8)
        assert fact.n_retained <= 3

    def test_time_mean_removal_drops_rank_by_one(self):
        spec = SyntheticSpec(kind="oscillatory_wake", shape=(2, 36, 24), k=60, rank=4, seed=2)
        m = flatten(gen_oscillatory_wake(spec)).values
        full = np.linalg.matrix_rank(m, tol=1e-8 * np.linalg.norm(m, 2))
        centered = m - m.mean(axis=1, keepdims=True)
        cent = np.linalg.matrix_rank(centered, tol=1e-8 * np.linalg.norm(m, 2))
        assert cent == full - 1

    def test_zero_amplitude_constant_field(self):
        spec = SyntheticSpec(
            kind="oscillatory_wake", shape=(2, 20, 16), k=32, rank=2, amplitude=0.0, seed=3
        )
        fact = svd_truncated(flatten(gen_oscillatory_wake(spec)), 1e-10)
        assert fact.n_retained == 1

    def test_bounded_and_smooth_scale(self):
        spec = SyntheticSpec(kind="oscillatory_wake", shape=(2, 30, 20), k=40, rank=6, seed=4)
        t = gen_oscillatory_wake(spec)
        assert np.abs(t.values).max() < 1.0 + 3 * 1.0 + 1.0  # mean + waves head-room
        assert t.u_inf == 1.0

    def test_determinism(self):
        spec = SyntheticSpec(kind="oscillatory_wake", shape=(2, 24, 18), k=36, rank=4, seed=5)
        a = gen_oscillatory_wake(spec)
        b = gen_oscillatory_wake(spec)
        np.testing.assert_array_equal(a.values, b.values)

    def test_requires_two_components(self):
        with pytest.raises(ValueError):
            gen_oscillatory_wake(
                SyntheticSpec(kind="oscillatory_wake", shape=(3, 10, 10), k=20, rank=2)
            )
