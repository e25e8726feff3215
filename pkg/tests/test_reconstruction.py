"""Reduced-matrix reconstruction pipeline tests."""

import numpy as np
import pytest

from lcsvd import (
    SnapshotMatrix,
    SyntheticSpec,
    TruncationRule,
    apply_plan,
    gen_exact_rank,
    gen_noisy,
    lcsvd_run,
    make_plan_equidistant,
    make_plan_from_rows,
    make_plan_random,
    rrmse,
    sign_alignment,
    svd_truncated,
)


def _exact_rank_matrix(j=400, k=60, r=5, seed=1):
    return gen_exact_rank(SyntheticSpec(kind="exact_rank", j=j, k=k, rank=r, seed=seed))


class TestLcsvdRun:
    def test_full_plan_full_rank_recovers_input(self):
        rng = np.random.default_rng(0)
        m = SnapshotMatrix(values=rng.standard_normal((30, 12)))
        plan = make_plan_equidistant(30, 12, 30, 12)
        res = lcsvd_run(apply_plan(m, plan), "modes:12")
        rel = np.linalg.norm(res.reconstruction - m.values) / np.linalg.norm(m.values)
        assert rel < 1e-10

    def test_exact_low_rank_recovery(self):
        m = _exact_rank_matrix()
        plan = make_plan_random(m.j, m.k, 25, m.k, seed=3)
        res = lcsvd_run(apply_plan(m, plan), "modes:5")
        assert rrmse(m.values, res.reconstruction) < 1e-10

    def test_exact_recovery_with_column_reduction(self):
        m = _exact_rank_matrix(j=300, k=80, r=4, seed=9)
        plan = make_plan_random(m.j, m.k, 12, 20, seed=5)
        res = lcsvd_run(apply_plan(m, plan), "modes:4")
        assert rrmse(m.values, res.reconstruction) < 1e-10

    def test_reconstruction_is_declared_product(self):
        m = _exact_rank_matrix(seed=2)
        plan = make_plan_random(m.j, m.k, 20, m.k, seed=1)
        res = lcsvd_run(apply_plan(m, plan), "modes:5")
        s = res.reduced_factorization.singular_values
        again = (res.recovered_modes * s) @ res.recovered_coefficients.T
        np.testing.assert_array_equal(res.reconstruction, again)

    def test_matches_standard_svd_under_identity_plan(self):
        rng = np.random.default_rng(12)
        a = rng.standard_normal((80, 40))
        m = SnapshotMatrix(values=a)
        plan = make_plan_equidistant(80, 40, 80, 40)
        for n in (3, 10):
            res = lcsvd_run(apply_plan(m, plan), TruncationRule(n_modes=n))
            direct = svd_truncated(a, TruncationRule(n_modes=n)).reconstruct()
            rel = np.linalg.norm(res.reconstruction - direct) / np.linalg.norm(a)
            assert rel < 1e-8

    def test_error_nonincreasing_in_mode_count(self):
        m = gen_noisy(
            SyntheticSpec(kind="noisy_low_rank", j=200, k=50, rank=6, noise_level=0.05, seed=4)
        )
        plan = make_plan_random(m.j, m.k, 40, m.k, seed=8)
        red = apply_plan(m, plan)
        errs = [
            rrmse(m.values, lcsvd_run(red, TruncationRule(n_modes=n)).reconstruction)
            for n in range(1, 12)
        ]
        diffs = np.diff(errs)
        assert np.all(diffs <= 1e-12)

    def test_reorthonormalization_idempotent(self):
        m = _exact_rank_matrix(seed=6)
        plan = make_plan_random(m.j, m.k, 30, m.k, seed=2)
        red = apply_plan(m, plan)
        once = lcsvd_run(red, "modes:5")
        w = once.reduced_factorization.modes
        t = once.reduced_factorization.coefficients
        # factors are already orthonormal; a second pass must be a no-op
        from lcsvd.reconstruction import _reorthonormalize

        np.testing.assert_allclose(_reorthonormalize(w), w, atol=1e-12)
        np.testing.assert_allclose(_reorthonormalize(t), t, atol=1e-12)

    def test_recovery_shapes(self):
        m = _exact_rank_matrix(j=120, k=40, r=3, seed=5)
        plan = make_plan_random(m.j, m.k, 10, 20, seed=4)
        res = lcsvd_run(apply_plan(m, plan), "modes:3")
        assert res.recovered_modes.shape == (120, 3)
        assert res.recovered_coefficients.shape == (40, 3)
        assert res.reconstruction.shape == (120, 40)

    def test_ill_conditioned_sigma_rejected(self):
        from lcsvd import TruncatedFactorization, recover_modes

        q = np.linalg.qr(np.random.default_rng(0).standard_normal((12, 2)))[0]
        t = np.linalg.qr(np.random.default_rng(1).standard_normal((8, 2)))[0]
        fact = TruncatedFactorization(
            modes=q, singular_values=np.array([1.0, 1e-16]), coefficients=t
        )
        with pytest.raises(np.linalg.LinAlgError):
            recover_modes(np.random.default_rng(2).standard_normal((30, 8)), fact)

    def test_requested_modes_clamped_to_numerical_rank(self):
        # rank-1 reduced matrix, two modes requested: the noise value is dropped
        u = np.linspace(1.0, 2.0, 40)
        v = np.linspace(1.0, -1.0, 30)
        m = SnapshotMatrix(values=np.outer(u, v))
        plan = make_plan_random(40, 30, 10, 30, seed=0)
        res = lcsvd_run(apply_plan(m, plan), "modes:2")
        assert res.n_retained == 1
        assert rrmse(m.values, res.reconstruction) < 1e-10

    def test_exact_recovery_property_over_seeds(self):
        rng = np.random.default_rng(77)
        for _ in range(10):
            j = int(rng.integers(100, 500))
            k = int(rng.integers(20, 80))
            r = int(rng.integers(1, 9))
            m = _exact_rank_matrix(j=j, k=k, r=r, seed=int(rng.integers(1 << 30)))
            rows = np.sort(rng.choice(j, size=r + 8, replace=False))
            plan = make_plan_from_rows(rows, k)
            res = lcsvd_run(apply_plan(m, plan), TruncationRule(n_modes=r))
            assert rrmse(m.values, res.reconstruction) < 1e-8


class TestSignAlignment:
    def test_fresh_factorization_all_positive(self):
        a = np.random.default_rng(3).standard_normal((20, 10))
        f = svd_truncated(a, "modes:6")
        signs = sign_alignment(f.modes, a, f.coefficients)
        np.testing.assert_array_equal(signs, np.ones(6))

    def test_single_planted_flip(self):
        a = np.random.default_rng(4).standard_normal((20, 10))
        f = svd_truncated(a, "modes:5")
        t = f.coefficients.copy()
        t[:, 2] *= -1.0
        signs = sign_alignment(f.modes, a, t)
        np.testing.assert_array_equal(signs, [1, 1, -1, 1, 1])

    def test_planted_flips_detected_over_seeds(self):
        rng = np.random.default_rng(2718)
        for _ in range(25):
            m = int(rng.integers(8, 40))
            n = int(rng.integers(4, min(m, 20)))
            a = rng.standard_normal((m, n))
            f = svd_truncated(a, TruncationRule(n_modes=min(4, n)))
            flips = rng.integers(0, 2, size=f.n_retained) * -2 + 1
            t = f.coefficients * flips
            signs = sign_alignment(f.modes, a, t)
            np.testing.assert_array_equal(signs, flips)

    def test_sign_of_zero_is_positive(self):
        w = np.zeros((3, 1))
        v = np.zeros((3, 3))
        t = np.zeros((3, 1))
        np.testing.assert_array_equal(sign_alignment(w, v, t), [1.0])
