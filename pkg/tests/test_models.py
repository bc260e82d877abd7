"""Model constructor and sampler tests: structure, determinism, unbiasedness."""

import math

import numpy as np
import pytest

from concentrix import matcore, models
from concentrix.errors import ConstraintViolated, ParameterRange, ZeroMatrix
from concentrix.rng import AliasTable, RandomStream


class TestRandomStream:
    def test_determinism(self):
        a = RandomStream(42, 7)
        b = RandomStream(42, 7)
        np.testing.assert_array_equal(a.raw(100), b.raw(100))

    def test_streams_are_distinct(self):
        a = RandomStream(42, 0).raw(64)
        b = RandomStream(42, 1).raw(64)
        assert not np.array_equal(a, b)

    def test_position_advances(self):
        s = RandomStream(1)
        first = s.normals(10)
        second = s.normals(10)
        assert not np.array_equal(first, second)
        assert s.position == 2 * (10 + 10) // 2

    def test_uniform_open_interval(self):
        u = RandomStream(3).uniform(10**5)
        assert np.all(u > 0.0) and np.all(u < 1.0)
        assert abs(np.mean(u) - 0.5) < 0.005

    def test_normal_moments(self):
        z = RandomStream(4).normals(2 * 10**5)
        assert abs(np.mean(z)) < 0.01
        assert abs(np.std(z) - 1.0) < 0.01
        assert abs(np.mean(z**3)) < 0.02

    def test_rademacher_values(self):
        r = RandomStream(5).rademacher(10**4)
        assert set(np.unique(r)) == {-1.0, 1.0}
        assert abs(np.mean(r)) < 0.05

    def test_alias_table_frequencies(self):
        p = np.array([0.5, 0.25, 0.125, 0.125])
        table = AliasTable(p)
        draws = table.draw(RandomStream(6), 10**5)
        freq = np.bincount(draws, minlength=4) / 10**5
        np.testing.assert_allclose(freq, p, atol=0.01)

    def test_alias_rejects_bad_tables(self):
        with pytest.raises(ValueError):
            AliasTable(np.array([0.5, 0.4]))


class TestSeriesConstructors:
    def test_wigner_samples_symmetric_zero_diagonal(self):
        series = models.make_wigner(6)
        sample = models.sample_series(series, RandomStream(0))
        np.testing.assert_array_equal(sample, sample.T)
        np.testing.assert_array_equal(np.diag(sample), np.zeros(6))

    def test_wigner_coefficient_count(self):
        assert models.make_wigner(3).n_coeffs == 3

    def test_toeplitz_constant_diagonals(self):
        series = models.make_toeplitz(5)
        sample = models.sample_series(series, RandomStream(1))
        for offset in range(-4, 5):
            diag = np.diagonal(sample, offset)
            assert np.all(diag == diag[0])

    def test_rect_entries_independent_normals(self):
        series = models.make_rect_gaussian(20, 30)
        sample = models.sample_series(series, RandomStream(2))
        assert sample.shape == (20, 30)
        assert abs(np.std(sample) - 1.0) < 0.05

    def test_signed_flips_only_signs(self):
        base = np.array([[1.0, -2.0], [0.0, 3.0]])
        series = models.make_signed(base)
        sample = models.sample_series(series, RandomStream(3))
        np.testing.assert_array_equal(np.abs(sample), np.abs(base))

    def test_single_coefficient_rademacher_is_pm_b(self):
        b = np.array([[1.0, 2.0]])
        series = models.SeriesCoefficients.from_matrices([b], "rademacher")
        seen = set()
        for i in range(32):
            s = models.sample_series(series, RandomStream(9, i))
            assert np.array_equal(s, b) or np.array_equal(s, -b)
            seen.add(s[0, 0])
        assert seen == {1.0, -1.0}


class TestMaxQp:
    def test_single_unit_matrix(self):
        b = np.zeros((3, 4))
        b[0, 0] = 1.0
        z = models.maxqp_round([b], RandomStream(0))
        assert matcore.spectral_norm(z) == pytest.approx(models.maxqp_alpha(3, 4))

    def test_orthogonal_partition_mean_norm(self):
        d, blocks = 16, 4
        mats = []
        for k in range(blocks):
            diag = np.zeros(d)
            diag[4 * k : 4 * (k + 1)] = 1.0
            mats.append(np.diag(diag))
        norms = [
            matcore.spectral_norm(models.maxqp_round(mats, RandomStream(1, i)))
            for i in range(1000)
        ]
        assert np.mean(norms) <= 1.0

    def test_constraint_violation(self):
        with pytest.raises(ConstraintViolated):
            models.maxqp_round([2.0 * np.eye(3)], RandomStream(0))


class TestSparsify:
    def test_degenerate_single_entry(self):
        model = models.sparsify_model(np.array([[1.0]]))
        out = models.sample_estimator(model, 5, RandomStream(0))
        np.testing.assert_array_equal(out, [[1.0]])

    def test_support_size(self):
        rng = np.random.default_rng(0)
        model = models.sparsify_model(rng.normal(size=(12, 9)))
        out = models.sample_estimator(model, 7, RandomStream(1))
        assert np.count_nonzero(out) <= 7

    def test_zero_matrix_rejected(self):
        with pytest.raises(ZeroMatrix):
            models.sparsify_model(np.zeros((2, 2)))

    def test_unbiased_entrywise(self):
        rng = np.random.default_rng(1)
        base = rng.normal(size=(4, 5))
        model = models.sparsify_model(base)
        n = 10**5
        mean = models.sample_estimator(model, n, RandomStream(2))
        rows, cols, scaled = model._entries
        probs = base[rows, cols] / scaled
        var = np.zeros_like(base)
        var[rows, cols] = base[rows, cols] ** 2 * (1.0 / probs - 1.0)
        se = np.sqrt(var / n)
        assert np.all(np.abs(mean - base) <= 4.0 * se + 1e-12)


class TestRmm:
    @staticmethod
    def _unit_factors(seed=3, d1=5, inner=40, d2=6):
        rng = np.random.default_rng(seed)
        b = rng.normal(size=(d1, inner))
        c = rng.normal(size=(inner, d2))
        return b / matcore.spectral_norm(b), c / matcore.spectral_norm(c)

    def test_single_draw_rank_one(self):
        b, c = self._unit_factors()
        model = models.rmm_model(b, c)
        r = models.draw_one(model, RandomStream(4))
        assert np.linalg.matrix_rank(r, tol=1e-10) <= 1

    def test_average_rank_at_most_n(self):
        b, c = self._unit_factors()
        model = models.rmm_model(b, c)
        out = models.sample_estimator(model, 3, RandomStream(5))
        assert np.linalg.matrix_rank(out, tol=1e-10) <= 3

    def test_unbiased_entrywise(self):
        b, c = self._unit_factors()
        model = models.rmm_model(b, c)
        target = b @ c
        n = 10**5
        mean = models.sample_estimator(model, n, RandomStream(6))
        keep_idx, keep_probs = model._entries
        second = np.zeros_like(target)
        for j, pj in zip(keep_idx, keep_probs):
            second += np.outer(b[:, j], c[j, :]) ** 2 / pj
        se = np.sqrt(np.maximum(second - target**2, 0.0) / n)
        assert np.all(np.abs(mean - target) <= 4.0 * se + 1e-12)

    def test_non_unit_factors_rejected(self):
        rng = np.random.default_rng(7)
        with pytest.raises(ParameterRange):
            models.rmm_model(rng.normal(size=(3, 10)), rng.normal(size=(10, 3)))


class TestKernels:
    def test_single_point(self):
        spec = models.KernelSpec(kind="angular", data=np.array([[1.0, 0.0]]))
        np.testing.assert_array_equal(models.kernel_matrix(spec), [[1.0]])

    def test_angular_orthogonal_pair(self):
        spec = models.KernelSpec(kind="angular", data=np.array([[1.0, 0.0], [0.0, 1.0]]))
        g = models.kernel_matrix(spec)
        assert g[0, 1] == pytest.approx(0.0, abs=1e-12)

    def test_angular_entries_bounded_unit_diagonal(self):
        rng = np.random.default_rng(8)
        spec = models.KernelSpec(kind="angular", data=rng.normal(size=(10, 4)))
        g = models.kernel_matrix(spec)
        assert np.all(np.abs(g) <= 1.0)
        np.testing.assert_array_equal(np.diag(g), np.ones(10))

    def test_rbf_formula(self):
        rng = np.random.default_rng(9)
        pts = rng.normal(size=(6, 3))
        alpha = 0.7
        spec = models.KernelSpec(kind="rbf", data=pts, alpha=alpha)
        g = models.kernel_matrix(spec)
        i, j = 1, 4
        want = math.exp(-alpha * float(np.sum((pts[i] - pts[j]) ** 2)) / 2.0)
        assert g[i, j] == pytest.approx(want, rel=1e-10)

    def test_angular_identical_and_antipodal(self):
        spec = models.KernelSpec(kind="angular", data=np.array([[2.0, 1.0], [2.0, 1.0], [-2.0, -1.0]]))
        for trial in range(50):
            z = models.feature_vector(spec, RandomStream(10, trial))
            assert z[0] * z[1] == 1.0
            assert z[0] * z[2] == -1.0

    def test_rbf_entry_monte_carlo(self):
        # kernel entry at squared distance 2/alpha should equal exp(-1)
        alpha = 0.5
        gap = math.sqrt(2.0 / alpha)
        pts = np.array([[0.0, 0.0], [gap, 0.0]])
        spec = models.KernelSpec(kind="rbf", data=pts, alpha=alpha)
        n = 10**5
        model = models.kernel_features_model(spec)
        est = models.sample_estimator(model, n, RandomStream(11))
        want = math.exp(-1.0)
        # single-feature products are bounded by 2, so se <= 2/sqrt(n)
        assert abs(est[0, 1] - want) <= 4 * 2.0 / math.sqrt(n)

    def test_features_unbiased_entrywise(self):
        rng = np.random.default_rng(15)
        spec = models.KernelSpec(kind="rbf", data=rng.normal(size=(6, 3)), alpha=0.4)
        model = models.kernel_features_model(spec)
        n = 10**5
        est = models.sample_estimator(model, n, RandomStream(14))
        # single-feature entry products are bounded by the squared map bound
        tol = 4.0 * spec.feature_bound / math.sqrt(n)
        assert np.max(np.abs(est - model.target)) <= tol

    def test_feature_values_within_bound(self):
        rng = np.random.default_rng(12)
        spec = models.KernelSpec(kind="rbf", data=rng.normal(size=(5, 2)), alpha=1.0)
        z = models.feature_vector(spec, RandomStream(13))
        assert np.all(np.abs(z) <= math.sqrt(2.0))


class TestSubmatrices:
    def test_keep_all(self):
        b = np.arange(12.0).reshape(3, 4)
        np.testing.assert_array_equal(models.column_submatrix(b, 4.0, RandomStream(0)), b)

    def test_keep_none(self):
        b = np.arange(12.0).reshape(3, 4)
        np.testing.assert_array_equal(models.column_submatrix(b, 0.0, RandomStream(0)), 0 * b)

    def test_expected_column_count(self):
        b = np.ones((2, 50))
        counts = []
        for i in range(10**4):
            z = models.column_submatrix(b, 10.0, RandomStream(1, i))
            counts.append(np.count_nonzero(z[0]))
        mean = np.mean(counts)
        se = math.sqrt(50 * 0.2 * 0.8 / 10**4)
        assert abs(mean - 10.0) <= 4 * se

    def test_row_column_zeroing(self):
        b = np.ones((6, 8))
        z = models.row_column_submatrix(b, 3.0, 4.0, RandomStream(2))
        # any surviving entry sits in a surviving row and column
        rows = np.any(z != 0, axis=1)
        cols = np.any(z != 0, axis=0)
        np.testing.assert_array_equal(z, b * rows[:, None] * cols[None, :])

    def test_range_checks(self):
        with pytest.raises(ParameterRange):
            models.column_submatrix(np.ones((2, 3)), 5.0, RandomStream(0))


class TestErLaplacian:
    def test_complete_graph(self):
        lap = models.er_laplacian(7, 1.0, RandomStream(0))
        w = np.linalg.eigvalsh(lap)
        assert w[0] == pytest.approx(0.0, abs=1e-12)
        assert w[1] == pytest.approx(7.0, rel=1e-12)  # second-smallest is n

    def test_empty_graph(self):
        lap = models.er_laplacian(5, 0.0, RandomStream(0))
        np.testing.assert_array_equal(lap, np.zeros((5, 5)))

    def test_kernel_vector_and_psd(self):
        for i in range(20):
            lap = models.er_laplacian(12, 0.4, RandomStream(3, i))
            assert np.linalg.norm(lap @ np.ones(12)) <= 1e-9 * 12
            assert np.linalg.eigvalsh(lap)[0] >= -1e-9

    def test_edge_summand_spectrum(self):
        # each edge summand satisfies T^2 = 2T, so eigenvalues are 0 or 2
        t = np.zeros((5, 5))
        t[1, 1] = t[3, 3] = 1.0
        t[1, 3] = t[3, 1] = -1.0
        np.testing.assert_allclose(t @ t, 2 * t, atol=1e-14)

    def test_compression_properties(self):
        lap = models.er_laplacian(9, 0.5, RandomStream(4))
        y = models.compress_laplacian(lap)
        assert y.shape == (8, 8)
        w_full = np.linalg.eigvalsh(lap)
        w_comp = np.linalg.eigvalsh(y)
        assert w_comp[0] == pytest.approx(w_full[1], abs=1e-9)


class TestCovariance:
    def test_rank_one_single_sample(self):
        rng = np.random.default_rng(13)
        half = rng.normal(size=(4, 4)) / 2.0
        target = half @ half.T
        model = models.covariance_model(half, float(np.trace(target)) + 6.0)
        y = models.sample_covariance(model, 1, RandomStream(5))
        assert np.linalg.matrix_rank(y, tol=1e-10) == 1

    def test_truncation_below_top_eig_rejected(self):
        with pytest.raises(ParameterRange):
            models.covariance_model(np.eye(3), 0.5)

    def test_mean_approaches_target(self):
        rng = np.random.default_rng(14)
        half = rng.normal(size=(3, 3)) / math.sqrt(3)
        target = half @ half.T
        trunc = float(np.trace(target)) + 6.0 * float(np.linalg.eigvalsh(target)[-1])
        model = models.covariance_model(half, trunc)
        est = models.sample_covariance(model, 4 * 10**4, RandomStream(6))
        # truncation bias is recorded as below 1e-3 of the norm at this level
        tol = 4.0 * trunc / math.sqrt(4 * 10**4) + 1e-3 * np.linalg.norm(target, 2)
        assert np.max(np.abs(est - target)) <= tol

    def test_draw_respects_truncation(self):
        half = np.eye(3)
        model = models.covariance_model(half, 4.0)
        x = models._draw_covariance_vectors(model, 500, RandomStream(7))
        assert np.all(np.sum(x * x, axis=0) <= 4.0)


class TestDescriptor:
    def test_round_trip_schema(self):
        model = models.sparsify_model(np.array([[1.0, 0.0], [2.0, 3.0]]))
        desc = model.descriptor()
        assert set(desc) == {"kind", "params", "seed"}
        assert desc["kind"] == "sparsify"
        rebuilt = models.sparsify_model(np.array(desc["params"]["matrix"]))
        out_a = models.sample_estimator(model, 9, RandomStream(8))
        out_b = models.sample_estimator(rebuilt, 9, RandomStream(8))
        np.testing.assert_array_equal(out_a, out_b)
