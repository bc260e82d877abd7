"""Matrix function and trace-inequality tests on seeded random instances."""

import math

import numpy as np
import pytest

from concentrix import matcore, mfunc
from concentrix.errors import DimMismatch, DomainViolation, NotPd, Overflow


def random_pd(rng, dim=4, floor=0.1):
    g = rng.normal(size=(dim, dim))
    return g @ g.T + floor * np.eye(dim)


def random_sym(rng, dim=4):
    g = rng.normal(size=(dim, dim))
    return 0.5 * (g + g.T)


class TestMatrixFunction:
    def test_identity_function(self):
        rng = np.random.default_rng(0)
        a = random_sym(rng)
        np.testing.assert_allclose(mfunc.matrix_function(lambda w: w, a), a, atol=1e-10)

    def test_square_by_explicit_product(self):
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        out = mfunc.matrix_function(lambda w: w**2, a)
        np.testing.assert_allclose(out, a @ a, atol=1e-12)
        np.testing.assert_allclose(out, np.eye(2), atol=1e-12)

    def test_exp_on_diagonal(self):
        out = mfunc.matrix_function(np.exp, np.diag([0.0, math.log(2.0)]))
        np.testing.assert_allclose(out, np.diag([1.0, 2.0]), atol=1e-12)

    def test_domain_violation(self):
        with pytest.raises(DomainViolation):
            mfunc.matrix_function(np.sqrt, np.diag([1.0, -1.0]), domain=(0.0, np.inf))

    def test_spectral_mapping(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a = random_sym(rng, 5)
            out = mfunc.matrix_function(np.tanh, a)
            got = np.sort(np.linalg.eigvalsh(out))
            want = np.sort(np.tanh(np.linalg.eigvalsh(a)))
            np.testing.assert_allclose(got, want, atol=1e-9)


class TestExpLog:
    def test_exp_zero(self):
        np.testing.assert_allclose(mfunc.matrix_exp(np.zeros((3, 3))), np.eye(3), atol=1e-14)

    def test_log_identity(self):
        np.testing.assert_allclose(mfunc.matrix_log(np.eye(3)), np.zeros((3, 3)), atol=1e-14)

    def test_exp_diagonal(self):
        out = mfunc.matrix_exp(np.diag([1.0, -1.0]))
        np.testing.assert_allclose(out, np.diag([math.e, 1.0 / math.e]), rtol=1e-12)

    def test_round_trip(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            a = random_sym(rng, 5)
            back = mfunc.matrix_log(mfunc.matrix_exp(a))
            scale = 1.0 + matcore.spectral_norm(a)
            assert np.max(np.abs(back - a)) <= 1e-8 * scale

    def test_log_rejects_indefinite(self):
        with pytest.raises(NotPd):
            mfunc.matrix_log(np.diag([1.0, -0.5]))

    def test_exp_output_pd(self):
        rng = np.random.default_rng(3)
        a = random_sym(rng, 4)
        assert np.linalg.eigvalsh(mfunc.matrix_exp(a))[0] > 0


class TestTraceExp:
    def test_zero_matrix(self):
        assert mfunc.trace_exp(np.zeros((4, 4))) == pytest.approx(4.0)

    def test_diagonal(self):
        assert mfunc.trace_exp(np.diag([math.log(2.0), math.log(3.0)])) == pytest.approx(5.0)

    def test_shift_identity(self):
        rng = np.random.default_rng(4)
        a = random_sym(rng, 4)
        assert mfunc.trace_exp(a + np.eye(4)) == pytest.approx(math.e * mfunc.trace_exp(a), rel=1e-12)

    def test_monotone_in_psd_order(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            a = random_sym(rng, 4)
            bump = rng.normal(size=(4, 4))
            h = a + bump @ bump.T
            assert mfunc.trace_exp(a) <= mfunc.trace_exp(h) + 1e-9

    def test_overflow_guard(self):
        with pytest.raises(Overflow):
            mfunc.trace_exp(np.diag([800.0, 0.0]))


class TestRelativeEntropy:
    def test_self_is_zero(self):
        rng = np.random.default_rng(6)
        a = random_pd(rng)
        assert mfunc.relative_entropy(a, a) == pytest.approx(0.0, abs=1e-10)

    def test_commuting_diagonal_vector_formula(self):
        # vector relative entropy: sum a_i log(a_i/h_i) - (a_i - h_i)
        got = mfunc.relative_entropy(np.diag([1.0, 2.0]), np.diag([2.0, 1.0]))
        assert got == pytest.approx(math.log(2.0), rel=1e-12)

    def test_scaled_identity(self):
        got = mfunc.relative_entropy(2.0 * np.eye(2), np.eye(2))
        assert got == pytest.approx(4.0 * math.log(2.0) - 2.0, rel=1e-12)

    def test_nonnegative(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            a, h = random_pd(rng), random_pd(rng)
            assert mfunc.relative_entropy(a, h) >= -1e-9 * 4 * (
                matcore.spectral_norm(a) + matcore.spectral_norm(h)
            )

    def test_joint_convexity(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            a1, a2, h1, h2 = (random_pd(rng) for _ in range(4))
            tau = rng.uniform(0.05, 0.95)
            lhs = mfunc.relative_entropy(tau * a1 + (1 - tau) * a2, tau * h1 + (1 - tau) * h2)
            rhs = tau * mfunc.relative_entropy(a1, h1) + (1 - tau) * mfunc.relative_entropy(a2, h2)
            scale = sum(matcore.spectral_norm(m) for m in (a1, a2, h1, h2))
            assert lhs <= rhs + 1e-8 * scale

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            mfunc.relative_entropy(np.eye(2), np.eye(3))


class TestLiebTraceFn:
    def test_zero_identity(self):
        assert mfunc.lieb_trace_fn(np.zeros((5, 5)), np.eye(5)) == pytest.approx(5.0)

    def test_zero_gives_trace(self):
        rng = np.random.default_rng(9)
        a = random_pd(rng)
        assert mfunc.lieb_trace_fn(np.zeros((4, 4)), a) == pytest.approx(np.trace(a), rel=1e-10)

    def test_log2_identity(self):
        out = mfunc.lieb_trace_fn(math.log(2.0) * np.eye(3), np.eye(3))
        assert out == pytest.approx(6.0, rel=1e-12)

    def test_concavity_in_pd_argument(self):
        rng = np.random.default_rng(10)
        h = random_sym(rng)
        for _ in range(25):
            a1, a2 = random_pd(rng), random_pd(rng)
            tau = rng.uniform(0.05, 0.95)
            mix = mfunc.lieb_trace_fn(h, tau * a1 + (1 - tau) * a2)
            split = tau * mfunc.lieb_trace_fn(h, a1) + (1 - tau) * mfunc.lieb_trace_fn(h, a2)
            scale = max(1.0, abs(mix), abs(split))
            assert mix >= split - 1e-8 * scale


class TestVariationalGap:
    def test_zero_at_optimum(self):
        rng = np.random.default_rng(11)
        m = random_pd(rng)
        assert mfunc.variational_trace_gap(m, m) == pytest.approx(0.0, abs=1e-9)

    def test_frozen_example(self):
        got = mfunc.variational_trace_gap(np.eye(2), np.diag([2.0, 1.0]))
        assert got == pytest.approx(2.0 * math.log(2.0) - 1.0, rel=1e-12)

    def test_nonnegative(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            assert mfunc.variational_trace_gap(random_pd(rng), random_pd(rng)) >= -1e-9


class TestGoldenThompson:
    def test_commuting_diagonal(self):
        a, h = np.diag([1.0, -2.0]), np.diag([0.5, 3.0])
        assert mfunc.golden_thompson_gap(a, h) == pytest.approx(0.0, abs=1e-9)

    def test_equal_arguments(self):
        rng = np.random.default_rng(13)
        a = random_sym(rng)
        assert mfunc.golden_thompson_gap(a, a) == pytest.approx(0.0, abs=1e-8)

    def test_noncommuting_positive(self):
        rng = np.random.default_rng(14)
        hits = 0
        for _ in range(20):
            a, h = random_sym(rng, 3), random_sym(rng, 3)
            gap = mfunc.golden_thompson_gap(a, h)
            assert gap >= -1e-9 * max(1.0, mfunc.trace_exp(a + h))
            hits += gap > 0
        assert hits == 20  # generic pairs do not commute


class TestOperatorOrderProperties:
    def test_transfer_rule(self):
        # x <= exp(x - 1) pointwise, with equality only at 1
        rng = np.random.default_rng(15)
        for _ in range(200):
            a = random_sym(rng, 4)
            diff = mfunc.matrix_function(lambda w: np.exp(w - 1.0), a) - a
            assert np.linalg.eigvalsh(diff)[0] >= -1e-9

    def test_log_operator_monotone(self):
        rng = np.random.default_rng(16)
        for _ in range(50):
            a = random_pd(rng)
            bump = rng.normal(size=(4, 2))
            h = a + bump @ bump.T
            diff = mfunc.matrix_log(h) - mfunc.matrix_log(a)
            assert np.linalg.eigvalsh(diff)[0] >= -1e-8

    def test_log_operator_concave_segments(self):
        rng = np.random.default_rng(17)
        a1, a2 = random_pd(rng), random_pd(rng)
        for tau in np.arange(0.1, 0.95, 0.1):
            mix = mfunc.matrix_log(tau * a1 + (1 - tau) * a2)
            split = tau * mfunc.matrix_log(a1) + (1 - tau) * mfunc.matrix_log(a2)
            assert np.linalg.eigvalsh(mix - split)[0] >= -1e-8

    def test_kronecker_log_identity(self):
        rng = np.random.default_rng(18)
        for _ in range(10):
            a, h = random_pd(rng, 3), random_pd(rng, 3)
            lhs = mfunc.matrix_log(matcore.kron(a, h))
            rhs = np.kron(mfunc.matrix_log(a), np.eye(3)) + np.kron(np.eye(3), mfunc.matrix_log(h))
            assert np.max(np.abs(lhs - rhs)) <= 1e-8
