"""Experiment registry tests: dominance across families, runtime, payloads."""

import time

import pytest

from concentrix import bounds
from concentrix.errors import UsageError
from concentrix.experiments import EXPERIMENTS, ExperimentConfig, run_experiment


def _run(experiment, **overrides):
    overrides.setdefault("seed", 3)
    return run_experiment(ExperimentConfig(experiment=experiment, **overrides))


def _verdicts(result):
    return {v["name"]: v for v in result.report["verdicts"]}


class TestConfigValidation:
    def test_unknown_experiment(self):
        with pytest.raises(UsageError):
            ExperimentConfig(experiment="nope")

    def test_dim_cap(self):
        with pytest.raises(UsageError):
            ExperimentConfig(experiment="wigner", dim=4096)

    def test_trials_cap(self):
        with pytest.raises(UsageError):
            ExperimentConfig(experiment="wigner", trials=10**7)


class TestExpectationDominance:
    """The expectation bounds are deterministic theorems: the empirical mean
    must stay below every bound (two standard errors of slack) on each model
    family.  A failure here is an implementation bug, not bad luck."""

    @pytest.mark.parametrize("experiment,overrides", [
        ("wigner", {"dim": 50}),
        ("wigner", {"dim": 100}),
        ("toeplitz", {"dim": 64}),
        ("toeplitz", {"dim": 256}),
        ("rect-gaussian", {"rows": 100, "cols": 100}),
        ("rect-gaussian", {"rows": 50, "cols": 200}),
        ("signed", {"rows": 100, "cols": 100}),
    ])
    def test_series_families(self, experiment, overrides):
        result = _run(experiment, trials=200, **overrides)
        assert _verdicts(result)["series-expectation"]["passed"]

    @pytest.mark.parametrize("experiment", ["sparsify", "rmm", "random-features", "covariance"])
    def test_sampling_families(self, experiment):
        result = _run(experiment, trials=60)
        name = {"sparsify": "sparsify-mean-error", "rmm": "rmm-mean-error",
                "random-features": "features-mean-error",
                "covariance": "covariance-mean-error"}[experiment]
        assert _verdicts(result)[name]["passed"]

    def test_column_submatrix(self):
        result = _run("chernoff-submatrix", trials=100)
        assert result.passed

    def test_wigner_normalized_mean_near_semicircle_edge(self):
        result = _run("wigner", dim=100, trials=200)
        assert 1.7 <= result.report["normalizedMean"] <= 2.05

    def test_second_moment_window(self):
        for experiment, overrides in (("wigner", {"dim": 40}),
                                      ("rect-gaussian", {"rows": 30, "cols": 50})):
            result = _run(experiment, trials=150, **overrides)
            assert _verdicts(result)["second-moment-window"]["passed"]


class TestRuntimeBudget:
    def test_every_experiment_under_a_minute(self):
        timings = {}
        for name in EXPERIMENTS:
            start = time.monotonic()
            _run(name)
            timings[name] = time.monotonic() - start
        worst = max(timings.values())
        assert worst < 60.0, timings


class TestPayloads:
    def test_envelope_schema(self):
        result = _run("maxqp", trials=100)
        env = result.envelope()
        assert env["schemaVersion"] == 1
        assert set(env) == {"schemaVersion", "experiment", "passed", "report"}
        assert "verdicts" in env["report"]

    def test_summary_lines_match_verdicts(self):
        result = _run("er-connectivity", dim=60, trials=40)
        assert len(result.summary) == len(result.report["verdicts"])
        assert all(line.startswith(("[PASS]", "[FAIL]")) for line in result.summary)

    def test_coupon_reports_bound_sweep(self):
        result = _run("coupon", dim=8, trials=60)
        sweep = result.report["boundSweep"]
        # the optimized lower bound changes sign near d log d
        signs = [row["expectationLowerBound"] > 0 for row in sweep]
        assert signs == sorted(signs)  # monotone in n: negative then positive

    def test_intrinsic_strictness(self):
        result = _run("intrinsic-rmm", dim=128, trials=40)
        report = result.report
        assert report["chernoff"]["intrinsic"] < report["chernoff"]["ambient"]
        assert report["bernstein"]["intrinsic"] < report["bernstein"]["ambient"]


class TestComparisonsWithoutDominance:
    """Pairs of bounds the theory does not order: both orderings occur."""

    def test_rosenthal_vs_uniform_bound_form(self):
        orderings = set()
        for mu, L, emax, d in ((1.0, 10.0, 0.01, 10), (1.0, 1.0, 1.0, 10),
                               (5.0, 2.0, 0.1, 4), (0.5, 0.2, 0.2, 100)):
            from concentrix.stats import ChernoffStats
            chern = bounds.chernoff_expectation(
                ChernoffStats(mu_min=mu, mu_max=mu, L=L, dim=d), theta=1.0
            )[1].value
            rosen = bounds.matrix_rosenthal(mu, emax, d).value
            orderings.add(rosen < chern)
        assert orderings == {True, False}

    def test_pinelis_vs_mean_bound(self):
        # the second-moment form wins when the uniform bound is loose
        # relative to the typical summand, and loses otherwise
        orderings = set()
        for v, emax_sq, L in ((1.0, 0.01, 100.0), (1.0, 4.0, 0.1), (0.5, 1.0, 1.0)):
            pin = bounds.rosenthal_pinelis(v, emax_sq, 4, 4).value
            bern = bounds.bernstein_expectation(v, L, 4, 4).value
            orderings.add(pin < bern)
        assert orderings == {True, False}
