"""Seeded Monte Carlo engine for spectral statistics.

Runs trials of a matrix-valued model over disjoint random substreams,
estimates means and tail frequencies of a chosen spectral statistic, and
checks them against bound evaluations.  Reports are bit-reproducible for
a fixed plan: trial i always uses stream i, statistics are reduced in
index order with pairwise summation, and worker threads only fill a
preallocated slot array.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import matcore
from .bounds import BoundReport
from .rng import RandomStream
from .stats import SeriesCoefficients

_WILSON_Z = 1.959963984540054  # two-sided 95%

STATISTICS = ("spectralNorm", "lambdaMax", "lambdaMin", "deviationNorm")


def worker_count() -> int:
    env = os.environ.get("CONCENTRIX_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class TrialPlan:
    """What to sample, what to measure, and how often."""

    sampler: Callable[[RandomStream], np.ndarray]
    statistic: str
    trials: int
    seed: int
    t_grid: tuple[float, ...] = ()
    target: np.ndarray | None = None

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise ValueError(f"unknown statistic {self.statistic!r}")
        if self.trials < 2:
            raise ValueError("need at least two trials")
        if self.statistic == "deviationNorm" and self.target is None:
            raise ValueError("deviationNorm needs a target matrix")


@dataclass(frozen=True)
class TailEstimate:
    threshold: float
    frequency: float
    wilson_low: float
    wilson_high: float

    def as_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "frequency": self.frequency,
            "wilsonLow": self.wilson_low,
            "wilsonHigh": self.wilson_high,
        }


@dataclass
class McReport:
    """Empirical summary of one trial plan, plus attached bounds and verdicts."""

    statistic: str
    trials: int
    seed: int
    mean: float
    std_error: float
    tails: list[TailEstimate] = field(default_factory=list)
    bounds: list[dict] = field(default_factory=list)
    verdicts: list[dict] = field(default_factory=list)
    values: np.ndarray | None = None

    def as_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "trials": self.trials,
            "seed": self.seed,
            "mean": self.mean,
            "stderr": self.std_error,
            "tails": [t.as_dict() for t in self.tails],
            "bounds": self.bounds,
            "verdicts": self.verdicts,
        }


def wilson_interval(successes: int, n: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """95% score interval for a binomial proportion."""
    if n <= 0:
        return 0.0, 1.0
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _evaluate_statistic(matrix: np.ndarray, statistic: str, target) -> float:
    if statistic == "spectralNorm":
        return matcore.spectral_norm(matrix)
    if statistic == "deviationNorm":
        return matcore.spectral_norm(matrix - target)
    w = np.linalg.eigvalsh(0.5 * (matrix + matrix.T))
    return float(w[-1]) if statistic == "lambdaMax" else float(w[0])


def run_trials(plan: TrialPlan) -> McReport:
    """Execute the plan and summarize the statistic across trials."""
    values = np.empty(plan.trials)

    def one(i: int) -> None:
        rng = RandomStream(plan.seed, stream=i)
        values[i] = _evaluate_statistic(plan.sampler(rng), plan.statistic, plan.target)

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(plan.trials)))
    else:
        for i in range(plan.trials):
            one(i)

    mean = float(np.mean(values))  # numpy reduces pairwise in index order
    std = float(np.std(values, ddof=1))
    report = McReport(
        statistic=plan.statistic,
        trials=plan.trials,
        seed=plan.seed,
        mean=mean,
        std_error=std / math.sqrt(plan.trials),
        values=values,
    )
    for t in sorted(plan.t_grid):
        hits = int(np.sum(values >= t))
        low, high = wilson_interval(hits, plan.trials)
        report.tails.append(TailEstimate(t, hits / plan.trials, low, high))
    return report


def bound_check(report: McReport, expectation_bounds: dict[str, BoundReport] | None = None,
                tail_bounds: dict[float, BoundReport] | None = None) -> list[dict]:
    """Compare the empirical summary against bound evaluations.

    Expectation bounds pass when the empirical mean stays below the bound
    with two standard errors of slack; tail bounds pass when the lower
    Wilson limit of the exceedance frequency stays below the clamped
    bound.  Verdicts are appended to the report and returned.
    """
    verdicts = []
    for name, bound in (expectation_bounds or {}).items():
        passed = report.mean <= bound.value + 2.0 * report.std_error
        ratio = bound.value / report.mean if report.mean > 0 else math.inf
        verdicts.append({
            "name": name,
            "kind": "expectation",
            "bound": bound.value,
            "empirical": report.mean,
            "ratio": ratio,
            "passed": bool(passed),
        })
        report.bounds.append({"name": name, **bound.as_dict()})
    tail_by_threshold = {t.threshold: t for t in report.tails}
    for threshold, bound in (tail_bounds or {}).items():
        est = tail_by_threshold[threshold]
        passed = est.wilson_low <= bound.value
        verdicts.append({
            "name": f"tail@{threshold:g}",
            "kind": "tailProbability",
            "bound": bound.value,
            "empirical": est.frequency,
            "wilsonLow": est.wilson_low,
            "passed": bool(passed),
        })
        report.bounds.append({"name": f"tail@{threshold:g}", **bound.as_dict()})
    report.verdicts.extend(verdicts)
    return verdicts


def khintchine_check(series: SeriesCoefficients, q: int, trials: int, seed: int = 0) -> dict:
    """Monte Carlo check of the even-moment comparison for a symmetric series.

    Estimates E tr Y^(2q) over seeded trials and compares it against
    C_2q tr[(sum_k A_k^2)^q] with C_2q = (2q)!/(2^q q!), the optimal
    constant.  Passes when the estimate is below the right side plus
    three standard errors.
    """
    if not series.symmetric:
        raise ValueError("moment comparison needs symmetric coefficients")
    if not 1 <= q <= 4:
        raise ValueError("q must lie in 1..4")
    g1, _ = series.gram_pair()
    c2q = math.factorial(2 * q) / (2**q * math.factorial(q))
    w = np.linalg.eigvalsh(g1)
    rhs = c2q * float(np.sum(w**q))

    from .models import sample_series  # deferred import; models loads stats first

    samples = np.empty(trials)
    for i in range(trials):
        rng = RandomStream(seed, stream=i)
        y = sample_series(series, rng)
        ev = np.linalg.eigvalsh(y)
        samples[i] = float(np.sum(ev ** (2 * q)))
    estimate = float(np.mean(samples))
    stderr = float(np.std(samples, ddof=1)) / math.sqrt(trials)
    passed = estimate <= rhs + 3.0 * stderr
    return {
        "q": q,
        "constant": c2q,
        "estimate": estimate,
        "stderr": stderr,
        "rhs": rhs,
        "passed": bool(passed),
    }


def connectivity_sweep(n: int, p_list, trials: int, seed: int = 0,
                       gap_tol: float = 1e-8) -> list[dict]:
    """Fraction of connected independent-edge graphs at each edge probability.

    A graph is connected exactly when the second-smallest eigenvalue of
    its Laplacian is strictly positive.
    """
    from .models import er_laplacian

    if n < 3:
        raise ValueError("need at least three vertices")
    out = []
    for j, p in enumerate(p_list):
        hits = 0
        for i in range(trials):
            rng = RandomStream(seed, stream=j * trials + i)
            lap = er_laplacian(n, p, rng)
            w = np.linalg.eigvalsh(lap)
            if w[1] > gap_tol:
                hits += 1
        low, high = wilson_interval(hits, trials)
        out.append({
            "p": float(p),
            "connectedFraction": hits / trials,
            "wilsonLow": low,
            "wilsonHigh": high,
        })
    return out


def report_to_csv_rows(report: McReport) -> list[list[str]]:
    """One row per bound/threshold: plot-ready columns."""
    rows = [["name", "kind", "bound", "empirical", "passed"]]
    for v in report.verdicts:
        rows.append([
            str(v["name"]),
            str(v["kind"]),
            repr(float(v["bound"])),
            repr(float(v["empirical"])),
            str(v["passed"]),
        ])
    return rows
