"""Closed-form concentration-bound evaluators and the generic minimizer.

Every evaluator returns a :class:`BoundReport`.  Tail probabilities are
clamped to [0, 1] with the raw value retained, because a vacuous bound
(raw value above one) is still information.  Natural logarithms are used
throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NumericalFailure, ParameterRange
from .stats import ChernoffStats, IntrinsicStats

_E = math.e


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound: value, provenance, and validity."""

    value: float
    kind: str  # 'expectation' | 'tailProbability'
    formula: str
    raw_value: float
    theta_star: float | None = None
    epsilon: float | None = None
    valid: bool = True
    reason: str = ""

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "kind": self.kind,
            "formula": self.formula,
            "rawValue": self.raw_value,
            "thetaStar": self.theta_star,
            "epsilon": self.epsilon,
            "valid": self.valid,
            "reason": self.reason,
        }


def _expectation(value: float, formula: str, theta: float | None = None,
                 valid: bool = True, reason: str = "") -> BoundReport:
    return BoundReport(value=value, kind="expectation", formula=formula,
                       raw_value=value, theta_star=theta, valid=valid, reason=reason)


def _tail(raw: float, formula: str, theta: float | None = None,
          epsilon: float | None = None, valid: bool = True, reason: str = "") -> BoundReport:
    return BoundReport(value=min(raw, 1.0), kind="tailProbability", formula=formula,
                       raw_value=raw, theta_star=theta, epsilon=epsilon,
                       valid=valid, reason=reason)


def _log_dim(d1: int, d2: int, eig_only: bool) -> float:
    if d1 < 1 or d2 < 1:
        raise ParameterRange("dimensions must be positive")
    if eig_only:
        if d1 != d2:
            raise ParameterRange("eigenvalue-only bounds need a square dimension")
        return math.log(d1)
    return math.log(d1 + d2)


def series_expectation_bound(v: float, d1: int, d2: int, eig_only: bool = False) -> BoundReport:
    """sqrt(2 v log(d1+d2)) for the norm of a modulated matrix series.

    With ``eig_only`` the log uses d alone, the sharper form available for
    the maximum eigenvalue of a symmetric series.
    """
    if v < 0:
        raise ParameterRange("variance statistic must be nonnegative")
    value = math.sqrt(2.0 * v * _log_dim(d1, d2, eig_only))
    return _expectation(value, "series-expectation")


def series_tail_bound(v: float, d1: int, d2: int, t: float) -> BoundReport:
    """(d1+d2) exp(-t^2 / (2v)) for the norm of a modulated series."""
    if t < 0:
        raise ParameterRange("threshold t must be nonnegative")
    if v <= 0:
        raise ParameterRange("variance statistic must be positive")
    raw = (d1 + d2) * math.exp(-t * t / (2.0 * v))
    return _tail(raw, "series-tail", theta=t / v)


def gauss_concentration_tail(v_weak: float, t: float) -> BoundReport:
    """exp(-t^2 / (2 v_weak)): deviation of the norm above its mean."""
    if v_weak <= 0:
        raise ParameterRange("weak variance must be positive")
    if t < 0:
        raise ParameterRange("threshold t must be nonnegative")
    raw = math.exp(-t * t / (2.0 * v_weak))
    return _tail(raw, "gauss-concentration")


def chernoff_expectation(stats: ChernoffStats, theta: float = 1.0) -> tuple[BoundReport, BoundReport]:
    """Expectation bounds for extreme eigenvalues of a PSD sum.

    lower:  E lambda_min >= (1 - e^-theta)/theta * mu_min - L log(d)/theta
    upper:  E lambda_max <= (e^theta - 1)/theta * mu_max + L log(d)/theta

    theta = 1 reproduces the streamlined 0.63/1.72 constants.  The lower
    bound may be negative, which is informative emptiness, not an error.
    """
    if theta <= 0:
        raise ParameterRange("theta must be positive")
    logd = math.log(stats.dim)
    lower = (1.0 - math.exp(-theta)) / theta * stats.mu_min - stats.L * logd / theta
    upper = math.expm1(theta) / theta * stats.mu_max + stats.L * logd / theta
    return (
        _expectation(lower, "chernoff-expectation-lower", theta=theta),
        _expectation(upper, "chernoff-expectation-upper", theta=theta),
    )


def chernoff_tail(stats: ChernoffStats, eps: float) -> tuple[BoundReport, BoundReport]:
    """Tail bounds for extreme eigenvalues of a PSD sum.

    lower tail: P(lambda_min <= (1-eps) mu_min) <= d [e^-eps/(1-eps)^(1-eps)]^(mu_min/L)
    upper tail: P(lambda_max >= (1+eps) mu_max) <= d [e^eps/(1+eps)^(1+eps)]^(mu_max/L)

    The lower form needs eps in [0, 1); above that range the event level is
    negative, the probability is zero, and the report is flagged.
    """
    if eps < 0:
        raise ParameterRange("eps must be nonnegative")
    d = stats.dim
    ratio_min = stats.mu_min / stats.L
    ratio_max = stats.mu_max / stats.L
    if eps < 1.0:
        mexp = -eps - (1.0 - eps) * math.log1p(-eps) if eps > 0 else 0.0
        lower = _tail(d * math.exp(ratio_min * mexp), "chernoff-tail-lower", epsilon=eps)
    else:
        lower = _tail(0.0, "chernoff-tail-lower", epsilon=eps, valid=False,
                      reason="eps >= 1 puts the event level at or below zero")
    pexp = eps - (1.0 + eps) * math.log1p(eps)
    upper = _tail(d * math.exp(ratio_max * pexp), "chernoff-tail-upper", epsilon=eps)
    return lower, upper


def matrix_rosenthal(mu_max: float, exp_max_summand: float, d: int) -> BoundReport:
    """2 mu_max + 8e (E max_k lambda_max(X_k)) log d for a PSD sum.

    Useful when the summands are unbounded or heavy tailed: the expected
    largest summand replaces the uniform bound.
    """
    if mu_max < 0 or exp_max_summand < 0:
        raise ParameterRange("inputs must be nonnegative")
    value = 2.0 * mu_max + 8.0 * _E * exp_max_summand * math.log(d)
    return _expectation(value, "matrix-rosenthal")


def bernstein_expectation(v: float, L: float, d1: int, d2: int, eig_only: bool = False) -> BoundReport:
    """sqrt(2 v log(d1+d2)) + L log(d1+d2)/3 for a bounded zero-mean sum."""
    if v < 0 or L < 0:
        raise ParameterRange("v and L must be nonnegative")
    logd = _log_dim(d1, d2, eig_only)
    value = math.sqrt(2.0 * v * logd) + L * logd / 3.0
    return _expectation(value, "bernstein-expectation")


def bernstein_tail(v: float, L: float, d1: int, d2: int, t: float,
                   eig_only: bool = False) -> BoundReport:
    """(d1+d2) exp(-t^2/2 / (v + Lt/3)) for a bounded zero-mean sum."""
    if t < 0:
        raise ParameterRange("threshold t must be nonnegative")
    if v < 0 or L < 0 or v + L == 0:
        raise ParameterRange("need nonnegative v, L with v + L > 0")
    denom = v + L * t / 3.0
    raw = math.exp(-0.5 * t * t / denom) if denom > 0 else (1.0 if t == 0 else 0.0)
    prefactor = d1 if eig_only and d1 == d2 else d1 + d2
    theta = t / denom if denom > 0 else None
    return _tail(prefactor * raw, "bernstein-tail", theta=theta)


def split_bernstein_tail(v: float, L: float, d1: int, d2: int, t: float) -> BoundReport:
    """Two-regime weakening of the tail: subgaussian below v/L, subexponential above."""
    if t < 0:
        raise ParameterRange("threshold t must be nonnegative")
    if v < 0 or L < 0 or v + L == 0:
        raise ParameterRange("need nonnegative v, L with v + L > 0")
    if L == 0 or (v > 0 and t <= v / L):
        raw = (d1 + d2) * math.exp(-3.0 * t * t / (8.0 * v)) if v > 0 else (
            (d1 + d2) if t == 0 else 0.0
        )
    else:
        raw = (d1 + d2) * math.exp(-3.0 * t / (8.0 * L))
    return _tail(raw, "split-bernstein-tail")


def rosenthal_pinelis(v: float, exp_max_sq: float, d1: int, d2: int) -> BoundReport:
    """Bound on sqrt(E ||Z||^2) via the second moment of the largest summand.

    sqrt(2 e v log(d1+d2)) + 4 e sqrt(E max_k ||S_k||^2) log(d1+d2).
    """
    if v < 0 or exp_max_sq < 0:
        raise ParameterRange("inputs must be nonnegative")
    logd = math.log(d1 + d2)
    value = math.sqrt(2.0 * _E * v * logd) + 4.0 * _E * math.sqrt(exp_max_sq) * logd
    return _expectation(value, "rosenthal-pinelis")


def intdim_chernoff(stats: IntrinsicStats, theta: float = 1.0,
                    eps: float | None = None) -> tuple[BoundReport, BoundReport | None]:
    """Intrinsic-dimension refinement of the PSD-sum upper bounds.

    The ambient dimension is replaced by the intrinsic dimension d of a
    mean upper bound, at the price of 2d inside logarithms and prefactors,
    and of restricting the tail to eps >= L / mu_max.
    """
    if theta <= 0:
        raise ParameterRange("theta must be positive")
    if stats.mu_max is None:
        raise ParameterRange("intrinsic Chernoff needs mu_max in the stats bundle")
    if stats.L <= 0 or stats.mu_max <= 0:
        raise ParameterRange("intrinsic Chernoff needs positive L and mu_max")
    log2d = math.log(2.0 * stats.int_dim)
    expectation = _expectation(
        math.expm1(theta) / theta * stats.mu_max + stats.L * log2d / theta,
        "intdim-chernoff-expectation",
        theta=theta,
    )
    if eps is None:
        return expectation, None
    if eps < 0:
        raise ParameterRange("eps must be nonnegative")
    pexp = eps - (1.0 + eps) * math.log1p(eps)
    raw = 2.0 * stats.int_dim * math.exp(stats.mu_max / stats.L * pexp)
    ok = eps >= stats.L / stats.mu_max
    tail = _tail(raw, "intdim-chernoff-tail", epsilon=eps, valid=ok,
                 reason="" if ok else "tail requires eps >= L / mu_max")
    return expectation, tail


def intdim_bernstein(stats: IntrinsicStats, t: float) -> BoundReport:
    """4 d exp(-t^2/2 / (v + Lt/3)), valid for t >= sqrt(v) + L/3."""
    if t < 0:
        raise ParameterRange("threshold t must be nonnegative")
    denom = stats.v + stats.L * t / 3.0
    raw = 4.0 * stats.int_dim * (math.exp(-0.5 * t * t / denom) if denom > 0 else (1.0 if t == 0 else 0.0))
    ok = t >= math.sqrt(stats.v) + stats.L / 3.0
    return _tail(raw, "intdim-bernstein-tail", valid=ok,
                 reason="" if ok else "tail requires t >= sqrt(v) + L/3")


def intdim_bernstein_expectation(stats: IntrinsicStats) -> BoundReport:
    """Expectation bound integrated from the intrinsic tail, explicit constants.

    sqrt(2 v log(1+d)) + (2/3) L log(1+d) + 4 sqrt(v) + (8/3) L.
    """
    log1d = math.log1p(stats.int_dim)
    value = (
        math.sqrt(2.0 * stats.v * log1d)
        + 2.0 / 3.0 * stats.L * log1d
        + 4.0 * math.sqrt(stats.v)
        + 8.0 / 3.0 * stats.L
    )
    return _expectation(value, "intdim-bernstein-expectation")


def sampling_estimator_expectation(m2: float, L: float, n: int, d1: int, d2: int) -> BoundReport:
    """Mean-error bound for an n-sample average of unbiased simple estimators.

    sqrt(2 m2 log(d1+d2)/n) + 2 L log(d1+d2)/(3n): the bounded-sum bound
    applied to the centered, 1/n-scaled summands.
    """
    if n < 1:
        raise ParameterRange("sample count must be positive")
    inner = bernstein_expectation(m2 / n, 2.0 * L / n, d1, d2)
    return _expectation(inner.value, "sampling-expectation")


def sampling_estimator_tail(m2: float, L: float, n: int, d1: int, d2: int, t: float) -> BoundReport:
    """(d1+d2) exp(-n t^2/2 / (m2 + 2Lt/3)) for the n-sample average error."""
    if n < 1:
        raise ParameterRange("sample count must be positive")
    inner = bernstein_tail(m2 / n, 2.0 * L / n, d1, d2, t)
    return _tail(inner.raw_value, "sampling-tail", theta=inner.theta_star)


# ---------------------------------------------------------------------------
# Generic master-bound minimization


@dataclass(frozen=True)
class CgfModel:
    """Scalar cumulant surrogate g(theta) with its scale parameter.

    kind            g(theta)                     theta domain
    gaussianSeries  theta^2 / 2                  (0, inf)
    rademacherSeries theta^2 / 2                 (0, inf)
    chernoff        (e^(theta L) - 1) / L        (0, inf)
    bernstein       theta^2/2 / (1 - theta L/3)  (0, 3/L)

    ``scale`` multiplies g inside the exponent: the variance statistic for
    the series and bounded-sum kinds, the mean statistic for the PSD kind.
    """

    kind: str
    scale: float
    L: float = 0.0

    def __post_init__(self):
        if self.kind not in ("gaussianSeries", "rademacherSeries", "chernoff", "bernstein"):
            raise ParameterRange(f"unknown cgf model kind {self.kind!r}")
        if self.scale < 0:
            raise ParameterRange("scale parameter must be nonnegative")
        if self.kind in ("chernoff", "bernstein") and self.L <= 0:
            raise ParameterRange(f"{self.kind} model needs a positive uniform bound L")

    def g(self, theta: float) -> float:
        if self.kind in ("gaussianSeries", "rademacherSeries"):
            return 0.5 * theta * theta
        if self.kind == "chernoff":
            return math.expm1(theta * self.L) / self.L
        return 0.5 * theta * theta / (1.0 - theta * self.L / 3.0)

    def theta_domain(self) -> tuple[float, float]:
        if self.kind == "bernstein":
            return 1e-14, (3.0 / self.L) * (1.0 - 1e-9)
        if self.kind == "chernoff":
            return 1e-14, 690.0 / self.L
        return 1e-14, 1e14


def _safe_exp(x: float) -> float:
    if x > 709.0:
        return math.inf
    if x < -745.0:
        return 0.0
    return math.exp(x)


def _golden_minimize(fn, lo: float, hi: float, iters: int = 200, rel_tol: float = 1e-12):
    """Golden-section search over a log-spaced bracket for a unimodal fn."""
    xs = [math.log(lo) + (math.log(hi) - math.log(lo)) * i / 128 for i in range(129)]
    vals = [fn(math.exp(x)) for x in xs]
    k = min(range(len(vals)), key=vals.__getitem__)
    a = xs[max(k - 1, 0)]
    b = xs[min(k + 1, len(xs) - 1)]
    if not (math.isfinite(vals[k])):
        raise NumericalFailure("master-bound objective is not finite on the bracket")
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(math.exp(c)), fn(math.exp(d))
    for _ in range(iters):
        if abs(b - a) <= rel_tol * max(1.0, abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(math.exp(d))
    x = 0.5 * (a + b)
    return math.exp(x), fn(math.exp(x))


def master_bound_minimize(model: CgfModel, dims, t: float | None = None,
                          theta: float | None = None) -> BoundReport:
    """Numerically optimized generic bound for a sum of independent random matrices.

    With ``t`` absent, minimizes (log d + g(theta) scale)/theta over the
    model's theta domain (an expectation bound); with ``t`` given,
    minimizes exp(log d - theta t + g(theta) scale) (a tail bound).
    ``dims`` is a square dimension or a (d1, d2) pair, in which case the
    effective dimension is d1 + d2.  Passing ``theta`` evaluates at that
    point instead of minimizing, which reproduces closed forms stated at
    an inspired rather than optimal theta.
    """
    deff = dims if isinstance(dims, int) else int(dims[0]) + int(dims[1])
    if deff < 1:
        raise ParameterRange("effective dimension must be positive")
    logd = math.log(deff)
    s = model.scale

    if t is None:
        objective = lambda th: (logd + model.g(th) * s) / th
        formula = f"master-expectation-{model.kind}"
        kindname = "expectation"
    else:
        if t < 0:
            raise ParameterRange("threshold t must be nonnegative")
        objective = lambda th: logd - th * t + model.g(th) * s
        formula = f"master-tail-{model.kind}"
        kindname = "tail"

    if theta is not None:
        lo, hi = model.theta_domain()
        if not lo <= theta <= hi:
            raise ParameterRange(f"theta {theta} outside the model domain [{lo:g}, {hi:g}]")
        best_theta, best = theta, objective(theta)
    elif s == 0.0 and t is None:
        best_theta, best = math.inf, 0.0
    elif s == 0.0:
        best_theta, best = math.inf, -math.inf if t > 0 else logd
    else:
        lo, hi = model.theta_domain()
        best_theta, best = _golden_minimize(objective, lo, hi)

    if kindname == "expectation":
        return _expectation(best, formula, theta=best_theta)
    return _tail(_safe_exp(best), formula, theta=best_theta)


def master_chernoff_lower(stats: ChernoffStats, t: float | None = None,
                          theta: float | None = None) -> BoundReport:
    """Minimum-eigenvalue side of the generic bound for PSD sums.

    Uses negative theta = -s: with ``t`` given, minimizes over s > 0 of
    exp(log d + s t + mu_min (e^(-sL) - 1)/L); otherwise maximizes the
    expectation lower bound (mu_min (1 - e^(-sL))/L - log d)/s.
    """
    logd = math.log(stats.dim)
    mu, L = stats.mu_min, stats.L
    if t is None:
        objective = lambda sv: -((mu * (-math.expm1(-sv * L)) / L - logd) / sv)
        if theta is not None:
            s, val = theta, objective(theta)
        else:
            s, val = _golden_minimize(objective, 1e-14, 690.0 / L)
        return _expectation(-val, "master-chernoff-lower-expectation", theta=s)
    objective = lambda sv: logd + sv * t + mu * math.expm1(-sv * L) / L
    if theta is not None:
        s, val = theta, objective(theta)
    else:
        s, val = _golden_minimize(objective, 1e-14, 690.0 / L)
    return _tail(_safe_exp(val), "master-chernoff-lower-tail", theta=s)
