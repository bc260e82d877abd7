"""Random matrix models and sampling estimators.

Constructors for the structured modulated-series families (symmetric
zero-diagonal, dense rectangular, sign-flipped, banded Toeplitz), the
quadratic-program rounding step, sampling estimators (entrywise
sparsification, randomized multiplication, kernel random features,
truncated covariance), random submatrices, and random graph Laplacians.

Every sampler is a pure function of (parameters, stream); trial-level
parallelism assigns disjoint streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import ConstraintViolated, InvalidInput, NotPsd, ParameterRange, ZeroMatrix
from .rng import AliasTable, RandomStream
from .stats import SeriesCoefficients

__all__ = [
    "RandomStream",
    "SeriesCoefficients",
    "KernelSpec",
    "SamplerModel",
    "make_wigner",
    "make_rect_gaussian",
    "make_signed",
    "make_toeplitz",
    "sample_series",
    "maxqp_round",
    "maxqp_alpha",
    "sparsify_model",
    "rmm_model",
    "kernel_features_model",
    "covariance_model",
    "sample_estimator",
    "sample_covariance",
    "feature_vector",
    "kernel_matrix",
    "column_submatrix",
    "row_column_submatrix",
    "er_laplacian",
    "compress_laplacian",
]


# ---------------------------------------------------------------------------
# Modulated series families


def make_wigner(d: int) -> SeriesCoefficients:
    """Symmetric zero-diagonal ensemble: coefficients E_jk + E_kj for j < k.

    The variance statistic of the series is d - 1.
    """
    if d < 2:
        raise ParameterRange("need dimension at least 2 for an off-diagonal ensemble")
    ju, ku = np.triu_indices(d, k=1)
    n = ju.size
    idx = np.repeat(np.arange(n, dtype=np.int64), 2)
    rows = np.empty(2 * n, dtype=np.int64)
    cols = np.empty(2 * n, dtype=np.int64)
    rows[0::2], cols[0::2] = ju, ku
    rows[1::2], cols[1::2] = ku, ju
    return SeriesCoefficients((d, d), "gaussian", idx, rows, cols, np.ones(2 * n), n)


def make_rect_gaussian(d1: int, d2: int) -> SeriesCoefficients:
    """Dense rectangular ensemble: one coefficient E_jk per entry.

    The variance statistic of the series is max(d1, d2).
    """
    if d1 < 1 or d2 < 1:
        raise ParameterRange("dimensions must be positive")
    rows, cols = np.divmod(np.arange(d1 * d2, dtype=np.int64), d2)
    idx = np.arange(d1 * d2, dtype=np.int64)
    return SeriesCoefficients((d1, d2), "gaussian", idx, rows, cols, np.ones(d1 * d2), d1 * d2)


def make_signed(b) -> SeriesCoefficients:
    """Sign-flip ensemble of a fixed matrix: coefficients b_jk E_jk.

    Zero entries contribute no coefficient.  The variance statistic is the
    largest squared l2 norm of any row or column of B.
    """
    arr = matcore.as_matrix(b)
    rows, cols = np.nonzero(arr)
    if rows.size == 0:
        raise ZeroMatrix("sign-flip ensemble of the zero matrix is empty")
    idx = np.arange(rows.size, dtype=np.int64)
    return SeriesCoefficients(arr.shape, "rademacher", idx, rows, cols, arr[rows, cols], rows.size)


def make_toeplitz(d: int) -> SeriesCoefficients:
    """Banded-shift ensemble: I plus all up- and down-shift powers.

    Entries of a sample are constant along diagonals.  There are 2d - 1
    coefficients and the variance statistic is d.
    """
    if d < 1:
        raise ParameterRange("dimension must be positive")
    idx_parts = [np.zeros(d, dtype=np.int64)]
    row_parts = [np.arange(d, dtype=np.int64)]
    col_parts = [np.arange(d, dtype=np.int64)]
    coeff = 1
    for k in range(1, d):  # up-shifts C^k
        i = np.arange(d - k, dtype=np.int64)
        idx_parts.append(np.full(d - k, coeff, dtype=np.int64))
        row_parts.append(i)
        col_parts.append(i + k)
        coeff += 1
    for k in range(1, d):  # down-shifts (C^k)^T
        i = np.arange(d - k, dtype=np.int64)
        idx_parts.append(np.full(d - k, coeff, dtype=np.int64))
        row_parts.append(i + k)
        col_parts.append(i)
        coeff += 1
    idx = np.concatenate(idx_parts)
    return SeriesCoefficients(
        (d, d), "gaussian", idx, np.concatenate(row_parts), np.concatenate(col_parts),
        np.ones(idx.size), coeff,
    )


def sample_series(series: SeriesCoefficients, rng: RandomStream) -> np.ndarray:
    """One draw sum_k zeta_k B_k with i.i.d. modulators per the series kind."""
    if series.modulator == "gaussian":
        zeta = rng.normals(series.n_coeffs)
    else:
        zeta = rng.rademacher(series.n_coeffs)
    return series.sample(zeta)


def maxqp_alpha(d1: int, d2: int) -> float:
    """Scaling that makes the expected norm of the rounded matrix at most one."""
    return 1.0 / np.sqrt(2.0 * np.log(d1 + d2))


def maxqp_round(bs, rng: RandomStream, constraint_tol: float = 1e-8) -> np.ndarray:
    """Randomized rounding of a relaxation solution onto the norm ball.

    ``bs`` is a list of matrices (or a prebuilt rademacher series) whose
    squared sums are dominated by the identity on both sides; the rounded
    point is alpha * sum_k rho_k B_k with alpha = 1/sqrt(2 log(d1+d2)).
    """
    series = bs if isinstance(bs, SeriesCoefficients) else SeriesCoefficients.from_matrices(bs, "rademacher")
    g1, g2 = series.gram_pair()
    top = max(float(np.linalg.eigvalsh(g1)[-1]), float(np.linalg.eigvalsh(g2)[-1]))
    if top > 1.0 + constraint_tol:
        raise ConstraintViolated(
            f"coefficient squared sums have norm {top:.6g}; must be dominated by the identity"
        )
    d1, d2 = series.shape
    return maxqp_alpha(d1, d2) * series.sample(rng.rademacher(series.n_coeffs))


# ---------------------------------------------------------------------------
# Kernel specifications


@dataclass(frozen=True)
class KernelSpec:
    """Similarity kernel plus its random feature map.

    ``feature_bound`` bounds the squared feature map: 1 for the sign map
    of the angular kernel, 2 for the sqrt(2) cosine map of the squared
    exponential kernel.
    """

    kind: str
    data: np.ndarray
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in ("angular", "rbf"):
            raise ParameterRange(f"unknown kernel kind {self.kind!r}")
        pts = matcore.as_matrix(self.data, "data points")
        object.__setattr__(self, "data", pts)
        if self.kind == "rbf" and self.alpha <= 0:
            raise ParameterRange("rbf bandwidth alpha must be positive")

    @property
    def feature_bound(self) -> float:
        return 1.0 if self.kind == "angular" else 2.0

    @property
    def n_points(self) -> int:
        return self.data.shape[0]


def kernel_matrix(spec: KernelSpec, psd_tol: float = 1e-8) -> np.ndarray:
    """Tabulate the kernel over the data points; exact unit diagonal."""
    x = spec.data
    if spec.kind == "angular":
        norms = np.linalg.norm(x, axis=1)
        denom = np.outer(norms, norms)
        with np.errstate(invalid="ignore", divide="ignore"):
            cosang = np.where(denom > 0, (x @ x.T) / denom, 0.0)
        g = 2.0 / np.pi * np.arcsin(np.clip(cosang, -1.0, 1.0))
    else:
        sq = np.sum(x * x, axis=1)
        dist2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (x @ x.T), 0.0)
        g = np.exp(-spec.alpha * dist2 / 2.0)
    np.fill_diagonal(g, 1.0)
    g = 0.5 * (g + g.T)
    w = np.linalg.eigvalsh(g)
    if w[0] < -psd_tol * max(1.0, w[-1]):
        raise NotPsd(f"kernel matrix has eigenvalue {w[0]:.3e}")
    return g


def feature_vector(spec: KernelSpec, rng: RandomStream) -> np.ndarray:
    """One random feature evaluated at every data point.

    angular: signs of projections on a uniform direction; rbf: sqrt(2) *
    cos(<x, w> + U) with w ~ normal(0, alpha I) and U uniform on [0, 2pi).
    """
    x = spec.data
    dim = x.shape[1]
    if spec.kind == "angular":
        w = rng.normals(dim)
        w /= np.linalg.norm(w)
        return np.where(x @ w >= 0.0, 1.0, -1.0)
    w = np.sqrt(spec.alpha) * rng.normals(dim)
    shift = 2.0 * np.pi * rng.uniform(1)[0]
    return np.sqrt(2.0) * np.cos(x @ w + shift)


# ---------------------------------------------------------------------------
# Sampling estimator models


@dataclass
class SamplerModel:
    """Unbiased simple estimator of a target matrix.

    kind is one of sparsify / rmm / kernelFeatures / covariance; params
    records the defining data in JSON-serializable form.
    """

    kind: str
    target: np.ndarray
    params: dict = field(default_factory=dict)
    seed: int | None = None
    # kind-specific operational state
    _alias: AliasTable | None = None
    _factor_b: np.ndarray | None = None
    _factor_c: np.ndarray | None = None
    _entries: tuple | None = None
    average_stable_rank: float = 0.0
    kernel_spec: KernelSpec | None = None
    feature_bound: float = 0.0
    truncation: float = 0.0
    _cov_half: np.ndarray | None = None

    def descriptor(self) -> dict:
        return {"kind": self.kind, "params": self.params, "seed": self.seed}


def sparsify_model(b) -> SamplerModel:
    """Entrywise sampling estimator of a fixed matrix.

    Entry (i, j) is drawn with probability mixing its squared-Frobenius
    and absolute-l1 shares, then rescaled to keep the estimator unbiased;
    zero entries are never drawn (the 0/0 = 0 convention).
    """
    arr = matcore.as_matrix(b)
    rows, cols = np.nonzero(arr)
    if rows.size == 0:
        raise ZeroMatrix("cannot sparsify the zero matrix")
    vals = arr[rows, cols]
    fro2 = float(np.sum(arr * arr))
    l1 = float(np.sum(np.abs(arr)))
    probs = 0.5 * (vals**2 / fro2 + np.abs(vals) / l1)
    probs = probs / probs.sum()  # exact renormalization against roundoff
    model = SamplerModel(
        kind="sparsify",
        target=arr,
        params={"matrix": arr.tolist()},
    )
    model._alias = AliasTable(probs)
    model._entries = (rows, cols, vals / probs)
    return model


def rmm_model(b, c, norm_tol: float = 1e-8) -> SamplerModel:
    """Rank-one column/row sampling estimator of a product of unit-norm factors."""
    fb = matcore.as_matrix(b, "left factor")
    fc = matcore.as_matrix(c, "right factor")
    if fb.shape[1] != fc.shape[0]:
        raise ParameterRange(f"inner dimensions {fb.shape[1]} and {fc.shape[0]} differ")
    nb, nc = matcore.spectral_norm(fb), matcore.spectral_norm(fc)
    if abs(nb - 1.0) > norm_tol or abs(nc - 1.0) > norm_tol:
        raise ParameterRange(
            f"factors must have unit spectral norm, got {nb:.6g} and {nc:.6g}"
        )
    col_sq = np.sum(fb * fb, axis=0)
    row_sq = np.sum(fc * fc, axis=1)
    total = col_sq.sum() + row_sq.sum()
    probs = (col_sq + row_sq) / total
    keep = probs > 0  # zero-probability indices carry zero outer products
    kept = probs[keep] / probs[keep].sum()
    model = SamplerModel(
        kind="rmm",
        target=fb @ fc,
        params={"left": fb.tolist(), "right": fc.tolist()},
    )
    model._alias = AliasTable(kept)
    model._entries = (np.nonzero(keep)[0], kept)
    model._factor_b = fb
    model._factor_c = fc
    model.average_stable_rank = 0.5 * (matcore.stable_rank(fb) + matcore.stable_rank(fc))
    return model


def kernel_features_model(spec: KernelSpec) -> SamplerModel:
    """Rank-one random-feature estimator of the kernel matrix."""
    g = kernel_matrix(spec)
    model = SamplerModel(
        kind="kernelFeatures",
        target=g,
        params={"kernel": spec.kind, "alpha": spec.alpha, "points": spec.data.tolist()},
    )
    model.kernel_spec = spec
    model.feature_bound = spec.feature_bound
    return model


def covariance_model(a_half, truncation_b: float) -> SamplerModel:
    """Second-moment estimator of A = A_half A_half^T from truncated draws.

    Draws x = A_half g with standard normal g, rejecting and redrawing
    until the squared length is at most the truncation level.  Rejection
    (rather than scaling) keeps the support bound exact; the residual
    truncation bias is measured, not bounded analytically.
    """
    half = matcore.as_matrix(a_half, "covariance factor")
    target = half @ half.T
    top = float(np.linalg.eigvalsh(target)[-1])
    if truncation_b < top:
        raise ParameterRange(
            f"truncation level {truncation_b:.6g} is below the top eigenvalue {top:.6g}"
        )
    model = SamplerModel(
        kind="covariance",
        target=target,
        params={"factor": half.tolist(), "truncation": truncation_b},
    )
    model.truncation = float(truncation_b)
    model._cov_half = half
    return model


def _draw_covariance_vectors(model: SamplerModel, n: int, rng: RandomStream) -> np.ndarray:
    half = model._cov_half
    p, m = half.shape
    out = np.empty((p, n))
    got = 0
    while got < n:
        chunk = max(n - got, 64)
        g = rng.normals(chunk * m).reshape(m, chunk)
        x = half @ g
        ok = np.sum(x * x, axis=0) <= model.truncation
        take = min(int(ok.sum()), n - got)
        out[:, got : got + take] = x[:, np.nonzero(ok)[0][:take]]
        got += take
    return out


def sample_estimator(model: SamplerModel, n: int, rng: RandomStream) -> np.ndarray:
    """Average of n independent draws of the simple estimator."""
    if n < 1:
        raise ParameterRange("sample count must be positive")
    if model.kind == "sparsify":
        rows, cols, scaled = model._entries
        picks = model._alias.draw(rng, n)
        out = np.zeros(model.target.shape)
        np.add.at(out, (rows[picks], cols[picks]), scaled[picks])
        return out / n
    if model.kind == "rmm":
        keep_idx, keep_probs = model._entries
        picks = model._alias.draw(rng, n)
        counts = np.bincount(picks, minlength=keep_idx.size).astype(np.float64)
        weights = counts / (n * keep_probs)
        cols = keep_idx
        return (model._factor_b[:, cols] * weights) @ model._factor_c[cols, :]
    if model.kind == "kernelFeatures":
        spec = model.kernel_spec
        x = spec.data
        dim = x.shape[1]
        if spec.kind == "angular":
            w = rng.normals(n * dim).reshape(n, dim)
            w /= np.linalg.norm(w, axis=1, keepdims=True)
            z = np.where(x @ w.T >= 0.0, 1.0, -1.0)
        else:
            w = np.sqrt(spec.alpha) * rng.normals(n * dim).reshape(n, dim)
            shift = 2.0 * np.pi * rng.uniform(n)
            z = np.sqrt(2.0) * np.cos(x @ w.T + shift)
        return (z @ z.T) / n
    if model.kind == "covariance":
        x = _draw_covariance_vectors(model, n, rng)
        return (x @ x.T) / n
    raise InvalidInput(f"cannot sample model kind {model.kind!r}")


def draw_one(model: SamplerModel, rng: RandomStream) -> np.ndarray:
    """A single simple-estimator draw R (rank one or one nonzero entry)."""
    if model.kind == "kernelFeatures":
        z = feature_vector(model.kernel_spec, rng)
        return np.outer(z, z)
    return sample_estimator(model, 1, rng)


def sample_covariance(model: SamplerModel, n: int, rng: RandomStream) -> np.ndarray:
    """Empirical second moment of n truncated draws."""
    if model.kind != "covariance":
        raise InvalidInput("sample_covariance needs a covariance model")
    return sample_estimator(model, n, rng)


# ---------------------------------------------------------------------------
# Random submatrices and random graphs


def column_submatrix(b, p: float, rng: RandomStream) -> np.ndarray:
    """Zero out each column independently, keeping p columns on average."""
    arr = matcore.as_matrix(b)
    n = arr.shape[1]
    if not 0 <= p <= n:
        raise ParameterRange(f"expected column count p must lie in [0, {n}]")
    keep = rng.bernoulli(n, p / n)
    return arr * keep[None, :]


def row_column_submatrix(b, p: float, r: float, rng: RandomStream) -> np.ndarray:
    """Zero out rows (p expected) and columns (r expected) independently."""
    arr = matcore.as_matrix(b)
    d, n = arr.shape
    if not 0 <= p <= d:
        raise ParameterRange(f"expected row count p must lie in [0, {d}]")
    if not 0 <= r <= n:
        raise ParameterRange(f"expected column count r must lie in [0, {n}]")
    keep_rows = rng.bernoulli(d, p / d)
    keep_cols = rng.bernoulli(n, r / n)
    return arr * keep_rows[:, None] * keep_cols[None, :]


def er_laplacian(n: int, p: float, rng: RandomStream) -> np.ndarray:
    """Graph Laplacian of an independent-edge random graph on n vertices."""
    if n < 2:
        raise ParameterRange("need at least two vertices")
    if not 0.0 <= p <= 1.0:
        raise ParameterRange("edge probability must lie in [0, 1]")
    ju, ku = np.triu_indices(n, k=1)
    edges = rng.bernoulli(ju.size, p)
    adj = np.zeros((n, n))
    adj[ju, ku] = edges
    adj += adj.T
    return np.diag(adj.sum(axis=1)) - adj


def compress_laplacian(delta) -> np.ndarray:
    """Compress a Laplacian to the complement of the all-ones direction.

    Uses the fixed Householder reflector sending e/sqrt(n) to the first
    coordinate and drops that coordinate, so the minimum eigenvalue of the
    result equals the second-smallest eigenvalue of the input.
    """
    lap = matcore.require_symmetric(delta, name="laplacian")
    n = lap.shape[0]
    if n < 2:
        raise ParameterRange("compression needs at least two vertices")
    u = np.full(n, 1.0 / np.sqrt(n))
    u[0] -= 1.0
    u /= np.linalg.norm(u)
    house = np.eye(n) - 2.0 * np.outer(u, u)
    r = house[1:, :]
    return r @ lap @ r.T
