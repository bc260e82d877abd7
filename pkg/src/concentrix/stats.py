"""Scale statistics consumed by the bound evaluators.

The central object is the variance statistic of a random matrix sum,
v = max(||sum_k B_k B_k^T||, ||sum_k B_k^T B_k||) for a modulated series,
together with uniform summand bounds, mean statistics for sums of
positive-semidefinite summands, per-sample second moments of sampling
estimators, and intrinsic-dimension bundles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import (
    DimMismatch,
    NotPsd,
    ShapeMismatch,
    TooFewSamples,
    UnsupportedModel,
)
from .rng import RandomStream

_DENSE_NNZ_CUTOFF = 256  # coefficients denser than this use BLAS paths


@dataclass(frozen=True)
class VarianceStats:
    """Variance statistic bundle (v, L, d1, d2) plus optional weak variance."""

    v: float
    L: float | None
    d1: int
    d2: int
    v_weak: float | None = None

    def __post_init__(self):
        if self.v < 0:
            raise ValueError(f"variance statistic must be nonnegative, got {self.v}")
        if self.v_weak is not None and self.v_weak > self.v + 1e-9:
            raise ValueError("weak variance cannot exceed the variance statistic")


@dataclass(frozen=True)
class ChernoffStats:
    """Extreme eigenvalues of the summand mean plus the uniform bound L."""

    mu_min: float
    mu_max: float
    L: float
    dim: int

    def __post_init__(self):
        if not 0 <= self.mu_min <= self.mu_max:
            raise ValueError(f"need 0 <= mu_min <= mu_max, got {self.mu_min}, {self.mu_max}")
        if self.L <= 0:
            raise ValueError("uniform bound L must be positive")


@dataclass(frozen=True)
class IntrinsicStats:
    """Intrinsic-dimension bundle for the dimension-reduced bounds."""

    int_dim: float
    v: float
    L: float
    mu_max: float | None = None

    def __post_init__(self):
        if self.int_dim < 1:
            raise ValueError(f"intrinsic dimension must be >= 1, got {self.int_dim}")


class SeriesCoefficients:
    """Fixed coefficients of a modulated matrix series, stored as triplets.

    The flat (index, row, col, value) arrays keep memory proportional to
    the number of nonzeros, which matters for the structured families
    where thousands of coefficients each touch a couple of entries.
    Instances are immutable by convention after construction.
    """

    def __init__(self, shape, modulator, idx, rows, cols, vals, n_coeffs):
        if modulator not in ("gaussian", "rademacher"):
            raise ValueError(f"unknown modulator {modulator!r}")
        if n_coeffs < 1:
            raise ShapeMismatch("coefficient list must be nonempty")
        self.shape = (int(shape[0]), int(shape[1]))
        self.modulator = modulator
        self.idx = np.asarray(idx, dtype=np.int64)
        self.rows = np.asarray(rows, dtype=np.int64)
        self.cols = np.asarray(cols, dtype=np.int64)
        self.vals = np.asarray(vals, dtype=np.float64)
        self.n_coeffs = int(n_coeffs)
        order = np.lexsort((self.cols, self.rows, self.idx))
        self.idx = self.idx[order]
        self.rows = self.rows[order]
        self.cols = self.cols[order]
        self.vals = self.vals[order]
        self._offsets = np.searchsorted(self.idx, np.arange(self.n_coeffs + 1))
        self.symmetric = self._detect_symmetric()

    @classmethod
    def from_matrices(cls, matrices, modulator) -> "SeriesCoefficients":
        """Build from an explicit list of dense coefficient matrices."""
        mats = [matcore.as_matrix(m, f"coefficient {k}") for k, m in enumerate(matrices)]
        if not mats:
            raise ShapeMismatch("coefficient list must be nonempty")
        shape = mats[0].shape
        for k, m in enumerate(mats):
            if m.shape != shape:
                raise ShapeMismatch(
                    f"coefficient {k} has shape {m.shape}, expected {shape}"
                )
        idx, rows, cols, vals = [], [], [], []
        for k, m in enumerate(mats):
            r, c = np.nonzero(m)
            idx.append(np.full(r.size, k, dtype=np.int64))
            rows.append(r)
            cols.append(c)
            vals.append(m[r, c])
        return cls(
            shape,
            modulator,
            np.concatenate(idx) if idx else np.empty(0, dtype=np.int64),
            np.concatenate(rows),
            np.concatenate(cols),
            np.concatenate(vals),
            len(mats),
        )

    def _detect_symmetric(self) -> bool:
        d1, d2 = self.shape
        if d1 != d2:
            return False
        fwd = np.lexsort((self.cols, self.rows, self.idx))
        rev = np.lexsort((self.rows, self.cols, self.idx))
        same_support = (
            np.array_equal(self.idx[fwd], self.idx[rev])
            and np.array_equal(self.rows[fwd], self.cols[rev])
            and np.array_equal(self.cols[fwd], self.rows[rev])
        )
        return bool(same_support and np.allclose(self.vals[fwd], self.vals[rev], atol=0.0))

    def _slice(self, k: int) -> slice:
        return slice(self._offsets[k], self._offsets[k + 1])

    def dense_coefficient(self, k: int) -> np.ndarray:
        out = np.zeros(self.shape)
        s = self._slice(k)
        out[self.rows[s], self.cols[s]] = self.vals[s]
        return out

    def dense_coefficients(self):
        for k in range(self.n_coeffs):
            yield self.dense_coefficient(k)

    def sample(self, zeta: np.ndarray) -> np.ndarray:
        """Evaluate sum_k zeta_k B_k for a given modulator vector."""
        if zeta.shape != (self.n_coeffs,):
            raise ShapeMismatch(f"modulator vector must have length {self.n_coeffs}")
        out = np.zeros(self.shape)
        np.add.at(out, (self.rows, self.cols), self.vals * zeta[self.idx])
        return out

    def _dup_coeffs(self, key: np.ndarray) -> np.ndarray:
        """Coefficient indices where `key` repeats within the coefficient."""
        order = np.lexsort((key, self.idx))
        kk = self.idx[order]
        qq = key[order]
        dup = (kk[1:] == kk[:-1]) & (qq[1:] == qq[:-1])
        return np.unique(kk[1:][dup])

    def gram_pair(self) -> tuple[np.ndarray, np.ndarray]:
        """(sum_k B_k B_k^T, sum_k B_k^T B_k) as dense symmetric matrices."""
        d1, d2 = self.shape
        g1 = np.zeros((d1, d1))
        g2 = np.zeros((d2, d2))
        slow = set(self._dup_coeffs(self.cols)) | set(self._dup_coeffs(self.rows))
        fast = ~np.isin(self.idx, np.fromiter(slow, dtype=np.int64)) if slow else np.ones(
            self.idx.size, dtype=bool
        )
        # coefficients with distinct rows and cols contribute only to diagonals
        sq = self.vals[fast] ** 2
        np.add.at(np.einsum("ii->i", g1), self.rows[fast], sq)
        np.add.at(np.einsum("ii->i", g2), self.cols[fast], sq)
        for k in sorted(slow):
            s = self._slice(k)
            if s.stop - s.start >= _DENSE_NNZ_CUTOFF:
                b = self.dense_coefficient(k)
                g1 += b @ b.T
                g2 += b.T @ b
                continue
            r, c, v = self.rows[s], self.cols[s], self.vals[s]
            for key, out, other in ((c, g1, r), (r, g2, c)):
                for val in np.unique(key):
                    pick = key == val
                    out[np.ix_(other[pick], other[pick])] += np.outer(v[pick], v[pick])
        return g1, g2

    def coefficient_norms(self) -> np.ndarray:
        """Spectral norm of each coefficient."""
        out = np.zeros(self.n_coeffs)
        slow = set(self._dup_coeffs(self.cols)) | set(self._dup_coeffs(self.rows))
        fast = ~np.isin(self.idx, np.fromiter(slow, dtype=np.int64)) if slow else np.ones(
            self.idx.size, dtype=bool
        )
        # distinct rows and cols make the coefficient a scaled partial
        # permutation, whose norm is the largest entry magnitude
        np.maximum.at(out, self.idx[fast], np.abs(self.vals[fast]))
        for k in sorted(slow):
            s = self._slice(k)
            r = self.rows[s]
            c = self.cols[s]
            ru, ri = np.unique(r, return_inverse=True)
            cu, ci = np.unique(c, return_inverse=True)
            block = np.zeros((ru.size, cu.size))
            block[ri, ci] = self.vals[s]
            out[k] = matcore.spectral_norm(block)
        return out


def _psd_norm(g: np.ndarray) -> float:
    """Spectral norm of an (exactly accumulated) PSD Gram matrix.

    Exactly diagonal accumulations keep integer-valued statistics exact.
    """
    diag = np.diag(g)
    if np.count_nonzero(g - np.diag(diag)) == 0:
        return float(np.max(diag)) if diag.size else 0.0
    return float(np.linalg.eigvalsh(g)[-1])


def series_variance(series: SeriesCoefficients) -> VarianceStats:
    """Variance statistic and uniform bound of a modulated matrix series.

    v = max(||sum B_k B_k^T||, ||sum B_k^T B_k||); the two terms coincide
    for symmetric coefficients.  L = max_k ||B_k||.
    """
    g1, g2 = series.gram_pair()
    v = max(_psd_norm(g1), _psd_norm(g2))
    norms = series.coefficient_norms()
    d1, d2 = series.shape
    return VarianceStats(v=v, L=float(np.max(norms)), d1=d1, d2=d2)


def signed_matrix_variance(b) -> VarianceStats:
    """Variance statistic of a matrix with independently sign-flipped entries.

    Equals the largest squared l2 norm achieved by any row or column.
    """
    arr = matcore.as_matrix(b)
    row_sq = np.sum(arr * arr, axis=1)
    col_sq = np.sum(arr * arr, axis=0)
    v = float(max(row_sq.max(), col_sq.max()))
    return VarianceStats(v=v, L=float(np.max(np.abs(arr))), d1=arr.shape[0], d2=arr.shape[1])


def weak_variance_approx(
    series: SeriesCoefficients,
    restarts: int = 8,
    seed: int = 0,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> float:
    """Certified lower bound on the weak variance by alternating maximization.

    The weak variance is sup over unit vectors u, w of sum_k (u^T B_k w)^2.
    Fixing w turns the objective into a Rayleigh quotient for u (and vice
    versa), so each sweep solves a symmetric eigenproblem; the value is
    monotone along sweeps and over restarts.  Reported as a lower bound,
    never claimed exact.
    """
    if restarts < 1:
        raise ValueError("need at least one restart")
    d1, d2 = series.shape
    best = 0.0
    for r in range(restarts):
        rng = RandomStream(seed, stream=r)
        u = rng.normals(d1)
        u /= np.linalg.norm(u)
        w = rng.normals(d2)
        w /= np.linalg.norm(w)
        value = 0.0
        for _ in range(max_iter):
            # rows of p are the vectors B_k w; then M_u = p^T p
            p = np.zeros((series.n_coeffs, d1))
            np.add.at(p, (series.idx, series.rows), series.vals * w[series.cols])
            mu = p.T @ p
            wvals, wvecs = np.linalg.eigh(mu)
            u = wvecs[:, -1]
            q = np.zeros((series.n_coeffs, d2))
            np.add.at(q, (series.idx, series.cols), series.vals * u[series.rows])
            mw = q.T @ q
            wvals, wvecs = np.linalg.eigh(mw)
            w = wvecs[:, -1]
            new_value = float(wvals[-1])
            if new_value - value <= tol * max(1.0, new_value):
                value = new_value
                break
            value = new_value
        best = max(best, value)
    return best


def chernoff_stats(summand_means, L: float, psd_tol: float = 1e-10) -> ChernoffStats:
    """Extreme eigenvalues of the total mean of PSD summands.

    ``summand_means`` is a list of symmetric matrices whose sum must be
    positive semidefinite within tolerance.
    """
    if L <= 0:
        raise ValueError("uniform bound L must be positive")
    mats = [matcore.require_symmetric(m, name=f"summand mean {k}") for k, m in enumerate(summand_means)]
    if not mats:
        raise DimMismatch("need at least one summand mean")
    dim = mats[0].shape[0]
    for k, m in enumerate(mats):
        if m.shape[0] != dim:
            raise DimMismatch(f"summand mean {k} has dimension {m.shape[0]}, expected {dim}")
    total = np.sum(mats, axis=0)
    w = np.linalg.eigvalsh(total)
    scale = max(1.0, float(abs(w[-1])))
    if w[0] < -psd_tol * scale:
        raise NotPsd(f"summand mean total has eigenvalue {w[0]:.3e}")
    return ChernoffStats(mu_min=float(max(w[0], 0.0)), mu_max=float(w[-1]), L=float(L), dim=dim)


def sampler_moments(model) -> tuple[float, float]:
    """Closed-form (m2, L) bounds for a sampling estimator model.

    These are the analytic bounds the tail and expectation theorems
    consume, not exact moments:

    - entrywise sparsification: m2 <= 2 max(d1, d2) ||B||_F^2, L = 2 ||B||_l1
    - randomized multiplication of unit-norm factors: m2 <= 2 asr, L <= asr
    - kernel random features: m2 <= b N ||G||, L = b N
    - truncated covariance sampling: m2 <= B_trunc ||A||, L = B_trunc
    """
    kind = getattr(model, "kind", None)
    if kind == "sparsify":
        b = model.target
        d1, d2 = b.shape
        fro2 = float(np.sum(b * b))
        return 2.0 * max(d1, d2) * fro2, 2.0 * float(np.sum(np.abs(b)))
    if kind == "rmm":
        asr = model.average_stable_rank
        return 2.0 * asr, asr
    if kind == "kernelFeatures":
        n_pts = model.target.shape[0]
        gnorm = float(np.linalg.eigvalsh(model.target)[-1])
        return model.feature_bound * n_pts * gnorm, model.feature_bound * n_pts
    if kind == "covariance":
        anorm = float(np.linalg.eigvalsh(model.target)[-1])
        return model.truncation * anorm, model.truncation
    raise UnsupportedModel(f"no closed-form moments for model kind {kind!r}")


def empirical_variance(samples) -> VarianceStats:
    """Monte Carlo estimate of the variance statistic of a random matrix.

    Uses the biased 1/n normalization (the statistic is defined through
    E[Z Z^T], not a sample-covariance correction) and pairwise reduction
    over the sample axis so results do not depend on summation order.
    """
    stack = np.stack([matcore.as_matrix(s, f"sample {k}") for k, s in enumerate(samples)])
    n = stack.shape[0]
    if n < 2:
        raise TooFewSamples("need at least two samples")
    centered = stack - np.mean(stack, axis=0)
    g1 = np.tensordot(centered, centered, axes=([0, 2], [0, 2])) / n
    g2 = np.tensordot(centered, centered, axes=([0, 1], [0, 1])) / n
    v = max(float(np.linalg.eigvalsh(g1)[-1]), float(np.linalg.eigvalsh(g2)[-1]))
    return VarianceStats(v=v, L=None, d1=stack.shape[1], d2=stack.shape[2])


def intrinsic_from_mean_bound(mean_bound, L: float) -> IntrinsicStats:
    """Intrinsic bundle for PSD sums: intdim and norm of a mean upper bound."""
    m = matcore.require_symmetric(mean_bound, name="mean bound")
    return IntrinsicStats(
        int_dim=matcore.intrinsic_dim(m),
        v=0.0,
        L=float(L),
        mu_max=float(np.linalg.eigvalsh(m)[-1]),
    )


def intrinsic_from_variance_bounds(v1, v2, L: float) -> IntrinsicStats:
    """Intrinsic bundle for centered sums from variance upper bounds V1, V2.

    The dimension is the intrinsic dimension of diag(V1, V2) and the scale
    is max(||V1||, ||V2||).
    """
    m1 = matcore.require_symmetric(v1, name="first variance bound")
    m2 = matcore.require_symmetric(v2, name="second variance bound")
    n1 = float(np.linalg.eigvalsh(m1)[-1])
    n2 = float(np.linalg.eigvalsh(m2)[-1])
    v = max(n1, n2)
    if v <= 0:
        raise NotPsd("variance bounds must have positive norm")
    d = (float(np.trace(m1)) + float(np.trace(m2))) / v
    return IntrinsicStats(int_dim=d, v=v, L=float(L))
