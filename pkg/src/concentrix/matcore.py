"""Dense real matrix primitives.

Norms, symmetric eigendecomposition, the symmetric dilation of a
rectangular matrix, dimension statistics (intrinsic dimension, stable
rank), and the Kronecker product.  Everything operates on plain float64
numpy arrays; the functions validate structure instead of wrapping the
arrays in bespoke classes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NotPsd, NumericalFailure, ZeroMatrix

SYM_TOL = 1e-10


def as_matrix(b, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array."""
    arr = np.asarray(b, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInput(f"{name} must be a nonempty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} contains non-finite entries")
    return arr


def require_symmetric(a, tol: float = SYM_TOL, name: str = "matrix") -> np.ndarray:
    """Validate approximate symmetry and return the symmetrized matrix.

    Asymmetry up to ``tol * max(1, ||A||_F)`` per entry is accepted and
    averaged away; anything larger is rejected.  Averaging guards against
    accumulation noise from long Monte Carlo sums.
    """
    arr = as_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise InvalidInput(f"{name} must be square, got shape {arr.shape}")
    scale = max(1.0, float(np.linalg.norm(arr)))
    gap = np.max(np.abs(arr - arr.T)) if arr.size else 0.0
    if gap > tol * scale:
        raise InvalidInput(f"{name} is not symmetric: max|a_ij - a_ji| = {gap:.3e}")
    return 0.5 * (arr + arr.T)


@dataclass(frozen=True)
class SpectralSummary:
    """Eigenvalues (weakly decreasing), spectral norm, and trace."""

    eigenvalues: np.ndarray
    spectral_norm: float
    trace: float

    def __post_init__(self):
        w = self.eigenvalues
        if np.any(np.diff(w) > 0):
            raise InvalidInput("eigenvalues must be sorted weakly decreasing")


def sym_eig(a) -> tuple[SpectralSummary, np.ndarray]:
    """Full eigendecomposition of a symmetric matrix.

    Returns a spectral summary plus the orthonormal eigenvector matrix Q
    with columns ordered to match the (weakly decreasing) eigenvalues,
    so that ``A == Q @ diag(w) @ Q.T``.
    """
    sym = require_symmetric(a)
    try:
        w, q = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails
        raise NumericalFailure(f"symmetric eigensolver did not converge: {exc}") from exc
    w = w[::-1].copy()
    q = q[:, ::-1].copy()
    snorm = float(max(abs(w[0]), abs(w[-1]))) if w.size else 0.0
    summary = SpectralSummary(eigenvalues=w, spectral_norm=snorm, trace=float(np.sum(w)))
    return summary, q


def eigenvalues_desc(a) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, weakly decreasing."""
    sym = require_symmetric(a)
    return np.linalg.eigvalsh(sym)[::-1]


def hermitian_dilation(b) -> np.ndarray:
    """Embed B into the symmetric block matrix [[0, B], [B^T, 0]].

    The dilation has eigenvalues +/- sigma_i(B) padded with zeros, so its
    largest eigenvalue equals the spectral norm of B.
    """
    arr = as_matrix(b)
    d1, d2 = arr.shape
    out = np.zeros((d1 + d2, d1 + d2))
    out[:d1, d1:] = arr
    out[d1:, :d1] = arr.T
    return out


def _is_square_symmetric(arr: np.ndarray) -> bool:
    if arr.shape[0] != arr.shape[1]:
        return False
    scale = max(1.0, float(np.linalg.norm(arr)))
    return float(np.max(np.abs(arr - arr.T))) <= SYM_TOL * scale


def singular_values(b) -> np.ndarray:
    """Singular values of B, weakly decreasing.

    Computed as the nonnegative eigenvalues of the symmetric dilation,
    which reuses the one eigensolver kernel instead of a separate SVD.
    """
    arr = as_matrix(b)
    d1, d2 = arr.shape
    w = np.linalg.eigvalsh(hermitian_dilation(arr))
    svals = w[::-1][: min(d1, d2)]
    return np.maximum(svals, 0.0)


def spectral_norm(b) -> float:
    """Largest singular value; for symmetric input, max |eigenvalue|."""
    arr = as_matrix(b)
    if _is_square_symmetric(arr):
        w = np.linalg.eigvalsh(0.5 * (arr + arr.T))
        return float(max(abs(w[0]), abs(w[-1])))
    return float(singular_values(arr)[0])


def frobenius_norm(b) -> float:
    return float(np.linalg.norm(as_matrix(b)))


def entrywise_l1(b) -> float:
    return float(np.sum(np.abs(as_matrix(b))))


def schatten1(b) -> float:
    """Sum of singular values."""
    return float(np.sum(singular_values(b)))


def intrinsic_dim(a, psd_tol: float = 1e-10) -> float:
    """trace(A) / ||A|| for a nonzero positive-semidefinite matrix.

    Always lies in [1, rank(A)] and is invariant under positive scaling.
    """
    sym = require_symmetric(a)
    w = np.linalg.eigvalsh(sym)
    snorm = float(max(abs(w[0]), abs(w[-1])))
    if snorm == 0.0:
        raise ZeroMatrix("intrinsic dimension undefined for the zero matrix")
    if w[0] < -psd_tol * snorm:
        raise NotPsd(f"matrix has eigenvalue {w[0]:.3e} below the PSD tolerance")
    return float(np.sum(w)) / snorm


def stable_rank(b) -> float:
    """||B||_F^2 / ||B||^2 for a nonzero matrix; lies in [1, rank(B)]."""
    arr = as_matrix(b)
    fro2 = float(np.sum(arr * arr))
    if fro2 == 0.0:
        raise ZeroMatrix("stable rank undefined for the zero matrix")
    return fro2 / spectral_norm(arr) ** 2


def kron(a, h) -> np.ndarray:
    """Kronecker product of two symmetric matrices.

    Satisfies the mixed-product rule (A1 (x) H1)(A2 (x) H2) = (A1 A2) (x) (H1 H2)
    and preserves positive definiteness.
    """
    left = require_symmetric(a, name="left factor")
    right = require_symmetric(h, name="right factor")
    return np.kron(left, right)


def save_matrix_text(path, b) -> None:
    """Write a matrix in the fixture text format.

    First line "rows cols", then one line per row of space-separated
    decimal entries at 17 significant digits (full float64 round trip).
    """
    arr = as_matrix(b)
    rows, cols = arr.shape
    with open(path, "w") as fh:
        fh.write(f"{rows} {cols}\n")
        for r in range(rows):
            fh.write(" ".join(f"{x:.17g}" for x in arr[r]) + "\n")


def load_matrix_text(path) -> np.ndarray:
    """Read a matrix written by :func:`save_matrix_text`."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise InvalidInput("matrix text file must start with 'rows cols'")
        rows, cols = int(header[0]), int(header[1])
        data = []
        for _ in range(rows):
            line = fh.readline().split()
            if len(line) != cols:
                raise InvalidInput("matrix text file has a ragged row")
            data.append([float(x) for x in line])
    return as_matrix(np.array(data, dtype=np.float64).reshape(rows, cols))
