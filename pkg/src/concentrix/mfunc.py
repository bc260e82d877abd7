"""Standard matrix functions and trace-inequality objects.

A standard matrix function applies a scalar function to each eigenvalue
of a symmetric matrix through its eigendecomposition.  On top of that
kernel this module provides exp, log, the trace exponential, the matrix
relative entropy, the concave trace function tr exp(H + log A), the
variational trace gap, and the trace-exponential product gap for a
non-commuting pair.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import matcore
from .errors import DimMismatch, DomainViolation, NotPd, Overflow

PD_TOL = 1e-12
EXP_ARG_LIMIT = 700.0  # exp overflows double precision just above 709


def matrix_function(
    fn: Callable[[np.ndarray], np.ndarray],
    a,
    domain: tuple[float, float] = (-np.inf, np.inf),
) -> np.ndarray:
    """Apply a scalar function to a symmetric matrix via its spectrum.

    ``fn`` must accept a vector of eigenvalues.  Eigenvalues outside the
    closed ``domain`` interval raise :class:`DomainViolation`.
    """
    summary, q = matcore.sym_eig(a)
    w = summary.eigenvalues
    lo, hi = domain
    if w.size and (w[-1] < lo or w[0] > hi):
        raise DomainViolation(
            f"eigenvalues span [{w[-1]:.6g}, {w[0]:.6g}], outside the domain [{lo:g}, {hi:g}]"
        )
    fw = np.asarray(fn(w), dtype=np.float64)
    out = (q * fw) @ q.T
    return 0.5 * (out + out.T)


def require_pd(a, name: str = "matrix") -> np.ndarray:
    """Validate strict positive definiteness; return the symmetrized matrix.

    Inputs failing the tolerance are rejected, never regularized.
    """
    sym = matcore.require_symmetric(a, name=name)
    w = np.linalg.eigvalsh(sym)
    scale = max(1.0, float(max(abs(w[0]), abs(w[-1]))))
    if w[0] <= PD_TOL * scale:
        raise NotPd(f"{name} has minimum eigenvalue {w[0]:.3e}; not positive definite")
    return sym


def matrix_exp(a) -> np.ndarray:
    """exp(A) for symmetric A, through the eigendecomposition."""
    return matrix_function(np.exp, a)


def matrix_log(a) -> np.ndarray:
    """log(A) for positive-definite A; inverse of :func:`matrix_exp`."""
    sym = require_pd(a)
    return matrix_function(np.log, sym, domain=(0.0, np.inf))


def trace_exp(a) -> float:
    """tr exp(A) = sum_i exp(lambda_i); monotone in the semidefinite order."""
    w = matcore.eigenvalues_desc(a)
    if w.size and w[0] > EXP_ARG_LIMIT:
        raise Overflow(f"largest eigenvalue {w[0]:.6g} exceeds the exp limit {EXP_ARG_LIMIT:g}")
    return float(np.sum(np.exp(w)))


def _check_same_dim(a: np.ndarray, h: np.ndarray) -> None:
    if a.shape != h.shape:
        raise DimMismatch(f"operands have shapes {a.shape} and {h.shape}")


def relative_entropy(a, h) -> float:
    """Matrix relative entropy tr[A(log A - log H) - (A - H)].

    Nonnegative for every positive-definite pair and jointly convex; for
    commuting (diagonal) inputs it reduces to the vector relative entropy.
    """
    pa = require_pd(a, "first argument")
    ph = require_pd(h, "second argument")
    _check_same_dim(pa, ph)
    inner = pa @ (matrix_log(pa) - matrix_log(ph)) - (pa - ph)
    return float(np.trace(inner))


def lieb_trace_fn(h, a) -> float:
    """tr exp(H + log A): concave in A over the positive-definite cone."""
    sym_h = matcore.require_symmetric(h, name="symmetric argument")
    pa = require_pd(a, "positive-definite argument")
    _check_same_dim(sym_h, pa)
    return trace_exp(sym_h + matrix_log(pa))


def variational_trace_gap(m, t) -> float:
    """tr M - tr[T log M - T log T + T]; nonnegative, zero at T == M.

    The supremum of the bracket over positive-definite T equals tr M, so
    the gap is the slack at the particular T supplied.
    """
    pm = require_pd(m, "first argument")
    pt = require_pd(t, "second argument")
    _check_same_dim(pm, pt)
    bracket = pt @ matrix_log(pm) - pt @ matrix_log(pt) + pt
    return float(np.trace(pm) - np.trace(bracket))


def golden_thompson_gap(a, h) -> float:
    """tr(e^A e^H) - tr e^(A+H); nonnegative, zero for commuting inputs."""
    sa = matcore.require_symmetric(a, name="first argument")
    sh = matcore.require_symmetric(h, name="second argument")
    _check_same_dim(sa, sh)
    product = float(np.trace(matrix_exp(sa) @ matrix_exp(sh)))
    return product - trace_exp(sa + sh)
