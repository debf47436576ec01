"""Dense symmetric linear algebra.

Cholesky, Bunch-Kaufman LDL^T inertia, a cyclic Jacobi eigensolver, the
symmetric-definite generalized eigenproblem, and spectrum slicing of pencils
through Sylvester's law of inertia.

Matrices are plain square ``numpy`` arrays; symmetry is checked on entry.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import OnEigenvalue
from ._backend import available_backends, backend_name, kernels, set_backend, use_backend

__all__ = [
    "EigDecomp",
    "Inertia",
    "available_backends",
    "backend_name",
    "cholesky",
    "default_zero_tol",
    "gen_eig",
    "ldlt_inertia",
    "pencil_count_below",
    "residuals",
    "set_backend",
    "sym_eig",
    "use_backend",
]

MAX_SWEEPS = 50
METHODS = ("jacobi", "lapack")
ZERO_TOL_FACTOR = 1e-10


@dataclass(frozen=True)
class Inertia:
    n_minus: int
    n_zero: int
    n_plus: int

    @property
    def order(self):
        return self.n_minus + self.n_zero + self.n_plus


@dataclass(frozen=True)
class EigDecomp:
    """Ascending eigenvalues with matching eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray
    sweeps: int = 0


def _as_symmetric(M, name="M"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    scale = np.max(np.abs(M))
    if np.max(np.abs(M - M.T)) > 1e-12 * max(scale, 1.0):
        raise ValueError(f"{name} is not symmetric")
    return np.ascontiguousarray(M)


def cholesky(M):
    """Lower-triangular ``L`` with ``M = L L^T``.

    Raises :class:`NotPositiveDefinite` on the first non-positive pivot.
    """
    return kernels().cholesky(_as_symmetric(M))


def default_zero_tol(M):
    return ZERO_TOL_FACTOR * float(np.max(np.abs(M)))


def ldlt_inertia(M, zero_tol=None):
    """Inertia ``(n_minus, n_zero, n_plus)`` of a symmetric matrix.

    Uses symmetric Bunch-Kaufman pivoting, so indefinite matrices are fine.
    Pivots with magnitude ``<= zero_tol`` count as zero; the default is
    ``1e-10 * max|M|``.
    """
    M = _as_symmetric(M)
    if zero_tol is None:
        zero_tol = default_zero_tol(M)
    if zero_tol < 0:
        raise ValueError("zero_tol must be nonnegative")
    return Inertia(*kernels().ldlt_inertia(M, float(zero_tol)))


def _eig(C, method, max_sweeps):
    if method == "jacobi":
        return kernels().jacobi_eig(C, int(max_sweeps))
    if method == "lapack":
        w, V = np.linalg.eigh(C)
        return w, V, 0
    raise ValueError(f"method must be one of {METHODS}, got {method!r}")


def sym_eig(M, max_sweeps=MAX_SWEEPS, method="jacobi"):
    """Eigen-decomposition of a symmetric matrix.

    The default ``method="jacobi"`` uses cyclic Jacobi rotations from the
    active backend. ``"lapack"`` hands the problem to ``numpy.linalg.eigh``;
    it is much faster for orders in the high hundreds and beyond.
    """
    M = _as_symmetric(M)
    w, V, sweeps = _eig(M, method, max_sweeps)
    order = np.argsort(w, kind="stable")
    return EigDecomp(w[order], np.ascontiguousarray(V[:, order]), sweeps)


def gen_eig(A, B, max_sweeps=MAX_SWEEPS, method="jacobi"):
    """Solve ``A x = lambda B x`` with ``B`` positive definite.

    Reduces to the standard problem for ``L^-1 A L^-T`` where ``B = L L^T``;
    the returned vectors are B-orthonormal. ``method`` is as in :func:`sym_eig`.
    """
    A = _as_symmetric(A, "A")
    B = _as_symmetric(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    k = kernels()
    L = k.cholesky(B)
    Y = k.solve_lower(L, A)
    C = k.solve_lower(L, np.ascontiguousarray(Y.T))
    C = 0.5 * (C + C.T)
    w, Q, sweeps = _eig(C, method, max_sweeps)
    order = np.argsort(w, kind="stable")
    X = k.solve_lower_t(L, np.ascontiguousarray(Q[:, order]))
    return EigDecomp(w[order], X, sweeps)


def pencil_count_below(A, B, lam, zero_tol=None, *, strict=True):
    """Number of eigenvalues of the pencil ``(A, B)`` strictly below ``lam``.

    Computed as ``n_minus`` of ``A - lam B`` (Sylvester's law of inertia), no
    eigensolve involved. ``B`` must be positive definite.

    When ``A - lam B`` has zero pivots, ``lam`` sits on the spectrum: with
    ``strict=True`` :class:`OnEigenvalue` is raised carrying the count,
    otherwise the count is returned as is.
    """
    A = _as_symmetric(A, "A")
    B = _as_symmetric(B, "B")
    S = A - lam * B
    inertia = ldlt_inertia(S, zero_tol)
    if inertia.n_zero and strict:
        raise OnEigenvalue(lam, inertia.n_minus, inertia.n_zero)
    return inertia.n_minus


def residuals(A, B, decomp):
    """Column-wise ``max |A v - lambda B v|``."""
    R = A @ decomp.vectors - (B @ decomp.vectors) * decomp.values
    return np.max(np.abs(R), axis=0)

