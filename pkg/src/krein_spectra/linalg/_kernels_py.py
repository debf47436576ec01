"""Pure-Python (numpy) implementations of the dense kernels.

This module mirrors ``_kernels.pyx`` function for function and is used when the
compiled extension is unavailable. Every routine copies its input.
"""
import math

import numpy as np

from ..errors import BreakdownError, NoConvergence, NotPositiveDefinite

# Bunch-Kaufman growth constant
BK_ALPHA = (1.0 + math.sqrt(17.0)) / 8.0
EPS = np.finfo(float).eps


def cholesky(a):
    a = np.array(a, dtype=float, order="C")
    n = a.shape[0]
    L = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - L[j, :j] @ L[j, :j]
        if not d > 0.0:
            raise NotPositiveDefinite(j, d)
        ljj = math.sqrt(d)
        L[j, j] = ljj
        if j + 1 < n:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / ljj
    return L


def solve_lower(L, b):
    """Solve ``L X = b`` for lower-triangular ``L``."""
    x = np.array(b, dtype=float, order="C")
    vec = x.ndim == 1
    if vec:
        x = x[:, None]
    n = L.shape[0]
    for i in range(n):
        if i:
            x[i] -= L[i, :i] @ x[:i]
        x[i] /= L[i, i]
    return x[:, 0] if vec else x


def solve_lower_t(L, b):
    """Solve ``L^T X = b`` for lower-triangular ``L``."""
    x = np.array(b, dtype=float, order="C")
    vec = x.ndim == 1
    if vec:
        x = x[:, None]
    n = L.shape[0]
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            x[i] -= L[i + 1:, i] @ x[i + 1:]
        x[i] /= L[i, i]
    return x[:, 0] if vec else x


def _count_sign(value, zero_tol, counts):
    if abs(value) <= zero_tol:
        counts[1] += 1
    elif value < 0.0:
        counts[0] += 1
    else:
        counts[2] += 1


def _swap(a, i, j):
    a[[i, j], :] = a[[j, i], :]
    a[:, [i, j]] = a[:, [j, i]]


def ldlt_inertia(a, zero_tol):
    """Signature of a symmetric matrix from a Bunch-Kaufman LDL^T sweep.

    The full symmetric trailing block is kept up to date, so row and column
    interchanges are plain swaps. Returns ``(n_minus, n_zero, n_plus)``.
    """
    a = np.array(a, dtype=float, order="C")
    n = a.shape[0]
    counts = [0, 0, 0]
    k = 0
    while k < n:
        absakk = abs(a[k, k])
        if k + 1 < n:
            col = np.abs(a[k + 1:, k])
            imax = k + 1 + int(np.argmax(col))
            colmax = col[imax - k - 1]
        else:
            imax, colmax = k, 0.0
        if not (math.isfinite(absakk) and math.isfinite(colmax)):
            raise BreakdownError(f"non-finite entry at step {k}")
        if max(absakk, colmax) <= zero_tol:
            # the whole remaining column is numerically zero
            counts[1] += 1
            k += 1
            continue
        kstep = 1
        if absakk >= BK_ALPHA * colmax:
            kp = k
        else:
            row = np.abs(a[imax, k:])
            row[imax - k] = 0.0
            rowmax = row.max()
            if absakk * rowmax >= BK_ALPHA * colmax * colmax:
                kp = k
            elif abs(a[imax, imax]) >= BK_ALPHA * rowmax:
                kp = imax
            else:
                kp = imax
                kstep = 2
        kk = k + kstep - 1
        if kp != kk:
            _swap(a, kk, kp)
        if kstep == 1:
            d = a[k, k]
            _count_sign(d, zero_tol, counts)
            if d != 0.0 and k + 1 < n:
                w = a[k + 1:, k].copy()
                a[k + 1:, k + 1:] -= np.outer(w, w) / d
        else:
            d11, d21, d22 = a[k, k], a[k + 1, k], a[k + 1, k + 1]
            det = d11 * d22 - d21 * d21
            if det == 0.0 or not math.isfinite(det):
                raise BreakdownError(f"singular 2x2 pivot at step {k}")
            half = 0.5 * (d11 + d22)
            rad = math.hypot(0.5 * (d11 - d22), d21)
            _count_sign(half - rad, zero_tol, counts)
            _count_sign(half + rad, zero_tol, counts)
            if k + 2 < n:
                w = a[k + 2:, k:k + 2].copy()
                dinv = np.array([[d22, -d21], [-d21, d11]]) / det
                a[k + 2:, k + 2:] -= w @ dinv @ w.T
        k += kstep
    return counts[0], counts[1], counts[2]


def jacobi_eig(a, max_sweeps):
    """Cyclic Jacobi eigensolver. Returns ``(values, vectors, sweeps)`` unsorted."""
    a = np.array(a, dtype=float, order="C")
    n = a.shape[0]
    v = np.eye(n)
    norm = math.sqrt(float(np.sum(a * a)))
    floor = 1e-3 * EPS * norm
    for sweep in range(1, max_sweeps + 1):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                app, aqq = a[p, p], a[q, q]
                if abs(apq) <= max(EPS * math.sqrt(abs(app * aqq)), floor):
                    if apq != 0.0:
                        a[p, q] = a[q, p] = 0.0
                    continue
                rotated = True
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - s * colq
                a[:, q] = s * colp + c * colq
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        if not rotated:
            return np.diag(a).copy(), v, sweep
    raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
