# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled dense kernels: Cholesky, triangular solves, Bunch-Kaufman inertia, Jacobi.

Same contracts as ``_kernels_py``; every routine copies its input.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, hypot, isfinite

from ..errors import BreakdownError, NoConvergence, NotPositiveDefinite

cnp.import_array()

cdef double BK_ALPHA = (1.0 + sqrt(17.0)) / 8.0
cdef double EPS = np.finfo(float).eps


def cholesky(a_in):
    cdef double[:, ::1] a = np.ascontiguousarray(a_in, dtype=float)
    cdef Py_ssize_t n = a.shape[0]
    L_arr = np.zeros((n, n))
    cdef double[:, ::1] L = L_arr
    cdef Py_ssize_t i, j, k
    cdef double d, s, ljj
    for j in range(n):
        d = a[j, j]
        for k in range(j):
            d -= L[j, k] * L[j, k]
        if not d > 0.0:
            raise NotPositiveDefinite(j, d)
        ljj = sqrt(d)
        L[j, j] = ljj
        for i in range(j + 1, n):
            s = a[i, j]
            for k in range(j):
                s -= L[i, k] * L[j, k]
            L[i, j] = s / ljj
    return L_arr


def solve_lower(L_in, b_in):
    """Solve ``L X = b`` for lower-triangular ``L``."""
    cdef double[:, ::1] L = np.ascontiguousarray(L_in, dtype=float)
    b = np.array(b_in, dtype=float, order="C")
    vec = b.ndim == 1
    if vec:
        b = np.ascontiguousarray(b[:, None])
    cdef double[:, ::1] x = b
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double lik, inv
    for i in range(n):
        for k in range(i):
            lik = L[i, k]
            if lik != 0.0:
                for j in range(m):
                    x[i, j] -= lik * x[k, j]
        inv = 1.0 / L[i, i]
        for j in range(m):
            x[i, j] *= inv
    return b[:, 0] if vec else b


def solve_lower_t(L_in, b_in):
    """Solve ``L^T X = b`` for lower-triangular ``L``."""
    cdef double[:, ::1] L = np.ascontiguousarray(L_in, dtype=float)
    b = np.array(b_in, dtype=float, order="C")
    vec = b.ndim == 1
    if vec:
        b = np.ascontiguousarray(b[:, None])
    cdef double[:, ::1] x = b
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double lki, inv
    for i in range(n - 1, -1, -1):
        for k in range(i + 1, n):
            lki = L[k, i]
            if lki != 0.0:
                for j in range(m):
                    x[i, j] -= lki * x[k, j]
        inv = 1.0 / L[i, i]
        for j in range(m):
            x[i, j] *= inv
    return b[:, 0] if vec else b


cdef inline void _count_sign(double value, double zero_tol, Py_ssize_t* counts) noexcept:
    if fabs(value) <= zero_tol:
        counts[1] += 1
    elif value < 0.0:
        counts[0] += 1
    else:
        counts[2] += 1


cdef void _swap(double[:, ::1] a, Py_ssize_t i, Py_ssize_t j) noexcept:
    cdef Py_ssize_t n = a.shape[0], k
    cdef double tmp
    for k in range(n):
        tmp = a[i, k]
        a[i, k] = a[j, k]
        a[j, k] = tmp
    for k in range(n):
        tmp = a[k, i]
        a[k, i] = a[k, j]
        a[k, j] = tmp


def ldlt_inertia(a_in, double zero_tol):
    """Signature of a symmetric matrix from a Bunch-Kaufman LDL^T sweep."""
    cdef double[:, ::1] a = np.array(a_in, dtype=float, order="C")
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t counts[3]
    counts[0] = 0
    counts[1] = 0
    counts[2] = 0
    cdef Py_ssize_t k = 0, i, j, imax, kp, kk, kstep
    cdef double absakk, colmax, rowmax, v, d, d11, d21, d22, det, half, rad
    cdef double e11, e12, e22, w1, w2, u1, u2
    while k < n:
        absakk = fabs(a[k, k])
        imax = k
        colmax = 0.0
        for i in range(k + 1, n):
            v = fabs(a[i, k])
            if v > colmax:
                colmax = v
                imax = i
        if not (isfinite(absakk) and isfinite(colmax)):
            raise BreakdownError(f"non-finite entry at step {k}")
        if absakk <= zero_tol and colmax <= zero_tol:
            counts[1] += 1
            k += 1
            continue
        kstep = 1
        if absakk >= BK_ALPHA * colmax:
            kp = k
        else:
            rowmax = 0.0
            for j in range(k, n):
                if j != imax:
                    v = fabs(a[imax, j])
                    if v > rowmax:
                        rowmax = v
            if absakk * rowmax >= BK_ALPHA * colmax * colmax:
                kp = k
            elif fabs(a[imax, imax]) >= BK_ALPHA * rowmax:
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
            if d != 0.0:
                for j in range(k + 1, n):
                    w1 = a[j, k] / d
                    if w1 != 0.0:
                        for i in range(j, n):
                            a[i, j] -= w1 * a[i, k]
                for j in range(k + 1, n):
                    for i in range(j + 1, n):
                        a[j, i] = a[i, j]
        else:
            d11 = a[k, k]
            d21 = a[k + 1, k]
            d22 = a[k + 1, k + 1]
            det = d11 * d22 - d21 * d21
            if det == 0.0 or not isfinite(det):
                raise BreakdownError(f"singular 2x2 pivot at step {k}")
            half = 0.5 * (d11 + d22)
            rad = hypot(0.5 * (d11 - d22), d21)
            _count_sign(half - rad, zero_tol, counts)
            _count_sign(half + rad, zero_tol, counts)
            e11 = d22 / det
            e12 = -d21 / det
            e22 = d11 / det
            for j in range(k + 2, n):
                w1 = a[j, k]
                w2 = a[j, k + 1]
                u1 = e11 * w1 + e12 * w2
                u2 = e12 * w1 + e22 * w2
                for i in range(j, n):
                    a[i, j] -= a[i, k] * u1 + a[i, k + 1] * u2
            for j in range(k + 2, n):
                for i in range(j + 1, n):
                    a[j, i] = a[i, j]
        k += kstep
    return counts[0], counts[1], counts[2]


def jacobi_eig(a_in, int max_sweeps):
    """Cyclic Jacobi eigensolver. Returns ``(values, vectors, sweeps)`` unsorted.

    Rotations update rows ``p`` and ``q`` (contiguous) and mirror them into the
    columns; eigenvectors are accumulated as rows of ``vt``.
    """
    a_arr = np.array(a_in, dtype=float, order="C")
    cdef double[:, ::1] a = a_arr
    cdef Py_ssize_t n = a.shape[0]
    vt_arr = np.eye(n)
    cdef double[:, ::1] vt = vt_arr
    cdef double norm = sqrt(float(np.sum(a_arr * a_arr)))
    cdef double floor = 1e-3 * EPS * norm
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef bint rotated
    cdef double apq, app, aqq, tau, t, c, s, x, y, thr
    cdef double* rp
    cdef double* rq
    for sweep in range(1, max_sweeps + 1):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                app = a[p, p]
                aqq = a[q, q]
                thr = EPS * sqrt(fabs(app * aqq))
                if thr < floor:
                    thr = floor
                if fabs(apq) <= thr:
                    if apq != 0.0:
                        a[p, q] = 0.0
                        a[q, p] = 0.0
                    continue
                rotated = True
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                rp = &a[p, 0]
                rq = &a[q, 0]
                for k in range(n):
                    x = rp[k]
                    y = rq[k]
                    rp[k] = c * x - s * y
                    rq[k] = s * x + c * y
                rp[p] = app - t * apq
                rq[q] = aqq + t * apq
                rp[q] = 0.0
                rq[p] = 0.0
                for k in range(n):
                    a[k, p] = rp[k]
                    a[k, q] = rq[k]
                rp = &vt[p, 0]
                rq = &vt[q, 0]
                for k in range(n):
                    x = rp[k]
                    y = rq[k]
                    rp[k] = c * x - s * y
                    rq[k] = s * x + c * y
        if not rotated:
            return np.diag(a_arr).copy(), np.ascontiguousarray(vt_arr.T), sweep
    raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
