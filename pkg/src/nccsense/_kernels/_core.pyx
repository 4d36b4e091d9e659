# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel core.

Hot per-trial loops: covariance triangles and detector statistics.  The
pure-python backend in ``fallback`` computes the same quantities; summation
order differs between the two, so they agree to rounding error only.
Inputs are trusted (validation happens in the calling layer): blocks are
C-contiguous complex128 and covariance diagonals are positive.
"""

import numpy as np

from libc.math cimport INFINITY, NAN, isnan, log, sqrt

cdef extern from "complex.h" nogil:
    double complex conj(double complex)
    double cabs(double complex)


cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def sample_covariances(const double complex[:, ::1] y):
    """Hermitian R and symmetric C sample covariances of an (M, K) block.

    Upper triangles are accumulated explicitly, K products plus one scaling
    per entry per matrix; lower triangles are mirrored.  The diagonal of R
    is accumulated in real arithmetic so it lands exactly real.
    """
    cdef Py_ssize_t m = y.shape[0]
    cdef Py_ssize_t k = y.shape[1]
    r_arr = np.empty((m, m), dtype=np.complex128)
    c_arr = np.empty((m, m), dtype=np.complex128)
    cdef double complex[:, ::1] r = r_arr
    cdef double complex[:, ::1] c = c_arr
    cdef Py_ssize_t a, b, t
    cdef double complex racc, cacc, ya
    cdef double dacc
    cdef double scale = 1.0 / k
    with nogil:
        for a in range(m):
            dacc = 0.0
            cacc = 0.0
            for t in range(k):
                ya = y[a, t]
                dacc += _abs2(ya)
                cacc = cacc + ya * ya
            r[a, a] = dacc * scale
            c[a, a] = cacc * scale
            for b in range(a + 1, m):
                racc = 0.0
                cacc = 0.0
                for t in range(k):
                    racc = racc + y[a, t] * conj(y[b, t])
                    cacc = cacc + y[a, t] * y[b, t]
                r[a, b] = racc * scale
                r[b, a] = conj(racc * scale)
                c[a, b] = cacc * scale
                c[b, a] = cacc * scale
    return r_arr, c_arr


def ncc_statistic(const double complex[:, ::1] r, const double complex[:, ::1] c):
    """Sum of normalized squared off-diagonal R and full C entries."""
    cdef Py_ssize_t m = r.shape[0]
    cdef Py_ssize_t a, b
    cdef double da, denom
    cdef double total = 0.0
    with nogil:
        for a in range(m):
            da = r[a, a].real
            total += _abs2(c[a, a]) / (2.0 * da * da)
            for b in range(a + 1, m):
                denom = da * r[b, b].real
                total += _abs2(r[a, b]) / denom
                total += _abs2(c[a, b]) / denom
    return total


def cav_statistic(const double complex[:, ::1] r):
    """Total absolute covariance over total power."""
    cdef Py_ssize_t m = r.shape[0]
    cdef Py_ssize_t a, b
    cdef double num = 0.0
    cdef double den = 0.0
    with nogil:
        for a in range(m):
            den += r[a, a].real
            for b in range(m):
                num += cabs(r[a, b])
    return num / den


cdef double _cholesky_logdet(double complex[:, ::1] a) nogil:
    """In-place lower Cholesky; returns log det, or NAN when not PD."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, p
    cdef double complex s
    cdef double diag
    cdef double logdet = 0.0
    for j in range(n):
        s = a[j, j]
        for p in range(j):
            s = s - a[j, p] * conj(a[j, p])
        diag = s.real
        if isnan(diag) or diag <= 0.0:
            return NAN
        diag = sqrt(diag)
        a[j, j] = diag
        logdet += log(diag)
        for i in range(j + 1, n):
            s = a[i, j]
            for p in range(j):
                s = s - a[i, p] * conj(a[j, p])
            a[i, j] = s / diag
    return 2.0 * logdet


def hdm_statistic(const double complex[:, ::1] r):
    """Hadamard ratio test statistic, -log(det R / prod diag R)."""
    cdef Py_ssize_t m = r.shape[0]
    work_arr = np.asarray(r).copy()
    cdef double complex[:, ::1] work = work_arr
    cdef Py_ssize_t a
    cdef double sumlog = 0.0
    cdef double logdet
    with nogil:
        for a in range(m):
            sumlog += log(r[a, a].real)
        logdet = _cholesky_logdet(work)
    if isnan(logdet):
        return INFINITY
    return sumlog - logdet


def lmpit_statistic(const double complex[:, ::1] r):
    """Squared Frobenius norm of the diagonally normalized covariance."""
    cdef Py_ssize_t m = r.shape[0]
    cdef Py_ssize_t a, b
    cdef double da
    cdef double total = 0.0
    with nogil:
        for a in range(m):
            da = r[a, a].real
            for b in range(m):
                total += _abs2(r[a, b]) / (da * r[b, b].real)
    return total


def nchdm_statistic(const double complex[:, ::1] r, const double complex[:, ::1] c):
    """Hadamard ratio of the augmented covariance [[R, C], [C*, R*]]."""
    cdef Py_ssize_t m = r.shape[0]
    aug_arr = np.empty((2 * m, 2 * m), dtype=np.complex128)
    cdef double complex[:, ::1] aug = aug_arr
    cdef Py_ssize_t a, b
    cdef double sumlog = 0.0
    cdef double logdet
    with nogil:
        for a in range(m):
            for b in range(m):
                aug[a, b] = r[a, b]
                aug[a, m + b] = c[a, b]
                aug[m + a, b] = conj(c[a, b])
                aug[m + a, m + b] = conj(r[a, b])
        for a in range(m):
            sumlog += 2.0 * log(r[a, a].real)
        logdet = _cholesky_logdet(aug)
    if isnan(logdet):
        return INFINITY
    return sumlog - logdet
