# cython: language_level=3
"""Compiled hot kernels: stencil taps, spectrum powers, block products."""

cimport cython

import numpy as np

from fftstencil import _fallback

NAME = "cython"


@cython.boundscheck(False)
@cython.wraparound(False)
@cython.cdivision(True)
cdef void _apply3(const double* src, double* out, const long long* offs,
                  const double* blocks, Py_ssize_t ntaps,
                  Py_ssize_t n0, Py_ssize_t n1, Py_ssize_t n2, Py_ssize_t m,
                  Py_ssize_t P1, Py_ssize_t P2,
                  Py_ssize_t p0, Py_ssize_t p1, Py_ssize_t p2) noexcept nogil:
    # Tap-outer so the innermost loop runs over a contiguous row; taps are
    # still accumulated in order, so scalar fields match the numpy fallback bit for bit.
    cdef Py_ssize_t i, j, k, t, f, g
    cdef const double* srow
    cdef const double* blk
    cdef double* orow
    cdef double acc, coef
    for i in range(n0 * n1 * n2 * m):
        out[i] = 0.0
    for t in range(ntaps):
        blk = blocks + t * m * m
        for i in range(n0):
            for j in range(n1):
                srow = src + (((i + p0 + offs[3 * t]) * P1 + (j + p1 + offs[3 * t + 1])) * P2
                              + p2 + offs[3 * t + 2]) * m
                orow = out + (i * n1 + j) * n2 * m
                if m == 1:
                    coef = blk[0]
                    for k in range(n2):
                        orow[k] += coef * srow[k]
                else:
                    for k in range(n2):
                        for f in range(m):
                            acc = 0.0
                            for g in range(m):
                                acc = acc + blk[f * m + g] * srow[k * m + g]
                            orow[k * m + f] += acc


def apply_stencil(src, offsets, blocks):
    """One periodic stencil application on an array of shape ``dims + (m,)``."""
    src = np.asarray(src, dtype=np.float64)
    d = src.ndim - 1
    if d > 3:
        return _fallback.apply_stencil(src, offsets, blocks)
    dims = src.shape[:-1]
    m = src.shape[-1]
    lead = 3 - d
    shape3 = (1,) * lead + dims
    offs = np.zeros((len(offsets), 3), dtype=np.int64)
    offs[:, lead:] = np.asarray(offsets, dtype=np.int64).reshape(len(offsets), d)
    pads = np.abs(offs).max(axis=0)
    arr = src.reshape(shape3 + (m,))
    padded = np.ascontiguousarray(
        np.pad(arr, [(int(p), int(p)) for p in pads] + [(0, 0)], mode="wrap"))
    out = np.empty(shape3 + (m,), dtype=np.float64)
    cdef const double[:, :, :, ::1] pv = padded
    cdef double[:, :, :, ::1] ov = out
    cdef const long long[:, ::1] ofv = np.ascontiguousarray(offs, dtype=np.longlong)
    cdef const double[:, :, ::1] bv = np.ascontiguousarray(blocks, dtype=np.float64).reshape(-1, m, m)
    cdef Py_ssize_t ntaps = ofv.shape[0], mm = m
    cdef Py_ssize_t q0 = pads[0], q1 = pads[1], q2 = pads[2]
    if ntaps and out.size:
        with nogil:
            _apply3(&pv[0, 0, 0, 0], &ov[0, 0, 0, 0], &ofv[0, 0], &bv[0, 0, 0], ntaps,
                    ov.shape[0], ov.shape[1], ov.shape[2], mm, pv.shape[1], pv.shape[2],
                    q0, q1, q2)
    elif not ntaps:
        out[...] = 0.0
    return out.reshape(src.shape)


@cython.boundscheck(False)
@cython.wraparound(False)
@cython.initializedcheck(False)
cdef void _matmul(const double complex* a, const double complex* b,
                  double complex* out, Py_ssize_t m) noexcept nogil:
    cdef const double* x = <const double*> a
    cdef const double* y = <const double*> b
    cdef double* z = <double*> out
    cdef Py_ssize_t i, j, k, p, q
    cdef double re, im
    for i in range(m):
        for j in range(m):
            re = 0.0
            im = 0.0
            for k in range(m):
                p = 2 * (i * m + k)
                q = 2 * (k * m + j)
                re = re + (x[p] * y[q] - x[p + 1] * y[q + 1])
                im = im + (x[p] * y[q + 1] + x[p + 1] * y[q])
            z[2 * (i * m + j)] = re
            z[2 * (i * m + j) + 1] = im


@cython.boundscheck(False)
@cython.wraparound(False)
cdef void _power_scalar(const double complex* src, double complex* res, double complex* work,
                        Py_ssize_t n, unsigned long long e) noexcept nogil:
    # Bit-outer loops with explicit real/imag arithmetic: avoids the C99
    # inf/nan-safe complex multiply and lets the per-frequency loop vectorize.
    cdef const double* s = <const double*> src
    cdef double* r = <double*> res
    cdef double* b = <double*> work
    cdef Py_ssize_t j
    cdef double xr, xi, yr, yi
    for j in range(n):
        r[2 * j] = 1.0
        r[2 * j + 1] = 0.0
        b[2 * j] = s[2 * j]
        b[2 * j + 1] = s[2 * j + 1]
    while e:
        if e & 1:
            for j in range(n):
                xr = r[2 * j]; xi = r[2 * j + 1]
                yr = b[2 * j]; yi = b[2 * j + 1]
                r[2 * j] = xr * yr - xi * yi
                r[2 * j + 1] = xr * yi + xi * yr
        e >>= 1
        if e:
            for j in range(n):
                yr = b[2 * j]; yi = b[2 * j + 1]
                b[2 * j] = yr * yr - yi * yi
                b[2 * j + 1] = yr * yi + yi * yr


@cython.boundscheck(False)
@cython.wraparound(False)
@cython.initializedcheck(False)
def power_blocks(lam, T):
    """Raise each ``m x m`` block of ``lam`` (shape ``(n, m, m)``) to the power ``T``."""
    cdef const double complex[:, :, ::1] src = np.ascontiguousarray(lam, dtype=np.complex128)
    cdef unsigned long long e0 = <unsigned long long> int(T)
    cdef Py_ssize_t n = src.shape[0], m = src.shape[1]
    result = np.empty((n, m, m), dtype=np.complex128)
    cdef double complex[:, :, ::1] res = result
    cdef double complex[:, ::1] base = np.empty((m, m), dtype=np.complex128)
    cdef double complex[:, ::1] tmp = np.empty((m, m), dtype=np.complex128)
    cdef double complex[::1] work = np.empty(n if m == 1 else 0, dtype=np.complex128)
    cdef Py_ssize_t j, a, b
    cdef unsigned long long e
    with nogil:
        if m == 1:
            if n:
                _power_scalar(&src[0, 0, 0], &res[0, 0, 0], &work[0], n, e0)
        else:
            for j in range(n):
                for a in range(m):
                    for b in range(m):
                        res[j, a, b] = 1 if a == b else 0
                        base[a, b] = src[j, a, b]
                e = e0
                while e:
                    if e & 1:
                        _matmul(&res[j, 0, 0], &base[0, 0], &tmp[0, 0], m)
                        for a in range(m):
                            for b in range(m):
                                res[j, a, b] = tmp[a, b]
                    e >>= 1
                    if e:
                        _matmul(&base[0, 0], &base[0, 0], &tmp[0, 0], m)
                        for a in range(m):
                            for b in range(m):
                                base[a, b] = tmp[a, b]
    return result


@cython.boundscheck(False)
@cython.wraparound(False)
@cython.initializedcheck(False)
def hadamard_blocks(lam, x):
    """Per-frequency block times vector: ``y[j] = lam[j] @ x[j]``."""
    cdef const double complex[:, :, ::1] L = np.ascontiguousarray(lam, dtype=np.complex128)
    cdef const double complex[:, ::1] X = np.ascontiguousarray(x, dtype=np.complex128)
    cdef Py_ssize_t n = L.shape[0], m = L.shape[1], j, f, g
    y = np.empty((n, m), dtype=np.complex128)
    cdef double complex[:, ::1] Y = y
    cdef double complex acc
    with nogil:
        for j in range(n):
            for f in range(m):
                acc = 0
                for g in range(m):
                    acc = acc + L[j, f, g] * X[j, g]
                Y[j, f] = acc
    return y
