# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled projector kernels.

The projector onto the geodesic endpoint ``exp((0 B; -B^H 0)) o`` is built
from three entire functions of ``X = B B^H`` (cos^2 sqrt x, sin 2sqrt x / 2sqrt x,
sin^2 sqrt x / x), evaluated through one Hermitian ``zheev`` per point.
Mirrors ``grassgeo._fallback`` exactly.
"""

import numpy as np

from libc.math cimport cos, sin, sqrt
from libc.stdlib cimport free, malloc
from scipy.linalg.cython_lapack cimport zheev


cdef inline void _entire(double w, double* f1, double* f2, double* f3) noexcept nogil:
    cdef double s, c, sn, x
    if w < 0.0:
        w = 0.0
    s = sqrt(w)
    if s < 1e-4:
        c = cos(s)
        f1[0] = c * c
        f2[0] = 1.0 - 2.0 * w / 3.0 + 2.0 * w * w / 15.0
        x = 1.0 - w / 6.0 + w * w / 120.0
        f3[0] = x * x
    else:
        c = cos(s)
        sn = sin(s)
        f1[0] = c * c
        f2[0] = sn * c / s
        f3[0] = sn * sn / w


cdef struct Work:
    int n
    int m
    int lwork
    double complex* x      # n*n, column-major, eigenvectors after zheev
    double* w              # n
    double complex* zwork  # lwork
    double* rwork          # max(1, 3n-2)
    double complex* f1     # n*n row-major
    double complex* f2
    double complex* f3
    double complex* tmp    # n*m


cdef int _alloc(Work* wk, int n, int m) noexcept nogil:
    wk.n = n
    wk.m = m
    wk.lwork = 64 * n if n > 1 else 2
    wk.x = <double complex*> malloc(n * n * sizeof(double complex))
    wk.w = <double*> malloc(n * sizeof(double))
    wk.zwork = <double complex*> malloc(wk.lwork * sizeof(double complex))
    wk.rwork = <double*> malloc((3 * n if n > 1 else 1) * sizeof(double))
    wk.f1 = <double complex*> malloc(n * n * sizeof(double complex))
    wk.f2 = <double complex*> malloc(n * n * sizeof(double complex))
    wk.f3 = <double complex*> malloc(n * n * sizeof(double complex))
    wk.tmp = <double complex*> malloc(n * m * sizeof(double complex))
    if (wk.x == NULL or wk.w == NULL or wk.zwork == NULL or wk.rwork == NULL
            or wk.f1 == NULL or wk.f2 == NULL or wk.f3 == NULL or wk.tmp == NULL):
        return -1
    return 0


cdef void _release(Work* wk) noexcept nogil:
    free(wk.x)
    free(wk.w)
    free(wk.zwork)
    free(wk.rwork)
    free(wk.f1)
    free(wk.f2)
    free(wk.f3)
    free(wk.tmp)


cdef int _projector(Work* wk, const double complex* b, double complex* p) noexcept nogil:
    """Write the (n+m)x(n+m) projector (row-major) for row-major ``b``."""
    cdef int n = wk.n, m = wk.m, nn = wk.n + wk.m
    cdef int i, j, k, info = 0
    cdef double complex acc, v
    cdef double g1, g2, g3
    cdef char jobz = b'V'
    cdef char uplo = b'U'

    for j in range(n):
        for i in range(n):
            acc = 0
            for k in range(m):
                acc = acc + b[i * m + k] * b[j * m + k].conjugate()
            wk.x[i + j * n] = acc
    zheev(&jobz, &uplo, &wk.n, wk.x, &wk.n, wk.w, wk.zwork, &wk.lwork, wk.rwork, &info)
    if info != 0:
        return info

    for i in range(n * n):
        wk.f1[i] = 0
        wk.f2[i] = 0
        wk.f3[i] = 0
    for k in range(n):
        _entire(wk.w[k], &g1, &g2, &g3)
        for i in range(n):
            for j in range(n):
                v = wk.x[i + k * n] * wk.x[j + k * n].conjugate()
                wk.f1[i * n + j] = wk.f1[i * n + j] + g1 * v
                wk.f2[i * n + j] = wk.f2[i * n + j] + g2 * v
                wk.f3[i * n + j] = wk.f3[i * n + j] + g3 * v

    # top-left block
    for i in range(n):
        for j in range(n):
            p[i * nn + j] = wk.f1[i * n + j]
    # top-right = -F2 B, bottom-left its adjoint
    for i in range(n):
        for j in range(m):
            acc = 0
            for k in range(n):
                acc = acc + wk.f2[i * n + k] * b[k * m + j]
            p[i * nn + n + j] = -acc
            p[(n + j) * nn + i] = -acc.conjugate()
    # bottom-right = B^H F3 B
    for i in range(n):
        for j in range(m):
            acc = 0
            for k in range(n):
                acc = acc + wk.f3[i * n + k] * b[k * m + j]
            wk.tmp[i * m + j] = acc
    for i in range(m):
        for j in range(m):
            acc = 0
            for k in range(n):
                acc = acc + b[k * m + i].conjugate() * wk.tmp[k * m + j]
            p[(n + i) * nn + n + j] = acc
    return 0


def projector_batch(bs):
    """Projectors for a stack of ``(K, n, m)`` complex matrices -> ``(K, N, N)``."""
    cdef double complex[:, :, ::1] bv = np.ascontiguousarray(bs, dtype=np.complex128)
    cdef Py_ssize_t count = bv.shape[0]
    cdef int n = <int> bv.shape[1], m = <int> bv.shape[2]
    out = np.empty((count, n + m, n + m), dtype=np.complex128)
    cdef double complex[:, :, ::1] ov = out
    cdef Work wk
    cdef Py_ssize_t idx
    cdef int info = 0
    if count == 0:
        return out
    with nogil:
        if _alloc(&wk, n, m) != 0:
            info = -1000
        else:
            for idx in range(count):
                info = _projector(&wk, &bv[idx, 0, 0], &ov[idx, 0, 0])
                if info != 0:
                    break
        _release(&wk)
    if info != 0:
        raise RuntimeError(f"zheev failed with info={info}")
    return out


def projector_jacobians(b, ts, double rel_step=1e-5):
    """Central-difference Jacobians of the realified projector map at ``t * b``.

    Returns ``(T, 2 N^2, 2 n m)`` floats.  Row layout: real parts of the
    row-major projector, then imaginary parts.  Column layout: real parts of
    row-major ``B``, then imaginary parts.  The step for each ``t`` is
    ``rel_step * max(1, |t b|_F)``.
    """
    cdef double complex[:, ::1] b0 = np.ascontiguousarray(b, dtype=np.complex128)
    cdef double[::1] tv = np.ascontiguousarray(ts, dtype=np.float64).ravel()
    cdef int n = <int> b0.shape[0], m = <int> b0.shape[1]
    cdef int nn = n + m, nm = n * m
    cdef Py_ssize_t count = tv.shape[0]
    out = np.empty((count, 2 * nn * nn, 2 * nm), dtype=np.float64)
    cdef double[:, :, ::1] ov = out
    cdef Work wk
    cdef Py_ssize_t it
    cdef int k, r, idx, info = 0
    cdef double t, h, norm2
    cdef double complex shift, orig
    cdef double complex* base = NULL
    cdef double complex* pp = NULL
    cdef double complex* pm = NULL
    if count == 0:
        return out
    with nogil:
        base = <double complex*> malloc(nm * sizeof(double complex))
        pp = <double complex*> malloc(nn * nn * sizeof(double complex))
        pm = <double complex*> malloc(nn * nn * sizeof(double complex))
        if _alloc(&wk, n, m) != 0 or base == NULL or pp == NULL or pm == NULL:
            info = -1000
        else:
            for it in range(count):
                t = tv[it]
                norm2 = 0.0
                for idx in range(nm):
                    base[idx] = t * b0[idx // m, idx % m]
                    norm2 = norm2 + base[idx].real * base[idx].real + base[idx].imag * base[idx].imag
                h = rel_step * (sqrt(norm2) if norm2 > 1.0 else 1.0)
                for k in range(2 * nm):
                    idx = k % nm
                    if k < nm:
                        shift = h
                    else:
                        shift = 1j * h
                    orig = base[idx]
                    base[idx] = orig + shift
                    info = _projector(&wk, base, pp)
                    base[idx] = orig - shift
                    if info == 0:
                        info = _projector(&wk, base, pm)
                    base[idx] = orig
                    if info != 0:
                        break
                    for r in range(nn * nn):
                        ov[it, r, k] = (pp[r].real - pm[r].real) / (2 * h)
                        ov[it, nn * nn + r, k] = (pp[r].imag - pm[r].imag) / (2 * h)
                if info != 0:
                    break
        _release(&wk)
        free(base)
        free(pp)
        free(pm)
    if info != 0:
        raise RuntimeError(f"projector kernel failed with info={info}")
    return out
