# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled two-excitation kernels.

Storage layout of a packed two-excitation vector (see ``kernels.py``)::

    [0, P)                photon-photon amplitudes psi(a, b), a <= b, row major
    [P, P + nq*N)         photon-qubit amplitudes psi(x, q_j) at P + j*N + x
    [P + nq*N, ...)       qubit-qubit amplitudes, packed upper triangle over nq

with ``P = N*(N+1)/2``.  Complex vectors are handled as interleaved doubles.
One pass computes ``o <- alpha*H s + beta*s + gprev*o`` and ``acc += c*o``.
"""
import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t
from libc.stdlib cimport calloc, free

cnp.import_array()


cdef inline int64_t _row(int64_t a, int64_t n) noexcept nogil:
    return a * n - (a * (a - 1)) // 2


cdef inline void _emit(double* o, double* acc, const double* s, int64_t i,
                       double hr, double hi, double alpha, double beta,
                       double gprev, double cr, double ci, bint use_acc) noexcept nogil:
    cdef double vr = alpha * hr + beta * s[2 * i] + gprev * o[2 * i]
    cdef double vi = alpha * hi + beta * s[2 * i + 1] + gprev * o[2 * i + 1]
    o[2 * i] = vr
    o[2 * i + 1] = vi
    if use_acc:
        acc[2 * i] += cr * vr - ci * vi
        acc[2 * i + 1] += cr * vi + ci * vr


cdef inline void _bump(double* o, double* acc, int64_t i, double hr, double hi,
                       double alpha, double cr, double ci, bint use_acc) noexcept nogil:
    # additive correction of an already emitted entry (linear in H s)
    cdef double vr = alpha * hr
    cdef double vi = alpha * hi
    o[2 * i] += vr
    o[2 * i + 1] += vi
    if use_acc:
        acc[2 * i] += cr * vr - ci * vi
        acc[2 * i + 1] += cr * vi + ci * vr


cdef void _pass(const double* s, double* o, double* acc, const double* zero,
                int64_t n, int nq, double hop, const int64_t* qat,
                const int64_t* sites, const double* v, const double* om,
                bint hardcore, double alpha, double beta, double gprev,
                double cr, double ci, bint use_acc) noexcept nogil:
    cdef int64_t p = n * (n + 1) // 2
    cdef int64_t oq = p
    cdef int64_t oqq = p + nq * n
    cdef int64_t a, k, i, ra, rm, rp, x, sj, lo, hi, last
    cdef int j, m
    cdef const double* A
    cdef const double* M
    cdef const double* Pp
    cdef double hr, hi_, mh = -hop
    cdef double* O
    cdef double* C

    # photon-photon hopping stencil
    for a in range(n):
        ra = _row(a, n)
        A = s + 2 * ra
        O = o + 2 * ra
        C = acc + 2 * ra
        if a > 0:
            rm = _row(a - 1, n)
            M = s + 2 * (rm + 1)
        else:
            M = zero
        if a + 1 < n:
            rp = _row(a + 1, n)
            Pp = s + 2 * (rp - 1)
        else:
            Pp = zero
        last = n - a - 1
        # k = 0: diagonal (a, a); neighbours (a-1, a) twice and (a, a+1) twice
        hr = M[0]
        hi_ = M[1]
        if last >= 1:
            hr += A[2]
            hi_ += A[3]
        _emit(O, C, A, 0, 2.0 * mh * hr, 2.0 * mh * hi_, alpha, beta, gprev, cr, ci, use_acc)
        if last < 1:
            continue
        for k in range(1, last):
            hr = Pp[2 * k] + A[2 * k - 2] + M[2 * k] + A[2 * k + 2]
            hi_ = Pp[2 * k + 1] + A[2 * k - 1] + M[2 * k + 1] + A[2 * k + 3]
            _emit(O, C, A, k, mh * hr, mh * hi_, alpha, beta, gprev, cr, ci, use_acc)
        k = last
        hr = Pp[2 * k] + A[2 * k - 2] + M[2 * k]
        hi_ = Pp[2 * k + 1] + A[2 * k - 1] + M[2 * k + 1]
        _emit(O, C, A, k, mh * hr, mh * hi_, alpha, beta, gprev, cr, ci, use_acc)

    # photon-photon entries touching a qubit site: psi(s_j, b) and psi(a, s_j)
    for j in range(nq):
        sj = sites[j]
        for x in range(n):
            i = oq + j * n + x
            if x >= sj:
                lo = sj
                hi = x
            else:
                lo = x
                hi = sj
            k = _row(lo, n) + hi - lo
            if x == sj:
                _bump(o, acc, k, 2.0 * v[j] * s[2 * i], 2.0 * v[j] * s[2 * i + 1],
                      alpha, cr, ci, use_acc)
            else:
                _bump(o, acc, k, v[j] * s[2 * i], v[j] * s[2 * i + 1],
                      alpha, cr, ci, use_acc)

    # photon-qubit block
    for j in range(nq):
        sj = sites[j]
        for x in range(n):
            i = oq + j * n + x
            hr = 0.0
            hi_ = 0.0
            if x > 0:
                hr += s[2 * i - 2]
                hi_ += s[2 * i - 1]
            if x + 1 < n:
                hr += s[2 * i + 2]
                hi_ += s[2 * i + 3]
            hr = mh * hr + om[j] * s[2 * i]
            hi_ = mh * hi_ + om[j] * s[2 * i + 1]
            if x <= sj:
                k = _row(x, n) + sj - x
            else:
                k = _row(sj, n) + x - sj
            hr += v[j] * s[2 * k]
            hi_ += v[j] * s[2 * k + 1]
            m = <int>qat[x]
            if m >= 0 and not (hardcore and m == j):
                if m <= j:
                    k = oqq + _row(m, nq) + j - m
                else:
                    k = oqq + _row(j, nq) + m - j
                hr += v[m] * s[2 * k]
                hi_ += v[m] * s[2 * k + 1]
            _emit(o, acc, s, i, hr, hi_, alpha, beta, gprev, cr, ci, use_acc)

    # qubit-qubit block
    for j in range(nq):
        for m in range(j, nq):
            i = oqq + _row(j, nq) + m - j
            if hardcore and m == j:
                o[2 * i] = 0.0
                o[2 * i + 1] = 0.0
                continue
            k = oq + m * n + sites[j]
            x = oq + j * n + sites[m]
            hr = (om[j] + om[m]) * s[2 * i] + v[j] * s[2 * k] + v[m] * s[2 * x]
            hi_ = (om[j] + om[m]) * s[2 * i + 1] + v[j] * s[2 * k + 1] + v[m] * s[2 * x + 1]
            _emit(o, acc, s, i, hr, hi_, alpha, beta, gprev, cr, ci, use_acc)


cdef double[::1] _dview(arr):
    return np.asarray(arr).view(np.float64)


def apply_h2(src, dst, int64_t n, double hop, const int64_t[::1] qat,
             const int64_t[::1] sites, const double[::1] v, const double[::1] om,
             bint hardcore):
    """dst <- H src for packed complex128 vectors (dst is overwritten)."""
    cdef double[::1] s = _dview(src)
    cdef double[::1] o = _dview(dst)
    cdef int nq = <int>sites.shape[0]
    cdef double* zero = <double*>calloc(2 * n + 8, sizeof(double))
    if zero == NULL:
        raise MemoryError()
    o[:] = 0.0
    with nogil:
        _pass(&s[0], &o[0], &o[0], zero, n, nq, hop, &qat[0], &sites[0], &v[0],
              &om[0], hardcore, 1.0, 0.0, 0.0, 0.0, 0.0, False)
    free(zero)


def chebyshev_series(psi, coeffs, double scale, double center, int64_t n, double hop,
                     const int64_t[::1] qat, const int64_t[::1] sites,
                     const double[::1] v, const double[::1] om, bint hardcore):
    """Return sum_k coeffs[k] T_k((H - center)/scale) psi."""
    cdef Py_ssize_t size = psi.shape[0]
    cdef const double[::1] cf = np.ascontiguousarray(coeffs, dtype=np.complex128).view(np.float64)
    cdef Py_ssize_t k, nterms = cf.shape[0] // 2
    cdef int nq = <int>sites.shape[0]
    cdef double inv = 1.0 / scale
    acc_arr = np.asarray(psi, dtype=np.complex128) * coeffs[0]
    t0_arr = np.array(psi, dtype=np.complex128, copy=True)
    t1_arr = np.zeros(size, dtype=np.complex128)
    cdef double[::1] acc = _dview(acc_arr)
    cdef double[::1] b0 = _dview(t0_arr)
    cdef double[::1] b1 = _dview(t1_arr)
    cdef double* t0 = &b0[0]
    cdef double* t1 = &b1[0]
    cdef double* tmp
    cdef double* zero = <double*>calloc(2 * n + 8, sizeof(double))
    if zero == NULL:
        raise MemoryError()
    with nogil:
        if nterms > 1:
            _pass(t0, t1, &acc[0], zero, n, nq, hop, &qat[0], &sites[0], &v[0], &om[0],
                  hardcore, inv, -center * inv, 0.0, cf[2], cf[3], True)
        for k in range(2, nterms):
            # T_k = 2 x T_{k-1} - T_{k-2}, written over the T_{k-2} buffer
            _pass(t1, t0, &acc[0], zero, n, nq, hop, &qat[0], &sites[0], &v[0], &om[0],
                  hardcore, 2.0 * inv, -2.0 * center * inv, -1.0,
                  cf[2 * k], cf[2 * k + 1], True)
            tmp = t0
            t0 = t1
            t1 = tmp
    free(zero)
    return acc_arr
