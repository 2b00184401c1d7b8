# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Signatures mirror :mod:`kcswitch._pykernels`."""

from libc.math cimport fabs, sqrt

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline bint _is_hangul(Py_UCS4 ch) noexcept nogil:
    return ((0xAC00 <= ch <= 0xD7A3) or (0x1100 <= ch <= 0x11FF)
            or (0x3130 <= ch <= 0x318F))


cdef inline bint _is_latin(Py_UCS4 ch) noexcept nogil:
    if (0x41 <= ch <= 0x5A) or (0x61 <= ch <= 0x7A):
        return True
    if 0xC0 <= ch <= 0x24F:
        return ch != 0xD7 and ch != 0xF7
    return 0x1E00 <= ch <= 0x1EFF


def script_code(str text):
    """Bit 1 set if ``text`` has a Hangul character, bit 2 if a Latin letter."""
    cdef Py_UCS4 ch
    cdef int code = 0
    for ch in text:
        if _is_hangul(ch):
            code |= 1
        elif _is_latin(ch):
            code |= 2
        if code == 3:
            break
    return code


def rank_sum_tail_counts(long[:] ranks, int n_a, long observed):
    """Count size-``n_a`` subsets of ``ranks`` with sum <= and >= ``observed``.

    Returns ``(n_le, n_ge, n_total)``.
    """
    cdef int n = ranks.shape[0]
    cdef long n_le = 0, n_ge = 0, n_total = 0
    cdef long total
    cdef int i, j
    if n_a < 0 or n_a > n:
        raise ValueError("subset size out of range")
    cdef long[:] idx = np.arange(n_a, dtype=np.int_)
    while True:
        total = 0
        for i in range(n_a):
            total += ranks[idx[i]]
        n_total += 1
        if total <= observed:
            n_le += 1
        if total >= observed:
            n_ge += 1
        # advance to the next combination in lexicographic order
        i = n_a - 1
        while i >= 0 and idx[i] == n - n_a + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, n_a):
            idx[j] = idx[j - 1] + 1
    return n_le, n_ge, n_total


def jacobi_eigh(a_in, double tol=1e-14, int max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` with eigenvectors stored
    column-wise, in the order the rotations leave them (unsorted).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] arr = np.array(a_in, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] a = arr
    cdef int m = a.shape[0]
    if a.shape[1] != m:
        raise ValueError("matrix must be square")
    cdef cnp.ndarray[cnp.float64_t, ndim=2] varr = np.eye(m, dtype=np.float64)
    cdef double[:, ::1] v = varr
    cdef int p, q, k, sweep
    cdef double off, scale, apq, theta, t, c, s, akp, akq, apk, aqk
    scale = 0.0
    for p in range(m):
        for q in range(m):
            scale += a[p, q] * a[p, q]
    scale = sqrt(scale)
    sweep = 0
    with nogil:
        while sweep < max_sweeps:
            off = 0.0
            for p in range(m):
                for q in range(p + 1, m):
                    off += a[p, q] * a[p, q]
            if sqrt(2.0 * off) <= tol * scale or off == 0.0:
                break
            sweep += 1
            for p in range(m - 1):
                for q in range(p + 1, m):
                    apq = a[p, q]
                    if fabs(apq) <= 1e-300:
                        continue
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    if theta >= 0:
                        t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                    else:
                        t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    for k in range(m):
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = c * akp - s * akq
                        a[k, q] = s * akp + c * akq
                    for k in range(m):
                        apk = a[p, k]
                        aqk = a[q, k]
                        a[p, k] = c * apk - s * aqk
                        a[q, k] = s * apk + c * aqk
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for k in range(m):
                        akp = v[k, p]
                        akq = v[k, q]
                        v[k, p] = c * akp - s * akq
                        v[k, q] = s * akp + c * akq
    return np.diag(arr).copy(), varr, sweep
