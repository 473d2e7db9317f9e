# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels in ``netsdp._kernels_py``."""

from cpython.mem cimport PyMem_Free, PyMem_Malloc

import numpy as np
cimport numpy as cnp

cnp.import_array()


def reduce_word(tuple letters, bint classical):
    cdef Py_ssize_t n = len(letters)
    cdef Py_ssize_t i, j, k, top = 0
    cdef long p, x, o
    cdef long *key
    cdef Py_ssize_t *idx
    if n == 0:
        return ()
    key = <long *> PyMem_Malloc(3 * n * sizeof(long))
    idx = <Py_ssize_t *> PyMem_Malloc(2 * n * sizeof(Py_ssize_t))
    if key == NULL or idx == NULL:
        PyMem_Free(key)
        PyMem_Free(idx)
        raise MemoryError()
    cdef Py_ssize_t *stack = idx + n
    try:
        for i in range(n):
            p, x, o = letters[i]
            key[3 * i] = p
            key[3 * i + 1] = x
            key[3 * i + 2] = o
            # stable insertion sort: by party, or by the whole triple
            j = i
            while j > 0 and _before(key, i, idx[j - 1], classical):
                idx[j] = idx[j - 1]
                j -= 1
            idx[j] = i
        for i in range(n):
            k = idx[i]
            if top > 0:
                j = stack[top - 1]
                if key[3 * j] == key[3 * k] and key[3 * j + 1] == key[3 * k + 1]:
                    if (key[3 * j + 2] < 0) != (key[3 * k + 2] < 0):
                        raise ValueError(
                            "mixed observable/projector letters on party %d input %d"
                            % (key[3 * k], key[3 * k + 1]))
                    if key[3 * k + 2] < 0:
                        top -= 1
                    elif key[3 * j + 2] != key[3 * k + 2]:
                        return None
                    continue
            stack[top] = k
            top += 1
        return tuple([letters[stack[i]] for i in range(top)])
    finally:
        PyMem_Free(key)
        PyMem_Free(idx)


cdef inline bint _before(long *key, Py_ssize_t a, Py_ssize_t b, bint classical):
    """Strictly-less comparison of letters ``a`` and ``b``."""
    cdef int t
    if not classical:
        return key[3 * a] < key[3 * b]
    for t in range(3):
        if key[3 * a + t] != key[3 * b + t]:
            return key[3 * a + t] < key[3 * b + t]
    return False


def schur_complement(double[:, ::1] X, double[:, ::1] Zinv, rows, cols, coef, var, Py_ssize_t m):
    """``M[k, l] = tr(B_k X B_l Zinv)`` from full-orientation entry lists.

    Only needed entries of ``X B_l Zinv`` are formed, as dot products of
    per-class panels gathered into contiguous rows; ``k <= l`` only, then mirrored.
    """
    order = np.argsort(var, kind="stable")
    cdef long[::1] r = np.ascontiguousarray(np.asarray(rows)[order], dtype=np.int_)
    cdef long[::1] c = np.ascontiguousarray(np.asarray(cols)[order], dtype=np.int_)
    cdef double[::1] w = np.ascontiguousarray(np.asarray(coef)[order], dtype=np.float64)
    cdef long[::1] v = np.ascontiguousarray(np.asarray(var)[order], dtype=np.int_)
    cdef long[::1] bounds = np.searchsorted(np.asarray(v), np.arange(m + 1)).astype(np.int_)
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t smax = 0
    cdef Py_ssize_t l, e, f, f0, f1, s, i
    for l in range(m):
        smax = max(smax, bounds[l + 1] - bounds[l])
    out = np.zeros((m, m))
    cdef double[:, ::1] M = out
    # panels: PX[i, f] = X[i, r_f], PZ[i, f] = w_f Zinv[c_f, i]
    cdef double[:, ::1] PX = np.empty((n, max(smax, 1)))
    cdef double[:, ::1] PZ = np.empty((n, max(smax, 1)))
    cdef double acc0, acc1, acc2, acc3
    cdef double *px
    cdef double *pz
    for l in range(m):
        f0 = bounds[l]
        f1 = bounds[l + 1]
        s = f1 - f0
        for i in range(n):
            for f in range(s):
                PX[i, f] = X[i, r[f0 + f]]
                PZ[i, f] = w[f0 + f] * Zinv[c[f0 + f], i]
        for e in range(f1):
            px = &PX[c[e], 0]
            pz = &PZ[r[e], 0]
            acc0 = acc1 = acc2 = acc3 = 0.0
            f = 0
            while f + 4 <= s:
                acc0 += px[f] * pz[f]
                acc1 += px[f + 1] * pz[f + 1]
                acc2 += px[f + 2] * pz[f + 2]
                acc3 += px[f + 3] * pz[f + 3]
                f += 4
            while f < s:
                acc0 += px[f] * pz[f]
                f += 1
            M[v[e], l] += w[e] * ((acc0 + acc1) + (acc2 + acc3))
    for l in range(m):
        for e in range(l):
            M[l, e] = M[e, l]
    return out
