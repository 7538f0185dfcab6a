# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled (suff) scan. Mirrors ``_kernels_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef int _removal(const long long[:] coord, const long long[:] ptr, const long long[:] idx,
                  long long offset, long long[:] labels, long long[:] stack) nogil:
    cdef Py_ssize_t n = coord.shape[0]
    cdef Py_ssize_t i, e, u, w, top
    cdef int off, ncomp = 0
    for i in range(n):
        labels[i] = -2
        if coord[i] == offset:
            off = 0
            for e in range(ptr[i], ptr[i + 1]):
                if coord[idx[e]] != offset:
                    off += 1
            if off <= 1:
                labels[i] = -1
    for i in range(n):
        if labels[i] != -2:
            continue
        labels[i] = ncomp
        top = 0
        stack[top] = i
        top += 1
        while top > 0:
            top -= 1
            u = stack[top]
            for e in range(ptr[u], ptr[u + 1]):
                w = idx[e]
                if labels[w] == -2:
                    labels[w] = ncomp
                    stack[top] = w
                    top += 1
        ncomp += 1
    return ncomp


def removal_labels(x1, x2, ptr, idx, vertical, offset):
    cdef long long[:] c = np.ascontiguousarray(x1 if vertical else x2, dtype=np.int64)
    cdef long long[:] p = np.ascontiguousarray(ptr, dtype=np.int64)
    cdef long long[:] q = np.ascontiguousarray(idx, dtype=np.int64)
    labels = np.empty(c.shape[0], dtype=np.int64)
    stack = np.empty(max(c.shape[0], 1), dtype=np.int64)
    cdef long long[:] lab = labels
    cdef long long[:] st = stack
    cdef int k
    cdef long long o = offset
    with nogil:
        k = _removal(c, p, q, o, lab, st)
    return k, labels


def suff_scan(x1, x2, ptr, idx, first_only=True):
    cdef long long[:] c1 = np.ascontiguousarray(x1, dtype=np.int64)
    cdef long long[:] c2 = np.ascontiguousarray(x2, dtype=np.int64)
    cdef long long[:] p = np.ascontiguousarray(ptr, dtype=np.int64)
    cdef long long[:] q = np.ascontiguousarray(idx, dtype=np.int64)
    cdef Py_ssize_t n = c1.shape[0]
    labels = np.empty(n, dtype=np.int64)
    stack = np.empty(max(n, 1), dtype=np.int64)
    cdef long long[:] lab = labels
    cdef long long[:] st = stack
    cdef long long off
    cdef long long[:] arr
    cdef int k
    out = []
    for vertical, arr in ((1, c1), (0, c2)):
        for off in np.unique(np.asarray(arr)):
            with nogil:
                k = _removal(arr, p, q, off, lab, st)
            if k >= 2:
                out.append((vertical, int(off)))
                if first_only:
                    return out
    return out
