# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled DP alignment kernel; mirrors ``_align_py`` exactly."""

from libc.stdlib cimport free, malloc


cdef int _fill(const int* a, Py_ssize_t n, const int* b, Py_ssize_t m, int* d) noexcept nogil:
    cdef Py_ssize_t i, j, w = m + 1
    cdef int best, v
    for j in range(m + 1):
        d[j] = <int>j
    for i in range(1, n + 1):
        d[i * w] = <int>i
        for j in range(1, m + 1):
            best = d[(i - 1) * w + j - 1] + (0 if a[i - 1] == b[j - 1] else 1)
            v = d[(i - 1) * w + j] + 1
            if v < best:
                best = v
            v = d[i * w + j - 1] + 1
            if v < best:
                best = v
            d[i * w + j] = best
    return d[n * w + m]


cdef int* _to_carray(object seq, Py_ssize_t n) except NULL:
    cdef int* out = <int*>malloc((n if n > 0 else 1) * sizeof(int))
    if out == NULL:
        raise MemoryError()
    cdef Py_ssize_t k
    for k in range(n):
        out[k] = seq[k]
    return out


def align_counts(a, b):
    """Return (matches, substitutions, deletions, insertions) for int sequences."""
    cdef Py_ssize_t n = len(a), m = len(b), i, j, w
    cdef int* ca = _to_carray(a, n)
    cdef int* cb
    cdef int* d
    cdef int mat = 0, sub = 0, dele = 0, ins = 0, cur
    try:
        cb = _to_carray(b, m)
    except:
        free(ca)
        raise
    d = <int*>malloc((n + 1) * (m + 1) * sizeof(int))
    if d == NULL:
        free(ca)
        free(cb)
        raise MemoryError()
    w = m + 1
    with nogil:
        _fill(ca, n, cb, m, d)
        i = n
        j = m
        while i > 0 or j > 0:
            cur = d[i * w + j]
            if i > 0 and j > 0 and ca[i - 1] == cb[j - 1] and cur == d[(i - 1) * w + j - 1]:
                mat += 1
                i -= 1
                j -= 1
            elif i > 0 and j > 0 and ca[i - 1] != cb[j - 1] and cur == d[(i - 1) * w + j - 1] + 1:
                sub += 1
                i -= 1
                j -= 1
            elif i > 0 and cur == d[(i - 1) * w + j] + 1:
                dele += 1
                i -= 1
            else:
                ins += 1
                j -= 1
    free(ca)
    free(cb)
    free(d)
    return mat, sub, dele, ins


def edit_distance(a, b):
    """Unit-cost Levenshtein distance between int sequences."""
    cdef Py_ssize_t n = len(a), m = len(b)
    cdef int* ca = _to_carray(a, n)
    cdef int* cb
    cdef int* d
    cdef int res
    try:
        cb = _to_carray(b, m)
    except:
        free(ca)
        raise
    d = <int*>malloc((n + 1) * (m + 1) * sizeof(int))
    if d == NULL:
        free(ca)
        free(cb)
        raise MemoryError()
    with nogil:
        res = _fill(ca, n, cb, m, d)
    free(ca)
    free(cb)
    free(d)
    return res
