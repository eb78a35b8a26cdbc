# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the loops in ``purepy``; same signatures, same output."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

NAME = "cython"

cdef enum:
    MAXM = 16


cdef long long _rank(const int *values, int m) noexcept nogil:
    cdef int std[MAXM]
    cdef int r, j, c, vr, vj, smaller
    cdef long long rank = 0
    for r in range(m):
        vr = values[r]
        c = 0
        for j in range(m):
            vj = values[j]
            if vj < vr or (vj == vr and j < r):
                c += 1
        std[r] = c
    for r in range(m):
        smaller = 0
        for j in range(r + 1, m):
            if std[j] < std[r]:
                smaller += 1
        rank = rank * (m - r) + smaller
    return rank


def pattern_rank(values):
    cdef int m = len(values)
    cdef int buf[MAXM]
    cdef int i
    if m > MAXM:
        raise ValueError("pattern too long for compiled kernel")
    for i in range(m):
        buf[i] = values[i]
    return _rank(buf, m)


cdef long long _factorial(int m) noexcept nogil:
    cdef long long f = 1
    cdef int i
    for i in range(2, m + 1):
        f *= i
    return f


def count_patterns(word, int m):
    cdef int n = len(word)
    cdef int i, j
    cdef int idx[MAXM]
    cdef int vals[MAXM]
    cdef int *w
    cdef long long nf
    if m > MAXM:
        raise ValueError("pattern too long for compiled kernel")
    nf = _factorial(m)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(nf, dtype=np.int64)
    if m > n or m <= 0:
        if m == 0:
            counts[0] = 1
        return counts.tolist()
    w = <int *> malloc(n * sizeof(int))
    try:
        for i in range(n):
            w[i] = word[i]
        for i in range(m):
            idx[i] = i
        while True:
            for i in range(m):
                vals[i] = w[idx[i]]
            counts[_rank(vals, m)] += 1
            # next combination
            i = m - 1
            while i >= 0 and idx[i] == n - m + i:
                i -= 1
            if i < 0:
                break
            idx[i] += 1
            for j in range(i + 1, m):
                idx[j] = idx[j - 1] + 1
    finally:
        free(w)
    return counts.tolist()


cdef bint _next_comb(int *idx, int k, int n) noexcept nogil:
    cdef int i = k - 1, j
    while i >= 0 and idx[i] == n - k + i:
        i -= 1
    if i < 0:
        return False
    idx[i] += 1
    for j in range(i + 1, k):
        idx[j] = idx[j - 1] + 1
    return True


def flag_counts(a, b):
    cdef int k1 = len(a), k2 = len(b)
    cdef int n = k1 + k2
    cdef int i, r
    cdef int pos[2 * MAXM]
    cdef int vals[2 * MAXM]
    cdef int rest_pos[2 * MAXM]
    cdef int rest_val[2 * MAXM]
    cdef int mark[2 * MAXM]
    cdef int sigma[2 * MAXM]
    cdef int aa[2 * MAXM]
    cdef int bb[2 * MAXM]
    cdef dict out = {}
    if n > 2 * MAXM:
        raise ValueError("product too large for compiled kernel")
    for i in range(k1):
        aa[i] = a[i]
    for i in range(k2):
        bb[i] = b[i]
    for i in range(k1):
        pos[i] = i
    while True:
        for i in range(n):
            mark[i] = 0
        for i in range(k1):
            mark[pos[i]] = 1
        r = 0
        for i in range(n):
            if not mark[i]:
                rest_pos[r] = i
                r += 1
        for i in range(k1):
            vals[i] = i
        while True:
            for i in range(n):
                mark[i] = 0
            for i in range(k1):
                mark[vals[i]] = 1
            r = 0
            for i in range(n):
                if not mark[i]:
                    rest_val[r] = i
                    r += 1
            for i in range(k1):
                sigma[pos[i]] = vals[aa[i] - 1] + 1
            for i in range(k2):
                sigma[rest_pos[i]] = rest_val[bb[i] - 1] + 1
            key = tuple([sigma[i] for i in range(n)])
            out[key] = out.get(key, 0) + 1
            if k1 == 0 or not _next_comb(vals, k1, n):
                break
        if k1 == 0 or not _next_comb(pos, k1, n):
            break
    return out


def multiset_pattern_ranks(base, int m):
    cdef int B = len(base)
    cdef int i, j
    cdef long long row = 0, total
    cdef int idx[MAXM]
    cdef int vals[MAXM]
    cdef int *w
    if m > MAXM:
        raise ValueError("pattern too long for compiled kernel")
    # C(B + m - 1, m) rows
    total = 1
    for i in range(m):
        total = total * (B + i) // (i + 1)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] combos = np.empty((total, m), dtype=np.int32)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ranks = np.empty(total, dtype=np.int64)
    if total == 0 or m == 0:
        ranks[:] = 0
        return combos, ranks
    w = <int *> malloc(B * sizeof(int))
    try:
        for i in range(B):
            w[i] = base[i]
        for i in range(m):
            idx[i] = 0
        while True:
            for i in range(m):
                combos[row, i] = idx[i]
                vals[i] = w[idx[i]]
            ranks[row] = _rank(vals, m)
            row += 1
            i = m - 1
            while i >= 0 and idx[i] == B - 1:
                i -= 1
            if i < 0:
                break
            idx[i] += 1
            for j in range(i + 1, m):
                idx[j] = idx[i]
    finally:
        free(w)
    return combos, ranks
