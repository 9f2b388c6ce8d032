# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled prime factorization kernel; same contract as _kernels_py."""
from cpython.array cimport array, clone
from libc.stdlib cimport malloc, calloc, free

BACKEND = "cython"

cdef array _INT = array("i")
cdef array _LL = array("q")


cdef void _argsort(long long* key, int* idx, int* buf, Py_ssize_t n) noexcept nogil:
    # bottom-up merge sort of idx by key[idx]
    cdef Py_ssize_t width = 1, lo, mid, hi, i, j, k
    cdef int* src = idx
    cdef int* dst = buf
    cdef int* t
    while width < n:
        lo = 0
        while lo < n:
            mid = lo + width
            if mid > n:
                mid = n
            hi = lo + 2 * width
            if hi > n:
                hi = n
            i = lo
            j = mid
            k = lo
            while i < mid and j < hi:
                if key[src[j]] < key[src[i]]:
                    dst[k] = src[j]
                    j += 1
                else:
                    dst[k] = src[i]
                    i += 1
                k += 1
            while i < mid:
                dst[k] = src[i]
                i += 1
                k += 1
            while j < hi:
                dst[k] = src[j]
                j += 1
                k += 1
            lo = hi
        t = src
        src = dst
        dst = t
        width *= 2
    if src != idx:
        for i in range(n):
            idx[i] = src[i]


cdef Py_ssize_t _distinct(const int[:] M, Py_ssize_t ncols, const int[:] K,
                          int[:] rows, Py_ssize_t n, list cols) except -1:
    cdef long long* gid = <long long*>malloc(n * sizeof(long long))
    cdef long long* key = <long long*>malloc(n * sizeof(long long))
    cdef int* idx = <int*>malloc(n * sizeof(int))
    cdef int* buf = <int*>malloc(n * sizeof(int))
    cdef Py_ssize_t i, groups = 1
    cdef int c
    cdef long long prev
    if gid == NULL or key == NULL or idx == NULL or buf == NULL:
        free(gid); free(key); free(idx); free(buf)
        raise MemoryError()
    for i in range(n):
        gid[i] = 0
    for c in cols:
        for i in range(n):
            key[i] = gid[i] * K[c] + M[rows[i] * ncols + c]
            idx[i] = <int>i
        _argsort(key, idx, buf, n)
        groups = 0
        prev = -1
        for i in range(n):
            if key[idx[i]] != prev:
                prev = key[idx[i]]
                groups += 1
            gid[idx[i]] = groups - 1
    free(gid); free(key); free(idx); free(buf)
    return groups


cdef list _candidates(const int[:] M, Py_ssize_t ncols, const int[:] K,
                      int[:] rows, Py_ssize_t n, list live, bint first_only):
    cdef list out = []
    cdef int c, v
    cdef Py_ssize_t i
    cdef int* cnt
    for c in live:
        cnt = <int*>calloc(K[c], sizeof(int))
        if cnt == NULL:
            raise MemoryError()
        for i in range(n):
            cnt[M[rows[i] * ncols + c]] += 1
        for v in range(K[c]):
            if cnt[v] > 0 and 2 * cnt[v] <= n:
                out.append((c, v))
                if first_only:
                    free(cnt)
                    return out
        free(cnt)
    return out


cdef list _factor(const int[:] M, Py_ssize_t ncols, const int[:] K,
                  int[:] rows, list cols, object pivot):
    cdef Py_ssize_t n = rows.shape[0], i, m
    cdef int c, a, v, first
    cdef bint const_col
    cdef list out = [], live = [], kept, rest
    cdef array q
    cdef int[:] qv
    for c in cols:
        first = M[rows[0] * ncols + c]
        const_col = True
        for i in range(1, n):
            if M[rows[i] * ncols + c] != first:
                const_col = False
                break
        if const_col:
            out.append([c])
        else:
            live.append(c)
    if not live:
        return out
    if pivot is None:
        a, v = _candidates(M, ncols, K, rows, n, live, True)[0]
    else:
        a, v = pivot(_candidates(M, ncols, K, rows, n, live, False))
    m = 0
    for i in range(n):
        if M[rows[i] * ncols + a] == v:
            m += 1
    q = clone(_INT, m, False)
    qv = q
    m = 0
    for i in range(n):
        if M[rows[i] * ncols + a] == v:
            qv[m] = rows[i]
            m += 1
    used = set()
    for f in _factor(M, ncols, K, qv, live, pivot):
        if a in f:
            continue
        pf = _distinct(M, ncols, K, rows, n, f)
        if pf != _distinct(M, ncols, K, qv, m, f):
            continue
        rest = [c for c in live if c not in f]
        if pf * _distinct(M, ncols, K, rows, n, rest) == n:
            out.append(f)
            used.update(f)
    out.append([c for c in live if c not in used])
    return out


def prime_partition(codes, Py_ssize_t nrows, Py_ssize_t ncols, pivot=None):
    if nrows == 0 or ncols == 0:
        return [list(range(ncols))] if ncols else []
    cdef array flat = array("i", codes)
    cdef const int[:] M = flat
    cdef array kk = clone(_INT, ncols, True)
    cdef int[:] K = kk
    cdef Py_ssize_t i, j
    for i in range(nrows):
        for j in range(ncols):
            if M[i * ncols + j] + 1 > K[j]:
                K[j] = M[i * ncols + j] + 1
    cdef array rows = array("i", range(nrows))
    return _factor(M, ncols, K, rows, list(range(ncols)), pivot)
