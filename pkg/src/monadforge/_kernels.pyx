# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled elimination kernels (see ``_kernels_py`` for the reference)."""
import numpy as np

from libc.stdint cimport int64_t


def rank_mod_p(rows, long long p):
    cdef Py_ssize_t m = len(rows)
    if m == 0:
        return 0
    cdef Py_ssize_t n = len(rows[0])
    if n == 0:
        return 0
    arr = np.array([[x % p for x in row] for row in rows], dtype=np.int64)
    cdef int64_t[:, ::1] a = arr
    cdef Py_ssize_t rank = 0, col, r, c, piv
    cdef int64_t inv, f, t
    for col in range(n):
        if rank == m:
            break
        piv = -1
        for r in range(rank, m):
            if a[r, col] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for c in range(col, n):
                t = a[rank, c]
                a[rank, c] = a[piv, c]
                a[piv, c] = t
        inv = pow(int(a[rank, col]), p - 2, p)
        for r in range(rank + 1, m):
            f = a[r, col]
            if f != 0:
                f = (f * inv) % p
                for c in range(col, n):
                    if a[rank, c] != 0:
                        a[r, c] = (a[r, c] - f * a[rank, c]) % p
                        if a[r, c] < 0:
                            a[r, c] += p
        rank += 1
    return rank


def rank_integer(rows):
    cdef list a = [list(row) for row in rows]
    cdef Py_ssize_t m = len(a)
    if m == 0:
        return 0
    cdef Py_ssize_t n = len(a[0])
    cdef Py_ssize_t rank = 0, col, r, c, piv
    cdef object prev = 1, pv, f
    cdef list prow, row
    for col in range(n):
        if rank == m:
            break
        piv = -1
        for r in range(rank, m):
            if (<list>a[r])[col]:
                piv = r
                break
        if piv < 0:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        prow = a[rank]
        pv = prow[col]
        for r in range(rank + 1, m):
            row = a[r]
            f = row[col]
            if f:
                for c in range(col + 1, n):
                    row[c] = (pv * row[c] - f * prow[c]) // prev
            else:
                for c in range(col + 1, n):
                    row[c] = (pv * row[c]) // prev
            row[col] = 0
        prev = pv
        rank += 1
    return rank
