# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled rectangular assignment kernel.

Same algorithm and tie rule as ``_lap.solve_lap``; the lexicographic
secondary key lives in int64, so callers must keep ``m**n`` below 2**62
(``fits_int64`` checks this).
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()


def fits_int64(Py_ssize_t n, Py_ssize_t m):
    return m <= 1 or n * np.log2(float(m)) < 62.0


def solve_lap(cnp.ndarray costs_in, cnp.ndarray allowed_in):
    cdef Py_ssize_t n = costs_in.shape[0]
    cdef Py_ssize_t m = costs_in.shape[1]
    if n == 0:
        return []
    if n > m:
        return None
    cdef const double[:, ::1] a = np.ascontiguousarray(costs_in, dtype=np.float64)
    cdef const cnp.uint8_t[:, ::1] ok = np.ascontiguousarray(allowed_in, dtype=np.uint8)

    cdef Py_ssize_t sz = m + 1
    cdef double *u = <double *> malloc((n + 1) * sizeof(double))
    cdef long long *u2 = <long long *> malloc((n + 1) * sizeof(long long))
    cdef double *v = <double *> malloc(sz * sizeof(double))
    cdef long long *v2 = <long long *> malloc(sz * sizeof(long long))
    cdef double *minv = <double *> malloc(sz * sizeof(double))
    cdef long long *minv2 = <long long *> malloc(sz * sizeof(long long))
    cdef Py_ssize_t *p = <Py_ssize_t *> malloc(sz * sizeof(Py_ssize_t))
    cdef Py_ssize_t *way = <Py_ssize_t *> malloc(sz * sizeof(Py_ssize_t))
    cdef char *used = <char *> malloc(sz * sizeof(char))
    cdef long long *place = <long long *> malloc(n * sizeof(long long))

    cdef Py_ssize_t i, j, i0, j0, j1
    cdef double delta, cur, ui, mj
    cdef long long delta2, cur2, ui2, pl
    cdef bint feasible = True
    try:
        place[n - 1] = 1
        for i in range(n - 2, -1, -1):
            place[i] = place[i + 1] * m
        for i in range(n + 1):
            u[i] = 0.0
            u2[i] = 0
        for j in range(sz):
            v[j] = 0.0
            v2[j] = 0
            p[j] = 0
            way[j] = 0

        for i in range(1, n + 1):
            p[0] = i
            j0 = 0
            for j in range(sz):
                minv[j] = INFINITY
                minv2[j] = 0
                used[j] = 0
            while True:
                used[j0] = 1
                i0 = p[j0]
                ui = u[i0]
                ui2 = u2[i0]
                pl = place[i0 - 1]
                delta = INFINITY
                delta2 = 0
                j1 = -1
                for j in range(1, sz):
                    if used[j]:
                        continue
                    if ok[i0 - 1, j - 1]:
                        cur = a[i0 - 1, j - 1] - ui - v[j]
                        cur2 = (j - 1) * pl - ui2 - v2[j]
                        if cur < minv[j] or (cur == minv[j] and cur2 < minv2[j]):
                            minv[j] = cur
                            minv2[j] = cur2
                            way[j] = j0
                    mj = minv[j]
                    if mj < delta or (mj == delta and mj != INFINITY and minv2[j] < delta2):
                        delta = mj
                        delta2 = minv2[j]
                        j1 = j
                if delta == INFINITY:
                    feasible = False
                    break
                for j in range(sz):
                    if used[j]:
                        u[p[j]] += delta
                        u2[p[j]] += delta2
                        v[j] -= delta
                        v2[j] -= delta2
                    else:
                        minv[j] -= delta
                        minv2[j] -= delta2
                j0 = j1
                if p[j0] == 0:
                    break
            if not feasible:
                break
            while j0:
                j1 = way[j0]
                p[j0] = p[j1]
                j0 = j1

        if not feasible:
            return None
        row_to_col = [0] * n
        for j in range(1, sz):
            if p[j]:
                row_to_col[p[j] - 1] = j - 1
        return row_to_col
    finally:
        free(u); free(u2); free(v); free(v2); free(minv); free(minv2)
        free(p); free(way); free(used); free(place)
