# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend. Semantics documented in the package __init__;
the numpy fallback is the executable reference."""

from libc.math cimport fabs, INFINITY

import numpy as np


def pes_fixed_point(double[:, ::1] rows, double[::1] b, long long[::1] pidx,
                    double tol, long max_iters):
    cdef Py_ssize_t n = pidx.shape[0]
    cdef Py_ssize_t k, j
    cdef long it = 0
    cdef long long p
    cdef double s, d, gap = INFINITY

    x_arr = np.zeros(n, dtype=np.float64)
    xn_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] xn = xn_arr
    cdef double[::1] tmp

    while it < max_iters:
        it += 1
        gap = 0.0
        for k in range(n):
            p = pidx[k]
            s = b[p]
            for j in range(n):
                s += rows[p, j] * x[j]
            xn[k] = s
            d = fabs(s - x[k])
            if d > gap:
                gap = d
        tmp = x
        x = xn
        xn = tmp
        if gap <= tol:
            break
    if n == 0:
        gap = 0.0
    return np.asarray(x).copy(), it, gap


def vi_fixed_point(double[:, ::1] rows, double[::1] b, long long[::1] starts,
                   double tol, long max_iters):
    cdef Py_ssize_t n = starts.shape[0] - 1
    cdef Py_ssize_t k, j
    cdef long long p
    cdef long it = 0
    cdef double s, d, best, gap = INFINITY

    x_arr = np.zeros(n, dtype=np.float64)
    xn_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] xn = xn_arr
    cdef double[::1] tmp

    while it < max_iters:
        it += 1
        gap = 0.0
        for k in range(n):
            best = INFINITY
            for p in range(starts[k], starts[k + 1]):
                s = b[p]
                for j in range(n):
                    s += rows[p, j] * x[j]
                if s < best:
                    best = s
            xn[k] = best
            d = fabs(best - x[k])
            if d > gap:
                gap = d
        tmp = x
        x = xn
        xn = tmp
        if gap <= tol:
            break
    if n == 0:
        gap = 0.0
    return np.asarray(x).copy(), it, gap


def simulate_step(double[:, ::1] cum, unsigned char[::1] failed,
                  long long[::1] cur, unsigned char[::1] alive, double[::1] u):
    cdef Py_ssize_t trials = cur.shape[0]
    cdef Py_ssize_t n_states = cum.shape[1]
    cdef Py_ssize_t t, j
    cdef long long i
    cdef long hits = 0
    cdef double uv

    for t in range(trials):
        if not alive[t]:
            continue
        i = cur[t]
        uv = u[t]
        j = 0
        while j < n_states - 1 and uv >= cum[i, j]:
            j += 1
        cur[t] = j
        if failed[j]:
            alive[t] = 0
            hits += 1
    return hits
