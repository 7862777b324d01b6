# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: dense simplex pivoting and the cone-projection scan.

Same contracts as `pure.py` (the reference implementation); see its module
docstring for the tableau layout and the anti-cycling rules.
"""

import numpy as np

OPTIMAL = 0
ITERATION_LIMIT = 1
SINGULAR = 2


cdef void _pivot(double[:, ::1] T, long[::1] basis, Py_ssize_t p, Py_ssize_t q) noexcept nogil:
    cdef Py_ssize_t rows = T.shape[0]
    cdef Py_ssize_t cols = T.shape[1]
    cdef Py_ssize_t i, j
    cdef double piv = T[p, q]
    cdef double f
    for j in range(cols):
        T[p, j] /= piv
    for i in range(rows):
        if i == p:
            continue
        f = T[i, q]
        if f == 0.0:
            continue
        for j in range(cols):
            T[i, j] -= f * T[p, j]
    for i in range(rows):
        T[i, q] = 0.0
    T[p, q] = 1.0
    basis[p] = q


def pivot(double[:, ::1] T, long[::1] basis, Py_ssize_t p, Py_ssize_t q):
    _pivot(T, basis, p, q)


def drive_out(double[:, ::1] T, long[::1] basis, Py_ssize_t n_struct, double tol=1e-11):
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t i, j, q
    cdef double best, a
    for i in range(m):
        if basis[i] < n_struct:
            continue
        q = 0
        best = -1.0
        for j in range(n_struct):
            a = T[i, j]
            if a < 0.0:
                a = -a
            if a > best:
                best = a
                q = j
        if not best > tol:
            return SINGULAR
        _pivot(T, basis, i, q)
    return OPTIMAL


def simplex_max(double[:, ::1] T, long[::1] basis, Py_ssize_t n_scan,
                long max_iter, double tol_red=1e-9, double tol_piv=1e-11,
                long bland_after=64):
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef bint bland = False
    cdef long stall = 0
    cdef long it
    cdef Py_ssize_t i, q, p
    cdef double best, r, rmin
    for it in range(max_iter):
        # entering column
        q = -1
        if bland:
            for i in range(n_scan):
                if T[m, i] > tol_red:
                    q = i
                    break
        else:
            best = tol_red
            for i in range(n_scan):
                if T[m, i] > best:
                    best = T[m, i]
                    q = i
        if q < 0:
            return OPTIMAL, it
        # leaving row: min ratio, ties to smallest basic index
        p = -1
        rmin = 0.0
        for i in range(m):
            if T[i, q] > tol_piv:
                r = T[i, rhs] / T[i, q]
                if p < 0 or r < rmin or (r == rmin and basis[i] < basis[p]):
                    p = i
                    rmin = r
        if p < 0:
            return SINGULAR, it  # unbounded; cannot happen for a bounded LP
        _pivot(T, basis, p, q)
        if rmin <= 0.0:
            stall += 1
            if stall >= bland_after:
                bland = True
        else:
            stall = 0
            bland = False
    return ITERATION_LIMIT, max_iter


def lagrange_scan(double[::1] b_desc, double sum_c, long k_free):
    cdef Py_ssize_t mI = b_desc.shape[0]
    cdef Py_ssize_t k
    cdef double running = 0.0
    cdef double mu
    for k in range(mI + 1):
        mu = (running + sum_c) / (k + k_free)
        if (k == 0 or b_desc[k - 1] >= mu) and (k == mI or mu >= b_desc[k]):
            return mu
        if k < mI:
            running += b_desc[k]
    raise ArithmeticError("piecewise-linear scan found no segment")
