"""Pure-numpy kernel implementations.

Semantics here are the reference; `_core.pyx` mirrors them in C loops.  Both
operate on a dense simplex tableau laid out as

    T : (m+1) x (n_struct+1) float64, C-contiguous
        rows 0..m-1   [B^-1 A | B^-1 b]   (structural columns only)
        row  m        [reduced costs c_j - c_B B^-1 a_j | -objective]

Artificial variables are never stored: ``basis[i] >= n_struct`` is a
sentinel meaning "row i is still carried by its artificial", which is legal
only while b_i = 0.  ``drive_out`` removes all such sentinels through
degenerate pivots before the main loop runs.

Anti-cycling: the leaving row always breaks ratio ties by smallest basic
variable index; the entering rule is largest reduced cost (ties to the
smallest index) and falls back to Bland's smallest-index rule after
``bland_after`` consecutive degenerate pivots, which guarantees termination.
"""

import numpy as np

OPTIMAL = 0
ITERATION_LIMIT = 1
SINGULAR = 2


def pivot(T, basis, p, q):
    """In-place tableau pivot on (row p, column q); sets column q to e_p exactly."""
    T[p, :] /= T[p, q]
    col = T[:, q].copy()
    col[p] = 0.0
    T -= col[:, None] * T[p, :][None, :]
    T[:, q] = 0.0
    T[p, q] = 1.0
    basis[p] = q


def drive_out(T, basis, n_struct, tol=1e-11):
    """Replace every artificial basic (sentinel >= n_struct) by a structural one.

    All such rows have rhs 0, so the pivots are degenerate and the basic
    solution is unchanged.  Pivots choose the largest |entry| in the row
    (partial pivoting).  Returns OPTIMAL or SINGULAR.
    """
    m = T.shape[0] - 1
    n_struct = int(n_struct)
    for i in range(m):
        if basis[i] < n_struct:
            continue
        row = np.abs(T[i, :n_struct])
        q = int(np.argmax(row))
        if not row[q] > tol:
            return SINGULAR
        pivot(T, basis, i, q)
    return OPTIMAL


def simplex_max(T, basis, n_scan, max_iter, tol_red=1e-9, tol_piv=1e-11,
                bland_after=64):
    """Primal simplex (maximization) on a feasible tableau.

    Returns (status, iterations).  ``n_scan`` limits which columns may enter.
    """
    m = T.shape[0] - 1
    rhs = T.shape[1] - 1
    bland = False
    stall = 0
    for it in range(int(max_iter)):
        red = T[m, :n_scan]
        if bland:
            improving = np.nonzero(red > tol_red)[0]
            if improving.size == 0:
                return OPTIMAL, it
            q = int(improving[0])
        else:
            q = int(np.argmax(red))
            if not red[q] > tol_red:
                return OPTIMAL, it
        col = T[:m, q]
        usable = col > tol_piv
        if not usable.any():
            return SINGULAR, it  # unbounded; cannot happen for a bounded LP
        ratios = np.where(usable, T[:m, rhs] / np.where(usable, col, 1.0), np.inf)
        rmin = ratios.min()
        ties = np.nonzero(ratios == rmin)[0]
        p = int(ties[np.argmin(basis[ties])])
        pivot(T, basis, p, q)
        if rmin <= 0.0:
            stall += 1
            if stall >= bland_after:
                bland = True
        else:
            stall = 0
            bland = False
    return ITERATION_LIMIT, int(max_iter)


def lagrange_scan(b_desc, sum_c, k_free):
    """Root of sum_i (b_i - mu)_+ + sum_c - k_free * mu = 0.

    ``b_desc`` must be sorted descending and ``k_free >= 1``.  The left side
    is piecewise linear and strictly decreasing; with exactly ``k`` active
    terms the root candidate is mu_k = (sum of k largest + sum_c) /
    (k + k_free), accepted when it falls inside its own segment.  Exact
    (no iteration); boundary ties yield equal mu in adjacent segments.
    """
    mI = b_desc.shape[0]
    prefix = np.empty(mI + 1)
    prefix[0] = 0.0
    np.cumsum(b_desc, out=prefix[1:])
    mu = (prefix + sum_c) / (np.arange(mI + 1) + k_free)
    ok = np.ones(mI + 1, dtype=bool)
    ok[1:] &= b_desc >= mu[1:]
    ok[:mI] &= mu[:mI] >= b_desc
    hit = np.nonzero(ok)[0]
    if hit.size == 0:
        raise ArithmeticError("piecewise-linear scan found no segment")
    return float(mu[hit[0]])
