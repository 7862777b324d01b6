"""Identifiability certification: does the null space meet the cone only at 0?

The event under test is  N(A) intersect C = {0}  with
C = {x : x_i >= 0 for all i in I}, where I indexes the inactive users.  The
decision procedure is a linear program over the compressed constraints:

    maximize   sum_{i in I} x_i
    s.t.       R x = 0,  sum_{i in I} x_i <= 1,  x_I >= 0,  x_{I_c} free,

with R an orthonormal-row compression of A (same null space).  Because the
cone is scale invariant, the optimum is exactly 0 or exactly 1.  Optimum 1
yields a witness.  Optimum 0 leaves only candidate witnesses supported on
I_c (each x in the cone with sum x_I = 0 has x_I = 0 exactly), which exist
iff the columns of R on I_c are rank deficient; that rank check completes
the procedure.  Any optimum away from {0, 1} signals a tolerance problem
and is reported as an ambiguity, never silently rounded.

Two independent oracles cross-check the verdict on small instances: an
angular sweep over null spaces of dimension <= 2, and a projected-gradient
heuristic that hunts for near-null cone points.
"""

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .lifting import null_space_basis, numerical_rank, row_compress
from .rng import Stream, derive_seed


class NumericalFailureError(RuntimeError):
    """Simplex iteration cap or a singular pivot; the verdict is unknown."""


class AmbiguityError(NumericalFailureError):
    """LP optimum fell strictly between the tolerances around {0, 1}."""


@dataclass(frozen=True)
class ConeSpec:
    """Feasible-direction cone: coordinates in I are sign-constrained."""

    N: int
    I: np.ndarray  # sorted indices of the zero entries of the ground truth

    def __post_init__(self):
        I = np.asarray(self.I, dtype=np.int64)
        object.__setattr__(self, "I", I)
        if I.size and (I.min() < 0 or I.max() >= self.N):
            raise ValueError("support indices out of range")
        if np.unique(I).size != I.size:
            raise ValueError("support indices must be distinct")
        if not np.all(np.diff(I) > 0):
            object.__setattr__(self, "I", np.sort(I))

    @property
    def K(self) -> int:
        return self.N - self.I.size

    @property
    def I_c(self) -> np.ndarray:
        mask = np.ones(self.N, dtype=bool)
        mask[self.I] = False
        return np.nonzero(mask)[0]

    @classmethod
    def canonical(cls, N: int, K: int) -> "ConeSpec":
        """Active users are the last K indices; I = {0, .., N-K-1}."""
        if not 0 <= K <= N:
            raise ValueError(f"need 0 <= K <= N, got K={K}, N={N}")
        return cls(N, np.arange(N - K, dtype=np.int64))


@dataclass(frozen=True)
class CertifierConfig:
    feas_tol: float = 1e-9
    rank_rel_tol: float = 1e-10
    max_iter_factor: int = 50  # iteration cap = factor * (rows + cols)

    def __post_init__(self):
        if self.feas_tol <= 0 or self.rank_rel_tol <= 0 or self.max_iter_factor <= 0:
            raise ValueError("all certifier tolerances must be positive")


@dataclass(frozen=True)
class Certificate:
    verdict: str  # "identifiable" | "not_identifiable"
    lp_opt: float
    rank_Ic: Optional[int]
    iterations: int
    witness: Optional[np.ndarray]
    config: CertifierConfig

    @property
    def identifiable(self) -> bool:
        return self.verdict == "identifiable"

    def to_json(self) -> str:
        rec = {
            "verdict": self.verdict,
            "lp_opt": self.lp_opt,
            "rank_Ic": self.rank_Ic,
            "iterations": self.iterations,
            "tolerances": {
                "feas_tol": self.config.feas_tol,
                "rank_rel_tol": self.config.rank_rel_tol,
            },
        }
        if self.witness is not None:
            rec["witness"] = [float(v) for v in self.witness]
        return json.dumps(rec)


def _build_standard_tableau(A, b, c, initial_basis):
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).ravel()
    c = np.asarray(c, dtype=np.float64).ravel()
    m, n = A.shape
    if np.any(b < 0):
        raise ValueError("standard form here requires b >= 0")
    T = np.empty((m + 1, n + 1), dtype=np.float64)
    T[:m, :n] = A
    T[:m, n] = b
    T[m, :n] = c
    T[m, n] = 0.0
    basis = np.empty(m, dtype=np.int64)
    for i, j in enumerate(initial_basis):
        if j < 0:
            if b[i] != 0.0:
                raise ValueError(f"row {i} has b != 0 and no initial basic column")
            basis[i] = n + 1 + i  # artificial sentinel
        else:
            basis[i] = j
            piv = T[i, j]
            if piv == 0.0:
                raise ValueError(f"initial basic column {j} is zero on row {i}")
            if piv != 1.0:
                T[i, :] /= piv
            # eliminate the basic column from the other rows and the objective
            col = T[:, j].copy()
            col[i] = 0.0
            T -= col[:, None] * T[i, :][None, :]
            T[:, j] = 0.0
            T[i, j] = 1.0
    if _kernels.drive_out(T, basis, n) != _kernels.OPTIMAL:
        raise NumericalFailureError("could not eliminate artificial basis")
    return T, basis, m, n


def _extract_solution(basis, n, A, b, c):
    """Basic solution recomputed from the original columns.

    The tableau's rhs column drifts by rounding over long degenerate pivot
    runs; solving  A[:, basis] x_B = b  afresh restores the vertex to
    working precision, and the optimum is re-evaluated from it.
    """
    x = np.zeros(n, dtype=np.float64)
    cols = [j for j in basis if j < n]
    if cols:
        sol, *_ = np.linalg.lstsq(A[:, cols], b, rcond=None)
        x[cols] = sol
    return float(c @ x) + 0.0, x


def simplex_solve(A, b, c, initial_basis, max_iter=None, tol=1e-9):
    """Primal simplex for  max c.x  s.t.  A x = b, x >= 0.

    ``initial_basis`` has one entry per row: a column index whose basic
    solution is feasible, or -1 for rows with b_i = 0 (carried by an
    implicit artificial variable that is pivoted out before the main loop).
    Returns (optimum, x, iterations).
    """
    T, basis, m, n = _build_standard_tableau(A, b, c, initial_basis)
    if max_iter is None:
        max_iter = 50 * (m + n)
    status, iters = _kernels.simplex_max(T, basis, n, int(max_iter), tol)
    if status == _kernels.ITERATION_LIMIT:
        raise NumericalFailureError(f"simplex hit the iteration cap ({max_iter})")
    if status != _kernels.OPTIMAL:
        raise NumericalFailureError("simplex failed (singular ratio test)")
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).ravel()
    c = np.asarray(c, dtype=np.float64).ravel()
    opt, x = _extract_solution(basis, n, A, b, c)
    return opt, x, int(iters)


def _dual_certificate(P: np.ndarray, max_steps: int = 100):
    """Search for y with P'y >= 1 (entrywise); returns (y, steps) or (None, steps).

    Such a y proves the projected LP optimum is 0: every feasible x has
    x >= 0, P x = 0, hence sum x <= y'Px = 0.  The search is Gauss-Newton
    with backtracking on the convex hinge objective 0.5 * ||(1 - P'y)_+||^2;
    any accepted certificate is re-verified entrywise, so a failed search
    never decides anything (the simplex stages take over).
    """
    p_rows, mI = P.shape
    if p_rows == 0 or mI == 0:
        return None, 0
    Pt = np.ascontiguousarray(P.T)
    ones = np.ones(mI)
    y, *_ = np.linalg.lstsq(Pt, ones, rcond=None)

    def hinge(vv):
        r = ones - vv
        r = r[r > 0]
        return 0.5 * float(r @ r) if r.size else 0.0

    v = Pt @ y
    f = hinge(v)
    for step in range(1, max_steps + 1):
        lo = v.min()
        if lo > 1e-12:
            cand = y / lo
            if np.linalg.norm(cand) < 1e9 and (Pt @ cand).min() >= 1.0 - 1e-9:
                return cand, step
        act = (ones - v) > 0
        if not act.any():
            return y, step
        Aact = Pt[act]
        res = (ones - v)[act]
        G = Aact.T @ Aact
        try:
            delta = np.linalg.solve(G + 1e-14 * np.trace(G) * np.eye(p_rows),
                                    Aact.T @ res)
        except np.linalg.LinAlgError:
            delta, *_ = np.linalg.lstsq(Aact, res, rcond=None)
        if not np.isfinite(delta).all():
            return None, step
        Pd = Pt @ delta
        t_step, improved = 1.0, False
        for _ in range(30):
            v_new = v + t_step * Pd
            f_new = hinge(v_new)
            if f_new < f * (1.0 - 1e-14) or f_new == 0.0:
                y = y + t_step * delta
                v, f = v_new, f_new
                improved = True
                break
            t_step *= 0.5
        if not improved:
            return None, step  # stalled at a positive minimum: no certificate
    return None, max_steps


_DANTZIG_CAP_FACTOR = 6  # cheap first stage before the Bland arbiter


def _solve_projected_lp(P: np.ndarray, cfg: "CertifierConfig"):
    """Optimum and solution of  max 1'x  s.t.  Px = 0, 1'x <= 1, x >= 0.

    Stages: (1) dual certificate search, which proves optimum 0 when it
    succeeds; (2) Dantzig-rule simplex under a small iteration cap (any
    termination is a true optimum); (3) simplex with the smallest-index
    anti-cycling fallback and the configured cap, which always terminates.
    """
    mI = P.shape[1]
    if mI == 0:
        return 0.0, np.zeros(0), 0
    y, steps = _dual_certificate(P)
    if y is not None:
        return 0.0, np.zeros(mI), steps

    m = P.shape[0] + 1
    n = mI + 1
    lp_A = np.zeros((m, n))
    lp_A[:m - 1, :mI] = P
    lp_A[m - 1, :mI] = 1.0
    lp_A[m - 1, n - 1] = 1.0
    lp_b = np.zeros(m)
    lp_b[m - 1] = 1.0
    lp_c = np.zeros(n)
    lp_c[:mI] = 1.0
    T, basis, m_, n_ = _build_standard_tableau(lp_A, lp_b, lp_c, [-1] * (m - 1) + [n - 1])

    cap1 = _DANTZIG_CAP_FACTOR * (m + n)
    status, it1 = _kernels.simplex_max(T, basis, n, cap1, cfg.feas_tol,
                                       bland_after=cap1 + 1)
    iters = steps + it1
    if status == _kernels.ITERATION_LIMIT:
        cap2 = cfg.max_iter_factor * (m + n)
        status, it2 = _kernels.simplex_max(T, basis, n, cap2, cfg.feas_tol,
                                           bland_after=64)
        iters += it2
        if status == _kernels.ITERATION_LIMIT:
            raise NumericalFailureError(f"simplex hit the iteration cap ({cap2})")
    if status != _kernels.OPTIMAL:
        raise NumericalFailureError("simplex failed (singular ratio test)")
    opt, x = _extract_solution(basis, n, lp_A, lp_b, lp_c)
    return opt, x[:mI], iters


def _verify_witness(A, cone: ConeSpec, x: np.ndarray) -> None:
    scale = np.abs(A).max() or 1.0
    xmax = np.abs(x).max()
    if not np.isclose(xmax, 1.0, rtol=1e-9, atol=1e-12):
        raise NumericalFailureError("witness is not sup-normalized")
    if np.abs(A @ x).max() > 1e-8 * scale * xmax:
        raise NumericalFailureError("witness residual exceeds tolerance")
    if cone.I.size and x[cone.I].min() < -1e-9:
        raise NumericalFailureError("witness violates the sign constraints")


def certify(A, cone: ConeSpec, cfg: CertifierConfig = CertifierConfig()) -> Certificate:
    """Decide  N(A) intersect C = {0}  for the cone C given by ``cone``.

    Before the simplex runs, the free coordinates x_{I_c} are projected out:
    with Q an orthonormal basis of range(R[:, I_c])^perp, the constraint
    "R_I x_I + R_Ic x_Ic = 0 for some x_Ic" is exactly Q' R_I x_I = 0.  The
    projected LP has the same optimum over far fewer rows and columns, and
    x_{I_c} is recovered by least squares afterwards.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    if A.shape[1] != cone.N:
        raise ValueError(f"A has {A.shape[1]} columns, cone expects {cone.N}")
    N = cone.N
    I = cone.I
    Ic = cone.I_c
    mI, K = I.size, Ic.size

    R = row_compress(A, cfg.rank_rel_tol)
    r = R.shape[0]

    RIc = R[:, Ic]
    if K and r:
        u, s, _ = np.linalg.svd(RIc)
        cut = cfg.rank_rel_tol * max(RIc.shape) * (s[0] if s.size else 0.0)
        rank_Ic = int(np.count_nonzero(s > cut))
        P = u[:, rank_Ic:].T @ R[:, I]  # (r - rank_Ic) x mI, same x_I feasible set
    else:
        rank_Ic = 0
        P = R[:, I]

    opt, x_lp, iters = _solve_projected_lp(P, cfg)

    if opt >= 1.0 - cfg.feas_tol:
        x = np.zeros(N)
        x[I] = x_lp
        if K:
            x[Ic] = np.linalg.lstsq(RIc, -R[:, I] @ x_lp, rcond=None)[0]
        # polish: alternate between the computed null space and the sign
        # constraints, then sup-normalize; a true vertex is machine-close
        for _ in range(4):
            x -= R.T @ (R @ x)
            if I.size:
                x[I] = np.clip(x[I], 0.0, None)
        x -= R.T @ (R @ x)
        x /= np.abs(x).max()
        _verify_witness(A, cone, x)
        return Certificate("not_identifiable", opt, rank_Ic, iters, x, cfg)

    if opt <= cfg.feas_tol:
        if rank_Ic < K:
            basis = null_space_basis(R[:, Ic], cfg.rank_rel_tol)
            x = np.zeros(N)
            x[Ic] = basis[:, 0]
            x /= np.abs(x).max()
            _verify_witness(A, cone, x)
            return Certificate("not_identifiable", opt, rank_Ic, iters, x, cfg)
        return Certificate("identifiable", opt, rank_Ic, iters, None, cfg)

    raise AmbiguityError(
        f"LP optimum {opt} is separated from both 0 and 1 at tol={cfg.feas_tol}")


def angular_sweep_oracle(null_basis: np.ndarray, I, grid_points: int = 100_000) -> bool:
    """Exhaustive direction scan for null spaces of dimension 1 or 2.

    Returns True iff some direction in span(null_basis) satisfies the sign
    constraints, i.e. the intersection with the cone is nontrivial.  Columns
    must be orthonormal so every swept direction has unit norm.
    """
    B = np.atleast_2d(np.asarray(null_basis, dtype=np.float64))
    if B.ndim != 2 or B.shape[1] > 2 or B.shape[1] < 1:
        raise ValueError("angular sweep supports null-space dimension 1 or 2 only")
    I = np.asarray(I, dtype=np.int64)
    if I.size == 0:
        return True  # no sign constraints: any nonzero null vector qualifies
    if B.shape[1] == 1:
        b = B[:, 0]
        return bool(b[I].min() >= -1e-12 or (-b)[I].min() >= -1e-12)
    theta = np.linspace(0.0, 2.0 * np.pi, int(grid_points), endpoint=False)
    X = B[I, 0][:, None] * np.cos(theta)[None, :] + B[I, 1][:, None] * np.sin(theta)[None, :]
    return bool((X.min(axis=0) >= -1e-12).any())


def pgd_oracle(A, cone: ConeSpec, iterations: int = 2000, restarts: int = 3,
               seed: int = 0, exit_tol: float = 1e-14):
    """Heuristic residual search: min ||A x||^2 over a compact cone slice.

    The slice is {sum_{i in I} x_i = 1, x_I >= 0, |x_j| <= N for j in I_c}
    (for K = N, i.e. no sign constraints, the unit sphere instead).  Uses
    accelerated projected gradient with restarts, stopping early once the
    residual falls below ``exit_tol``; a residual near zero is evidence of a
    nontrivial intersection.  Statistical cross-check only -- never the
    verdict.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    N = cone.N
    I, Ic = cone.I, cone.I_c
    H = A.T @ A
    sig2 = float(np.linalg.eigvalsh(H).max()) if N else 0.0
    step = 1.0 / (2.0 * sig2) if sig2 > 0 else 1.0
    bound = float(N)
    stream = Stream(derive_seed("pgd", seed))

    def project(x):
        if I.size == 0:
            nrm = np.linalg.norm(x)
            return x / nrm if nrm > 0 else _sphere_fallback()
        x = x.copy()
        x[I] = _simplex_project(x[I])
        if Ic.size:
            x[Ic] = np.clip(x[Ic], -bound, bound)
        return x

    def _sphere_fallback():
        e = np.zeros(N)
        e[0] = 1.0
        return e

    best_res = np.inf
    best_x = None
    for _ in range(max(1, int(restarts))):
        x = project(stream.normal(N))
        y = x
        t = 1.0
        for it in range(int(iterations)):
            x_new = project(y - 2.0 * step * (H @ y))
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            y = x_new + ((t - 1.0) / t_new) * (x_new - x)
            x, t = x_new, t_new
            if it % 50 == 49 and float(x @ (H @ x)) < exit_tol:
                break
        res = float(x @ (H @ x))
        if res < best_res:
            best_res, best_x = res, x
        if best_res < exit_tol:
            break
    return best_res, best_x


def _simplex_project(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {w >= 0, sum w = 1} (sort-and-threshold)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u * np.arange(1, v.size + 1) > (css - 1.0))[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.clip(v - theta, 0.0, None)
