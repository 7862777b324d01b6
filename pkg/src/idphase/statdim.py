"""Exact projection onto the zero-sum cone and its statistical dimension.

The cone is D = {x : 1'x = 0, x_i >= 0 for i in I}.  Projecting g onto D
has the closed form

    x_i = (g_i - mu)_+   for i in I,       x_i = g_i - mu   otherwise,

where the shift mu solves  sum_I (g_i - mu)_+ + sum_{I_c} (g_i - mu) = 0.
That left side is piecewise linear and strictly decreasing (when I_c is
nonempty), so mu is found exactly by sorting the breakpoints {g_i : i in I}
and locating the segment containing the root -- no iteration, no tolerance.

The statistical dimension of D is E ||x||^2 over standard Gaussian g; the
Monte Carlo estimator here averages ||x||^2 / N with the canonical support
I = {0, .., N-K-1}, which is distribution-equivalent to any other support
of the same size by exchangeability of the Gaussian coordinates.
"""

import csv
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import _kernels
from .rng import Stream, derive_seed


@dataclass(frozen=True)
class ProjectionResult:
    x: np.ndarray
    mu: float
    squared_norm_over_N: float
    degenerate: bool = False  # no free coordinates and every g_I <= 0


def lagrange_mu(g, I) -> Tuple[float, bool]:
    """The shift solving the zero-sum equation; returns (mu, degenerate).

    With I_c empty and every g_I <= 0 the equation holds for all large mu;
    the projection is 0 regardless and max(g_I, 0) is returned with the
    degenerate flag set.
    """
    g = np.asarray(g, dtype=np.float64).ravel()
    I = np.asarray(I, dtype=np.int64)
    mask = np.zeros(g.size, dtype=bool)
    mask[I] = True
    gI = g[mask]
    gc = g[~mask]
    k_free = gc.size
    if k_free == 0:
        top = float(gI.max()) if gI.size else 0.0
        if top <= 0.0:
            return max(top, 0.0), True
        return top, False
    b = np.sort(gI)[::-1].copy()
    return float(_kernels.lagrange_scan(b, float(gc.sum()), k_free)), False


def project_onto_D(g, I) -> ProjectionResult:
    """Exact Euclidean projection of g onto D (see module docstring)."""
    g = np.asarray(g, dtype=np.float64).ravel()
    I = np.asarray(I, dtype=np.int64)
    mu, degenerate = lagrange_mu(g, I)
    x = g - mu
    if I.size:
        x[I] = np.clip(x[I], 0.0, None)
    n = max(g.size, 1)
    return ProjectionResult(x, mu, float(x @ x) / n, degenerate)


@dataclass(frozen=True)
class StatDimEstimate:
    N: int
    K: int
    samples: int
    mean: float
    stderr: float
    seed: int

    @property
    def eps(self) -> float:
        return self.K / self.N


def statdim_mc(N: int, K: int, samples: int, seed: int) -> StatDimEstimate:
    """Monte Carlo estimate of delta(D)/N at support size N-K."""
    if not 0 <= K <= N:
        raise ValueError(f"need 0 <= K <= N, got K={K}, N={N}")
    if samples < 2:
        raise ValueError("need at least 2 samples for a standard error")
    I = np.arange(N - K, dtype=np.int64)
    vals = np.empty(samples)
    for s in range(samples):
        g = Stream(derive_seed("statdim", N, K, seed, s)).normal(N)
        vals[s] = project_onto_D(g, I).squared_norm_over_N
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(samples))
    return StatDimEstimate(N, K, samples, mean, stderr, seed)


def write_statdim_csv(path, estimates) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "K", "epsilon", "samples", "mean", "stderr", "seed"])
        for e in estimates:
            w.writerow([e.N, e.K, repr(e.eps), e.samples, repr(e.mean),
                        repr(e.stderr), e.seed])


def population_objective(mu: float, eps: float) -> float:
    """Large-N limit of the projection objective at shift mu.

    (1-eps) E[(G-mu)_+^2] + eps (1+mu^2) with G standard normal, using
    E[(G-mu)_+^2] = (1+mu^2)(1-Phi(mu)) - mu phi(mu).  Its minimum over mu
    equals delta*(eps).
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    sf = 0.5 * math.erfc(mu / math.sqrt(2.0))
    pdf = math.exp(-0.5 * mu * mu) / math.sqrt(2.0 * math.pi)
    plus_sq = (1.0 + mu * mu) * sf - mu * pdf
    return (1.0 - eps) * plus_sq + eps * (1.0 + mu * mu)


def minimize_population_objective(eps: float, lo: float = -2.0, hi: float = 12.0,
                                  tol: float = 1e-13) -> Tuple[float, float]:
    """Golden-section minimum of the population objective; (mu_min, f_min).

    Independent of the boundary root-finder on purpose: agreement of the two
    routes is one of the package's consistency checks.
    """
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc = population_objective(c, eps)
    fd = population_objective(d, eps)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = population_objective(c, eps)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = population_objective(d, eps)
    mu = 0.5 * (a + b)
    return mu, population_objective(mu, eps)
