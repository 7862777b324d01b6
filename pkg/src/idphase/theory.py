"""Analytical phase-transition boundary and concentration diagnostics.

The boundary delta*(eps) separates the regimes where a random
rank-(alpha N) constraint system almost surely does / does not intersect
the descent cone of an eps N-sparse non-negative pattern:

    delta*(eps) = 1 - (1 - eps) * Phi(mu*(eps)),

with mu*(eps) the unique positive root of

    (1 - eps) * (mu * (1 - Phi(mu)) - phi(mu)) + eps * mu = 0.          (*)

Dividing (*) by mu * (1 - eps) gives G(mu) = -eps / (1 - eps) with
G(mu) = 1 - Phi(mu) - phi(mu) / mu, which is strictly increasing from
-inf to 0 on (0, inf), so a bracketing bisection always converges; a
safeguarded Newton solver on (*) itself is kept as an independent route
and the two must agree to 1e-10.

Phi is evaluated through the C library's erfc, accurate to ~1e-16 in
absolute terms, which matters near the sparse limit where 1 - Phi(mu*)
is the whole story: delta*(eps) ~ 2 eps log(1/eps) as eps -> 0.
"""

import csv
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_EPS_DOMAIN = 1e-12  # refuse to extrapolate past this


def std_normal_pdf(x: float) -> float:
    """phi(x) = exp(-x^2/2) / sqrt(2 pi)."""
    return math.exp(-0.5 * x * x) / _SQRT_2PI


def std_normal_cdf(x: float) -> float:
    """Phi(x) via erfc for full accuracy in both tails."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def std_normal_sf(x: float) -> float:
    """1 - Phi(x), computed without cancellation."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if eps < _EPS_DOMAIN or eps > 1.0 - _EPS_DOMAIN:
        raise ValueError(f"eps={eps} is outside the supported range "
                         f"[{_EPS_DOMAIN}, {1 - _EPS_DOMAIN}]; refusing to extrapolate")


def boundary_equation(mu: float, eps: float) -> float:
    """Left side of (*); zero exactly at mu*(eps)."""
    return (1.0 - eps) * (mu * std_normal_sf(mu) - std_normal_pdf(mu)) + eps * mu


def _boundary_equation_dmu(mu: float, eps: float) -> float:
    # d/dmu [mu(1-Phi) - phi] = (1-Phi) - mu phi + mu phi = 1 - Phi
    return (1.0 - eps) * std_normal_sf(mu) + eps


def _g(mu: float) -> float:
    return std_normal_sf(mu) - std_normal_pdf(mu) / mu


def _bracket(eps: float) -> Tuple[float, float]:
    target = -eps / (1.0 - eps)
    lo, hi = 1e-8, 10.0
    while _g(hi) <= target:  # G increases to 0-, so expanding up must cross
        hi *= 2.0
        if hi > 1e8:
            raise ArithmeticError("failed to bracket the boundary root")
    while _g(lo) >= target:
        lo *= 0.5
        if lo < 1e-300:
            raise ArithmeticError("failed to bracket the boundary root")
    return lo, hi


def mu_star(eps: float, tol: float = 1e-12, method: str = "bisect") -> float:
    """Unique positive root of the boundary equation (*).

    ``bisect`` brackets G(mu) = -eps/(1-eps) and bisects until the residual
    of (*) is below ``tol`` and the bracket is at relative width ~1e-15;
    ``newton`` iterates on (*) with its exact derivative, safeguarded by the
    same bracket.  The two are independent routes used to cross-check each
    other in the tests.
    """
    _check_eps(eps)
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi = _bracket(eps)
    if method == "bisect":
        target = -eps / (1.0 - eps)
        while True:
            mid = 0.5 * (lo + hi)
            if _g(mid) < target:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi and abs(boundary_equation(mid, eps)) <= tol:
                return mid
    elif method == "newton":
        mu = 0.5 * (lo + hi)
        for _ in range(200):
            f = boundary_equation(mu, eps)
            step = f / _boundary_equation_dmu(mu, eps)
            nxt = mu - step
            if not lo < nxt < hi:  # safeguard: fall back to bisection
                if f > 0:
                    hi = mu
                else:
                    lo = mu
                nxt = 0.5 * (lo + hi)
            if abs(nxt - mu) <= 1e-16 * max(1.0, abs(mu)) and \
                    abs(boundary_equation(nxt, eps)) <= tol:
                return nxt
            mu = nxt
        if abs(boundary_equation(mu, eps)) <= tol:
            return mu
        raise ArithmeticError(f"newton failed to converge at eps={eps}")
    else:
        raise ValueError(f"unknown method {method!r}")


def delta_star(eps: float, tol: float = 1e-12) -> float:
    """Boundary value delta*(eps) = 1 - (1-eps) Phi(mu*(eps))."""
    mu = mu_star(eps, tol)
    return 1.0 - (1.0 - eps) * std_normal_cdf(mu)


def delta_star_asymptote(eps: float) -> float:
    """Sparse-limit equivalent 2 eps log(1/eps)."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return 2.0 * eps * math.log(1.0 / eps)


def eps_star(alpha: float, tol: float = 1e-12) -> float:
    """Inverse boundary: the eps with delta*(eps) = alpha (bisection)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    lo, hi = _EPS_DOMAIN, 1.0 - _EPS_DOMAIN
    if delta_star(lo) > alpha or delta_star(hi) < alpha:
        raise ValueError(f"alpha={alpha} is outside the representable boundary range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if delta_star(mid) < alpha:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(hi, 1e-6):
            return 0.5 * (lo + hi)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BoundaryPoint:
    eps: float
    mu: float
    delta: float
    residual: float  # boundary_equation(mu, eps)


@dataclass(frozen=True)
class TheoryCurve:
    points: Tuple[BoundaryPoint, ...]
    tol: float

    def __iter__(self):
        return iter(self.points)


def compute_theory_curve(eps_grid: Sequence[float], tol: float = 1e-12) -> TheoryCurve:
    """Boundary points over a strictly increasing eps grid."""
    eps_grid = [float(e) for e in eps_grid]
    if any(b <= a for a, b in zip(eps_grid, eps_grid[1:])):
        raise ValueError("eps grid must be strictly increasing")
    pts = []
    for e in eps_grid:
        mu = mu_star(e, tol)
        pts.append(BoundaryPoint(e, mu, 1.0 - (1.0 - e) * std_normal_cdf(mu),
                                 boundary_equation(mu, e)))
    return TheoryCurve(tuple(pts), tol)


def write_theory_curve_csv(path, curve: TheoryCurve) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epsilon", "mu_star", "delta_star", "asymptote_2eps_log", "residual"])
        for p in curve:
            w.writerow([repr(p.eps), repr(p.mu), repr(p.delta),
                        repr(delta_star_asymptote(p.eps)), repr(p.residual)])


def tropp_classification(N: int, delta_D: float, delta_K: float, eta: float):
    """Finite-N classification from the concentration band xi_eta / sqrt(N).

    Returns (verdict, xi_eta) with verdict one of ``trivial_whp`` (the cones
    touch only at 0 with probability >= 1 - eta), ``nontrivial_whp``, or
    ``indeterminate`` inside the band.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if not (0.0 <= delta_D <= N and 0.0 <= delta_K <= N):
        raise ValueError("statistical dimensions must lie in [0, N]")
    xi = math.sqrt(8.0 * math.log(4.0 / eta))
    s = (delta_D + delta_K) / N
    band = xi / math.sqrt(N)
    if s <= 1.0 - band:
        return "trivial_whp", xi
    if s >= 1.0 + band:
        return "nontrivial_whp", xi
    return "indeterminate", xi
