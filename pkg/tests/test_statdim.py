import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idphase.rng import Stream
from idphase.statdim import (StatDimEstimate, lagrange_mu, minimize_population_objective,
                             population_objective, project_onto_D, statdim_mc,
                             write_statdim_csv)
from idphase.theory import delta_star


def _mu_equation_lhs(mu, g, I):
    g = np.asarray(g, dtype=float)
    mask = np.zeros(g.size, dtype=bool)
    mask[np.asarray(I, dtype=int)] = True
    return float(np.clip(g[mask] - mu, 0.0, None).sum() + (g[~mask] - mu).sum())


def _mu_bisect_oracle(g, I, lo=-1e6, hi=1e6, iters=200):
    # scalar bisection on the monotone decreasing left side
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if _mu_equation_lhs(mid, g, I) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_lagrange_mu_spec_examples():
    assert lagrange_mu([1.0, -1.0], [0]) == (0.0, False)
    assert lagrange_mu([-1.0, 1.0], [0]) == (1.0, False)
    mu, deg = lagrange_mu([2.0, 0.0, 0.0], [0, 1])
    assert mu == pytest.approx(1.0, abs=1e-14)
    assert mu == pytest.approx(_mu_bisect_oracle([2.0, 0.0, 0.0], [0, 1]), abs=1e-9)
    assert not deg


def test_lagrange_mu_degenerate_all_nonpositive():
    mu, deg = lagrange_mu([-3.0, -1.0], [0, 1])
    assert deg and mu == 0.0
    x = project_onto_D([-3.0, -1.0], [0, 1]).x
    assert np.array_equal(x, np.zeros(2))


def test_lagrange_mu_k_zero_with_positives():
    mu, deg = lagrange_mu([2.0, -1.0], [0, 1])
    assert not deg and mu == 2.0  # smallest root; projection is 0 anyway
    assert np.array_equal(project_onto_D([2.0, -1.0], [0, 1]).x, np.zeros(2))


def test_projection_spec_examples():
    r = project_onto_D([2.0, 0.0, 0.0], [0, 1])
    assert r.mu == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(r.x, [1.0, 0.0, -1.0])
    assert r.squared_norm_over_N == pytest.approx(2.0 / 3.0, abs=1e-14)

    r = project_onto_D([-1.0, 1.0], [0])
    assert np.allclose(r.x, [0.0, 0.0])


def test_projection_identity_on_cone_points():
    # g already in D: x = g, mu = 0
    g = np.array([1.0, 2.0, -3.0])
    r = project_onto_D(g, [0, 1])
    assert np.allclose(r.x, g, atol=1e-14)
    assert r.mu == pytest.approx(0.0, abs=1e-14)


def test_projection_hyperplane_case_K_equals_N():
    g = Stream(3).normal(40)
    r = project_onto_D(g, [])
    exact = (g @ g - g.sum() ** 2 / 40) / 40
    assert r.squared_norm_over_N == pytest.approx(exact, abs=1e-13)
    assert r.mu == pytest.approx(g.mean(), abs=1e-13)


def test_projection_K_zero_is_origin():
    g = Stream(4).normal(25)
    r = project_onto_D(g, np.arange(25))
    assert r.squared_norm_over_N == 0.0


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 40), st.integers(0, 40), st.integers(0, 2 ** 32 - 1))
def test_projection_invariants(n, k_raw, seed):
    k = min(k_raw, n)
    g = Stream(seed).normal(n)
    I = np.arange(n - k)
    r = project_onto_D(g, I)
    x = r.x
    # membership: zero-sum and sign constraints
    assert abs(x.sum()) <= 1e-9 * (1.0 + np.abs(g).sum())
    if I.size:
        assert x[I].min() >= 0.0
    # orthogonality <g - x, x> ~ 0 and contraction ||x|| <= ||g||
    assert abs((g - x) @ x) <= 1e-9 * (g @ g + 1.0)
    assert x @ x <= g @ g + 1e-12
    # exact multiplier: plugging mu back in annihilates the equation
    if not r.degenerate and k >= 1:
        assert abs(_mu_equation_lhs(r.mu, g, I)) <= 1e-12 * (1.0 + np.abs(g).sum())
        # monotone left side straddles zero around mu
        assert _mu_equation_lhs(r.mu - 0.1, g, I) >= -1e-12
        assert _mu_equation_lhs(r.mu + 0.1, g, I) <= 1e-12
    # idempotence
    r2 = project_onto_D(x, I)
    assert np.abs(r2.x - x).max() <= 1e-9 * (1.0 + np.abs(x).max())


def test_statdim_mc_hyperplane_mean():
    # K = N: the cone is the zero-sum hyperplane, statistical dimension N-1
    est = statdim_mc(50, 50, 40, 9)
    assert abs(est.mean - 49.0 / 50.0) <= 4.0 * est.stderr
    # and every sample is exactly the hyperplane-projection energy
    g = Stream(__import__("idphase.rng", fromlist=["derive_seed"]).derive_seed(
        "statdim", 50, 50, 9, 0)).normal(50)
    first = (g @ g - g.sum() ** 2 / 50) / 50
    assert project_onto_D(g, []).squared_norm_over_N == pytest.approx(first, abs=1e-13)


def test_statdim_mc_origin():
    est = statdim_mc(30, 0, 10, 9)
    assert est.mean == 0.0 and est.stderr == 0.0


def test_statdim_mc_validation():
    with pytest.raises(ValueError):
        statdim_mc(10, 11, 5, 0)
    with pytest.raises(ValueError):
        statdim_mc(10, 5, 1, 0)


def test_statdim_mc_tracks_theory():
    est = statdim_mc(1500, 450, 60, 5)
    assert abs(est.mean - delta_star(0.3)) <= max(4 * est.stderr, 0.02)


def test_statdim_csv(tmp_path):
    ests = [statdim_mc(30, 10, 5, 1)]
    path = tmp_path / "sd.csv"
    write_statdim_csv(path, ests)
    lines = path.read_text().splitlines()
    assert lines[0] == "N,K,epsilon,samples,mean,stderr,seed"
    assert len(lines) == 2


def test_population_objective_special_values():
    assert population_objective(0.0, 0.0) == pytest.approx(0.5, abs=1e-15)
    for mu in (0.0, 0.5, 2.0):
        assert population_objective(mu, 1.0) == pytest.approx(1.0 + mu * mu, abs=1e-15)
    with pytest.raises(ValueError):
        population_objective(0.0, 1.5)


def test_population_objective_min_equals_boundary():
    for eps in (0.1, 0.3, 0.5, 0.7, 0.9):
        _, fmin = minimize_population_objective(eps)
        assert fmin == pytest.approx(delta_star(eps), abs=1e-9)
