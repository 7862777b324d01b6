"""The compiled kernels must agree with the pure-numpy reference."""

import numpy as np
import pytest

from idphase._kernels import BACKEND_NAME, pure
from idphase.rng import Stream

try:
    from idphase._kernels import _core
except ImportError:
    _core = None

needs_core = pytest.mark.skipif(_core is None, reason="compiled kernels not built")


def test_backend_selected():
    assert BACKEND_NAME in ("compiled", "pure")


def _random_tableau(stream, m, n_struct):
    # rows 0..m-2: random equality rows with b = 0; last row: sum + slack = 1
    T = np.zeros((m + 1, n_struct + 1))
    T[:m - 1, :n_struct - 1] = stream.normal((m - 1) * (n_struct - 1)).reshape(
        m - 1, n_struct - 1)
    T[m - 1, :n_struct - 1] = 1.0
    T[m - 1, n_struct - 1] = 1.0
    T[m - 1, n_struct] = 1.0
    T[m, : n_struct - 1] = 1.0
    basis = np.array([n_struct + 1 + i for i in range(m - 1)] + [n_struct - 1],
                     dtype=np.int64)
    return T, basis


@needs_core
def test_drive_out_matches_pure():
    stream = Stream(404)
    for _ in range(20):
        m, n = 4 + stream.randint(4), 9 + stream.randint(6)
        T, basis = _random_tableau(stream, m, n)
        T2, basis2 = T.copy(), basis.copy()
        s1 = pure.drive_out(T, basis, n)
        s2 = _core.drive_out(T2, basis2, n)
        assert s1 == s2 == 0
        assert np.allclose(T, T2, atol=1e-12)
        assert np.array_equal(basis, basis2)


@needs_core
def test_simplex_matches_pure():
    stream = Stream(808)
    for _ in range(30):
        m, n = 4 + stream.randint(4), 9 + stream.randint(6)
        T, basis = _random_tableau(stream, m, n)
        T2, basis2 = T.copy(), basis.copy()
        assert pure.drive_out(T, basis, n) == 0
        assert _core.drive_out(T2, basis2, n) == 0
        s1, it1 = pure.simplex_max(T, basis, n, 10_000, 1e-9, 1e-11, 64)
        s2, it2 = _core.simplex_max(T2, basis2, n, 10_000, 1e-9, 1e-11, 64)
        assert (s1, it1) == (s2, it2)
        assert T[-1, -1] == pytest.approx(T2[-1, -1], abs=1e-9)
        assert np.array_equal(basis, basis2)


@needs_core
def test_lagrange_scan_matches_pure():
    stream = Stream(99)
    for _ in range(200):
        mI = stream.randint(30)
        k_free = 1 + stream.randint(5)
        b = np.sort(stream.normal(mI))[::-1].copy()
        sum_c = float(stream.normal(1)[0]) * k_free
        mu1 = pure.lagrange_scan(b, sum_c, k_free)
        mu2 = _core.lagrange_scan(b, sum_c, k_free)
        assert mu1 == pytest.approx(mu2, abs=1e-12)


def test_pivot_sets_exact_unit_column():
    T = np.array([[2.0, 1.0, 4.0], [1.0, 3.0, 5.0], [1.0, 1.0, 0.0]])
    basis = np.array([5, 6], dtype=np.int64)
    pure.pivot(T, basis, 0, 0)
    assert T[0, 0] == 1.0 and T[1, 0] == 0.0 and T[2, 0] == 0.0
    assert basis[0] == 0
