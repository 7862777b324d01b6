#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-numpy fallback.

Two hot paths are measured on representative workloads:

* the dense simplex loop, on certification LPs taken from real phase-diagram
  cells at desk scale (N = 400), including the degenerate plateau walks that
  dominate identifiable instances;
* the cone-projection multiplier scan, on the Monte Carlo statistical
  dimension workload (N = 4000 Gaussian vectors).

Run after building the extension (pip install -e . --no-build-isolation):

    python benchmarks/bench_kernels.py

``IDPHASE_PURE=1`` is applied internally for the fallback timings; the
verdicts and multiplier values of the two backends are asserted equal.
"""

import time

import numpy as np

from idphase._kernels import _core, pure
from idphase.certifier import ConeSpec
from idphase.experiments import CellSpec, trial_seed
from idphase.lifting import lift, row_compress, stacked_constraints
from idphase.rng import Stream
from idphase.signatures import SignatureModel, sample_signature


def build_projected_lp(kind, N, L, K, seed):
    spec = CellSpec(kind, N, L, K)
    model = SignatureModel(kind)
    S = sample_signature(model, L, N, trial_seed(seed, spec, 0))
    R = row_compress(stacked_constraints(lift(S), "reduced" if model.is_pm_one
                                         else "full"))
    cone = ConeSpec.canonical(N, K)
    RIc = R[:, cone.I_c]
    u, s, _ = np.linalg.svd(RIc)
    cut = 1e-10 * max(RIc.shape) * s[0]
    rho = int(np.count_nonzero(s > cut))
    P = u[:, rho:].T @ R[:, cone.I]
    mI = cone.I.size
    m, n = P.shape[0] + 1, mI + 1
    T = np.zeros((m + 1, n + 1))
    T[:m - 1, :mI] = P
    T[m - 1, :mI] = 1.0
    T[m - 1, n - 1] = 1.0
    T[m - 1, n] = 1.0
    T[m, :mI] = 1.0
    basis = np.array([n + 1 + i for i in range(m - 1)] + [n - 1], dtype=np.int64)
    return T, basis, n


def bench_simplex():
    print("simplex loop (drive-out + pivoting to optimality)")
    print(f"{'instance':<38}{'compiled':>12}{'pure':>12}{'speedup':>9}")
    for kind, K, label in [("rademacher", 100, "identifiable plateau"),
                           ("rademacher", 140, "witness search"),
                           ("gaussian", 150, "near transition")]:
        T0, basis0, n = build_projected_lp(kind, 400, 21, K, 7)
        results = {}
        for name, mod in (("compiled", _core), ("pure", pure)):
            T, basis = T0.copy(), basis0.copy()
            t = time.perf_counter()
            assert mod.drive_out(T, basis, n) == 0
            status, iters = mod.simplex_max(T, basis, n, 300_000, 1e-9, 1e-11, 64)
            dt = time.perf_counter() - t
            assert status == 0
            results[name] = (dt, iters, -T[-1, -1])
        same = abs(results["compiled"][2] - results["pure"][2]) < 1e-9
        tag = f"{kind} K={K} ({label})"
        print(f"{tag:<38}{results['compiled'][0]:>10.3f}s{results['pure'][0]:>10.3f}s"
              f"{results['pure'][0] / results['compiled'][0]:>8.1f}x"
              f"   optima agree: {same}")


def bench_projection():
    print("\ncone-projection multiplier scan (statdim MC workload, N=4000)")
    N, K, samples = 4000, 1200, 100
    gs = [Stream(Stream(s).next_u64()).normal(N) for s in range(samples)]
    out = {}
    for name, mod in (("compiled", _core), ("pure", pure)):
        t = time.perf_counter()
        acc = []
        for g in gs:
            gI = g[:N - K]
            b = np.sort(gI)[::-1].copy()
            acc.append(mod.lagrange_scan(b, float(g[N - K:].sum()), K))
        out[name] = (time.perf_counter() - t, np.array(acc))
    agree = np.abs(out["compiled"][1] - out["pure"][1]).max() < 1e-12
    print(f"{'batch of ' + str(samples) + ' samples':<38}"
          f"{out['compiled'][0]:>10.3f}s{out['pure'][0]:>10.3f}s"
          f"{out['pure'][0] / out['compiled'][0]:>8.1f}x   values agree: {agree}")


if __name__ == "__main__":
    bench_simplex()
    bench_projection()
