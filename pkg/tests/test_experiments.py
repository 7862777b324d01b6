import csv
import math

import numpy as np
import pytest

from idphase.certifier import CertifierConfig
from idphase.experiments import (CellSpec, PhaseDiagramConfig, adaptive_transition,
                                 choose_L, compare_semirandom, estimate_transition,
                                 interpolate_eps50, rank_scan, run_phase_cell,
                                 run_phase_diagram, trial_seed, write_rank_scan_csv,
                                 write_transitions_csv)
from idphase.theory import delta_star, eps_star


def test_choose_L_examples():
    assert choose_L(1.0 / 400.0, 400)[0] == 2  # alpha*N = 1 -> d = 1
    L, achieved = choose_L(0.5, 400)
    assert L in (20, 21)
    assert abs(achieved - 0.5) <= 0.03
    assert choose_L(4950.0 / 400.0, 400)[0] == 100  # 100*99/2 = 4950 exactly
    with pytest.raises(ValueError):
        choose_L(-1.0, 400)
    with pytest.raises(ValueError):
        choose_L(0.5, 1)


def test_choose_L_picks_nearest_d():
    # scan: the returned L's d must be at least as close to alpha*N as neighbors
    for alpha in (0.1, 0.33, 0.5, 0.77):
        for N in (50, 123, 400):
            L, _ = choose_L(alpha, N)
            d = L * (L - 1) / 2
            for other in (L - 1, L + 1):
                if other >= 2:
                    od = other * (other - 1) / 2
                    assert abs(d - alpha * N) <= abs(od - alpha * N) + 1e-9


def test_trial_seeds_distinct():
    spec = CellSpec("gaussian", 50, 6, 10)
    seeds = {trial_seed(3, spec, t) for t in range(200)}
    assert len(seeds) == 200
    other = CellSpec("gaussian", 50, 6, 11)
    assert trial_seed(3, spec, 0) != trial_seed(3, other, 0)


def test_run_phase_cell_deterministic():
    spec = CellSpec("rademacher", 60, 6, 20)
    a = run_phase_cell(spec, 0.25, 8, 5)
    b = run_phase_cell(spec, 0.25, 8, 5)
    assert a == b
    assert 0 <= a.identifiable_count <= 8
    assert a.spec.d == 15


def test_run_phase_cell_k_equals_n_never_identifiable():
    # d + L < N leaves a nontrivial null space and C = R^N
    spec = CellSpec("gaussian", 40, 4, 40)  # d = 6, L = 4, 10 rows < 40
    cell = run_phase_cell(spec, 0.15, 6, 2)
    assert cell.identifiable_count == 0


def test_run_phase_cell_full_column_rank_always_identifiable():
    # Gaussian L = 6: d + L = 21 rows over N = 15 columns, rank 15 = N a.s.
    spec = CellSpec("gaussian", 15, 6, 5)
    cell = run_phase_cell(spec, 1.0, 6, 3)
    assert cell.identifiable_count == 6
    assert cell.alpha_achieved == 1.0


def test_run_phase_cell_semirandom_zero_spectrum():
    # only the all-ones row constrains: never identifiable for K >= 1
    spec = CellSpec("semirandom", 30, 5, 3, spectrum=tuple(np.zeros(10)))
    cell = run_phase_cell(spec, 0.33, 5, 7)
    assert cell.identifiable_count == 0


def test_run_phase_cell_semirandom_full_spectrum():
    # d = N full-rank spectrum plus the ones row: trivial null space
    spec = CellSpec("semirandom", 12, 5, 4, spectrum=tuple(np.ones(12)))
    cell = run_phase_cell(spec, 1.0, 5, 7)
    assert cell.identifiable_count == 5


def test_interpolate_eps50():
    assert interpolate_eps50([(0.2, 1.0), (0.3, 0.0)]) == (0.25, "")
    assert interpolate_eps50([(0.2, 1.0), (0.3, 0.9)]) == (0.3, "high")
    assert interpolate_eps50([(0.2, 0.4), (0.3, 0.2)]) == (0.2, "low")
    with pytest.raises(ValueError):
        interpolate_eps50([(0.2, 1.0)])


def test_run_phase_diagram_and_estimates(tmp_path):
    config = PhaseDiagramConfig(
        model_kind="rademacher", N=60, alphas=(0.35,),
        epss=(0.05, 0.15, 0.25, 0.35, 0.45), trials=10, base_seed=7)
    diagram = run_phase_diagram(config, out_dir=tmp_path)
    assert len(diagram.cells) == 5
    probs = [c.probability for c in diagram.cells]
    # identifiability decays along eps (up to small-sample noise of 2 trials)
    assert all(b <= a + 0.2 for a, b in zip(probs, probs[1:]))
    csv_path = tmp_path / "phase_diagram.csv"
    rows = list(csv.reader(csv_path.open()))
    assert rows[0][:6] == ["model", "N", "L", "d", "K", "alpha_target"]
    assert len(rows) == 6
    assert (tmp_path / "manifest.json").exists()
    ests = estimate_transition(diagram)
    assert len(ests) == 1
    if not ests[0].censored:
        assert 0.05 <= ests[0].eps50 <= 0.45


def test_phase_diagram_rerun_reproduces_csv(tmp_path):
    config = PhaseDiagramConfig(
        model_kind="gaussian", N=40, alphas=(0.3,), epss=(0.1, 0.3), trials=5,
        base_seed=11)
    run_phase_diagram(config, out_dir=tmp_path / "a")
    run_phase_diagram(config, out_dir=tmp_path / "b")
    assert (tmp_path / "a/phase_diagram.csv").read_bytes() == \
           (tmp_path / "b/phase_diagram.csv").read_bytes()


def test_adaptive_transition_small():
    # theory proximity is an acceptance-scale (N = 400) statement; at N = 80
    # only the search mechanics are checked: a proper bracket around 50%
    est, cells = adaptive_transition("rademacher", 80, 0.4, 12, 3,
                                     resolution=0.05, step=0.15)
    assert est.method == "adaptive-bisect"
    assert len(cells) >= 2
    if not est.censored:
        by_k = {c.spec.K: c.probability for c in cells}
        below = [k for k, p in by_k.items() if p >= 0.5 and k / 80 <= est.eps50]
        above = [k for k, p in by_k.items() if p < 0.5 and k / 80 >= est.eps50]
        assert below and above
        assert min(above) - max(below) <= max(1, int(0.05 * 80) + 1)
        assert 0.02 <= est.eps50 <= 0.95


def test_compare_semirandom_runs():
    true_est, sur_est, cells = compare_semirandom(
        "rademacher", 60, 0.4, 10, 13, resolution=0.06)
    assert true_est.model_kind == "rademacher"
    assert sur_est.model_kind == "semirandom"
    assert cells
    if not (true_est.censored or sur_est.censored):
        assert abs(true_est.eps50 - sur_est.eps50) <= 0.2


def test_rank_scan_agreement(tmp_path):
    rows = rank_scan(256, [(60, 8)], seeds=[1, 2, 3])
    for r in rows:
        assert r["measured_rank"] == r["oracle_rank"]
        assert r["d"] == 28
    path = tmp_path / "rs.csv"
    write_rank_scan_csv(path, rows)
    assert len(path.read_text().splitlines()) == 4


def test_transitions_csv(tmp_path):
    est, _ = adaptive_transition("rademacher", 40, 0.4, 4, 3, resolution=0.2,
                                 step=0.3)
    path = tmp_path / "tr.csv"
    write_transitions_csv(path, [est])
    lines = path.read_text().splitlines()
    assert lines[0] == "model,N,alpha,epsilon_50,method,censored"
    assert len(lines) == 2


def test_parallel_matches_serial():
    from idphase.experiments import _pool
    spec = CellSpec("gaussian", 50, 6, 15)
    serial = run_phase_cell(spec, 0.3, 8, 21)
    ex = _pool(2)
    try:
        parallel = run_phase_cell(spec, 0.3, 8, 21, executor=ex)
    finally:
        ex.shutdown()
    assert serial == parallel
