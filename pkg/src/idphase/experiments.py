"""Phase-diagram sweeps, transition estimation, and rank scans.

Everything here is a deterministic function of (config, base_seed): each
trial's stream seed is derived from the base seed, the cell coordinates
(model tag, N, L, K) and the trial number, so cells can run in any order on
any number of workers and still reproduce bit-identical CSVs.  Wall-clock
and environment echoes live only in the manifest, never in the data files.
"""

import csv
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .certifier import AmbiguityError, Certificate, CertifierConfig, ConeSpec, certify
from .lifting import (hadamard_rank_oracle, lift, numerical_rank, row_compress,
                      semi_random_system, singular_values, stacked_constraints)
from .rng import derive_seed
from .signatures import SignatureModel, sample_signature
from .theory import delta_star, eps_star


@dataclass(frozen=True)
class CellSpec:
    """One (model, N, L, K) lattice cell; ``spectrum`` only for the surrogate."""

    model_kind: str  # gaussian | rademacher | hadamard | semirandom
    N: int
    L: int
    K: int
    n_full: Optional[int] = None
    spectrum: Optional[Tuple[float, ...]] = None

    @property
    def d(self) -> int:
        if self.model_kind == "semirandom":
            return len(self.spectrum)
        return self.L * (self.L - 1) // 2

    @property
    def eps(self) -> float:
        return self.K / self.N


@dataclass(frozen=True)
class PhaseCellResult:
    spec: CellSpec
    alpha_target: float
    alpha_achieved: float  # measured stack rank / N, averaged over trials
    trials: int
    identifiable_count: int
    ambiguous_count: int
    base_seed: int

    @property
    def probability(self) -> float:
        good = self.trials - self.ambiguous_count
        return self.identifiable_count / good if good else math.nan


@dataclass(frozen=True)
class TransitionEstimate:
    model_kind: str
    N: int
    alpha: float
    eps50: float
    method: str
    censored: str = ""  # "", "low", or "high"
    alpha_rank: float = math.nan  # (mean stack rank - 1)/N at the bracket cells


def choose_L(alpha: float, N: int) -> Tuple[int, float]:
    """Smallest-error signature length for a target pair ratio alpha = d/N.

    Solves L(L-1)/2 = alpha*N and picks the neighbor of the real root whose
    d is closest to the target (ties resolve upward, matching plain
    rounding of the root).  Returns (L, achieved d/N).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if N < 2:
        raise ValueError("N must be >= 2")
    target = alpha * N
    root = 0.5 * (1.0 + math.sqrt(1.0 + 8.0 * target))
    lo = max(2, math.floor(root))
    cands = [lo, lo + 1]
    best = min(cands, key=lambda L: (abs(L * (L - 1) / 2 - target), -L))
    if best < 2:
        raise ValueError(f"alpha={alpha}, N={N} gives L < 2")
    return best, best * (best - 1) / 2 / N


def trial_seed(base_seed: int, spec: CellSpec, t: int) -> int:
    """Documented per-trial stream seed: mix of base, cell coordinates, trial."""
    return derive_seed(base_seed, spec.model_kind, spec.N, spec.L, spec.K, t)


def _trial(spec: CellSpec, seed_t: int, cfg: CertifierConfig):
    """One certification trial; returns (verdict, stack_rank).

    verdict: 1 identifiable, 0 not, -1 ambiguous.  +-1-valued models use the
    reduced stack [1; A2]; the Gaussian model must keep all of [A1; A2].
    """
    if spec.model_kind == "semirandom":
        M = semi_random_system(np.asarray(spec.spectrum), spec.N, seed_t).matrix
    else:
        model = SignatureModel(spec.model_kind,
                               spec.n_full if spec.model_kind == "hadamard" else None)
        S = sample_signature(model, spec.L, spec.N, seed_t)
        sys = lift(S)
        M = stacked_constraints(sys, "reduced" if model.is_pm_one else "full")
    R = row_compress(M, cfg.rank_rel_tol)
    cone = ConeSpec.canonical(spec.N, spec.K)
    try:
        cert = certify(R, cone, cfg)
    except AmbiguityError:
        return -1, R.shape[0]
    return (1 if cert.identifiable else 0), R.shape[0]


def _trial_star(args):
    return _trial(*args)


def run_phase_cell(spec: CellSpec, alpha_target: float, trials: int, base_seed: int,
                   cfg: CertifierConfig = CertifierConfig(),
                   executor: Optional[ProcessPoolExecutor] = None) -> PhaseCellResult:
    """Certify ``trials`` independent draws of one cell and count verdicts."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tasks = [(spec, trial_seed(base_seed, spec, t), cfg) for t in range(trials)]
    if executor is not None and trials > 1:
        chunk = max(1, trials // (8 * getattr(executor, "_max_workers", 1)))
        outcomes = list(executor.map(_trial_star, tasks, chunksize=chunk))
    else:
        outcomes = [_trial(*t) for t in tasks]
    verdicts = np.array([o[0] for o in outcomes])
    ranks = np.array([o[1] for o in outcomes], dtype=np.float64)
    ambiguous = int(np.count_nonzero(verdicts < 0))
    if ambiguous:
        warnings.warn(f"{ambiguous}/{trials} ambiguous certifications in cell {spec}")
        if ambiguous / trials >= 0.01:
            raise RuntimeError(f"cell {spec}: ambiguous rate {ambiguous}/{trials} >= 1%")
    return PhaseCellResult(
        spec=spec,
        alpha_target=alpha_target,
        alpha_achieved=float(ranks.mean()) / spec.N,
        trials=trials,
        identifiable_count=int(np.count_nonzero(verdicts == 1)),
        ambiguous_count=ambiguous,
        base_seed=base_seed,
    )


PHASE_CSV_COLUMNS = ["model", "N", "L", "d", "K", "alpha_target", "alpha_achieved",
                     "epsilon", "trials", "identifiable_count", "ambiguous_count",
                     "base_seed"]


def phase_csv_row(r: PhaseCellResult) -> list:
    s = r.spec
    return [s.model_kind, s.N, s.L, s.d, s.K, repr(float(r.alpha_target)),
            repr(r.alpha_achieved), repr(s.eps), r.trials, r.identifiable_count,
            r.ambiguous_count, r.base_seed]


@dataclass(frozen=True)
class PhaseDiagramConfig:
    model_kind: str
    N: int
    alphas: Tuple[float, ...]
    epss: Tuple[float, ...]
    trials: int
    base_seed: int
    n_full: Optional[int] = None
    feas_tol: float = 1e-9
    rank_rel_tol: float = 1e-10
    workers: int = 1


@dataclass(frozen=True)
class PhaseDiagram:
    config: PhaseDiagramConfig
    cells: Tuple[PhaseCellResult, ...]


def _pool(workers: int):
    return ProcessPoolExecutor(max_workers=workers) if workers > 1 else None


def run_phase_diagram(config: PhaseDiagramConfig, out_dir=None) -> PhaseDiagram:
    """Sweep the (alpha, eps) lattice; optionally stream phase_diagram.csv.

    Rows are appended (and flushed) cell by cell so a crash leaves a valid
    prefix; the manifest is written last and marks the run complete.
    """
    cfg = CertifierConfig(feas_tol=config.feas_tol, rank_rel_tol=config.rank_rel_tol)
    out = Path(out_dir) if out_dir is not None else None
    writer = fh = None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        fh = open(out / "phase_diagram.csv", "w", newline="")
        writer = csv.writer(fh)
        writer.writerow(PHASE_CSV_COLUMNS)
        fh.flush()
    started = time.time()
    cells = []
    executor = _pool(config.workers)
    try:
        for alpha in config.alphas:
            L, _ = choose_L(alpha, config.N)
            for eps in config.epss:
                K = int(round(eps * config.N))
                spec = CellSpec(config.model_kind, config.N, L, K, n_full=config.n_full)
                cell = run_phase_cell(spec, alpha, config.trials, config.base_seed,
                                      cfg, executor)
                cells.append(cell)
                if writer is not None:
                    writer.writerow(phase_csv_row(cell))
                    fh.flush()
    finally:
        if executor is not None:
            executor.shutdown()
        if fh is not None:
            fh.close()
    if out is not None:
        write_manifest(out / "manifest.json", asdict(config),
                       wall_seconds=time.time() - started)
    return PhaseDiagram(config, tuple(cells))


def write_manifest(path, config_echo: dict, **extra) -> None:
    rec = {"tool": "idphase", "version": __version__, "config": config_echo}
    rec.update(extra)
    rec["written_at"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    with open(path, "w") as fh:
        json.dump(rec, fh, indent=2, sort_keys=True)
        fh.write("\n")


def interpolate_eps50(points: Sequence[Tuple[float, float]]):
    """50% crossing by linear interpolation of (eps, probability) pairs.

    Returns (eps50, censored) where censored is "", "low", or "high";
    censored columns report the nearest scanned eps, flagged, not invented.
    """
    pts = sorted(points)
    if len(pts) < 2:
        raise ValueError("need at least two scanned eps values")
    for (e0, p0), (e1, p1) in zip(pts, pts[1:]):
        if p0 >= 0.5 > p1:
            if p0 == p1:
                return 0.5 * (e0 + e1), ""
            return e0 + (p0 - 0.5) * (e1 - e0) / (p0 - p1), ""
    if all(p >= 0.5 for _, p in pts):
        return pts[-1][0], "high"
    return pts[0][0], "low"


def estimate_transition(diagram: PhaseDiagram) -> List[TransitionEstimate]:
    """Per-alpha 50% crossings from an already-computed diagram."""
    out = []
    for alpha in diagram.config.alphas:
        col = [c for c in diagram.cells if c.alpha_target == alpha]
        pts = [(c.spec.eps, c.probability) for c in col]
        eps50, censored = interpolate_eps50(pts)
        ranks = [c.alpha_achieved for c in col]
        out.append(TransitionEstimate(diagram.config.model_kind, diagram.config.N,
                                      alpha, eps50, "grid-interpolation", censored,
                                      float(np.mean(ranks)) - 1.0 / diagram.config.N))
    return out


def adaptive_transition(model_kind: str, N: int, alpha: float, trials: int,
                        base_seed: int, n_full: Optional[int] = None,
                        spectrum: Optional[Sequence[float]] = None,
                        cfg: CertifierConfig = CertifierConfig(),
                        eps_lo: float = 0.02, eps_hi: float = 0.95,
                        resolution: float = 0.01, step: float = 0.08,
                        executor: Optional[ProcessPoolExecutor] = None,
                        ) -> Tuple[TransitionEstimate, List[PhaseCellResult]]:
    """Bracketing search for the 50% identifiability crossing at fixed alpha.

    Starts from the theory guess, expands outward to bracket the crossing,
    then bisects on the K grid until the bracket is narrower than
    ``resolution``.  Fresh cells (``trials`` each) are run at every probe.
    """
    if spectrum is not None:
        L = choose_L(alpha, N)[0]  # geometry bookkeeping only
        spectrum = tuple(float(v) for v in spectrum)
    else:
        L, _ = choose_L(alpha, N)

    cache: dict = {}
    cells: List[PhaseCellResult] = []
    K_min = max(1, int(round(eps_lo * N)))
    K_max = max(K_min, int(round(eps_hi * N)))

    def probe(K: int) -> float:
        if K not in cache:
            spec = CellSpec(model_kind, N, L, K, n_full=n_full, spectrum=spectrum)
            cell = run_phase_cell(spec, alpha, trials, base_seed, cfg, executor)
            cache[K] = cell
            cells.append(cell)
        return cache[K].probability

    guess = min(max(eps_star(alpha), eps_lo), eps_hi)
    K = int(np.clip(int(round(guess * N)), K_min, K_max))
    K_lo = K_hi = None
    stride = max(1, int(round(step * N)))
    if probe(K) >= 0.5:
        K_lo = K
        while K_hi is None:
            K2 = min(K_lo + stride, K_max)
            if K2 <= K_lo:  # no room above: crossing not observed
                return _censored_estimate(model_kind, N, alpha, K_lo / N,
                                          "high", cells), cells
            if probe(K2) < 0.5:
                K_hi = K2
            else:
                K_lo = K2
    else:
        K_hi = K
        while K_lo is None:
            K2 = max(K_hi - stride, K_min)
            if K2 >= K_hi:  # no room below
                return _censored_estimate(model_kind, N, alpha, K_hi / N,
                                          "low", cells), cells
            if probe(K2) >= 0.5:
                K_lo = K2
            else:
                K_hi = K2

    while (K_hi - K_lo) / N > resolution and K_hi - K_lo > 1:
        mid = (K_lo + K_hi) // 2
        if probe(mid) >= 0.5:
            K_lo = mid
        else:
            K_hi = mid

    p_lo, p_hi = cache[K_lo].probability, cache[K_hi].probability
    eps50, _ = interpolate_eps50([(K_lo / N, p_lo), (K_hi / N, p_hi)])
    alpha_rank = 0.5 * (cache[K_lo].alpha_achieved + cache[K_hi].alpha_achieved) - 1.0 / N
    est = TransitionEstimate(model_kind, N, alpha, eps50, "adaptive-bisect", "",
                             alpha_rank)
    return est, cells


def _censored_estimate(model_kind, N, alpha, eps_edge, side, cells):
    ranks = [c.alpha_achieved for c in cells]
    return TransitionEstimate(model_kind, N, alpha, eps_edge, "adaptive-bisect",
                              side, float(np.mean(ranks)) - 1.0 / N)


def compare_semirandom(model_kind: str, N: int, alpha: float, trials: int,
                       base_seed: int, n_full: Optional[int] = None,
                       cfg: CertifierConfig = CertifierConfig(),
                       resolution: float = 0.01,
                       executor: Optional[ProcessPoolExecutor] = None):
    """Transition of the true lifted model vs the matched-spectrum surrogate.

    The surrogate's spectrum comes from the A2 block of one independent
    signature draw at the same (L, N), not from the trial draws themselves.
    Returns (true_estimate, surrogate_estimate, all_cells).
    """
    L, _ = choose_L(alpha, N)
    model = SignatureModel(model_kind, n_full if model_kind == "hadamard" else None)
    S_ind = sample_signature(model, L, N, derive_seed(base_seed, "surrogate-spectrum"))
    spectrum = singular_values(lift(S_ind).A2)

    est_true, cells_t = adaptive_transition(
        model_kind, N, alpha, trials, base_seed, n_full=n_full, cfg=cfg,
        resolution=resolution, executor=executor)
    est_sur, cells_s = adaptive_transition(
        "semirandom", N, alpha, trials, base_seed, spectrum=spectrum, cfg=cfg,
        resolution=resolution, executor=executor)
    return est_true, est_sur, cells_t + cells_s


TRANSITIONS_CSV_COLUMNS = ["model", "N", "alpha", "epsilon_50", "method", "censored"]


def write_transitions_csv(path, estimates: Sequence[TransitionEstimate]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRANSITIONS_CSV_COLUMNS)
        for e in estimates:
            w.writerow([e.model_kind, e.N, repr(float(e.alpha)), repr(float(e.eps50)),
                        e.method, e.censored])


RANK_SCAN_CSV_COLUMNS = ["n_full", "N", "L", "d", "seed", "measured_rank", "oracle_rank"]


def rank_scan(n_full: int, sizes: Sequence[Tuple[int, int]], seeds: Sequence[int],
              rel_tol: float = 1e-10) -> List[dict]:
    """Measured rank of the Hadamard A2 block against the XOR oracle.

    Whenever N >= the oracle value the two must agree exactly; disagreement
    means an SVD-tolerance or construction bug and raises immediately.
    """
    rows = []
    for (N, L) in sizes:
        for seed in seeds:
            S = sample_signature(SignatureModel("hadamard", n_full), L, N, seed)
            A2 = lift(S).A2
            measured = numerical_rank(A2, rel_tol)
            oracle = hadamard_rank_oracle(S.row_indices)
            if N >= oracle and measured != oracle:
                raise RuntimeError(
                    f"rank mismatch at n_full={n_full}, N={N}, L={L}, seed={seed}: "
                    f"SVD says {measured}, XOR oracle says {oracle}")
            rows.append({"n_full": n_full, "N": N, "L": L, "d": L * (L - 1) // 2,
                         "seed": seed, "measured_rank": measured,
                         "oracle_rank": oracle})
    return rows


def write_rank_scan_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RANK_SCAN_CSV_COLUMNS)
        for r in rows:
            w.writerow([r[c] for c in RANK_SCAN_CSV_COLUMNS])
