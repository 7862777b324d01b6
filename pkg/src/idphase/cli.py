"""Command-line entry point.

One subcommand per pipeline: theory, statdim, certify, phase, transition,
compare-semirandom, rank-scan, spectrum.  Flags override config-file values
(``--config`` is JSON with the same keys); every run echoes its resolved
configuration into ``manifest.json`` in the output directory.  Progress goes
to stderr, data to files or stdout.  Exit codes: 0 success, 1 usage or
domain error, 2 numerical failure.
"""

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .certifier import (CertifierConfig, ConeSpec, NumericalFailureError, certify)
from .experiments import (PhaseDiagramConfig, adaptive_transition, choose_L,
                          compare_semirandom, phase_csv_row, PHASE_CSV_COLUMNS,
                          rank_scan, run_phase_diagram, write_manifest,
                          write_rank_scan_csv, write_transitions_csv)
from .lifting import lift, singular_values, stacked_constraints, write_spectrum_csv
from .signatures import SignatureModel, read_matrix_txt, sample_signature
from .statdim import statdim_mc, write_statdim_csv
from .theory import compute_theory_curve, write_theory_curve_csv


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage problems, not argparse's 2
        raise UsageError(message)


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr)


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("IDPHASE_OUT") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _model(args) -> SignatureModel:
    if args.model == "hadamard":
        if args.n_full is None:
            raise UsageError("--n-full is required for the hadamard model")
        return SignatureModel("hadamard", args.n_full)
    return SignatureModel(args.model)


def _certifier_config(args) -> CertifierConfig:
    return CertifierConfig(feas_tol=args.tol_feas, rank_rel_tol=args.tol_rank,
                           max_iter_factor=args.max_iter_factor)


def _add_common(p, model=False, trials=False):
    p.add_argument("--config", help="JSON file with the same keys as the flags")
    p.add_argument("--out", help="output directory (or $IDPHASE_OUT, or cwd)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--tol-feas", type=float, default=1e-9)
    p.add_argument("--tol-rank", type=float, default=1e-10)
    p.add_argument("--max-iter-factor", type=int, default=500,
                   help="simplex iteration cap, in units of rows+cols")
    if model:
        p.add_argument("--model", choices=["gaussian", "rademacher", "hadamard"],
                       default="gaussian")
        p.add_argument("--n-full", type=int, help="full Hadamard size (power of 2)")
        p.add_argument("--n", type=int, default=400, help="number of users N")
    if trials:
        p.add_argument("--trials", type=int, default=50)


def build_parser() -> _Parser:
    p = _Parser(prog="idphase", description=__doc__)
    p.add_argument("--version", action="version", version=f"idphase {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("theory", help="tabulate the boundary curve delta*(eps)")
    t.add_argument("--eps-min", type=float, default=0.01)
    t.add_argument("--eps-max", type=float, default=0.99)
    t.add_argument("--steps", type=int, default=99)
    t.add_argument("--tol", type=float, default=1e-12)
    _add_common(t)

    s = sub.add_parser("statdim", help="Monte Carlo statistical dimension of D")
    s.add_argument("--n", type=int, default=4000)
    s.add_argument("--eps", type=float, action="append",
                   help="epsilon = K/N (repeatable); default 0.1 0.3 0.5")
    s.add_argument("--samples", type=int, default=200)
    _add_common(s)

    c = sub.add_parser("certify", help="certify one instance (matrix file or model draw)")
    c.add_argument("--matrix", help="plain-text matrix file (header 'L N')")
    c.add_argument("--k", type=int, required=True, help="number of active users")
    c.add_argument("--lift", action="store_true",
                   help="treat --matrix as a signature matrix and lift it first")
    c.add_argument("--alpha", type=float, help="target d/N when drawing a model")
    _add_common(c, model=True)

    ph = sub.add_parser("phase", help="full phase-diagram grid")
    ph.add_argument("--alpha", type=float, action="append", required=True)
    ph.add_argument("--eps", type=float, action="append", required=True)
    _add_common(ph, model=True, trials=True)

    tr = sub.add_parser("transition", help="adaptive bracketing of the 50%% crossing")
    tr.add_argument("--alpha", type=float, action="append", required=True)
    tr.add_argument("--resolution", type=float, default=0.01)
    _add_common(tr, model=True, trials=True)

    cs = sub.add_parser("compare-semirandom",
                        help="true lifted model vs matched-spectrum surrogate")
    cs.add_argument("--alpha", type=float, action="append", required=True)
    cs.add_argument("--resolution", type=float, default=0.01)
    _add_common(cs, model=True, trials=True)

    rs = sub.add_parser("rank-scan", help="Hadamard A2 rank vs the XOR oracle")
    rs.add_argument("--n-full", type=int, required=True,
                    help="full Hadamard size (power of 2)")
    rs.add_argument("--n", type=int, action="append", required=True)
    rs.add_argument("--l", type=int, action="append", required=True)
    rs.add_argument("--seeds", type=int, default=20, help="number of seeds per size")
    _add_common(rs)

    sp = sub.add_parser("spectrum", help="dump singular values of a model's A2")
    sp.add_argument("--alpha", type=float, default=0.5)
    _add_common(sp, model=True)
    return p


def _load_config_defaults(args, argv):
    """Config-file values fill in flags the user left at their defaults."""
    if not args.config:
        return args
    with open(args.config) as fh:
        conf = json.load(fh)
    given = {a.lstrip("-").split("=")[0].replace("-", "_")
             for a in argv if a.startswith("--")}
    for key, value in conf.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise UsageError(f"config key {key!r} is not a flag of this subcommand")
        if attr not in given:
            setattr(args, attr, value)
    return args


def _cmd_theory(args) -> int:
    if not (0.0 < args.eps_min < args.eps_max < 1.0):
        raise UsageError("need 0 < eps-min < eps-max < 1")
    out = _out_dir(args)
    grid = np.linspace(args.eps_min, args.eps_max, args.steps)
    curve = compute_theory_curve(grid, tol=args.tol)
    write_theory_curve_csv(out / "theory_curve.csv", curve)
    write_manifest(out / "manifest.json", {
        "command": "theory", "eps_min": args.eps_min, "eps_max": args.eps_max,
        "steps": args.steps, "tol": args.tol})
    _progress(f"wrote {out / 'theory_curve.csv'} ({args.steps} points)")
    return 0


def _cmd_statdim(args) -> int:
    out = _out_dir(args)
    eps_list = args.eps or [0.1, 0.3, 0.5]
    estimates = []
    for eps in eps_list:
        K = int(round(eps * args.n))
        est = statdim_mc(args.n, K, args.samples, args.seed)
        estimates.append(est)
        _progress(f"eps={eps}: mean={est.mean:.6f} stderr={est.stderr:.2e}")
    write_statdim_csv(out / "statdim.csv", estimates)
    write_manifest(out / "manifest.json", {
        "command": "statdim", "n": args.n, "eps": eps_list,
        "samples": args.samples, "seed": args.seed})
    return 0


def _cmd_certify(args) -> int:
    cfg = _certifier_config(args)
    if args.matrix:
        M = read_matrix_txt(args.matrix)
        if args.lift:
            from .signatures import SignatureMatrix, GAUSSIAN
            sysm = lift(SignatureMatrix(M, GAUSSIAN, 0))
            M = np.vstack([sysm.A1, sysm.A2])
    else:
        model = _model(args)
        if args.alpha is None:
            raise UsageError("need --alpha (or --matrix) to draw an instance")
        L, _ = choose_L(args.alpha, args.n)
        S = sample_signature(model, L, args.n, args.seed)
        sysm = lift(S)
        M = stacked_constraints(sysm, "reduced" if model.is_pm_one else "full")
    N = M.shape[1]
    if not 0 <= args.k <= N:
        raise UsageError(f"--k must lie in [0, {N}]")
    cert = certify(M, ConeSpec.canonical(N, args.k), cfg)
    print(cert.to_json())
    return 0


def _cmd_phase(args) -> int:
    out = _out_dir(args)
    model = _model(args)
    config = PhaseDiagramConfig(
        model_kind=model.kind, N=args.n, alphas=tuple(args.alpha),
        epss=tuple(args.eps), trials=args.trials, base_seed=args.seed,
        n_full=model.n_full, feas_tol=args.tol_feas, rank_rel_tol=args.tol_rank,
        workers=args.workers)
    diagram = run_phase_diagram(config, out_dir=out)
    _progress(f"wrote {out / 'phase_diagram.csv'} ({len(diagram.cells)} cells)")
    return 0


def _cmd_transition(args) -> int:
    from .experiments import _pool
    out = _out_dir(args)
    model = _model(args)
    cfg = _certifier_config(args)
    estimates = []
    executor = _pool(args.workers)
    try:
        for alpha in args.alpha:
            est, _ = adaptive_transition(model.kind, args.n, alpha, args.trials,
                                         args.seed, n_full=model.n_full, cfg=cfg,
                                         resolution=args.resolution,
                                         executor=executor)
            _progress(f"alpha={alpha}: eps50={est.eps50:.4f} censored={est.censored!r}")
            estimates.append(est)
    finally:
        if executor is not None:
            executor.shutdown()
    write_transitions_csv(out / "transitions.csv", estimates)
    write_manifest(out / "manifest.json", {
        "command": "transition", "model": model.kind, "n": args.n,
        "alphas": args.alpha, "trials": args.trials, "seed": args.seed,
        "resolution": args.resolution, "workers": args.workers})
    return 0


def _cmd_compare_semirandom(args) -> int:
    from .experiments import _pool
    out = _out_dir(args)
    model = _model(args)
    cfg = _certifier_config(args)
    rows = []
    executor = _pool(args.workers)
    try:
        for alpha in args.alpha:
            true_est, sur_est, _ = compare_semirandom(
                model.kind, args.n, alpha, args.trials, args.seed,
                n_full=model.n_full, cfg=cfg, resolution=args.resolution,
                executor=executor)
            diff = true_est.eps50 - sur_est.eps50
            _progress(f"alpha={alpha}: true={true_est.eps50:.4f} "
                      f"surrogate={sur_est.eps50:.4f} diff={diff:+.4f}")
            rows.extend([true_est, sur_est])
    finally:
        if executor is not None:
            executor.shutdown()
    write_transitions_csv(out / "transitions.csv", rows)
    write_manifest(out / "manifest.json", {
        "command": "compare-semirandom", "model": model.kind, "n": args.n,
        "alphas": args.alpha, "trials": args.trials, "seed": args.seed,
        "resolution": args.resolution, "workers": args.workers})
    return 0


def _cmd_rank_scan(args) -> int:
    out = _out_dir(args)
    if len(args.n) != len(args.l):
        raise UsageError("--n and --l must be given the same number of times")
    sizes = list(zip(args.n, args.l))
    rows = rank_scan(args.n_full, sizes, list(range(args.seed, args.seed + args.seeds)),
                     rel_tol=args.tol_rank)
    write_rank_scan_csv(out / "rank_scan.csv", rows)
    write_manifest(out / "manifest.json", {
        "command": "rank-scan", "n_full": args.n_full, "sizes": sizes,
        "seeds": args.seeds, "seed": args.seed})
    _progress(f"wrote {out / 'rank_scan.csv'} ({len(rows)} rows)")
    return 0


def _cmd_spectrum(args) -> int:
    out = _out_dir(args)
    model = _model(args)
    L, _ = choose_L(args.alpha, args.n)
    S = sample_signature(model, L, args.n, args.seed)
    sv = singular_values(lift(S).A2)
    write_spectrum_csv(out / "spectrum.csv", sv)
    write_manifest(out / "manifest.json", {
        "command": "spectrum", "model": model.kind, "n": args.n,
        "alpha": args.alpha, "seed": args.seed})
    _progress(f"wrote {out / 'spectrum.csv'} ({sv.size} values)")
    return 0


_COMMANDS = {
    "theory": _cmd_theory,
    "statdim": _cmd_statdim,
    "certify": _cmd_certify,
    "phase": _cmd_phase,
    "transition": _cmd_transition,
    "compare-semirandom": _cmd_compare_semirandom,
    "rank-scan": _cmd_rank_scan,
    "spectrum": _cmd_spectrum,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _load_config_defaults(args, argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
