"""Command-line front end.

Subcommands cover the full toolkit: landscape scans and export, global
minimization, classical-bound verification, triple feasibility fitting,
and the seeded virtual bench.  All output is deterministic for a fixed
seed; machine formats are selected with --format.

Exit codes: 0 success, 1 I/O failure, 2 bad flags or config, 3 classical
bound violated (implementation bug), 4 infeasible triple, 5 insufficient
statistics.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, classical, landscape

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_BOUND_VIOLATION = 3
EXIT_INFEASIBLE = 4
EXIT_NO_STATS = 5


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _write_document(document: str, out: str | None) -> int:
    if out is None:
        sys.stdout.write(document)
        return EXIT_OK
    try:
        Path(out).write_text(document, encoding="utf-8")
    except OSError as exc:
        return _fail(f"cannot write {out}: {exc}", EXIT_IO)
    return EXIT_OK


def _load_config(path: str | None) -> bench.ExperimentConfig:
    if path is None:
        return bench.ExperimentConfig()
    try:
        document = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise bench.ConfigError(f"cannot read config {path}: {exc}") from exc
    return bench.ExperimentConfig.from_json(document)


def _cmd_scan(args: argparse.Namespace) -> int:
    if args.step <= 0:
        return _fail(f"--step must be positive, got {args.step}", EXIT_USAGE)
    try:
        grid = landscape.ScanGrid.full_range(args.step)
        axis_a = args.fix_a if args.fix_a is not None else grid
        axis_b = args.fix_b if args.fix_b is not None else grid
        land = landscape.grid_scan(axis_a, axis_b, grid)
        document = landscape.export_surface(land, args.format)
    except ValueError as exc:
        return _fail(str(exc), EXIT_USAGE)
    return _write_document(document, args.out)


def _cmd_optimize(args: argparse.Namespace) -> int:
    if args.step <= 0:
        return _fail(f"--step must be positive, got {args.step}", EXIT_USAGE)
    if args.tol <= 0:
        return _fail(f"--tol must be positive, got {args.tol}", EXIT_USAGE)
    try:
        seed_grid = landscape.ScanGrid.full_range(args.step)
    except ValueError as exc:
        return _fail(str(exc), EXIT_USAGE)
    opt = landscape.minimize_s(seed_grid, tolerance=args.tol)
    print(f"s_min = {opt.s_min:.6f}")
    print(f"evaluations = {opt.evaluations}")
    a, b, c = opt.argmin.as_tuple()
    print(f"argmin: theta_a = {a:.4f}, theta_b = {b:.4f}, theta_c = {c:.4f}")
    print(f"degenerate minima found: {len(opt.candidates)}")
    for cand in opt.candidates:
        ca, cb, cc = cand.as_tuple()
        print(f"  theta_a = {ca:.4f}, theta_b = {cb:.4f}, theta_c = {cc:.4f}")
    return EXIT_OK


def _cmd_classical_verify(args: argparse.Namespace) -> int:
    if args.samples < 1:
        return _fail(f"--samples must be at least 1, got {args.samples}", EXIT_USAGE)
    vertices = classical.enumerate_vertices()
    print("vertex witness values: " + ", ".join(f"{value:g}" for _, value in vertices))
    for state, value in vertices:
        print(f"  {state.label()}  S = {value:g}")

    rng = np.random.default_rng(args.seed)
    lo, hi = np.inf, -np.inf
    for _ in range(args.samples):
        value = classical.s_classical(classical.random_ensemble(rng))
        lo = min(lo, value)
        hi = max(hi, value)
    vertex_values = [value for _, value in vertices]
    lo = min(lo, min(vertex_values))
    hi = max(hi, max(vertex_values))
    print(f"random ensembles sampled: {args.samples}")
    print(f"observed S range: [{lo:.9f}, {hi:.9f}]")

    tol = classical.BOUND_EPSILON
    if lo < -tol or hi > 1.0 + tol:
        print("BOUND VIOLATED")
        return EXIT_BOUND_VIOLATION
    print("bound satisfied: 0 <= S <= 1 for every ensemble")
    return EXIT_OK


def _cmd_fit(args: argparse.Namespace) -> int:
    for name, p in (("--p-ab", args.p_ab), ("--p-bc", args.p_bc), ("--p-ac", args.p_ac)):
        if not 0.0 <= p <= 1.0:
            return _fail(f"{name} must be in [0, 1], got {p}", EXIT_USAGE)
    triple = classical.JointTriple(p_ab=args.p_ab, p_bc=args.p_bc, p_ac=args.p_ac)
    ensemble = classical.fit_classical(triple)
    if ensemble is None:
        print("INFEASIBLE (quantum-signature)")
        return EXIT_INFEASIBLE
    print("feasible ensemble:")
    for state, weight in ensemble.weights.items():
        if weight > 0.0:
            print(f"  {state.label()}  weight = {weight:.9f}")
    refit = classical.joint_triple(ensemble)
    print(
        f"reproduced triple: p_ab = {refit.p_ab:.9f}, "
        f"p_bc = {refit.p_bc:.9f}, p_ac = {refit.p_ac:.9f}"
    )
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    try:
        cfg = _load_config(args.config)
    except bench.ConfigError as exc:
        return _fail(str(exc), EXIT_USAGE)
    triple = landscape.AngleTriple(args.theta_a, args.theta_b, args.theta_c)
    try:
        estimate = bench.estimate_S(cfg, triple)
    except bench.InsufficientStatisticsError as exc:
        return _fail(str(exc), EXIT_NO_STATS)
    if args.format == "json":
        sys.stdout.write(bench.estimate_to_json(estimate))
    else:
        print(f"S = {estimate.value:.6f}")
        print(f"std_error = {estimate.std_error:.6f}")
        print(f"sigma_violation = {estimate.sigma_violation:.3f}")
    return EXIT_OK


def _cmd_full_scan(args: argparse.Namespace) -> int:
    try:
        cfg = _load_config(args.config)
    except bench.ConfigError as exc:
        return _fail(str(exc), EXIT_USAGE)
    try:
        result = bench.run_full_scan(cfg, theta_a=args.theta_a, theta_b_profile=args.theta_b)
    except bench.InsufficientStatisticsError as exc:
        return _fail(str(exc), EXIT_NO_STATS)
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "surface.csv").write_text(bench.full_scan_surface_csv(result), encoding="utf-8")
        (out_dir / "profile.csv").write_text(bench.full_scan_profile_csv(result), encoding="utf-8")
    except OSError as exc:
        return _fail(f"cannot write output: {exc}", EXIT_IO)
    print(f"wrote {out_dir / 'surface.csv'}")
    print(f"wrote {out_dir / 'profile.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmlab",
        description="Prepare-and-measure polarization toolkit: landscape scans, "
        "global minimization, classical-bound checks, and a virtual counting bench.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="export the witness landscape on a grid")
    p_scan.add_argument("--fix-a", type=float, default=None, metavar="DEG")
    p_scan.add_argument("--fix-b", type=float, default=None, metavar="DEG")
    p_scan.add_argument("--step", type=float, default=6.0, metavar="DEG")
    p_scan.add_argument("--out", default=None, metavar="FILE")
    p_scan.add_argument("--format", choices=("csv", "json"), default="csv")
    p_scan.set_defaults(func=_cmd_scan)

    p_opt = sub.add_parser("optimize", help="find the global witness minimum")
    p_opt.add_argument("--step", type=float, default=6.0, metavar="DEG")
    p_opt.add_argument("--tol", type=float, default=0.01, metavar="DEG")
    p_opt.set_defaults(func=_cmd_optimize)

    p_ver = sub.add_parser(
        "classical-verify", help="verify the classical bound by enumeration and sampling"
    )
    p_ver.add_argument("--samples", type=int, default=10000, metavar="N")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.set_defaults(func=_cmd_classical_verify)

    p_fit = sub.add_parser("fit", help="fit a classical ensemble to a probability triple")
    p_fit.add_argument("--p-ab", type=float, required=True, metavar="P")
    p_fit.add_argument("--p-bc", type=float, required=True, metavar="P")
    p_fit.add_argument("--p-ac", type=float, required=True, metavar="P")
    p_fit.set_defaults(func=_cmd_fit)

    p_sim = sub.add_parser("simulate", help="estimate the witness on the virtual bench")
    p_sim.add_argument("--config", default=None, metavar="FILE")
    p_sim.add_argument("--theta-a", type=float, default=157.0, metavar="DEG")
    p_sim.add_argument("--theta-b", type=float, default=123.5, metavar="DEG")
    p_sim.add_argument("--theta-c", type=float, default=77.5, metavar="DEG")
    p_sim.add_argument("--format", choices=("text", "json"), default="text")
    p_sim.set_defaults(func=_cmd_simulate)

    p_full = sub.add_parser(
        "full-scan", help="simulate the full acquisition and write surface/profile files"
    )
    p_full.add_argument("--config", default=None, metavar="FILE")
    p_full.add_argument("--out", required=True, metavar="DIR")
    p_full.add_argument("--theta-a", type=float, default=156.0, metavar="DEG")
    p_full.add_argument("--theta-b", type=float, default=126.0, metavar="DEG")
    p_full.set_defaults(func=_cmd_full_scan)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
