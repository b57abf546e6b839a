"""chronoscale command line.

Usage:
    chronoscale scale --qscale 2 --n 3 --t0 1
    chronoscale solve problem.json [--x x.json] [--anchors 0,0] [--out r.json] [--csv r.csv]
    chronoscale stability problem.json --magnitude 1e-3 --shape uniform --trials 100 --seed 7
    chronoscale verify problem.json --samples 100 --seed 7

Exit codes: 0 success, 1 contract not met, 2 validation, 3 regressivity or
degeneracy, 4 I/O. Without --seed the seed comes from CHRONOSCALE_SEED
(default 0).
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .cascade import cascade_solve, residual
from .errors import ChronoscaleError, DegeneracyError, RootFindingFailure, ValidationError
from .operator import factorization_gap, roundoff_scale
from .problem_io import dumps, load_json, load_problem, parse_anchors, parse_complex, write_csv
from .stability import (
    SHAPES,
    Perturbation,
    ScaleFamilySpec,
    analytic_K,
    bound_holds,
    generate_scale,
    reference_solution,
    run_hus_experiment,
)
from .timescale import GridFunction

EXIT_OK, EXIT_CONTRACT, EXIT_VALIDATION, EXIT_DEGENERATE, EXIT_IO = 0, 1, 2, 3, 4
#: residual and factorization contracts, relative to 1 + |f| + roundoff scale
CONTRACT_RTOL = 1e-9


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("CHRONOSCALE_SEED")
    if env is None or not env.strip():
        return 0
    try:
        return int(env)
    except ValueError:
        raise ValidationError(f"CHRONOSCALE_SEED must be an integer, got {env!r}")


def _header(command: str, digest: str) -> dict:
    return {"tool": "chronoscale", "version": __version__, "command": command, "input_digest": digest}


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_scale(args) -> int:
    if args.uniform is not None:
        spec = ScaleFamilySpec.uniform(args.uniform, args.n, 0.0 if args.t0 is None else args.t0)
    elif args.qscale is not None:
        spec = ScaleFamilySpec.qscale(args.qscale, args.n, 1.0 if args.t0 is None else args.t0)
    elif args.harmonic:
        spec = ScaleFamilySpec.harmonic(args.n)
    elif args.random:
        spec = ScaleFamilySpec.random(
            args.n, args.min_gap, args.max_gap, resolve_seed(args.seed), 0.0 if args.t0 is None else args.t0
        )
    else:
        spec = ScaleFamilySpec.custom(float(p) for p in args.points.split(","))
    ts = generate_scale(spec)
    _write(dumps(ts.points.tolist()), args.out)
    return EXIT_OK


def _load_x(args, spec, problem):
    if args.x:
        doc, _ = load_json(args.x)
        values = doc["x"] if isinstance(doc, dict) and "x" in doc else doc
        if not isinstance(values, list) or len(values) != len(spec.scale):
            raise ValidationError(f"x must list {len(spec.scale)} values")
        return GridFunction(spec.scale, 0, [parse_complex(v) for v in values]), "file"
    if spec.x is not None:
        return spec.x, "problem"
    return reference_solution(problem), "exact"


def cmd_solve(args) -> int:
    spec = load_problem(args.problem)
    problem = spec.build()
    anchors = parse_anchors(args.anchors) if args.anchors else spec.anchors
    x, source = _load_x(args, spec, problem)
    r_x, eps = residual(problem, x)
    result = cascade_solve(problem, x, anchors)
    K, L = analytic_K(problem, result.anchors)
    f_sup = problem.forcing.restrict(0, problem.scale.N - problem.order).sup()
    scale = 1.0 + f_sup + roundoff_scale(problem.phi, problem.lambdas, result.u)
    ok = result.residual_sup <= CONTRACT_RTOL * scale
    dev = (x - result.u).sup()
    report = {
        **_header("solve", spec.digest),
        "order": problem.order,
        "lambdas": list(problem.lambdas),
        "alphas": problem.alphas,
        "anchors": list(result.anchors),
        "A": problem.A,
        "x_source": source,
        "epsilon": eps,
        "sup_deviation": dev,
        "K_analytic": K,
        "stage_constants": L,
        "bound_ok": bound_holds(dev, K, eps, x.sup()),
        "residual_sup": result.residual_sup,
        "residual_ok": bool(ok),
        "stage_residuals": list(result.stage_residuals),
        "t": problem.scale.points,
        "x": x.values,
        "u": result.u.values,
        "residual": r_x.values,
        "stages": [w.values for w in result.stages],
    }
    _write(dumps(report), args.out)
    if args.csv:
        write_csv(args.csv, problem.scale.points, x, result.u, r_x)
    return EXIT_OK if ok else EXIT_CONTRACT


def cmd_stability(args) -> int:
    spec = load_problem(args.problem)
    problem = spec.build()
    anchors = parse_anchors(args.anchors) if args.anchors else spec.anchors
    seed = resolve_seed(args.seed)
    x_exact = reference_solution(problem)
    desc = spec.scale_spec.descriptor()
    trials = [
        run_hus_experiment(problem, Perturbation(args.magnitude, args.shape, seed + i), anchors, x_exact, desc)
        for i in range(args.trials)
    ]
    kemp = [r.K_empirical for r in trials if not r.degenerate_residual]
    report = {
        **_header("stability", spec.digest),
        "order": problem.order,
        "lambdas": list(problem.lambdas),
        "seed": seed,
        "magnitude": args.magnitude,
        "shape": args.shape,
        "n_trials": args.trials,
        "K_analytic": trials[0].K_analytic if trials else math.nan,
        "max_K_empirical": max(kemp) if kemp else math.nan,
        "all_bound_ok": all(r.bound_ok for r in trials),
        "n_degenerate": sum(r.degenerate_residual for r in trials),
        "trials": [r.to_dict() for r in trials],
    }
    _write(dumps(report), args.out)
    return EXIT_OK if report["all_bound_ok"] else EXIT_CONTRACT


def cmd_verify(args) -> int:
    spec = load_problem(args.problem)
    seed = resolve_seed(args.seed)
    rng = np.random.default_rng(seed)
    ts, phi, lam = spec.scale, spec.phi, spec.lambdas
    gaps, rel = [], []
    for _ in range(args.samples):
        g = GridFunction(ts, 0, rng.uniform(-1.0, 1.0, len(ts)))
        gap = factorization_gap(phi, lam, g)
        gaps.append(gap)
        rel.append(gap / (1.0 + roundoff_scale(phi, lam, g)))
    ok = all(r <= CONTRACT_RTOL for r in rel)
    report = {
        **_header("verify", spec.digest),
        "order": spec.order,
        "lambdas": list(lam),
        "seed": seed,
        "samples": args.samples,
        "tolerance": CONTRACT_RTOL,
        "max_gap": max(gaps) if gaps else 0.0,
        "max_relative_gap": max(rel) if rel else 0.0,
        "pass": ok,
    }
    _write(dumps(report), args.out)
    return EXIT_OK if ok else EXIT_CONTRACT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chronoscale", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scale", help="print a generated time scale as JSON")
    fam = p.add_mutually_exclusive_group(required=True)
    fam.add_argument("--uniform", type=float, metavar="H", help="t_i = t0 + i*H")
    fam.add_argument("--qscale", type=float, metavar="Q", help="t_i = t0 * Q**i, Q > 1")
    fam.add_argument("--harmonic", action="store_true", help="partial harmonic sums")
    fam.add_argument("--random", action="store_true", help="seeded random gaps")
    fam.add_argument("--points", help="comma-separated explicit points")
    p.add_argument("--n", type=int, help="index of the last point (N + 1 points)")
    p.add_argument("--t0", type=float)
    p.add_argument("--min-gap", type=float)
    p.add_argument("--max-gap", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scale)

    p = sub.add_parser("solve", help="reconstruct an exact solution from approximate data")
    p.add_argument("problem")
    p.add_argument("--x", help="JSON list (or {'x': [...]}) of approximate solution values")
    p.add_argument("--anchors", help="comma-separated anchor indices tau_1..tau_n")
    p.add_argument("--out", help="report JSON (default stdout)")
    p.add_argument("--csv", help="per-point table t,x,u,abs_dev,residual")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("stability", help="Monte Carlo Hyers-Ulam experiment")
    p.add_argument("problem")
    p.add_argument("--magnitude", type=float, default=1e-3)
    p.add_argument("--shape", choices=SHAPES, default="uniform")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--anchors")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("verify", help="check the factorization on random grid functions")
    p.add_argument("problem")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (DegeneracyError, RootFindingFailure) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ValidationError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    except ChronoscaleError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
