"""Command-line interface: ``dnorm <subcommand> ...``.

Exit status is 0 on success, 1 on a domain error (invalid generator, failed
simulation, unreadable file) and 2 on a usage error.  Indices in JSON and CSV
output are 1-based.  The environment variable ``DNORM_SEED`` overrides
``--seed``.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from .algebra import (
    InconsistentFrameError,
    classify_idempotent,
    detect_cdf,
    multiply,
    power,
    track_same,
)
from .evaluation import (
    DNorm,
    MonteCarlo,
    norm,
    parse_grid,
    pickands_trace,
)
from .generators import DiscreteGenerator, GeneratorError
from .io import (
    RunConfig,
    emit_results,
    generator_to_dict,
    parse_generator_file,
    parse_law_file,
    read_samples_csv,
)
from .oracles import lemma_classify
from .simulation import (
    default_cdf_grid,
    joint_cdf_check,
    margin_check,
    max_stability_check,
    sample_batch,
)

__all__ = ["main", "build_parser"]


class UsageError(Exception):
    pass


def _point(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad point {text!r}: expected comma-separated numbers") from exc


def _add_mc(p: argparse.ArgumentParser, samples: int = 100_000, flag: str = "--samples"):
    p.add_argument(flag, dest="samples", type=int, default=samples,
                   help="Monte Carlo sample size for sampler generators")
    p.add_argument("--seed", type=int, default=0, help="master seed (overridden by DNORM_SEED)")
    p.add_argument("--no-control-variate", action="store_true",
                   help="use the plain sample mean in Monte Carlo estimates")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dnorm", description="D-norm toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a D-norm at a point or on a grid")
    p.add_argument("--generator", required=True)
    where = p.add_mutually_exclusive_group(required=True)
    where.add_argument("--point", type=_point)
    where.add_argument("--grid", help='"simplex:k" or a CSV file of points')
    p.add_argument("--out", help="CSV output for --grid (default stdout)")
    _add_mc(p)

    p = sub.add_parser("multiply", help="generator of the product of two D-norms")
    p.add_argument("generators", nargs=2)
    p.add_argument("-o", "--out")

    p = sub.add_parser("power", help="generator of the n-th power of a D-norm")
    p.add_argument("--generator", required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-o", "--out")

    p = sub.add_parser("track", help="iterate a D-norm with itself until convergence")
    p.add_argument("--generator", required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-steps", type=int, default=64)
    p.add_argument("--grid", default="simplex:8")
    p.add_argument("--window", type=int, default=None,
                   help="lag of the convergence comparison (default 1 exact, 16 Monte Carlo)")
    p.add_argument("--out", help="CSV output (default stdout)")
    p.add_argument("--summary", help="JSON summary output")
    _add_mc(p)

    p = sub.add_parser("classify", help="idempotency and complete dependence frame")
    p.add_argument("--generator", required=True)
    p.add_argument("--grid", default="simplex:8")
    p.add_argument("--tol", type=float, default=None)
    _add_mc(p)

    p = sub.add_parser("simulate", help="simulate standard max-stable vectors")
    p.add_argument("--generator", required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV output (default stdout)")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("check", help="distribution diagnostics for simulated samples")
    p.add_argument("--samples", dest="sample_file", required=True)
    p.add_argument("--generator", required=True)
    p.add_argument("--grid", help="CSV file of nonpositive points (default: nine built-in points)")
    p.add_argument("--k", type=int, default=5, help="block size of the max-stability check")
    p.add_argument("--z", type=float, default=4.0)
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--out")
    _add_mc(p, samples=1_000_000, flag="--mc-samples")

    p = sub.add_parser("oracle", help="reference checks")
    osub = p.add_subparsers(dest="oracle", required=True)
    q = osub.add_parser("lemma", help="E|X+Y| = E|X| characterization for a discrete law")
    q.add_argument("--law", required=True)
    q.add_argument("--tol", type=float, default=1e-12)

    p = sub.add_parser("pickands", help="Pickands dependence function trace of a bivariate norm")
    p.add_argument("--generator", required=True)
    p.add_argument("-k", type=int, default=100)
    p.add_argument("--out")
    _add_mc(p)
    return parser


def _config(args) -> RunConfig:
    tol = getattr(args, "tol", None)
    cfg = RunConfig(
        seed=getattr(args, "seed", 0),
        samples=getattr(args, "samples", 100_000),
        tol=1e-6 if tol is None else tol,
        max_steps=getattr(args, "max_steps", 64),
        grid=getattr(args, "grid", None),
        out=getattr(args, "out", None),
    )
    return cfg.with_env()


def _dnorm(g, cfg: RunConfig, args) -> DNorm:
    if isinstance(g, DiscreteGenerator):
        return DNorm.exact(g)
    cv = not getattr(args, "no_control_variate", False)
    return DNorm(g, MonteCarlo(cfg.samples, cfg.seed, control_variate=cv))


def _cmd_eval(args, cfg):
    D = _dnorm(parse_generator_file(args.generator), cfg, args)
    n = 0 if D.is_exact else cfg.samples
    if args.point is not None:
        est = norm(D, args.point)
        emit_results({"value": est.value, "se": est.standard_error, "n": n})
        return
    grid = parse_grid(args.grid, D.dimension)
    est = norm(D, grid)
    header = ["point_id"] + [f"x_{i + 1}" for i in range(D.dimension)] + ["value", "se"]
    rows = [[j + 1, *map(float, x), float(v), float(s)]
            for j, (x, v, s) in enumerate(zip(grid, est.value, est.standard_error))]
    emit_results((header, rows), args.out, "csv")


def _emit_generator(D: DNorm, out):
    emit_results(generator_to_dict(D.generator), out)


def _cmd_multiply(args, cfg):
    D1, D2 = (DNorm(parse_generator_file(p)) for p in args.generators)
    _emit_generator(multiply(D1, D2), args.out)


def _cmd_power(args, cfg):
    if args.n < 1:
        raise UsageError("-n must be at least 1")
    _emit_generator(power(DNorm(parse_generator_file(args.generator)), args.n), args.out)


def _frame_json(frame):
    return frame.to_lists(one_based=True)


def _cmd_track(args, cfg):
    D = _dnorm(parse_generator_file(args.generator), cfg, args)
    grid = parse_grid(cfg.grid, D.dimension)
    rep = track_same(D, grid, max_steps=cfg.max_steps, tol=cfg.tol, window=args.window)
    rows = [[n, j + 1, v] for n, j, v in rep.rows()]
    emit_results((["step", "point_id", "value"], rows), args.out, "csv")
    if args.summary:
        emit_results({
            "converged": rep.converged,
            "steps": rep.steps,
            "converged_at": rep.converged_at,
            "final_sup_diff": rep.final_sup_diff,
            "limit_frame": None if rep.limit_frame is None else _frame_json(rep.limit_frame),
        }, args.summary)


def _cmd_classify(args, cfg):
    D = _dnorm(parse_generator_file(args.generator), cfg, args)
    grid = parse_grid(cfg.grid, D.dimension)
    res = classify_idempotent(D, grid, tol=args.tol)
    frame = res.frame
    if frame is None:
        try:
            frame = detect_cdf(D)
        except InconsistentFrameError:
            frame = None
    w = res.witness
    emit_results({
        "idempotent": res.idempotent,
        "frame": None if frame is None else _frame_json(frame),
        "witness": None if res.idempotent else {
            "point": [float(v) for v in w.witness_point],
            "deviation": w.deviation,
            "se": w.standard_error,
        },
        "status": res.status,
    })


def _cmd_simulate(args, cfg):
    if args.n < 1:
        raise UsageError("-n must be at least 1")
    g = parse_generator_file(args.generator)
    batch = sample_batch(g, args.n, cfg.seed, workers=max(1, args.workers))
    header = ["sample_id"] + [f"eta_{i + 1}" for i in range(batch.dimension)] + ["points_used"]
    rows = ([i + 1, *map(float, e), int(u)] for i, (e, u) in enumerate(zip(batch.eta, batch.points_used)))
    emit_results((header, rows), args.out, "csv")


def _cdf_json(diag):
    return {
        "max_deviation": diag.max_deviation,
        "max_z": float(diag.z_scores.max()),
        "passed": diag.passed,
        "points": [{"x": [float(v) for v in x], "observed": float(o), "expected": float(e),
                    "se": float(s)}
                   for x, o, e, s in zip(diag.grid, diag.observed, diag.expected, diag.standard_error)],
    }


def _cmd_check(args, cfg):
    g = parse_generator_file(args.generator)
    eta = read_samples_csv(args.sample_file)
    if eta.shape[1] != g.dimension:
        raise GeneratorError(f"samples have dimension {eta.shape[1]}, generator {g.dimension}")
    D = _dnorm(g, cfg, args)
    grid = default_cdf_grid(g.dimension) if args.grid is None else parse_grid(args.grid, g.dimension)
    margins = [margin_check(eta, j, alpha=args.alpha) for j in range(g.dimension)]
    joint = joint_cdf_check(eta, D, grid, z=args.z)
    report = {
        "n": len(eta),
        "margins": [{"coordinate": m.coordinate + 1, "ks_distance": m.ks_distance,
                     "p_value": m.p_value, "passed": m.passed} for m in margins],
        "joint_cdf": _cdf_json(joint),
    }
    passed = all(m.passed for m in margins) and joint.passed
    if len(eta) % args.k == 0:
        ms = max_stability_check(eta, args.k, grid, z=args.z)
        report["max_stability"] = {"k": args.k, **_cdf_json(ms)}
        passed = passed and ms.passed
    else:
        report["max_stability"] = None
    report["passed"] = passed
    emit_results(report, args.out)


def _cmd_oracle(args, cfg):
    v = lemma_classify(parse_law_file(args.law), tol=args.tol)
    emit_results({
        "e_abs_sum": v.e_abs_sum,
        "e_abs": v.e_abs,
        "e_abs_sum_exact": str(v.e_abs_sum),
        "e_abs_exact": str(v.e_abs),
        "equality": v.equality,
        "two_point_or_zero": v.two_point_or_zero,
        "agrees": v.agrees,
    })


def _cmd_pickands(args, cfg):
    D = _dnorm(parse_generator_file(args.generator), cfg, args)
    if args.k < 1:
        raise UsageError("-k must be positive")
    t, a = pickands_trace(D, args.k)
    header = ["t"] if t.shape[1] == 1 else [f"t_{i + 1}" for i in range(t.shape[1])]
    rows = [[*map(float, u), float(v)] for u, v in zip(t, a)]
    emit_results((header + ["D(t)"], rows), args.out, "csv")


_COMMANDS = {
    "eval": _cmd_eval,
    "multiply": _cmd_multiply,
    "power": _cmd_power,
    "track": _cmd_track,
    "classify": _cmd_classify,
    "simulate": _cmd_simulate,
    "check": _cmd_check,
    "oracle": _cmd_oracle,
    "pickands": _cmd_pickands,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        try:
            cfg = _config(args)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        _COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"dnorm: usage error: {exc}", file=sys.stderr)
        return 2
    except (GeneratorError, ValueError, OSError) as exc:
        print(f"dnorm: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
