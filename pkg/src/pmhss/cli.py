"""Command-line benchmark harness."""

from __future__ import annotations

import argparse
import math
import sys

from .bench import GMRES_MAX_OUTER, METHOD_NAMES, ORACLE_CAP_DEFAULT, emit, run_benchmark
from .inner import InnerSolverConfig
from .problems import MatrixMarketError, ProblemSpec
from .splitting import SolverConfig

_PROBLEM_KINDS = {
    "pade": "pade",
    "shifted-omega": "shifted_omega",
    "eq-motion": "eq_motion",
    "file": "file",
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="pmhss-bench",
        description="Benchmark iterative solvers for complex-symmetric systems (A + iB) x = b.",
    )
    p.add_argument("--problem", required=True, choices=sorted(_PROBLEM_KINDS),
                   help="benchmark family or 'file' for Matrix Market input")
    p.add_argument("--m", type=int, default=100,
                   help="interior grid points per side; N = m^2 (default 100)")
    p.add_argument("--matrix-a", default=None, help="Matrix Market file for A (or complex A + iB)")
    p.add_argument("--matrix-b", default=None, help="Matrix Market file for B")
    p.add_argument("--rhs", choices=["random", "ones", "file"], default=None,
                   help="right-hand side source (default: problem-specific)")
    p.add_argument("--rhs-file", default=None, help="Matrix Market vector for --rhs file")
    p.add_argument("--seed", type=int, default=1, help="seed for the random right-hand side")
    p.add_argument("--method", default=",".join(METHOD_NAMES),
                   help=f"comma-separated subset of {{{','.join(METHOD_NAMES)}}}")
    p.add_argument("--outer-tol", type=float, default=1e-8)
    p.add_argument("--inner-tol", type=float, default=1e-12)
    p.add_argument("--max-inner", type=int, default=0,
                   help="cap on inner CG iterations; 0 means the system dimension")
    p.add_argument("--max-outer", type=int, default=0,
                   help="cap on outer iterations; 0 means 200 (1000 for unpreconditioned GMRES)")
    p.add_argument("--inner-solver", choices=["cg", "direct"], default="cg")
    p.add_argument("--aa-window", type=int, default=0,
                   help="acceleration history window; 0 keeps the full history")
    p.add_argument("--reps", type=int, default=10, help="timed repetitions per method")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", default=None, help="output path (default: stdout)")
    p.add_argument("--history-dir", default=None,
                   help="write per-method residual-history files into this directory")
    p.add_argument("--oracle-cap", type=int, default=ORACLE_CAP_DEFAULT,
                   help="largest N for the dense reference solution column")
    p.add_argument("--mu-helm", type=float, default=0.0, help="real shift of the shifted-omega family")
    p.add_argument("--omega-helm", type=float, default=0.01, help="imaginary shift of the shifted-omega family")
    p.add_argument("--omega-mech", type=float, default=math.pi, help="frequency of the equation-of-motion family")
    p.add_argument("--mu-mech", type=float, default=0.02, help="hysteretic coefficient of the equation-of-motion family")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    methods = [tok.strip() for tok in args.method.split(",") if tok.strip()]
    if not methods:
        parser.error("--method must name at least one solver")
    for method in methods:
        if method not in METHOD_NAMES:
            parser.error(f"unknown method {method!r}; expected a subset of {{{','.join(METHOD_NAMES)}}}")
    if args.rhs == "file" and not args.rhs_file:
        parser.error("--rhs file requires --rhs-file")
    if args.problem == "file" and not args.matrix_a:
        parser.error("--problem file requires --matrix-a")

    problem = ProblemSpec(
        kind=_PROBLEM_KINDS[args.problem],
        m=args.m,
        mu_helm=args.mu_helm,
        omega_helm=args.omega_helm,
        omega_mech=args.omega_mech,
        mu_mech=args.mu_mech,
        matrix_a=args.matrix_a,
        matrix_b=args.matrix_b,
        rhs=args.rhs or "default",
        rhs_file=args.rhs_file,
        rhs_seed=args.seed,
    )
    cfg = SolverConfig(
        outer_tol=args.outer_tol,
        max_outer=args.max_outer if args.max_outer > 0 else 200,
        inner=InnerSolverConfig(
            kind=args.inner_solver,
            tol=args.inner_tol,
            max_iter=args.max_inner if args.max_inner > 0 else None,
        ),
        aa_window=args.aa_window if args.aa_window > 0 else None,
    )
    gmres_cap = args.max_outer if args.max_outer > 0 else GMRES_MAX_OUTER

    try:
        rows, histories = run_benchmark(
            problem, methods, cfg,
            repetitions=args.reps,
            oracle_cap=args.oracle_cap,
            gmres_max_outer=gmres_cap,
        )
        emit(rows, fmt=args.format, destination=args.output,
             histories=histories, history_dir=args.history_dir)
    except (OSError, ValueError, MatrixMarketError) as exc:
        print(f"pmhss-bench: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
