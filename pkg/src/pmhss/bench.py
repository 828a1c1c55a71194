"""Benchmark harness: timed solver comparisons with table-shaped output."""

from __future__ import annotations

import csv
import io
import json
import os
import time
from dataclasses import asdict, dataclass, fields

import numpy as np

from .inner import InnerSolverConfig, OracleUnavailableError, complex_direct_solve, solve_inner
from .krylov import SplitOperator, gmres_solve, pmhss_gmres_solve, presb_gmres_solve
from .linalg import vnorm
from .splitting import SolverConfig, aa_pmhss_solve, pmhss_solve

METHOD_NAMES = ("pmhss", "aa_pmhss", "gmres", "pmhss_gmres", "presb_gmres")

GMRES_MAX_OUTER = 1000
ORACLE_CAP_DEFAULT = 2000

# Tolerance of the extra solve behind the ||(A+B)^{-1} r|| column.
_PRECOND_RESIDUAL_TOL = 1e-13


@dataclass
class BenchmarkRow:
    method: str
    problem: str
    n: int
    outer_iterations: int
    total_inner_iterations: int
    wall_time_mean_seconds: float
    wall_time_rel_std_percent: float | None
    true_residual_norm: float
    error_vs_oracle: float | None
    preconditioned_residual_norm: float | None
    stop_reason: str


def _make_runner(method, system, cfg, gmres_max_outer):
    if method == "pmhss":
        return lambda record: pmhss_solve(system, cfg)
    if method == "aa_pmhss":
        return lambda record: aa_pmhss_solve(system, cfg, record_history=record)
    if method == "pmhss_gmres":
        return lambda record: pmhss_gmres_solve(system, cfg, record_history=record)
    if method == "presb_gmres":
        return lambda record: presb_gmres_solve(system, cfg, record_history=record)
    if method == "gmres":
        gcfg = SolverConfig(
            outer_tol=cfg.outer_tol,
            max_outer=max(cfg.max_outer, gmres_max_outer),
            inner=cfg.inner,
            aa_window=cfg.aa_window,
        )
        return lambda record: gmres_solve(SplitOperator(system), system.b, None, gcfg, record_history=record)
    raise ValueError(f"unknown method {method!r}; expected one of {METHOD_NAMES}")


def run_benchmark(problem, methods, cfg=None, repetitions=10, oracle_cap=ORACLE_CAP_DEFAULT,
                  gmres_max_outer=GMRES_MAX_OUTER):
    """Run each method on the problem: one untimed warm run for iteration data
    and residual histories, then `repetitions` timed runs on a monotonic clock.

    Returns (rows, histories) where histories maps method name to the warm
    run's true relative residual history. The reference-error column is
    omitted for dimensions above oracle_cap. Unknown method names raise before
    anything runs.
    """
    methods = list(methods)
    for method in methods:
        if method not in METHOD_NAMES:
            raise ValueError(f"unknown method {method!r}; expected one of {METHOD_NAMES}")
    cfg = cfg or SolverConfig()

    system = problem.build()
    S = system.shifted_sum()
    nb = vnorm(system.b)

    x_star = None
    try:
        x_star = complex_direct_solve(system.A, system.B, system.b, cap=oracle_cap)
    except OracleUnavailableError:
        pass

    rows = []
    histories = {}
    for method in methods:
        runner = _make_runner(method, system, cfg, gmres_max_outer)
        warm = runner(True)
        histories[method] = list(warm.residual_history)

        times = []
        for _ in range(max(0, repetitions)):
            t0 = time.perf_counter()
            timed = runner(False)
            times.append(time.perf_counter() - t0)
            if timed.outer_iterations != warm.outer_iterations:
                raise RuntimeError(
                    f"nondeterministic run for {method}: {timed.outer_iterations} "
                    f"!= {warm.outer_iterations} outer iterations"
                )
        mean = float(np.mean(times)) if times else 0.0
        rel_std = float(np.std(times) / mean * 100.0) if len(times) >= 2 and mean > 0 else None

        x = warm.solution
        residual = system.b - system.apply(x)
        true_norm = vnorm(residual)
        error = vnorm(x - x_star) if x_star is not None else None
        precond_res = solve_inner(
            S, residual, None, InnerSolverConfig(kind="cg", tol=_PRECOND_RESIDUAL_TOL, max_iter=20 * system.n)
        )
        rows.append(BenchmarkRow(
            method=method,
            problem=problem.label(),
            n=system.n,
            outer_iterations=warm.outer_iterations,
            total_inner_iterations=warm.total_inner_iterations,
            wall_time_mean_seconds=mean,
            wall_time_rel_std_percent=rel_std,
            true_residual_norm=true_norm,
            error_vs_oracle=error,
            preconditioned_residual_norm=vnorm(precond_res.solution),
            stop_reason=warm.stop_reason,
        ))
    return rows, histories


def emit(rows, fmt="csv", destination=None, histories=None, history_dir=None):
    """Serialize benchmark rows as CSV (fixed header, field order) or JSON.

    destination None writes to stdout; a path writes a file. When both
    histories and history_dir are given, one plain-text file per method is
    written with one relative residual per line.
    """
    if not rows:
        raise ValueError("no rows to emit")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")

    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        names = [f.name for f in fields(BenchmarkRow)]
        writer.writerow(names)
        for row in rows:
            d = asdict(row)
            writer.writerow(["" if d[k] is None else d[k] for k in names])
        text = buf.getvalue()
    else:
        text = json.dumps([asdict(row) for row in rows], indent=2) + "\n"

    if destination is None:
        print(text, end="")
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)

    if histories and history_dir:
        os.makedirs(history_dir, exist_ok=True)
        tag = rows[0].problem.replace(":", "_").replace(os.sep, "_")
        for method, history in histories.items():
            path = os.path.join(history_dir, f"{tag}_{method}.txt")
            with open(path, "w", encoding="ascii") as fh:
                for value in history:
                    fh.write(f"{float(value)!r}\n")
