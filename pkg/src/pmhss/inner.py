"""Inner solvers for the real SPD system (A+B) z = w with complex right-hand side."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import real_inner, spmv, vnorm

DIRECT_DENSE_CAP = 4096
ORACLE_DENSE_CAP = 2000

# Recompute the explicit residual b - M x this often to bound recurrence drift.
_REFRESH_EVERY = 50


class OracleUnavailableError(RuntimeError):
    """Raised when a dense reference solve is requested above its size cap."""


@dataclass
class InnerSolverConfig:
    kind: str = "cg"                # "cg" or "direct"
    tol: float = 1e-12              # relative residual tolerance
    max_iter: int | None = None     # None means the system dimension

    def __post_init__(self):
        if self.kind not in ("cg", "direct"):
            raise ValueError(f"unknown inner solver kind {self.kind!r}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def iteration_cap(self, n):
        return self.max_iter if self.max_iter is not None else n


@dataclass
class InnerSolveResult:
    solution: np.ndarray
    iterations: int
    final_relative_residual: float


def cg_solve(M, w, x0=None, cfg=None):
    """Warm-started conjugate gradients for SPD M with complex right-hand side.

    All inner products are Hermitian but real-valued here, computed as split
    real/imag dots, so the complex iteration is exactly CG on the stacked real
    2N system diag(M, M) acting on (Re, Im): identical coefficients, identical
    operation order. Raises ValueError if nonpositive curvature reveals a
    non-SPD matrix.
    """
    cfg = cfg or InnerSolverConfig()
    n = M.shape[0]
    if M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if len(w) != n:
        raise ValueError(f"dimension mismatch: matrix is {M.shape}, rhs has length {len(w)}")
    nw = vnorm(w)
    if nw == 0.0:
        return InnerSolveResult(np.zeros_like(w), 0, 0.0)

    if x0 is None or not np.any(x0):
        x = np.zeros_like(w)
        r = w.copy()
    else:
        x = np.array(x0, copy=True)
        r = w - spmv(M, x)

    rel = vnorm(r) / nw
    if rel <= cfg.tol:
        return InnerSolveResult(x, 0, rel)

    p = r.copy()
    rho = real_inner(r, r)
    max_iter = cfg.iteration_cap(n)
    for it in range(1, max_iter + 1):
        q = spmv(M, p)
        curv = real_inner(p, q)
        if curv <= 0.0:
            raise ValueError(f"nonpositive curvature (p^H M p = {curv:.3e}): matrix is not SPD")
        alpha = rho / curv
        x += alpha * p
        r -= alpha * q

        if it % _REFRESH_EVERY == 0:
            r = w - spmv(M, x)
            rho = real_inner(r, r)
            # p is kept; the refresh only corrects accumulated drift in r.

        rel = vnorm(r) / nw
        if rel <= cfg.tol:
            r_true = w - spmv(M, x)
            rel_true = vnorm(r_true) / nw
            if rel_true <= cfg.tol:
                return InnerSolveResult(x, it, rel_true)
            r = r_true
            rho = real_inner(r, r)

        rho_new = real_inner(r, r)
        beta = rho_new / rho
        p = r + beta * p
        rho = rho_new

    rel = vnorm(w - spmv(M, x)) / nw
    return InnerSolveResult(x, max_iter, rel)


def direct_solve(M, w, cap=DIRECT_DENSE_CAP):
    """Dense LU solve of M x = w; the factorization acts on real/imag parts."""
    n = M.shape[0]
    if M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if len(w) != n:
        raise ValueError(f"dimension mismatch: matrix is {M.shape}, rhs has length {len(w)}")
    if n > cap:
        raise ValueError(f"direct solver capped at n <= {cap}, got n = {n}")
    Md = M.toarray() if hasattr(M, "toarray") else np.asarray(M, dtype=float)
    if np.iscomplexobj(w):
        parts = np.linalg.solve(Md, np.column_stack([w.real, w.imag]))
        return parts[:, 0] + 1j * parts[:, 1]
    return np.linalg.solve(Md, w)


def complex_direct_solve(A, B, b, cap=ORACLE_DENSE_CAP):
    """Reference solution of (A + iB) x = b via dense complex LU.

    Raises OracleUnavailableError above the dense cap so callers can omit
    error-vs-reference columns instead of failing.
    """
    n = A.shape[0]
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ValueError("A and B must be square matrices of equal shape")
    if len(b) != n:
        raise ValueError(f"dimension mismatch: matrices are {A.shape}, rhs has length {len(b)}")
    if n > cap:
        raise OracleUnavailableError(f"dense reference solve unavailable for n = {n} > {cap}")
    Ad = A.toarray() if hasattr(A, "toarray") else np.asarray(A, dtype=float)
    Bd = B.toarray() if hasattr(B, "toarray") else np.asarray(B, dtype=float)
    return np.linalg.solve(Ad + 1j * Bd, np.asarray(b, dtype=complex))


def solve_inner(M, w, x0, cfg):
    """Dispatch on cfg.kind; the direct path ignores the warm start."""
    if cfg.kind == "direct":
        return InnerSolveResult(direct_solve(M, w), 0, 0.0)
    return cg_solve(M, w, x0, cfg)
