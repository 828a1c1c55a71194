"""Benchmark problem generators and Matrix Market I/O.

Three finite-difference families on the unit square, plus a file-backed path
for externally assembled systems (e.g. FEM eddy-current matrices).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .splitting import SplitSystem


class MatrixMarketError(ValueError):
    """Malformed Matrix Market input; the message carries a line number."""


def laplacian_stencil(m):
    """Unscaled 5-point stencil I (x) T + T (x) I with T = tridiag(-1, 2, -1)."""
    if m < 1:
        raise ValueError("grid size must be >= 1")
    T = sp.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(m, m), format="csr")
    eye = sp.identity(m, format="csr")
    L = (sp.kron(eye, T) + sp.kron(T, eye)).tocsr()
    L.sum_duplicates()
    L.sort_indices()
    return L


def laplacian_5pt(m):
    """Negative Laplacian on the unit square: h^{-2} (I (x) T + T (x) I), h = 1/(m+1).

    Dimension m^2, symmetric positive definite; smallest eigenvalue
    4 h^{-2} (1 - cos(pi h)).
    """
    L = laplacian_stencil(m)
    L = L * float((m + 1) ** 2)
    return L.tocsr()


def laplacian_min_eig(m):
    """Analytic smallest eigenvalue of laplacian_5pt(m)."""
    h = 1.0 / (m + 1)
    return 4.0 / h**2 * (1.0 - math.cos(math.pi * h))


def _identity(n, scale=1.0):
    return sp.identity(n, format="csr", dtype=float) * scale


def gen_rhs(n, seed=1):
    """Seeded complex vector, Re and Im parts i.i.d. uniform on [-1, 1].

    Uses the Philox 4x64 counter-based generator (real parts drawn first) so
    the same seed yields bit-identical vectors on every platform.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    re = rng.uniform(-1.0, 1.0, n)
    im = rng.uniform(-1.0, 1.0, n)
    return re + 1j * im


def gen_pade(m, rhs="ones", seed=1):
    """Time-integration benchmark: A = L + (3-sqrt(3))/h I, B = L + (3+sqrt(3))/h I.

    Both shifts are positive so A and B are SPD. The default right-hand side
    is the smooth vector (1+i) * ones, which concentrates on low-frequency
    modes; pass rhs="random" for the seeded uniform vector used by the other
    generators.
    """
    h = 1.0 / (m + 1)
    L = laplacian_5pt(m)
    n = m * m
    A = (L + _identity(n, (3.0 - math.sqrt(3.0)) / h)).tocsr()
    B = (L + _identity(n, (3.0 + math.sqrt(3.0)) / h)).tocsr()
    b = (1.0 + 1.0j) * np.ones(n) if rhs == "ones" else gen_rhs(n, seed)
    return SplitSystem(A=A, B=B, b=b)


def gen_shifted_omega(m, mu_helm=0.0, omega_helm=0.01, rhs="random", seed=1):
    """Damped Helmholtz benchmark: A = L0 + mu I, B = omega I.

    L0 is the raw (unscaled) 5-point stencil; with the default omega = 0.01
    the imaginary shift is comparable to the smallest stencil eigenvalue,
    which is what makes this family ill-conditioned for unpreconditioned
    Krylov methods.
    """
    if mu_helm < 0 or omega_helm < 0:
        raise ValueError("shift coefficients must be nonnegative")
    L = laplacian_stencil(m)
    n = m * m
    A = (L + _identity(n, mu_helm)).tocsr() if mu_helm else L
    B = _identity(n, omega_helm)
    b = (1.0 + 1.0j) * np.ones(n) if rhs == "ones" else gen_rhs(n, seed)
    return SplitSystem(A=A, B=B, b=b)


def gen_eq_motion(m, omega_mech=math.pi, mu_mech=0.02, rhs="random", seed=1):
    """Frequency-response benchmark: A = K - omega^2 M, B = omega C_V + C_H.

    Uses K = L (scaled Laplacian), M = I, C_V = 10 I, C_H = mu K. A stays SPD
    as long as the smallest eigenvalue of L exceeds omega^2; a hard error
    reports the computed bound otherwise.
    """
    lam_min = laplacian_min_eig(m)
    if lam_min <= omega_mech**2:
        raise ValueError(
            f"A = K - omega^2 M is not SPD: lambda_min(L) = {lam_min:.6g} "
            f"<= omega^2 = {omega_mech**2:.6g}"
        )
    L = laplacian_5pt(m)
    n = m * m
    A = (L - _identity(n, omega_mech**2)).tocsr()
    B = (mu_mech * L + _identity(n, 10.0 * omega_mech)).tocsr()
    b = (1.0 + 1.0j) * np.ones(n) if rhs == "ones" else gen_rhs(n, seed)
    return SplitSystem(A=A, B=B, b=b)


@dataclass
class ProblemSpec:
    """Everything needed to build a SplitSystem reproducibly."""

    kind: str                       # "pade" | "shifted_omega" | "eq_motion" | "file"
    m: int = 100
    mu_helm: float = 0.0
    omega_helm: float = 0.01
    omega_mech: float = math.pi
    mu_mech: float = 0.02
    matrix_a: str | None = None
    matrix_b: str | None = None
    rhs: str = "default"            # "default" | "random" | "ones" | "file"
    rhs_file: str | None = None
    rhs_seed: int = 1

    def __post_init__(self):
        if self.kind not in ("pade", "shifted_omega", "eq_motion", "file"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.kind != "file" and self.m < 1:
            raise ValueError("grid size m must be >= 1")

    @property
    def n(self):
        if self.kind == "file":
            raise ValueError("dimension of a file-backed problem is known only after loading")
        return self.m * self.m

    def label(self):
        return self.kind if self.kind != "file" else f"file:{self.matrix_a}"

    def build(self):
        if self.kind == "pade":
            rhs = "ones" if self.rhs == "default" else self.rhs
            return gen_pade(self.m, rhs=rhs, seed=self.rhs_seed)
        if self.kind == "shifted_omega":
            rhs = "random" if self.rhs == "default" else self.rhs
            return gen_shifted_omega(self.m, self.mu_helm, self.omega_helm, rhs, self.rhs_seed)
        if self.kind == "eq_motion":
            rhs = "random" if self.rhs == "default" else self.rhs
            return gen_eq_motion(self.m, self.omega_mech, self.mu_mech, rhs, self.rhs_seed)
        return self._build_from_files()

    def _build_from_files(self):
        if self.matrix_a is None:
            raise ValueError("file-backed problems require matrix_a")
        loaded = load_matrix_market(self.matrix_a)
        if isinstance(loaded, tuple):
            if self.matrix_b is not None:
                raise ValueError("matrix_a is complex; matrix_b must not be given as well")
            A, B = loaded
        else:
            A = loaded
            if self.matrix_b is not None:
                B = load_matrix_market(self.matrix_b)
                if isinstance(B, tuple):
                    raise ValueError("matrix_b must be a real matrix")
            else:
                B = sp.csr_matrix(A.shape, dtype=float)
        n = A.shape[0]
        if self.rhs == "file":
            if self.rhs_file is None:
                raise ValueError("rhs='file' requires rhs_file")
            b = load_matrix_market_vector(self.rhs_file)
            if len(b) != n:
                raise ValueError(f"rhs length {len(b)} does not match matrix dimension {n}")
        elif self.rhs == "ones":
            b = (1.0 + 1.0j) * np.ones(n)
        else:
            b = gen_rhs(n, self.rhs_seed)
        return SplitSystem(A=A, B=B, b=b)


def _parse_header(line):
    parts = line.strip().lower().split()
    if len(parts) < 3 or parts[0] != "%%matrixmarket" or parts[1] != "matrix":
        raise MatrixMarketError(f"line 1: not a Matrix Market matrix header: {line.strip()!r}")
    layout = parts[2]
    if layout != "coordinate":
        raise MatrixMarketError(f"line 1: unsupported Matrix Market format {layout!r}; only 'coordinate' is supported")
    field = parts[3] if len(parts) > 3 else ""
    symmetry = parts[4] if len(parts) > 4 else "general"
    if field not in ("real", "complex"):
        raise MatrixMarketError(f"line 1: unsupported field type {field!r}; expected 'real' or 'complex'")
    if symmetry not in ("general", "symmetric"):
        raise MatrixMarketError(f"line 1: unsupported symmetry {symmetry!r}; expected 'general' or 'symmetric'")
    return field, symmetry


def load_matrix_market(path):
    """Read a Matrix Market coordinate file.

    Returns a real CSR matrix, or the pair (A, B) of real CSR matrices for a
    complex file with entries A + iB. Symmetric storage is expanded to both
    triangles; duplicate entries are summed. Malformed input raises
    MatrixMarketError with the offending line number.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.readlines()
    if not lines:
        raise MatrixMarketError("line 1: empty file")
    field, symmetry = _parse_header(lines[0])

    is_complex = field == "complex"
    want = 4 if is_complex else 3
    size = None
    rows = cols = nnz = 0
    count = 0
    ii, jj = [], []
    vals_re, vals_im = [], []

    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        parts = line.split()
        if size is None:
            if len(parts) != 3:
                raise MatrixMarketError(f"line {lineno}: expected 'rows cols nnz', got {line!r}")
            try:
                rows, cols, nnz = (int(p) for p in parts)
            except ValueError:
                raise MatrixMarketError(f"line {lineno}: non-integer size entry in {line!r}") from None
            if rows < 1 or cols < 1 or nnz < 0:
                raise MatrixMarketError(f"line {lineno}: invalid sizes {line!r}")
            if symmetry == "symmetric" and rows != cols:
                raise MatrixMarketError(f"line {lineno}: symmetric matrix must be square")
            size = (rows, cols)
            continue
        if count >= nnz:
            raise MatrixMarketError(f"line {lineno}: more than the declared {nnz} entries")
        if len(parts) != want:
            raise MatrixMarketError(f"line {lineno}: expected {want} fields, got {len(parts)}")
        try:
            i, j = int(parts[0]), int(parts[1])
            re = float(parts[2])
            im = float(parts[3]) if is_complex else 0.0
        except ValueError:
            raise MatrixMarketError(f"line {lineno}: malformed entry {line!r}") from None
        if not (1 <= i <= rows) or not (1 <= j <= cols):
            raise MatrixMarketError(f"line {lineno}: index ({i}, {j}) out of bounds for {rows}x{cols}")
        ii.append(i - 1)
        jj.append(j - 1)
        vals_re.append(re)
        vals_im.append(im)
        if symmetry == "symmetric" and i != j:
            ii.append(j - 1)
            jj.append(i - 1)
            vals_re.append(re)
            vals_im.append(im)
        count += 1

    if size is None:
        raise MatrixMarketError(f"line {len(lines)}: missing size line")
    if count != nnz:
        raise MatrixMarketError(f"line {len(lines)}: expected {nnz} entries, found {count}")

    def assemble(values):
        M = sp.coo_matrix((values, (ii, jj)), shape=size).tocsr()
        M.sum_duplicates()
        M.sort_indices()
        return M

    A = assemble(np.asarray(vals_re, dtype=float))
    if not is_complex:
        return A
    return A, assemble(np.asarray(vals_im, dtype=float))


def load_matrix_market_vector(path):
    """Read an n x 1 (or 1 x n) coordinate file as a dense complex vector."""
    loaded = load_matrix_market(path)
    if isinstance(loaded, tuple):
        re, im = (np.asarray(M.todense()) for M in loaded)
        dense = re + 1j * im
    else:
        dense = np.asarray(loaded.todense(), dtype=complex)
    if 1 not in dense.shape:
        raise MatrixMarketError(f"expected a vector-shaped file, got shape {dense.shape}")
    return dense.ravel()


def save_matrix_market(path, A, B=None, comment=None):
    """Write a CSR matrix (or the complex pair A + iB) in coordinate format."""
    is_complex = B is not None
    if is_complex:
        if B.shape != A.shape:
            raise ValueError("A and B must have equal shapes")
        coo = (A + 1j * B).tocoo()
    else:
        coo = A.tocoo()
    field = "complex" if is_complex else "real"
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate {field} general\n")
        if comment:
            fh.write(f"% {comment}\n")
        fh.write(f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        if is_complex:
            for i, j, v in zip(coo.row, coo.col, coo.data):
                fh.write(f"{i + 1} {j + 1} {float(v.real)!r} {float(v.imag)!r}\n")
        else:
            for i, j, v in zip(coo.row, coo.col, coo.data):
                fh.write(f"{i + 1} {j + 1} {float(v)!r}\n")
