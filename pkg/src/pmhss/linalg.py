"""Dense/sparse kernels shared by the solvers.

Complex vectors are plain ``numpy.ndarray`` of dtype complex128; real sparse
matrices are ``scipy.sparse.csr_matrix`` with float64 data and sorted column
indices (see :func:`validate_real_csr`).
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.sparse as sp

# Columns of a least-squares factor are considered dependent when the
# corresponding |R_jj| falls below this fraction of |R_11|.
RANK_TOL = 1e-14

DENSE_EIG_CAP = 512


def hdot(u, v):
    """Hermitian inner product <u, v> = sum conj(u_i) v_i."""
    return np.vdot(u, v)


def real_inner(u, v):
    """Re<u, v>, computed as dot(Re u, Re v) + dot(Im u, Im v).

    The split form keeps the operation order identical to an inner product on
    the stacked real vector (Re u, Im u), which the conjugate-gradient solver
    relies on for its stacked-system equivalence.
    """
    if np.iscomplexobj(u) or np.iscomplexobj(v):
        u = np.asarray(u)
        v = np.asarray(v)
        return float(np.dot(u.real, v.real) + np.dot(u.imag, v.imag))
    return float(np.dot(u, v))


def vnorm(v):
    """Euclidean norm via :func:`real_inner`; >= 0, zero iff v == 0."""
    return np.sqrt(real_inner(v, v))


def spmv(M, v):
    """Sparse real matrix times (possibly complex) vector.

    A complex vector is handled by applying M independently to the real and
    imaginary parts, so spmv(M, u + i*w) == spmv(M, u) + i*spmv(M, w) holds
    with the exact same floating-point operations.
    """
    if M.shape[1] != len(v):
        raise ValueError(f"dimension mismatch: matrix is {M.shape}, vector has length {len(v)}")
    if np.iscomplexobj(v):
        return M.dot(np.ascontiguousarray(v.real)) + 1j * M.dot(np.ascontiguousarray(v.imag))
    return M.dot(v)


def least_squares_qr(G, g, rank_tol=RANK_TOL):
    """Minimize ||g - G @ alpha||_2 over complex alpha via Householder QR.

    Rank-deficient columns (|R_jj| < rank_tol * |R_11|) are dropped oldest
    first and their coefficients set to zero. An empty G yields an empty
    coefficient vector.
    """
    G = np.asarray(G)
    if G.ndim != 2:
        raise ValueError("G must be a 2-d array")
    n, k = G.shape
    if k == 0:
        return np.zeros(0, dtype=complex)
    if len(g) != n:
        raise ValueError(f"dimension mismatch: G is {G.shape}, g has length {len(g)}")
    if k > n:
        raise ValueError(f"G must be tall or square, got {G.shape}")

    keep = list(range(k))
    while keep:
        Q, R = np.linalg.qr(G[:, keep], mode="reduced")
        d = np.abs(np.diagonal(R))
        ref = d[0]
        if ref == 0.0:
            keep.pop(0)
            continue
        bad = np.nonzero(d < rank_tol * ref)[0]
        if bad.size == 0:
            break
        keep.pop(int(bad[0]))
    alpha = np.zeros(k, dtype=complex)
    if keep:
        y = Q.conj().T @ g
        alpha[keep] = scipy.linalg.solve_triangular(R, y, lower=False)
    return alpha


def dense_eig_sym(M, cap=DENSE_EIG_CAP, sym_tol=1e-12):
    """All eigenvalues of a dense real symmetric matrix, ascending.

    A hard error is raised for inputs asymmetric beyond sym_tol (relative to
    the largest entry) or larger than the dense cap.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    if n > cap:
        raise ValueError(f"dense eigensolver capped at n <= {cap}, got n = {n}")
    scale = max(1.0, np.abs(M).max())
    asym = np.abs(M - M.T).max()
    if asym > sym_tol * scale:
        raise ValueError(f"matrix is not symmetric: max |M - M^T| = {asym:.3e}")
    return np.linalg.eigvalsh(M)


def validate_real_csr(M, symmetric=False, tol=1e-12):
    """Check the CSR storage invariants; raises ValueError on violation.

    Verifies float64 data, a nondecreasing row-offset array of length
    n_rows + 1 ending at nnz, strictly increasing in-range column indices per
    row, and (optionally) symmetry by transpose comparison.
    """
    if not sp.issparse(M) or M.format != "csr":
        raise ValueError("expected a scipy CSR matrix")
    if M.dtype != np.float64:
        raise ValueError(f"expected float64 data, got {M.dtype}")
    n_rows, n_cols = M.shape
    if M.indptr.shape[0] != n_rows + 1:
        raise ValueError("row offsets must have length n_rows + 1")
    if M.indptr[0] != 0 or M.indptr[-1] != M.nnz:
        raise ValueError("row offsets must start at 0 and end at nnz")
    if np.any(np.diff(M.indptr) < 0):
        raise ValueError("row offsets must be nondecreasing")
    if M.nnz and (M.indices.min() < 0 or M.indices.max() >= n_cols):
        raise ValueError("column index out of range")
    for i in range(n_rows):
        cols = M.indices[M.indptr[i]:M.indptr[i + 1]]
        if cols.size > 1 and np.any(np.diff(cols) <= 0):
            raise ValueError(f"row {i}: column indices not strictly increasing")
    if symmetric:
        if n_rows != n_cols:
            raise ValueError("symmetric matrix must be square")
        d = abs(M - M.T)
        err = d.max() if d.nnz else 0.0
        scale = max(1.0, abs(M).max() if M.nnz else 0.0)
        if err > tol * scale:
            raise ValueError(f"matrix is not symmetric: max |M - M^T| = {err:.3e}")
