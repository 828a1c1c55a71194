"""Small-instance spectral verification.

Everything here reduces to the eigenvalues mu of A^{-1} B, which are real and
nonnegative for SPD A and SPSD B. From mu the module predicts the spectra of
the preconditioned operators and the fixed-point update matrix, and checks
them against densely computed eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .linalg import DENSE_EIG_CAP

EMPIRICAL_CAP = 256

# Tolerated numerical undershoot below zero for the mu spectrum.
_MU_FLOOR = -1e-10


@dataclass
class SpectralReport:
    mu: np.ndarray                  # eigenvalues of A^{-1} B, ascending
    predicted_lambda: np.ndarray    # 1 + (i-1) mu / (1 + mu)
    empirical_lambda: np.ndarray    # eigenvalues of the dense preconditioned operator
    rho_psi: float                  # spectral radius of the update matrix
    max_deviation: float            # worst sorted-pairing mismatch, predicted vs empirical


def _to_dense(M):
    return M.toarray() if hasattr(M, "toarray") else np.asarray(M, dtype=float)


def compute_mu(A, B, cap=DENSE_EIG_CAP):
    """Eigenvalues of the generalized problem B v = mu A v, ascending.

    Reduces to a standard symmetric problem through the dense Cholesky factor
    of A; a factorization failure means A is not SPD and is a hard error.
    """
    Ad = _to_dense(A)
    Bd = _to_dense(B)
    n = Ad.shape[0]
    if Ad.shape != Bd.shape or Ad.shape[0] != Ad.shape[1]:
        raise ValueError("A and B must be square matrices of equal shape")
    if n > cap:
        raise ValueError(f"generalized eigensolver capped at n <= {cap}, got n = {n}")
    try:
        Lc = np.linalg.cholesky(Ad)
    except np.linalg.LinAlgError as exc:
        raise ValueError("A is not symmetric positive definite") from exc
    # C = L^{-1} B L^{-T}, symmetric with the same spectrum as A^{-1} B.
    Y = scipy.linalg.solve_triangular(Lc, Bd, lower=True)
    C = scipy.linalg.solve_triangular(Lc, Y.T, lower=True).T
    C = 0.5 * (C + C.T)
    return np.linalg.eigvalsh(C)


def _check_mu(mu):
    mu = np.asarray(mu, dtype=float)
    if mu.size and mu.min() < _MU_FLOOR:
        raise ValueError(f"negative mu = {mu.min():.3e}; expected a nonnegative spectrum")
    return np.maximum(mu, 0.0)


def predicted_spectrum(mu):
    """Preconditioned eigenvalues 1 + (i - 1) mu / (mu + 1) for each mu >= 0."""
    mu = _check_mu(mu)
    return 1.0 + (1j - 1.0) * mu / (mu + 1.0)


def psi_spectrum(mu):
    """Update-matrix eigenvalues (1+i)/2 (1 - i mu) / (1 + mu); moduli <= sqrt(2)/2."""
    mu = _check_mu(mu)
    return 0.5 * (1.0 + 1.0j) * (1.0 - 1j * mu) / (1.0 + mu)


def presb_predicted_spectrum(mu):
    """Eigenvalues of the square-block preconditioned 2n system: 1 and
    (1 + mu^2) / (1 + mu)^2 per mode; all real, inside [1/2, 1]."""
    mu = _check_mu(mu)
    second = (1.0 + mu**2) / (1.0 + mu) ** 2
    return np.sort(np.concatenate([np.ones_like(mu), second]))


def spectral_radius_psi(mu):
    """max |(1+i)/2 (1 - i mu)/(1 + mu)| over the given mu spectrum."""
    return float(np.abs(psi_spectrum(mu)).max()) if len(mu) else 0.0


def empirical_spectrum(system, method="pmhss_gmres", cap=EMPIRICAL_CAP):
    """Eigenvalues of the densely formed preconditioned operator.

    method "pmhss_gmres": (1-i)/2 (A+B)^{-1} (A+iB), the operator the
    left-preconditioned GMRES iterates with (the (1-i)/2 scaling of the
    preconditioner application is included).
    method "presb": the true preconditioned C-to-R operator
    [[A, -B], [B, A+2B]]^{-1} [[A, -B], [B, A]] on the 2n real system.
    """
    n = system.n
    if n > cap:
        raise ValueError(f"empirical spectrum capped at n <= {cap}, got n = {n}")
    Ad = _to_dense(system.A)
    Bd = _to_dense(system.B)
    if method == "pmhss_gmres":
        op = 0.5 * (1.0 - 1.0j) * np.linalg.solve(Ad + Bd, Ad + 1j * Bd)
        return np.linalg.eigvals(op)
    if method == "presb":
        block_a = np.block([[Ad, -Bd], [Bd, Ad]])
        precond = np.block([[Ad, -Bd], [Bd, Ad + 2.0 * Bd]])
        return np.linalg.eigvals(np.linalg.solve(precond, block_a))
    raise ValueError(f"unknown method {method!r}")


def _sorted_pairing_deviation(computed, reference):
    computed = np.sort_complex(np.asarray(computed, dtype=complex))
    reference = np.sort_complex(np.asarray(reference, dtype=complex))
    return float(np.abs(computed - reference).max())


def spectral_report(system, method="pmhss_gmres"):
    """Compare predicted and empirical preconditioned spectra for a system.

    For the complex-path preconditioner the empirical operator carries the
    (1-i)/2 application scaling, so the deviation is measured after unscaling
    by (1+i); the square-block spectrum is compared directly.
    """
    mu = compute_mu(system.A, system.B)
    predicted = predicted_spectrum(mu)
    empirical = empirical_spectrum(system, method=method)
    if method == "pmhss_gmres":
        deviation = _sorted_pairing_deviation((1.0 + 1.0j) * empirical, predicted)
    else:
        deviation = _sorted_pairing_deviation(empirical, presb_predicted_spectrum(mu))
    return SpectralReport(
        mu=mu,
        predicted_lambda=predicted,
        empirical_lambda=empirical,
        rho_psi=spectral_radius_psi(mu),
        max_deviation=deviation,
    )
