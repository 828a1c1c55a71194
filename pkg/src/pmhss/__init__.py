"""Iterative solvers and benchmarks for complex-symmetric systems (A + iB) x = b."""

from .bench import BenchmarkRow, METHOD_NAMES, emit, run_benchmark
from .inner import (
    InnerSolverConfig,
    InnerSolveResult,
    OracleUnavailableError,
    cg_solve,
    complex_direct_solve,
    direct_solve,
)
from .krylov import (
    CtoRSystem,
    MatrixOperator,
    PmhssPreconditioner,
    PresbPreconditioner,
    SplitOperator,
    c_to_r_assemble,
    gmres_solve,
    pmhss_gmres_solve,
    pmhss_precondition,
    presb_gmres_solve,
    presb_precondition,
)
from .linalg import dense_eig_sym, least_squares_qr, spmv, validate_real_csr, vnorm
from .problems import (
    MatrixMarketError,
    ProblemSpec,
    gen_eq_motion,
    gen_pade,
    gen_rhs,
    gen_shifted_omega,
    laplacian_5pt,
    laplacian_stencil,
    load_matrix_market,
    save_matrix_market,
)
from .spectral import (
    SpectralReport,
    compute_mu,
    empirical_spectrum,
    predicted_spectrum,
    presb_predicted_spectrum,
    psi_spectrum,
    spectral_report,
)
from .splitting import (
    SolveReport,
    SolverConfig,
    SplitSystem,
    aa_linear_solve,
    aa_lsq_step,
    aa_pmhss_solve,
    pmhss_solve,
    pmhss_step,
)

__version__ = "0.1.0"
