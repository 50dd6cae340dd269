"""Certified bounds for discriminating bipartite quantum states.

Three optima are computed by barrier interior-point methods: the guessing
probability p_G, its partial-transpose analogue q_G (an upper bound on what
local measurements achieve) and the PPT-measurement optimum p_PPT.
"""

from .certify import (
    CertificateKind,
    CertificateReport,
    LocalRealizationReport,
    check_global_optimality,
    check_local_realization,
    check_povm_ppt,
    check_qg_optimality,
    lagrangian_operators,
)
from .ensembles import (
    ClosedForms,
    ExampleLabel,
    HermitianEnsemble,
    Povm,
    StateEnsemble,
    example_closed_forms,
    example_ensemble,
    example_global_povm,
    example_labels,
    example_local_povm,
    maximally_mixed,
    psi_state,
    pt_ensemble,
    validate_ensemble,
)
from .errors import NumericalFailure, PtboundError, SolverFailure, ValidationError
from .linalg import (
    HermitianOperator,
    eig_hermitian,
    is_psd,
    kron,
    min_eigenvalue,
    partial_transpose,
    trace_inner,
    trace_norm,
)
from .solver import (
    BoundsReport,
    ProblemKind,
    SolveResult,
    SolverConfig,
    bounds_report,
    helstrom_two_state,
    solve_hermitian_guessing,
    solve_pg,
    solve_ppt,
    solve_qg,
)

__version__ = "0.1.0"
