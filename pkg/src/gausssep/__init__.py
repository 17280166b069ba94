"""Separability and P-representability of bipartite Gaussian states."""

from .core import (
    ClosedFormIntermediates,
    GaussianParams,
    Verdict,
    build_covariance,
    classify,
    decompose_blocks,
    intermediates,
    min_eigenvalue_hermitian,
    p_representability_closed_form,
    p_representability_eig,
    params_from_covariance,
    partial_transpose,
    physicality_closed_form,
    physicality_eig,
    schur_complement,
    separability_closed_form,
    separability_eig,
)
from .symplectic import (
    InvariantFormResult,
    LocalSymplectic,
    SymplecticInvariants,
    apply_local,
    invariants,
    make_local_symplectic,
    random_local_symplectic,
    random_physical_state,
    reduce_to_invariant_form,
)

__all__ = [
    "ClosedFormIntermediates",
    "GaussianParams",
    "InvariantFormResult",
    "LocalSymplectic",
    "SymplecticInvariants",
    "Verdict",
    "apply_local",
    "build_covariance",
    "classify",
    "decompose_blocks",
    "intermediates",
    "invariants",
    "make_local_symplectic",
    "min_eigenvalue_hermitian",
    "p_representability_closed_form",
    "p_representability_eig",
    "params_from_covariance",
    "partial_transpose",
    "physicality_closed_form",
    "physicality_eig",
    "random_local_symplectic",
    "random_physical_state",
    "reduce_to_invariant_form",
    "schur_complement",
    "separability_closed_form",
    "separability_eig",
]

__version__ = "0.1.0"
