"""Nonnegative solutions of (lambda*I - P)x = b and (P - lambda*I)x = b for
nonnegative matrices P, over the nonnegative orthant.

Combinatorial decision procedures (classes, access, local spectral radii,
distinguished eigenvalues, Collatz-Wielandt numbers) cross-validated by an
exact rational LP oracle.
"""

from .alternating import (
    AltResult,
    AlternatingBoundReport,
    ZMatrix,
    alt_length,
    alternating_bound_report,
    exists_infinite,
    is_m_matrix,
)
from .classes import (
    ClassAnalysis,
    ClassTaxonomy,
    classify,
    condense,
    dual_face,
    is_initial,
    smallest_initial_superset,
)
from .collatz_wielandt import (
    BoundaryReport,
    CWReport,
    CWSets,
    PowerLimitReport,
    ZeroIntersectionReport,
    boundary_report,
    cw_numbers,
    cw_sets,
    decompose_subinvariant,
    decompose_superinvariant,
    power_limit_exists,
    rho_in_sigma1,
    zero_intersection_conditions,
)
from .core import (
    DEFAULT_TOL,
    FLOAT,
    RATIONAL,
    ConeVector,
    InvalidInput,
    NonnegMatrix,
    NumericFailure,
    RealVector,
    Scalar,
    SpectralPair,
    Tolerance,
    as_scalar,
    exact_fraction,
    format_scalar,
    lex_leq,
    snap_cone,
    support,
)
from .eq_type1 import (
    ConditionReport,
    SolveReport1,
    minimal_solution,
    neumann_partial,
    oracle_solve,
    solvability_conditions,
    solvable1,
    solvable_set,
    solve1,
)
from .eq_type2 import (
    MembershipReport,
    ResolventSign,
    SolveReport2,
    combinatorial_solvable_above,
    image_membership,
    necessary_face,
    resolvent_sign,
    solvable2,
    solvable_face_probe,
    solve2_above,
    subcritical_window,
    tracedown_witness,
)
from .spectral import (
    SpectralReport,
    class_radii,
    distinguished_eigenvalues,
    eigenvalue_index,
    fv_eigenvector,
    local_radius_estimate,
    local_spectral_radius,
    max_distinguished_order,
    spectral_pair,
    spectral_radius,
    spectral_report,
    taxonomy,
)

__all__ = [
    "AltResult",
    "AlternatingBoundReport",
    "BoundaryReport",
    "CWReport",
    "CWSets",
    "ClassAnalysis",
    "ClassTaxonomy",
    "ConditionReport",
    "ConeVector",
    "DEFAULT_TOL",
    "FLOAT",
    "InvalidInput",
    "MembershipReport",
    "NonnegMatrix",
    "NumericFailure",
    "PowerLimitReport",
    "RATIONAL",
    "RealVector",
    "ResolventSign",
    "Scalar",
    "SolveReport1",
    "SolveReport2",
    "SpectralPair",
    "SpectralReport",
    "Tolerance",
    "ZMatrix",
    "ZeroIntersectionReport",
    "alt_length",
    "alternating_bound_report",
    "as_scalar",
    "boundary_report",
    "class_radii",
    "classify",
    "combinatorial_solvable_above",
    "condense",
    "cw_numbers",
    "cw_sets",
    "decompose_subinvariant",
    "decompose_superinvariant",
    "distinguished_eigenvalues",
    "dual_face",
    "eigenvalue_index",
    "exact_fraction",
    "exists_infinite",
    "format_scalar",
    "fv_eigenvector",
    "image_membership",
    "is_initial",
    "is_m_matrix",
    "lex_leq",
    "local_radius_estimate",
    "local_spectral_radius",
    "max_distinguished_order",
    "minimal_solution",
    "necessary_face",
    "neumann_partial",
    "oracle_solve",
    "power_limit_exists",
    "resolvent_sign",
    "rho_in_sigma1",
    "smallest_initial_superset",
    "snap_cone",
    "solvability_conditions",
    "solvable1",
    "solvable2",
    "solvable_face_probe",
    "solvable_set",
    "solve1",
    "solve2_above",
    "spectral_pair",
    "spectral_radius",
    "spectral_report",
    "subcritical_window",
    "support",
    "taxonomy",
    "tracedown_witness",
    "zero_intersection_conditions",
]
