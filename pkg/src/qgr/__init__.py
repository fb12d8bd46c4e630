"""Exact-arithmetic quasimap series for complete intersections in Gr(2,n).

Builds the ladder generating functions, their bar transforms and closed
forms, the recursion-coefficient tables, the operator calculus and the
basis-weighted series, and machine-verifies recursivity, polynomiality,
operator normalizations and diagonal orthogonality — all over exact
rationals.
"""

from .cohomology import (
    CohClass,
    GrContext,
    ab_integrate,
    box_partitions,
    default_generic_alpha,
    diagonal,
    equivariant_diagonal,
    localization_data,
    pairing,
    restrict_fixed_point,
    schur_poly,
    schur_reduce,
)
from .hyper import (
    AMatrixSpec,
    CISpec,
    HyperSeries,
    RecursionCoeffs,
    bar_transform,
    build_A,
    build_K,
    build_Y_closed,
    c_coeff,
    frak_coeff,
    normalization_I,
    recursion_coeff,
    scr_coeff,
    specialize_to_K,
    y_series_evaluated,
)
from .operators import (
    apply_frakD,
    assemble_Y_gamma,
    assemble_double_J,
    audit_frakD_normalizations,
    build_barD,
    build_calD,
    build_pipeline,
    equivariant_orthogonality_check,
    extract_opexp,
    gamma_operator,
    orthogonality_check,
    solve_structure_coeffs,
    y_gamma_evaluated,
)
from .residues import residue_at, residue_at_infinity, residue_sum_check
from .rings import BigRational, RatFunc, SparsePoly, ratfunc_arithmetic
from .series import LaurentExpansion, QSeries, expand_series_in_x, laurent_expand_hbar
from .verifier import (
    audit_uniqueness_hypotheses,
    build_phi,
    check_mpc,
    check_recursive,
    check_recursive_2q,
)

__version__ = "0.1.0"
