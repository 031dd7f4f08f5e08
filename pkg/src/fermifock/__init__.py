"""Exact computer algebra for a non-anticommutative fermionic Fock space."""

from .delta import (
    DeltaCoeffs,
    check_exp_delta_neg_comm,
    delta_apply,
    exp_delta,
    t_number,
    t_number_alt,
    t_number_pairings,
)
from .fock import (
    VACUUM,
    AlgebraConfig,
    FockVector,
    HSpace,
    apply_mode,
    apply_modes,
    d_op,
    grading_op,
    parity,
    theta,
    weight,
    weight2,
)
from .laurent import Box, LaurentPoly, iota_expand
from .ratfun import RationalFunction, f_mn
from .scalars import Rational, binom
from .straightening import defect, pbw_normal_form
from .vertex import (
    WindowedSeries,
    check_axioms,
    check_weak_associativity,
    enumerate_shuffles,
    iterate_series,
    normal_order_modes,
    product_series,
    y_coeff,
    y_series,
)
from .wick import (
    Factor,
    NOExpr,
    contraction_det,
    correlation,
    noexpr_apply,
    vacuum_expectation,
    wick_fuse,
    wick_iterate,
    wick_product,
)

__all__ = [name for name in dir() if not name.startswith("_")]
