"""Exact computation with geometrically regular weighted shifts.

A geometrically regular weighted shift has squared weights
(p**n + N) / (p**n + D) for a rational p > 1 and a rational point (N, D)
inside the open unit square.  This package classifies parameter points
into the sectors of the square, runs finite-difference property
batteries (contractivity, complete monotonicity and alternation, and
their log variants), decides k-hyponormality through exact Hankel
determinants, constructs and verifies atomic Berger measures, transforms
shifts (Schur powers, Aluthge transform, affine subshifts, quotients and
reciprocals), and solves the two-atom moment completion problem.

Every decision is made in exact rational arithmetic; certified interval
arithmetic enters only where an irrational resampling forces it, and
then signs are either certified or reported as indeterminate.
"""

__version__ = "0.1.0"

from .berger import (
    AtomicMeasure,
    BergerCoefficients,
    ConstructionError,
    atom_count_on_ray,
    berger_coefficients,
    berger_measure,
    verify_representation,
)
from .completion import (
    CompletionError,
    CompletionSolution,
    TwoAtomSpec,
    family_completion,
    family_sector_ranges,
    fit_to_initial_moments,
    same_p_completion,
    target_moments,
    three_atom_completion_search,
)
from .hankel import (
    HankelWindow,
    HypoVerdict,
    condensation_check,
    det_closed_form,
    det_exact,
    hankel,
    hyponormality_order,
    sector_iv_predicted_order,
)
from .intervals import CertifiedSequence, geometric_resample
from .model import (
    MomentSequence,
    ParameterError,
    SectorLabel,
    ShiftParams,
    WeightSequence,
    classify,
    from_scaled_form,
    make_params,
    moment,
    moments,
    weight_approx,
    weight_sq,
    weights,
)
from .rationals import (
    RationalFormatError,
    format_rational,
    parse_rational,
    rational_power,
)
from .sequences import (
    HOLDS,
    INDETERMINATE,
    VIOLATED,
    PropertyVerdict,
    Witness,
    battery,
    function_alternation_probe,
    is_n_alternating,
    is_n_monotone,
    n_contractive,
    nabla,
    nabla_ratio,
)
from .transforms import (
    AffineMap,
    PGCoefficients,
    affine_subshift_params,
    aluthge,
    pg_coefficients,
    pg_identity_check,
    quotient_shift,
    reciprocal,
    reciprocal_weights,
    schur_power,
    subshift_weights,
    viiia_derived_weights,
)

__all__ = [name for name in dir() if not name.startswith("_")]
