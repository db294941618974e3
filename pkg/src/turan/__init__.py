"""Turan determinant positivity checks for three-term recurrences."""

from .criteria import (
    Criterion,
    CriterionVerdict,
    Failure,
    InitCheck,
    SigmaSequence,
    ThmFourWitness,
    check_cor1,
    check_prop3_hypothesis,
    check_sigma_transfer,
    check_thm1,
    check_thm4,
    check_thm4_condition,
    check_thm4_init,
    check_thm5,
    renormalize,
)
from .determinants import (
    DeterminantSample,
    identity_spread,
    prop3_sum,
    sample_determinants,
    turan_direct,
    turan_identity,
)
from .errors import (
    FamilySpecError,
    InvalidSequenceError,
    NormalizationError,
    PreconditionError,
    RecurrenceOverflowError,
    TuranError,
    WrongCriterionError,
)
from .families import (
    PolynomialFamily,
    build_family,
    family_from_spec,
    make_chebyshev,
    make_laguerre,
    make_legendre,
    make_pollaczek,
    make_q_ultraspherical,
    make_sec6_example,
    make_ultraspherical,
    oracle_value,
    working_sequence,
)
from .recurrence import (
    CoefficientSequence,
    EvaluationTable,
    NormalizationLedger,
    check_normalization,
    eval_polynomials,
    half_line_transform,
    normalize_at_one,
)
from .scanner import (
    RemarkWindow,
    ScanRegion,
    TuranReport,
    endpoint_equality,
    remark_window,
    scan_sign,
    strict_interior_min,
    support_left_heuristic,
    turan_grid,
)

__version__ = "0.1.0"
