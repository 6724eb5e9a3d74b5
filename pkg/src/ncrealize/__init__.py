"""Finite realizations of noncommutative rational and entire functions.

Words, truncated free power series, descriptor and Fornasini-Marchesini
realizations, Kalman minimization, nilpotent realizations of entire series,
pole analysis of restrictions to complex lines, matrix-centre realizations
and an expression compiler.
"""

from .entire import (
    adjunction_power,
    joint_spectral_radius,
    monomial_realization,
    quasinilpotent_1d,
    quasinilpotent_nc,
    shift_tuple,
)
from .errors import (
    AlphabetError,
    DomainError,
    InputError,
    NCRealizeError,
    NotInvertibleError,
    NumericalError,
    ParseError,
    PreconditionError,
    StructuralError,
)
from .expr import compile_expr, interpret, parse, random_expression, to_string
from .fps import (
    EMPTY,
    TruncatedSeries,
    backward_shift,
    radius_estimate,
    series_add,
    series_invert,
    series_mul,
    series_transpose,
    word_concat,
    word_transpose,
)
from .matcentre import matcentre_add, matcentre_eval, matcentre_from_fm, matcentre_invert, matcentre_mul, tt_term
from .minimal import controllable_span, is_minimal, kalman_minimize, observable_span, similarity_between_minimal
from .realization import (
    DescriptorRealization,
    FMRealization,
    MatrixTuple,
    col_norm,
    descriptor_add,
    descriptor_from_fm,
    descriptor_invert,
    descriptor_mul,
    eval_descriptor,
    eval_fm,
    evaluate,
    fm_add,
    fm_from_descriptor,
    fm_invert,
    fm_mul,
    pencil_apply,
    row_norm,
    series_from_realization,
    shift_realization,
)
from .spectral import (
    compact_truncation,
    domain_agreement,
    pencil_condition,
    restriction_poles,
    schatten_norm,
    verify_pole_actual,
    zariski_probe,
)

__version__ = "0.1.0"
