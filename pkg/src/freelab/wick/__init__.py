"""Exact moment engine for free semicircular and circular families."""

from .algebra import (
    CIRCULAR,
    SEMICIRCULAR,
    AlgElement,
    GaussianRational,
    GeneratorLabel,
    I,
    LabelAllocator,
    Letter,
    SymbolicMatrix,
    alg_trace,
    clear_moment_cache,
    covariance,
    diagonal_trace_of_product,
    matrix_trace,
    wick_moment,
)
from .freeness import (
    ClaimsReport,
    Cor32Report,
    FreenessReport,
    build_voiculescu_symbolic,
    check_freeness,
    corollary32_check,
    diagonal_units,
    moments,
    prop31_claims,
    rational_str,
)
from .pairings import enumerate_nc_pairings, is_noncrossing, moment_by_pairings
