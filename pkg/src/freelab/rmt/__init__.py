"""Finite random-matrix models: ensembles, eigensolver, block matrices and conditional expectations."""

from .blocks import (
    ALL_CIRCULAR,
    QUARTER_COLUMN,
    BlockMatrix,
    EnStats,
    SearchResult,
    adversarial_diag_search,
    build_voiculescu_blocks,
    conditional_expectation_En,
    en_norm,
    estimate_En_norm,
    verify_polar_conjugation,
)
from .ensembles import RngStream, haar_unitary, norm2, ntrace, sample_ginibre, sample_gue
from .linalg import EigenDecomposition, hermitian_eigen, polar_decompose
from .subfactor import (
    MatDistRow,
    MatrixUnits,
    build_Ik_factor,
    conditional_expectation_onto_Ik,
    ek_norm,
    matdist_curve,
    pythagoras_defect,
)
