"""Birkhoff-James orthogonality in concrete Banach spaces and their tensor products."""

from bjortho.bj import (
    bj,
    bj_ck_complex,
    bj_ck_real,
    bj_generic,
    bj_lp,
    bj_matrix,
    bj_rank_one,
    functional_certificate,
    sbj_ck,
)
from bjortho.spaces import FiniteFunction, MatrixOperator, ScalarField, norm, norm_attainment_set
from bjortho.tensor import (
    NormKind,
    TensorElement,
    ck_identify,
    injective_norm_estimate,
    kron,
    lp_identify,
    pencil_min,
)
from bjortho.verdict import Decision, Tolerances, Verdict, validate_certificate, validate_verdict

__version__ = "0.1.0"

__all__ = [
    "Decision", "FiniteFunction", "MatrixOperator", "NormKind", "ScalarField", "TensorElement",
    "Tolerances", "Verdict", "bj", "bj_ck_complex", "bj_ck_real", "bj_generic", "bj_lp",
    "bj_matrix", "bj_rank_one", "ck_identify", "functional_certificate", "injective_norm_estimate",
    "kron", "lp_identify", "norm", "norm_attainment_set", "pencil_min", "sbj_ck",
    "validate_certificate", "validate_verdict",
]
