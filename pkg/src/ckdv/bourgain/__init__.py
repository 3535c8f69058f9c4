"""Dispersive-weighted space-time norms and their estimate checks."""

from .estimates import (
    BilinearReport,
    EmbeddingResult,
    EquivalenceResult,
    LinearEstimateReport,
    NonequivalenceTable,
    PointwiseScan,
    admissible,
    bilinear_ratio,
    cutoff_data_membership,
    embedding_check,
    embedding_constant,
    epsilon_s,
    f_w,
    intersection_equivalence,
    linear_estimate_check,
    nonequivalence_demo,
    pointwise_bound_scan,
    pointwise_weight_ratio,
    weight_comparison_bound,
)
from .kernels import (
    KERNELS,
    HypothesisViolation,
    KernelReport,
    QuadSpec,
    kernel_bound_check,
)
from .spacetime import (
    NormParams,
    SpaceTimeField,
    SpaceTimeGrid,
    bracket_norm,
    duhamel_field,
    forward2,
    free_field,
    from_time_slices,
    hermitian_symmetrize,
    inverse2,
    make_st_grid,
    random_field,
    stationary_field,
    weight_table,
    xsb_norm,
)

__all__ = [
    "BilinearReport",
    "EmbeddingResult",
    "EquivalenceResult",
    "HypothesisViolation",
    "KERNELS",
    "KernelReport",
    "LinearEstimateReport",
    "NonequivalenceTable",
    "NormParams",
    "PointwiseScan",
    "QuadSpec",
    "SpaceTimeField",
    "SpaceTimeGrid",
    "admissible",
    "bilinear_ratio",
    "bracket_norm",
    "cutoff_data_membership",
    "duhamel_field",
    "embedding_check",
    "embedding_constant",
    "epsilon_s",
    "f_w",
    "forward2",
    "free_field",
    "from_time_slices",
    "hermitian_symmetrize",
    "intersection_equivalence",
    "inverse2",
    "kernel_bound_check",
    "linear_estimate_check",
    "make_st_grid",
    "nonequivalence_demo",
    "pointwise_bound_scan",
    "pointwise_weight_ratio",
    "random_field",
    "stationary_field",
    "weight_comparison_bound",
    "weight_table",
    "xsb_norm",
]
