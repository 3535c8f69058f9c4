"""Pseudo-spectral simulation and estimate verification for coupled
third-order dispersive wave systems on a periodic box."""

__version__ = "0.1.0"

from .grid import (
    Grid,
    SpectralField,
    dealias,
    evaluate_at,
    field_from_callable,
    forward,
    inverse,
    l2_norm,
    product,
    spectral_derivative,
    zero_field,
)
from .systems import (
    NOT_DIAGONAL,
    BlowupDetected,
    Feng,
    GearGrimshaw,
    GeneralCoupled,
    HirotaSatsuma,
    Sakovich,
    State,
    dispersion_coeffs,
    hs_as_kdv,
    nonlinear_rhs,
)
from .transforms import (
    DecayViolationWarning,
    NotApplicable,
    ReducedSystem,
    SingularTransform,
    diagonalize,
    gear_grimshaw_as_general,
    gg_change_of_variables,
    gg_change_of_variables_inverse,
    gg_dispersion_matrix,
    gg_lambda_alpha,
    gg_offdiag_coeffs,
    reduced_rhs,
    sakovich_reduce,
    scaling_map,
)
from .solver import (
    NotDiagonalError,
    PicardReport,
    StepperConfig,
    Trajectory,
    linear_propagate,
    picard_iterate,
    simulate,
    step,
)
from .diagnostics import (
    DiagnosticRecord,
    MixedNormBreakdown,
    Recorder,
    collect,
    gg_invariants,
    hs_invariants,
    mixed_norms,
    record_for,
    sobolev_norm,
)
from .bump import CutoffSpec, psi, psi_T
from .io import read_snapshot, write_csv, write_snapshot
from .harness import (
    ConfigError,
    ExperimentConfig,
    RunManifest,
    config_from_dict,
    load_config,
    run,
)
from . import bourgain

__all__ = [
    "__version__",
    "Grid", "SpectralField", "dealias", "evaluate_at", "field_from_callable",
    "forward", "inverse", "l2_norm", "product", "spectral_derivative", "zero_field",
    "NOT_DIAGONAL", "BlowupDetected", "Feng", "GearGrimshaw", "GeneralCoupled",
    "HirotaSatsuma", "Sakovich", "State", "dispersion_coeffs", "hs_as_kdv",
    "nonlinear_rhs",
    "DecayViolationWarning", "NotApplicable", "ReducedSystem", "SingularTransform",
    "diagonalize", "gear_grimshaw_as_general", "gg_change_of_variables",
    "gg_change_of_variables_inverse", "gg_dispersion_matrix", "gg_lambda_alpha",
    "gg_offdiag_coeffs", "reduced_rhs", "sakovich_reduce", "scaling_map",
    "NotDiagonalError", "PicardReport", "StepperConfig", "Trajectory",
    "linear_propagate", "picard_iterate", "simulate", "step",
    "DiagnosticRecord", "MixedNormBreakdown", "Recorder", "collect",
    "gg_invariants", "hs_invariants", "mixed_norms", "record_for", "sobolev_norm",
    "CutoffSpec", "psi", "psi_T",
    "read_snapshot", "write_csv", "write_snapshot",
    "ConfigError", "ExperimentConfig", "RunManifest", "config_from_dict",
    "load_config", "run",
    "bourgain",
]
