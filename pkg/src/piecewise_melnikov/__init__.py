"""Melnikov-function toolkit for planar centers with parabolic switching curves."""

from .geometry import FOUR_ZONE, TWO_ZONE_LOWER, TWO_ZONE_UPPER, corner_points, h_of_u, u_of_h, zone_of
from .melnikov import (
    CanonicalForm,
    PerturbationSpec,
    UForm,
    canonical_form,
    eval_W,
    melnikov_canonical,
    melnikov_direct,
    phi_factors,
    u_form,
)
from .simulator import SimConfig, cross_validate, find_limit_cycles, return_map
from .zeros import (
    RealizationResult,
    ZeroReport,
    count_zeros,
    dense_scan_count,
    lambda_coeffs,
    realize_max_zeros,
    theoretical_bound,
)

__all__ = [
    "FOUR_ZONE",
    "TWO_ZONE_LOWER",
    "TWO_ZONE_UPPER",
    "CanonicalForm",
    "PerturbationSpec",
    "RealizationResult",
    "SimConfig",
    "UForm",
    "ZeroReport",
    "canonical_form",
    "corner_points",
    "count_zeros",
    "cross_validate",
    "dense_scan_count",
    "eval_W",
    "find_limit_cycles",
    "h_of_u",
    "lambda_coeffs",
    "melnikov_canonical",
    "melnikov_direct",
    "phi_factors",
    "realize_max_zeros",
    "return_map",
    "theoretical_bound",
    "u_form",
    "u_of_h",
    "zone_of",
]

__version__ = "0.1.0"
