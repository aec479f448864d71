"""Floating point layer: lambda, unit periods, Kloosterman sums, rational recognition."""

from .kloosterman import (
    cusp_scaling,
    double_coset_table,
    phi_series,
    phi_truncated,
    scattering_difference,
    scholl_coefficient,
    sD_estimate,
)
from .lam import lambda_pair, lambda_theta, modular_lambda
from .oracle import GeodesicTrack, UnitSpec, contour_F, oracle_F, unit_divisor, unit_eval, unit_for_divisor
from .params import Estimate, TruncationParams
from .recognize import Recognition, rational_recognize

__all__ = [
    "Estimate",
    "Recognition",
    "TruncationParams",
    "GeodesicTrack",
    "UnitSpec",
    "contour_F",
    "cusp_scaling",
    "double_coset_table",
    "lambda_pair",
    "lambda_theta",
    "modular_lambda",
    "oracle_F",
    "phi_truncated",
    "rational_recognize",
    "scattering_difference",
    "scholl_coefficient",
    "sD_estimate",
    "phi_series",
    "unit_divisor",
    "unit_eval",
    "unit_for_divisor",
]
