"""Polynomial geometry: power, Lagrange and Bernstein forms."""

from .polybasis import (
    LagrangeCurve,
    LagrangeSurface,
    PowerCurve,
    PowerSurface,
    bernstein_to_power_curve,
    bernstein_to_power_surface,
    eval_power_curve,
    eval_power_surface,
    evaluate,
    lagrange_to_power_curve,
    lagrange_to_power_surface,
    poly_multiply,
)

__all__ = [
    "LagrangeCurve",
    "LagrangeSurface",
    "PowerCurve",
    "PowerSurface",
    "bernstein_to_power_curve",
    "bernstein_to_power_surface",
    "eval_power_curve",
    "eval_power_surface",
    "evaluate",
    "lagrange_to_power_curve",
    "lagrange_to_power_surface",
    "poly_multiply",
]
