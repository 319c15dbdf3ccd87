"""Implicitization by moving lines/planes and line queries against the resulting family."""

from .implicitize import (
    AuxBasis,
    CMatrix,
    MovingFamily,
    assemble_c,
    assemble_c_curve,
    assemble_c_surface,
    implicitize,
    moving_family,
    moving_line_residual,
)
from .intersect import (
    Candidate,
    IntersectionRecord,
    IntersectionResult,
    Pencil,
    QueryLine,
    Status,
    assemble_pencil,
    classify_and_filter,
    intersect_line,
    intersect_lines,
    pencil_left_null_space,
    recover_theta_multiple,
    recover_theta_simple,
    run_query,
    select_square,
    solve_missing_parameter,
)

__all__ = [
    "AuxBasis",
    "CMatrix",
    "MovingFamily",
    "assemble_c",
    "assemble_c_curve",
    "assemble_c_surface",
    "implicitize",
    "moving_family",
    "moving_line_residual",
    "Candidate",
    "IntersectionRecord",
    "IntersectionResult",
    "Pencil",
    "QueryLine",
    "Status",
    "assemble_pencil",
    "classify_and_filter",
    "intersect_line",
    "intersect_lines",
    "pencil_left_null_space",
    "recover_theta_multiple",
    "recover_theta_simple",
    "run_query",
    "select_square",
    "solve_missing_parameter",
]
