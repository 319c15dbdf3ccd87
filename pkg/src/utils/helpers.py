"""Helper utilities for linecut output."""

import math
from typing import Iterable, List, Optional


def format_number(value: Optional[float], digits: int = 6) -> Optional[float]:
    """
    Round a float to a number of significant digits for reports.

    Args:
        value: The value to format
        digits: Significant digits to keep

    Returns:
        Rounded float, or None for missing and non-finite values
    """
    if value is None:
        return None
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(f"{value:.{digits}g}")


def format_vector(values: Optional[Iterable[float]], digits: int = 6) -> Optional[List[Optional[float]]]:
    if values is None:
        return None
    return [format_number(v, digits) for v in values]


def relative_close(a: float, b: float, tol: float) -> bool:
    """|a - b| <= tol * (1 + |b|)."""
    return abs(a - b) <= tol * (1.0 + abs(b))
