"""Utility modules for linecut."""

from .logging import setup_logging
from .helpers import format_number, format_vector, relative_close

__all__ = ["setup_logging", "format_number", "format_vector", "relative_close"]
