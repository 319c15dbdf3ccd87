"""Input documents, reports and sample tables."""

from .schemas import (
    FamilyDump,
    GeometryFile,
    LineResult,
    LineSpec,
    LinesFile,
    OracleOut,
    RecordOut,
    ReportFile,
    validate_document,
)
from .storage import dump_geometry, load_geometry, load_lines, read_json, samples_frame, write_json, write_samples

__all__ = [
    "FamilyDump",
    "GeometryFile",
    "LineResult",
    "LineSpec",
    "LinesFile",
    "OracleOut",
    "RecordOut",
    "ReportFile",
    "validate_document",
    "dump_geometry",
    "load_geometry",
    "load_lines",
    "read_json",
    "samples_frame",
    "write_json",
    "write_samples",
]
