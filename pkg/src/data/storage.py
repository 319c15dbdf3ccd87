"""Reading input documents and writing reports, dumps and sample tables."""

import json
import logging
import os
import sys
from typing import Any, List, Optional

import numpy as np
import pandas as pd

from ..config import Settings, get_settings
from ..errors import InputError, SchemaValidationError
from ..implicit.intersect import QueryLine
from .schemas import GeometryFile, LinesFile, validate_document

logger = logging.getLogger(__name__)


def read_json(path: str, allow_empty: bool = False) -> Any:
    """Load a JSON document; an empty file gives None when ``allow_empty``."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}", field="path") from exc
    if allow_empty and not text.strip():
        return None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaValidationError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc


def load_geometry(path: str, settings: Optional[Settings] = None):
    """Geometry file to power-form curve or surface."""
    settings = settings or get_settings()
    document = validate_document(GeometryFile, read_json(path))
    document.check_degree(settings.max_degree)
    geometry = document.to_geometry()
    logger.info("Loaded %s from %s", document.kind, path)
    return geometry


def load_lines(path: str) -> List[QueryLine]:
    data = read_json(path, allow_empty=True)
    if data is None:
        return []
    document = validate_document(LinesFile, data)
    lines = [entry.to_query_line() for entry in document.lines]
    logger.info("Loaded %d lines from %s", len(lines), path)
    return lines


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info("Wrote %s", path)


def write_json(document: Any, path: Optional[str] = None) -> str:
    """Write a pydantic model or plain JSON data to ``path`` (stdout when None)."""
    if hasattr(document, "model_dump"):
        document = document.model_dump(mode="json")
    text = json.dumps(document, indent=2, ensure_ascii=False) + "\n"
    _emit(text, path)
    return text


def dump_geometry(geometry, path: Optional[str] = None) -> str:
    """Power-form geometry document; reloading it gives the same coefficients."""
    return write_json(GeometryFile.from_geometry(geometry), path)


def samples_frame(theta: np.ndarray, points: np.ndarray) -> pd.DataFrame:
    """Columns theta (or theta1, theta2) followed by x1..xd."""
    theta = np.asarray(theta)
    columns = {}
    if theta.ndim == 1:
        columns["theta"] = theta
    else:
        for k in range(theta.shape[1]):
            columns[f"theta{k + 1}"] = theta[:, k]
    for k in range(points.shape[1]):
        columns[f"x{k + 1}"] = points[:, k]
    return pd.DataFrame(columns)


def write_samples(theta: np.ndarray, points: np.ndarray, path: Optional[str] = None, digits: int = 6) -> str:
    frame = samples_frame(theta, points)
    text = frame.to_csv(index=False, float_format=f"%.{digits}g")
    _emit(text, path)
    return text
