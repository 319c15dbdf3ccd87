"""JSON document models for geometry, lines and reports."""

from typing import Any, Dict, List, Literal, Optional, Tuple, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, ValidationInfo, field_validator, model_validator

from ..errors import SchemaValidationError, ShapeMismatchError
from ..geometry.polybasis import (
    LagrangeCurve,
    LagrangeSurface,
    PowerCurve,
    PowerSurface,
    bernstein_to_power_curve,
    bernstein_to_power_surface,
    check_supported_degree,
    lagrange_to_power_curve,
    lagrange_to_power_surface,
)
from ..implicit.intersect import IntersectionRecord, QueryLine
from ..utils.helpers import format_number, format_vector

CURVE_KINDS = ("power_curve", "lagrange_curve", "bernstein_curve")
SURFACE_KINDS = ("power_surface", "lagrange_surface", "bernstein_surface")

_DATA_FIELD = {"power": "coefficients", "lagrange": "nodes", "bernstein": "control_points"}

Model = TypeVar("Model", bound=BaseModel)


def _check_finite(value: Any) -> None:
    """Nested lists of finite numbers only."""
    if isinstance(value, list):
        for item in value:
            _check_finite(item)
        return
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"expected a number, got {value!r}")
    if not np.isfinite(value):
        raise ValueError("numbers must be finite")


def validate_document(model: Type[Model], data: Any) -> Model:
    """Validate ``data`` against ``model``, reporting the first failure with its field path."""
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        path = ".".join(str(part) for part in error["loc"]) or None
        raise SchemaValidationError(error["msg"], field=path) from exc


class GeometryFile(BaseModel):
    """Geometry document: one curve or surface in power, Lagrange or Bernstein form."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal[
        "power_curve", "lagrange_curve", "bernstein_curve",
        "power_surface", "lagrange_surface", "bernstein_surface",
    ]
    degree: Optional[int] = Field(None, ge=0)
    bidegree: Optional[Tuple[int, int]] = None
    coefficients: Optional[List[Any]] = None
    nodes: Optional[List[Any]] = None
    control_points: Optional[List[Any]] = None
    params: Optional[List[Any]] = None

    @field_validator("coefficients", "nodes", "control_points", "params")
    @classmethod
    def _check_numbers(cls, value: Optional[List[Any]], info: ValidationInfo) -> Optional[List[Any]]:
        if value is None:
            return value
        _check_finite(value)
        if info.field_name != "params":
            try:
                np.asarray(value, dtype=float)
            except ValueError as exc:
                raise ValueError("must be a regular array, not a ragged one") from exc
        return value

    @property
    def is_surface(self) -> bool:
        return self.kind in SURFACE_KINDS

    @property
    def data_field(self) -> str:
        return _DATA_FIELD[self.kind.split("_")[0]]

    @model_validator(mode="after")
    def _check_fields(self) -> "GeometryFile":
        if self.is_surface and self.bidegree is None:
            raise ValueError(f"{self.kind} needs a bidegree")
        if not self.is_surface and self.degree is None:
            raise ValueError(f"{self.kind} needs a degree")
        if self.bidegree is not None and min(self.bidegree) < 0:
            raise ValueError("bidegree entries must be non-negative")
        if getattr(self, self.data_field) is None:
            raise ValueError(f"{self.kind} needs '{self.data_field}'")
        for other in _DATA_FIELD.values():
            if other != self.data_field and getattr(self, other) is not None:
                raise ValueError(f"'{other}' is not valid for {self.kind}")
        if self.params is not None and not self.kind.startswith("lagrange"):
            raise ValueError("'params' is only valid for Lagrange geometry")
        return self

    def _array(self) -> np.ndarray:
        array = np.asarray(getattr(self, self.data_field), dtype=float)
        if self.is_surface:
            expected = (self.bidegree[0] + 1, self.bidegree[1] + 1, 3)
        else:
            expected = (self.degree + 1, 2)
        if array.shape != expected:
            raise ShapeMismatchError(
                f"{self.data_field} has shape {array.shape}, expected {expected} for {self.kind}",
                field=self.data_field,
            )
        return array

    def check_degree(self, max_degree: int) -> None:
        """Declared degrees above the cap are rejected before any basis conversion."""
        if self.is_surface:
            for direction, degree in enumerate(self.bidegree):
                check_supported_degree(degree, max_degree, f"bidegree[{direction}]")
        else:
            check_supported_degree(self.degree, max_degree)

    def to_geometry(self):
        """Canonical power-form geometry."""
        array = self._array()
        if self.kind == "power_curve":
            return PowerCurve(array, degree=self.degree)
        if self.kind == "power_surface":
            return PowerSurface(array, bidegree=tuple(self.bidegree))
        if self.kind == "lagrange_curve":
            return lagrange_to_power_curve(LagrangeCurve(array, self.params))
        if self.kind == "lagrange_surface":
            return lagrange_to_power_surface(LagrangeSurface(array, self.params))
        if self.kind == "bernstein_curve":
            return bernstein_to_power_curve(array)
        return bernstein_to_power_surface(array)

    @classmethod
    def from_geometry(cls, geometry) -> "GeometryFile":
        """Power-form document for a geometry (full precision)."""
        if isinstance(geometry, PowerSurface):
            return cls(kind="power_surface", bidegree=geometry.bidegree, coefficients=geometry.coeffs.tolist())
        return cls(kind="power_curve", degree=geometry.degree, coefficients=geometry.coeffs.tolist())


class LineSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    origin: List[float]
    direction: List[float]

    @field_validator("origin", "direction")
    @classmethod
    def _check_length(cls, value: List[float]) -> List[float]:
        if len(value) not in (2, 3):
            raise ValueError("must have 2 (curve) or 3 (surface) components")
        return value

    @field_validator("direction")
    @classmethod
    def _check_nonzero(cls, value: List[float]) -> List[float]:
        if not any(value):
            raise ValueError("line direction must be nonzero")
        return value

    @model_validator(mode="after")
    def _check_dimensions(self) -> "LineSpec":
        if len(self.origin) != len(self.direction):
            raise ValueError("origin and direction must have the same dimension")
        return self

    def to_query_line(self) -> QueryLine:
        return QueryLine(self.origin, self.direction)

    @classmethod
    def from_query_line(cls, line: QueryLine) -> "LineSpec":
        return cls(origin=line.origin.tolist(), direction=line.direction.tolist())


class LinesFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lines: List[LineSpec] = Field(default_factory=list)


class RecordOut(BaseModel):
    """One intersection record in a report, with floats rounded for output."""

    xi: Optional[float]
    xi_imag: Optional[float] = None
    theta: Optional[List[Optional[float]]] = None
    point: Optional[List[Optional[float]]] = None
    residual: Optional[float] = None
    abs_residual: Optional[float] = None
    status: str
    multiplicity: int = 1
    in_domain: Optional[bool] = None
    alpha: Optional[List[Optional[float]]] = None
    beta: Optional[float] = None
    note: Optional[str] = None

    @classmethod
    def from_record(cls, record: IntersectionRecord, digits: int) -> "RecordOut":
        return cls(
            xi=format_number(record.xi, digits),
            xi_imag=format_number(record.xi_imag, digits) if record.xi_imag else None,
            theta=format_vector(record.theta, digits),
            point=format_vector(record.point, digits),
            residual=format_number(record.scaled_residual, 3),
            abs_residual=format_number(record.residual, 3),
            status=record.status.value,
            multiplicity=record.multiplicity,
            in_domain=record.in_domain,
            alpha=format_vector([record.alpha.real, record.alpha.imag], digits),
            beta=format_number(record.beta, digits),
            note=record.note,
        )


class OracleOut(BaseModel):
    agrees: bool
    excused: bool
    method: str
    matched: int
    missed: List[float] = Field(default_factory=list)
    spurious: List[float] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)


class LineResult(BaseModel):
    line: LineSpec
    records: List[RecordOut] = Field(default_factory=list)
    pencil_shape: Optional[Tuple[int, int]] = None
    selected_columns: Optional[List[int]] = None
    oracle: Optional[OracleOut] = None


class ReportFile(BaseModel):
    metadata: Dict[str, Any] = Field(default_factory=dict)
    results: List[LineResult] = Field(default_factory=list)


class FamilyDump(BaseModel):
    """Output of the implicitize command."""

    geometry_kind: str
    q_g: Any
    c_shape: Tuple[int, int]
    rank: int
    nullity: int
    algebraic_degree: int
    declared_degree: Any
    effective_degree: Any
    singular_values: List[float]
    column_blocks: List[str]
    family: List[Any]
