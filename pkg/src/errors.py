"""Exception hierarchy for linecut.

Input problems map to CLI exit code 1, numerical stage failures to exit code 2.
"""

from typing import Optional


class LinecutError(Exception):
    """Base class for all linecut errors."""

    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.field = field

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "field": self.field,
            "message": self.message,
        }


class InputError(LinecutError):
    """Malformed or inconsistent input."""

    exit_code = 1


class SchemaValidationError(InputError):
    """A geometry, lines or settings document failed validation."""


class ShapeMismatchError(InputError):
    """Arrays whose shapes do not agree with each other or with a declared degree."""


class UnsupportedDegreeError(InputError):
    """Degree above the configured maximum."""


class NumericalStageError(LinecutError):
    """A numerical stage of the pipeline could not produce a result."""

    exit_code = 2


class IllPosedBasisError(NumericalStageError):
    """Nodal parameters do not define an interpolation basis (duplicates)."""


class DegenerateGeometryError(NumericalStageError):
    """Geometry degree too low for the requested operation."""


class InsufficientFamilyError(NumericalStageError):
    """Fewer moving lines/planes than the algebraic degree requires."""


class AmbiguousPreimageError(NumericalStageError):
    """An eigenvector carries no usable ratio for parameter recovery."""


class UnresolvedMultiplicityError(NumericalStageError):
    """The preimage eigenproblem for a multiple eigenvalue is degenerate."""


class InfiniteIntersectionsError(NumericalStageError):
    """The geometry lies inside the query line."""
