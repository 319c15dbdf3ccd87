"""Linear-algebra backend: SVD null spaces and QZ generalized eigenproblems."""

from .backend import (
    GeneralizedEigenResult,
    NullSpaceResult,
    generalized_eig,
    left_null_space,
    null_space,
    scale_columns,
)

__all__ = [
    "GeneralizedEigenResult",
    "NullSpaceResult",
    "generalized_eig",
    "left_null_space",
    "null_space",
    "scale_columns",
]
