"""Moving-line / moving-plane implicitization.

A moving line (plane) is ``(x, 1) . g(theta) = 0`` with ``g`` polynomial in the
geometry parameters. Requiring it to vanish on ``x(theta)`` for every theta is a
linear condition ``C h = 0`` on the stacked coefficients ``h`` of ``g``; the
right null space of ``C`` is the moving family.

Column order of ``C`` (the ``h`` ordering): one block per homogeneous
coordinate (x1, x2, [x3,] 1), and inside a block the auxiliary monomials in
increasing order. For surfaces both the auxiliary basis and the row basis
enumerate ``theta1**a * theta2**b`` with ``a`` varying fastest, i.e. flat index
``a + (deg1 + 1) * b``.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from ..config import Settings, get_settings
from ..errors import DegenerateGeometryError, InsufficientFamilyError
from ..geometry.polybasis import (
    PowerCurve,
    PowerSurface,
    check_supported_degree,
    effective_bidegree,
    effective_degree,
    evaluate,
    poly_multiply,
)
from ..linalg.backend import null_space

logger = logging.getLogger(__name__)

Geometry = Union[PowerCurve, PowerSurface]

CURVE = "curve"
TENSOR_SURFACE = "tensor_surface"


@dataclass(frozen=True)
class AuxBasis:
    """Power basis of the moving-line coefficients, one degree per parameter direction."""

    degrees: Tuple[int, ...]

    @property
    def ndim(self) -> int:
        return len(self.degrees)

    @property
    def size(self) -> int:
        return int(np.prod([d + 1 for d in self.degrees]))

    @property
    def exponents(self) -> np.ndarray:
        """Row k holds the exponent of each parameter in monomial k."""
        index = np.arange(self.size)
        columns = []
        stride = 1
        for degree in self.degrees:
            columns.append((index // stride) % (degree + 1))
            stride *= degree + 1
        return np.stack(columns, axis=-1)

    def stride(self, direction: int) -> int:
        return int(np.prod([d + 1 for d in self.degrees[:direction]]))

    def shift_pairs(self, direction: int) -> Tuple[np.ndarray, np.ndarray]:
        """Index pairs (lo, hi) whose monomials differ by one power in ``direction``."""
        lo = np.nonzero(self.exponents[:, direction] < self.degrees[direction])[0]
        return lo, lo + self.stride(direction)

    def evaluate(self, theta) -> np.ndarray:
        """P~(theta); theta has shape (..., 2) for surfaces and (...) for curves."""
        theta = np.asarray(theta)
        if self.ndim == 1:
            theta = theta[..., None]
        return np.prod(theta[..., None, :] ** self.exponents, axis=-1)


@dataclass(frozen=True)
class CMatrix:
    """Coefficient matrix of the moving-line identity."""

    entries: np.ndarray
    row_basis_degree: Tuple[int, ...]
    aux: AuxBasis
    geometry_kind: str
    geometry_degree: Tuple[int, ...]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    @property
    def space_dim(self) -> int:
        return 2 if self.geometry_kind == CURVE else 3

    @property
    def column_blocks(self) -> Tuple[str, ...]:
        names = ("x1", "x2", "1") if self.geometry_kind == CURVE else ("x1", "x2", "x3", "1")
        return tuple(f"{name}:{self.aux.size}" for name in names)

    @property
    def algebraic_degree(self) -> int:
        if self.geometry_kind == CURVE:
            return self.geometry_degree[0]
        return 2 * self.geometry_degree[0] * self.geometry_degree[1]


@dataclass(frozen=True)
class MovingFamily:
    """Null vectors of C reshaped as ``vectors[i, block, monomial]``."""

    geometry_kind: str
    aux: AuxBasis
    vectors: np.ndarray
    c_shape: Tuple[int, int]
    rank: int
    singular_values: np.ndarray
    algebraic_degree: int
    effective_degree: Optional[Tuple[int, ...]] = None

    @property
    def aux_degree(self) -> Union[int, Tuple[int, int]]:
        return self.aux.degrees[0] if self.geometry_kind == CURVE else self.aux.degrees

    @property
    def nullity(self) -> int:
        return self.vectors.shape[0]

    @property
    def space_dim(self) -> int:
        return self.vectors.shape[1] - 1


def min_aux_degree_curve(q_x: int) -> int:
    """Smallest auxiliary degree giving at least q_x moving lines: q_x - 1."""
    if q_x < 1:
        raise DegenerateGeometryError(f"curve degree must be at least 1, got {q_x}", field="degree")
    return q_x - 1


def default_elongated_direction(q_x: Tuple[int, int]) -> int:
    """Direction with the larger degree; ties go to direction 1."""
    return 2 if q_x[1] > q_x[0] else 1


def surface_count_condition(q_x: Tuple[int, int], q_g: Tuple[int, int]) -> bool:
    """Columns minus rows of C must cover the algebraic degree 2*q1*q2."""
    columns = 4 * (q_g[0] + 1) * (q_g[1] + 1)
    rows = (q_x[0] + q_g[0] + 1) * (q_x[1] + q_g[1] + 1)
    return columns - rows >= 2 * q_x[0] * q_x[1]


def min_aux_bidegree_surface(q_x: Tuple[int, int], elongated_direction: Optional[int] = None) -> Tuple[int, int]:
    """(2q1-1, q2-1) for direction 1, (q1-1, 2q2-1) for direction 2."""
    q1, q2 = q_x
    if q1 < 1 or q2 < 1:
        raise DegenerateGeometryError(f"surface bidegree must be at least (1, 1), got {tuple(q_x)}", field="bidegree")
    direction = elongated_direction or default_elongated_direction(q_x)
    if direction == 1:
        q_g = (2 * q1 - 1, q2 - 1)
    elif direction == 2:
        q_g = (q1 - 1, 2 * q2 - 1)
    else:
        raise DegenerateGeometryError(f"elongated direction must be 1 or 2, got {direction}")
    assert surface_count_condition(q_x, q_g)
    return q_g


def min_aux_degree_triangle(q_x: int) -> int:
    """Bound for triangular patches of total degree q_x: 2(q_x - 1)."""
    if q_x < 1:
        raise DegenerateGeometryError(f"triangle degree must be at least 1, got {q_x}", field="degree")
    return 2 * (q_x - 1)


def _monomial(shape: Tuple[int, ...], index: Tuple[int, ...]) -> np.ndarray:
    unit = np.zeros(shape)
    unit[index] = 1.0
    return unit


def assemble_c_curve(curve: PowerCurve, q_g: int) -> CMatrix:
    """C of shape (q_x + q_g + 1) x 3(q_g + 1); row k collects theta**k."""
    minimum = min_aux_degree_curve(curve.degree)
    if q_g < minimum:
        raise InsufficientFamilyError(
            f"auxiliary degree {q_g} is below the minimum {minimum} for a degree-{curve.degree} curve",
            field="qg",
        )
    homogeneous = np.zeros((curve.degree + 1, 3))
    homogeneous[:, :2] = curve.coeffs
    homogeneous[0, 2] = 1.0

    aux = AuxBasis((q_g,))
    entries = np.zeros((curve.degree + q_g + 1, 3 * aux.size))
    for block in range(3):
        for l in range(aux.size):
            entries[:, block * aux.size + l] = poly_multiply(homogeneous[:, block], _monomial((aux.size,), (l,)))
    return CMatrix(
        entries=entries,
        row_basis_degree=(curve.degree + q_g,),
        aux=aux,
        geometry_kind=CURVE,
        geometry_degree=(curve.degree,),
    )


def assemble_c_surface(surface: PowerSurface, q_g: Tuple[int, int]) -> CMatrix:
    """Tensor analogue with four column blocks; rows follow the theta1-fastest order."""
    q_x = surface.bidegree
    q_g = (int(q_g[0]), int(q_g[1]))
    if min(q_x) < 1:
        raise DegenerateGeometryError(f"surface bidegree must be at least (1, 1), got {q_x}", field="bidegree")
    if min(q_g) < 0 or not surface_count_condition(q_x, q_g):
        raise InsufficientFamilyError(
            f"auxiliary bidegree {q_g} gives too few moving planes for bidegree {q_x}", field="qg"
        )
    n1, n2 = q_x[0] + 1, q_x[1] + 1
    homogeneous = np.zeros((n1, n2, 4))
    homogeneous[:, :, :3] = surface.coeffs
    homogeneous[0, 0, 3] = 1.0

    aux = AuxBasis(q_g)
    aux_shape = (q_g[0] + 1, q_g[1] + 1)
    row_shape = (q_x[0] + q_g[0] + 1, q_x[1] + q_g[1] + 1)
    entries = np.zeros((row_shape[0] * row_shape[1], 4 * aux.size))
    for block in range(4):
        for l, (a, b) in enumerate(aux.exponents):
            product = poly_multiply(homogeneous[:, :, block], _monomial(aux_shape, (a, b)))
            entries[:, block * aux.size + l] = product.ravel(order="F")
    return CMatrix(
        entries=entries,
        row_basis_degree=(row_shape[0] - 1, row_shape[1] - 1),
        aux=aux,
        geometry_kind=TENSOR_SURFACE,
        geometry_degree=q_x,
    )


def scale_rows(entries: np.ndarray) -> np.ndarray:
    """Divide each row by its max-abs entry when that exceeds 1; the null space is unchanged."""
    peaks = np.abs(entries).max(axis=1)
    factors = np.where(peaks > 1.0, peaks, 1.0)
    return entries / factors[:, None]


def moving_family(
    c: CMatrix,
    rank_tol: Optional[float] = None,
    row_scaling: bool = True,
    effective: Optional[Tuple[int, ...]] = None,
) -> MovingFamily:
    """Right null space of C reshaped into moving lines/planes."""
    entries = scale_rows(c.entries) if row_scaling else c.entries
    result = null_space(entries, rank_tol)
    vectors = result.basis.T.reshape(result.nullity, c.space_dim + 1, c.aux.size)
    logger.debug(
        "moving_family: C %dx%d rank %d nullity %d", c.shape[0], c.shape[1], result.rank, result.nullity
    )
    if result.nullity < c.algebraic_degree:
        raise InsufficientFamilyError(
            f"nullity {result.nullity} is below the algebraic degree {c.algebraic_degree}; "
            "check rank_tol or the geometry"
        )
    return MovingFamily(
        geometry_kind=c.geometry_kind,
        aux=c.aux,
        vectors=vectors,
        c_shape=c.shape,
        rank=result.rank,
        singular_values=result.singular_values,
        algebraic_degree=c.algebraic_degree,
        effective_degree=effective,
    )


def assemble_c(geometry: Geometry, q_g=None, elongated_direction: Optional[int] = None) -> CMatrix:
    """Assemble C at the given (or minimal) auxiliary degree."""
    if isinstance(geometry, PowerSurface):
        if q_g is None:
            q_g = min_aux_bidegree_surface(geometry.bidegree, elongated_direction)
        return assemble_c_surface(geometry, q_g)
    if q_g is None:
        q_g = min_aux_degree_curve(geometry.degree)
    return assemble_c_curve(geometry, int(q_g))


def implicitize(
    geometry: Geometry,
    q_g=None,
    settings: Optional[Settings] = None,
    elongated_direction: Optional[int] = None,
) -> MovingFamily:
    """Line-independent part of the pipeline; the result can be shared across queries."""
    settings = settings or get_settings()
    if isinstance(geometry, PowerSurface):
        for direction, degree in enumerate(geometry.bidegree):
            check_supported_degree(degree, settings.max_degree, f"bidegree[{direction}]")
        effective = effective_bidegree(geometry, settings.effective_degree_tol)
        declared = geometry.bidegree
    else:
        check_supported_degree(geometry.degree, settings.max_degree)
        effective = (effective_degree(geometry, settings.effective_degree_tol),)
        declared = (geometry.degree,)
    if tuple(effective) != tuple(declared):
        logger.warning("effective degree %s is lower than the declared degree %s", effective, declared)

    c = assemble_c(geometry, q_g, elongated_direction)
    return moving_family(c, settings.rank_tol, settings.row_scaling, tuple(effective))


def moving_line_residual(family: MovingFamily, geometry: Geometry, theta) -> np.ndarray:
    """l_i(theta, x(theta)) for every family member; shape (..., nullity)."""
    theta = np.asarray(theta, dtype=float)
    points = evaluate(geometry, theta)
    homogeneous = np.concatenate([points, np.ones(points.shape[:-1] + (1,))], axis=-1)
    basis = family.aux.evaluate(theta)
    return np.einsum("...d,idl,...l->...i", homogeneous, family.vectors, basis)
