"""Polynomial geometry in power, Lagrange and Bernstein form.

Power (monomial) coefficients are the canonical internal form. Coefficient arrays
are stored lowest degree first, so ``coeffs[j]`` multiplies ``theta**j``; for
surfaces ``coeffs[j1, j2]`` multiplies ``theta1**j1 * theta2**j2``.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import numpy.polynomial.polynomial as npoly
import scipy.linalg
from scipy import signal
from scipy.stats import binom

from ..errors import IllPosedBasisError, ShapeMismatchError, UnsupportedDegreeError

logger = logging.getLogger(__name__)


def _frozen(values, ndim: int, name: str) -> np.ndarray:
    array = np.array(values, dtype=float)
    if array.ndim != ndim:
        raise ShapeMismatchError(
            f"{name} must be a {ndim}-dimensional array, got shape {array.shape}", field=name
        )
    array.setflags(write=False)
    return array


def _uniform_params(count: int) -> np.ndarray:
    if count == 1:
        return np.zeros(1)
    return np.linspace(0.0, 1.0, count)


def _check_params(params: np.ndarray, name: str) -> None:
    steps = np.diff(params)
    if np.any(steps == 0.0):
        raise IllPosedBasisError(f"duplicate nodal parameters in {name}", field=name)
    if np.any(steps < 0.0):
        raise IllPosedBasisError(f"nodal parameters in {name} must be strictly increasing", field=name)


def check_supported_degree(degree: int, max_degree: int, name: str = "degree") -> None:
    """Reject degrees where the Vandermonde conversion is no longer trustworthy."""
    if degree > max_degree:
        raise UnsupportedDegreeError(
            f"{name} {degree} exceeds the supported maximum of {max_degree}", field=name
        )


@dataclass(frozen=True)
class PowerCurve:
    """Planar curve x(theta) = sum_j theta**j * coeffs[j]."""

    coeffs: np.ndarray
    degree: Optional[int] = None

    def __post_init__(self):
        coeffs = _frozen(self.coeffs, 2, "coeffs")
        if coeffs.shape[1] != 2:
            raise ShapeMismatchError(f"curve coefficients must be 2-vectors, got {coeffs.shape[1]}", field="coeffs")
        degree = coeffs.shape[0] - 1 if self.degree is None else int(self.degree)
        if coeffs.shape[0] != degree + 1:
            raise ShapeMismatchError(
                f"degree {degree} needs {degree + 1} coefficients, got {coeffs.shape[0]}", field="coeffs"
            )
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "degree", degree)

    @property
    def space_dim(self) -> int:
        return 2

    @property
    def param_dim(self) -> int:
        return 1

    def __call__(self, theta):
        return eval_power_curve(self, theta)


@dataclass(frozen=True)
class PowerSurface:
    """Tensor-product surface x(t1, t2) = sum coeffs[j1, j2] * t1**j1 * t2**j2 in R^3."""

    coeffs: np.ndarray
    bidegree: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        coeffs = _frozen(self.coeffs, 3, "coeffs")
        if coeffs.shape[2] != 3:
            raise ShapeMismatchError(f"surface coefficients must be 3-vectors, got {coeffs.shape[2]}", field="coeffs")
        grid = (coeffs.shape[0] - 1, coeffs.shape[1] - 1)
        bidegree = grid if self.bidegree is None else (int(self.bidegree[0]), int(self.bidegree[1]))
        if bidegree != grid:
            raise ShapeMismatchError(
                f"bidegree {bidegree} does not match coefficient grid {coeffs.shape[:2]}", field="coeffs"
            )
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "bidegree", bidegree)

    @property
    def space_dim(self) -> int:
        return 3

    @property
    def param_dim(self) -> int:
        return 2

    def __call__(self, theta):
        return eval_power_surface(self, theta)


@dataclass(frozen=True)
class LagrangeCurve:
    """Curve interpolating ``nodes`` at nodal parameters ``params``."""

    nodes: np.ndarray
    params: Optional[np.ndarray] = None

    def __post_init__(self):
        nodes = _frozen(self.nodes, 2, "nodes")
        if nodes.shape[1] != 2:
            raise ShapeMismatchError("curve nodes must be 2-vectors", field="nodes")
        params = _uniform_params(len(nodes)) if self.params is None else _frozen(self.params, 1, "params")
        if len(params) != len(nodes):
            raise ShapeMismatchError(
                f"{len(nodes)} nodes but {len(params)} nodal parameters", field="params"
            )
        _check_params(params, "params")
        params.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "params", params)

    @property
    def degree(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True)
class LagrangeSurface:
    """Tensor-product surface interpolating a grid of 3D nodes."""

    nodes: np.ndarray
    params: Optional[Tuple[np.ndarray, np.ndarray]] = None

    def __post_init__(self):
        nodes = _frozen(self.nodes, 3, "nodes")
        if nodes.shape[2] != 3:
            raise ShapeMismatchError("surface nodes must be 3-vectors", field="nodes")
        if self.params is None:
            params = (_uniform_params(nodes.shape[0]), _uniform_params(nodes.shape[1]))
        else:
            params = tuple(_frozen(p, 1, f"params[{d}]") for d, p in enumerate(self.params))
        if len(params) != 2:
            raise ShapeMismatchError("surface needs two nodal parameter sequences", field="params")
        for direction, p in enumerate(params):
            if len(p) != nodes.shape[direction]:
                raise ShapeMismatchError(
                    f"direction {direction + 1}: {nodes.shape[direction]} nodes but {len(p)} parameters",
                    field=f"params[{direction}]",
                )
            _check_params(p, f"params[{direction}]")
            p.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "params", params)

    @property
    def bidegree(self) -> Tuple[int, int]:
        return self.nodes.shape[0] - 1, self.nodes.shape[1] - 1


def vandermonde(params: np.ndarray, degree: int) -> np.ndarray:
    """V[i, j] = params[i]**j."""
    return npoly.polyvander(np.asarray(params, dtype=float), degree)


def _solve_vandermonde(params: np.ndarray, values: np.ndarray) -> np.ndarray:
    matrix = vandermonde(params, len(params) - 1)
    try:
        return scipy.linalg.solve(matrix, values)
    except scipy.linalg.LinAlgError as exc:
        raise IllPosedBasisError(f"singular Vandermonde matrix: {exc}") from exc


def lagrange_to_power_curve(curve: LagrangeCurve) -> PowerCurve:
    """Convert a Lagrange curve to power form by a pivoted Vandermonde solve."""
    coeffs = _solve_vandermonde(curve.params, curve.nodes)
    return PowerCurve(coeffs, degree=curve.degree)


def lagrange_to_power_surface(surface: LagrangeSurface) -> PowerSurface:
    """Tensor-product conversion: one Vandermonde solve per parameter direction."""
    n1, n2, dim = surface.nodes.shape
    partial = _solve_vandermonde(surface.params[0], surface.nodes.reshape(n1, n2 * dim))
    partial = partial.reshape(n1, n2, dim).transpose(1, 0, 2).reshape(n2, n1 * dim)
    coeffs = _solve_vandermonde(surface.params[1], partial)
    coeffs = coeffs.reshape(n2, n1, dim).transpose(1, 0, 2)
    return PowerSurface(coeffs, bidegree=surface.bidegree)


def bernstein_matrix(params: np.ndarray, degree: int) -> np.ndarray:
    """M[i, k] = B_{k,degree}(params[i])."""
    params = np.asarray(params, dtype=float)
    return binom.pmf(np.arange(degree + 1)[None, :], degree, params[:, None])


def bernstein_to_power_curve(control_points: Sequence) -> PowerCurve:
    """Convert a Bernstein curve by sampling it at uniform nodes."""
    control_points = np.asarray(control_points, dtype=float)
    degree = len(control_points) - 1
    params = _uniform_params(degree + 1)
    nodes = bernstein_matrix(params, degree) @ control_points
    return lagrange_to_power_curve(LagrangeCurve(nodes, params))


def bernstein_to_power_surface(control_points: Sequence) -> PowerSurface:
    """Tensor-product Bernstein surface converted through uniform Lagrange samples."""
    control_points = np.asarray(control_points, dtype=float)
    if control_points.ndim != 3:
        raise ShapeMismatchError("surface control points must form a 2D grid of 3-vectors", field="control_points")
    n1, n2 = control_points.shape[:2]
    params = (_uniform_params(n1), _uniform_params(n2))
    m1 = bernstein_matrix(params[0], n1 - 1)
    m2 = bernstein_matrix(params[1], n2 - 1)
    nodes = np.einsum("ia,jb,abk->ijk", m1, m2, control_points)
    return lagrange_to_power_surface(LagrangeSurface(nodes, params))


def eval_power_curve(curve: PowerCurve, theta):
    """Horner evaluation; scalar theta gives a 2-vector, array theta gives (..., 2)."""
    values = npoly.polyval(np.asarray(theta, dtype=float), curve.coeffs)
    return np.moveaxis(values, 0, -1)


def eval_power_surface(surface: PowerSurface, theta):
    """Bivariate Horner evaluation at theta = (theta1, theta2); theta may be (..., 2)."""
    theta = np.asarray(theta, dtype=float)
    values = npoly.polyval2d(theta[..., 0], theta[..., 1], surface.coeffs)
    return np.moveaxis(values, 0, -1)


def evaluate(geometry, theta):
    """Evaluate either kind of geometry."""
    if isinstance(geometry, PowerSurface):
        return eval_power_surface(geometry, theta)
    return eval_power_curve(geometry, theta)


def poly_multiply(a, b) -> np.ndarray:
    """Product of two power-basis coefficient arrays (1D or tensor 2D).

    Declared degrees add; trailing zero coefficients are kept.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != b.ndim:
        raise ShapeMismatchError(f"cannot multiply {a.ndim}D by {b.ndim}D coefficients")
    return signal.convolve(a, b, mode="full", method="direct")


def curve_derivative(curve: PowerCurve) -> np.ndarray:
    """Power coefficients of dx/dtheta, shape (degree, 2); a constant curve gives zeros."""
    if curve.degree == 0:
        return np.zeros((1, 2))
    return npoly.polyder(curve.coeffs, axis=0)


def surface_partials(surface: PowerSurface) -> Tuple[np.ndarray, np.ndarray]:
    """Power coefficients of the two partial derivatives."""
    partials = []
    for axis in (0, 1):
        if surface.bidegree[axis] == 0:
            shape = list(surface.coeffs.shape)
            shape[axis] = 1
            partials.append(np.zeros(shape))
        else:
            partials.append(npoly.polyder(surface.coeffs, axis=axis))
    return partials[0], partials[1]


def effective_degree(curve: PowerCurve, tol: float = 1e-12) -> int:
    """Largest power with a coefficient above tol * max|alpha|; reported, not applied."""
    norms = np.linalg.norm(curve.coeffs, axis=1)
    significant = np.nonzero(norms > tol * norms.max())[0] if norms.max() > 0 else []
    return int(significant[-1]) if len(significant) else 0


def effective_bidegree(surface: PowerSurface, tol: float = 1e-12) -> Tuple[int, int]:
    norms = np.linalg.norm(surface.coeffs, axis=2)
    if norms.max() == 0:
        return 0, 0
    rows, cols = np.nonzero(norms > tol * norms.max())
    return int(rows.max()), int(cols.max())


def sample_curve(curve: PowerCurve, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Uniform samples on [0, 1]; a single sample sits at theta = 0."""
    theta = _uniform_params(count)
    return theta, eval_power_curve(curve, theta)


def sample_surface(surface: PowerSurface, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """count x count uniform samples of the unit parameter square, theta1 fastest."""
    t = _uniform_params(count)
    t2, t1 = np.meshgrid(t, t, indexing="ij")
    theta = np.stack([t1.ravel(), t2.ravel()], axis=-1)
    return theta, eval_power_surface(surface, theta)
