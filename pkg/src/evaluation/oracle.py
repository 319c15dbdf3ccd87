"""Brute-force intersections used to cross-check the eigenvalue pipeline.

Curves: substitute x(theta) into the implicit equation of the line and take
companion-matrix roots. Surfaces: sample the two plane residuals on a grid,
seed Newton from the local minima of their squared norm.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import numpy.polynomial.polynomial as npoly
import scipy.linalg
from scipy import ndimage, optimize

from ..config import Settings, get_settings
from ..errors import InfiniteIntersectionsError, ShapeMismatchError
from ..geometry.polybasis import PowerCurve, PowerSurface, eval_power_surface, surface_partials
from ..implicit.intersect import QueryLine

logger = logging.getLogger(__name__)

COMPANION = "companion"
SAMPLED_REFINED = "sampled-refined"

_IMAG_TOL = 1e-7
_NEWTON_STEPS = 3


@dataclass(frozen=True)
class OracleIntersection:
    theta: np.ndarray
    xi: float
    point: np.ndarray


@dataclass(frozen=True)
class OracleResult:
    intersections: Tuple[OracleIntersection, ...]
    method: str
    certified_count: int
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def xi(self) -> np.ndarray:
        return np.array([i.xi for i in self.intersections])


def _project(line: QueryLine, point: np.ndarray) -> float:
    return float(line.direction @ (point - line.origin) / (line.direction @ line.direction))


def _dedup(values: List[np.ndarray], tol: float) -> List[np.ndarray]:
    kept: List[np.ndarray] = []
    for value in values:
        if not any(np.all(np.abs(value - k) <= tol * (1.0 + np.abs(k))) for k in kept):
            kept.append(value)
    return kept


def oracle_curve(curve: PowerCurve, line: QueryLine, settings: Optional[Settings] = None) -> OracleResult:
    """Real roots of f(theta) = n . x(theta) + d with n normal to the line."""
    settings = settings or get_settings()
    if line.space_dim != 2:
        raise ShapeMismatchError("curve oracle needs a planar line", field="origin")
    normal = np.array([-line.direction[1], line.direction[0]]) / np.linalg.norm(line.direction)
    f = curve.coeffs @ normal
    f[0] -= normal @ line.origin

    scale = 1.0 + np.abs(curve.coeffs).max()
    f = npoly.polytrim(f, tol=1e-14 * scale)
    if not np.any(f):
        raise InfiniteIntersectionsError("curve lies in the query line")
    if f.size == 1:
        return OracleResult((), COMPANION, 0)

    roots = npoly.polyroots(f)
    real = roots[np.abs(roots.imag) <= _IMAG_TOL * (1.0 + np.abs(roots.real))].real
    slope = npoly.polyder(f)
    polished = []
    for theta in real:
        for _ in range(_NEWTON_STEPS):
            derivative = npoly.polyval(theta, slope)
            if derivative == 0.0:
                break
            theta = theta - npoly.polyval(theta, f) / derivative
        polished.append(np.array([theta]))
    thetas = sorted(_dedup(polished, settings.oracle_dedup_tol), key=lambda t: t[0])

    certified = 0
    intersections = []
    for theta in thetas:
        step = 1e-6 * (1.0 + abs(theta[0]))
        if npoly.polyval(theta[0] - step, f) * npoly.polyval(theta[0] + step, f) < 0:
            certified += 1
        point = npoly.polyval(theta[0], curve.coeffs)
        intersections.append(OracleIntersection(theta, _project(line, point), point))
    logger.debug("oracle_curve: %d real roots, %d sign-certified", len(intersections), certified)
    return OracleResult(tuple(intersections), COMPANION, certified)


def _line_planes(line: QueryLine) -> Tuple[np.ndarray, np.ndarray]:
    """Two orthonormal planes whose intersection is the line."""
    normals = scipy.linalg.null_space(line.direction[None, :]).T
    return normals, -normals @ line.origin


def _straddling_cells(residual: np.ndarray) -> np.ndarray:
    """Cells where both residual components take both signs on the corners."""
    corners = np.stack(
        [residual[:-1, :-1], residual[1:, :-1], residual[:-1, 1:], residual[1:, 1:]]
    )
    lo = corners.min(axis=0)
    hi = corners.max(axis=0)
    return np.all((lo <= 0.0) & (hi >= 0.0), axis=-1)


def oracle_surface(surface: PowerSurface, line: QueryLine, settings: Optional[Settings] = None) -> OracleResult:
    """Grid sampling of the parameter box plus Newton refinement."""
    settings = settings or get_settings()
    if line.space_dim != 3:
        raise ShapeMismatchError("surface oracle needs a spatial line", field="origin")
    normals, offsets = _line_planes(line)
    partial_u, partial_v = surface_partials(surface)

    lo, hi = settings.oracle_box
    samples = np.linspace(lo, hi, settings.oracle_grid)
    t2, t1 = np.meshgrid(samples, samples, indexing="ij")
    grid = np.stack([t1, t2], axis=-1)
    points = eval_power_surface(surface, grid)
    residual = points @ normals.T + offsets
    energy = np.sum(residual ** 2, axis=-1)
    scale = 1.0 + np.abs(points).max()

    def planes(theta):
        return normals @ eval_power_surface(surface, theta) + offsets

    def jacobian(theta):
        du = npoly.polyval2d(theta[0], theta[1], partial_u)
        dv = npoly.polyval2d(theta[0], theta[1], partial_v)
        return normals @ np.stack([du, dv], axis=1)

    minima = energy == ndimage.minimum_filter(energy, size=3, mode="nearest")
    seeds = grid[minima]
    seeds = seeds[np.argsort(energy[minima])]
    cell = (hi - lo) / max(settings.oracle_grid - 1, 1)

    roots = []
    for seed in seeds:
        solution = optimize.root(planes, seed, jac=jacobian, method="hybr")
        theta = solution.x
        if not np.all((theta >= lo - cell) & (theta <= hi + cell)):
            continue
        if np.linalg.norm(planes(theta)) <= 1e-10 * scale:
            roots.append(theta)
    roots = _dedup(roots, settings.oracle_dedup_tol)
    roots.sort(key=lambda t: (t[0], t[1]))

    warnings = []
    cells = np.argwhere(_straddling_cells(residual))
    centers = lo + (cells[:, ::-1] + 0.5) * cell
    orphaned = [
        center for center in centers
        if not any(np.max(np.abs(center - root)) <= 2.0 * cell for root in roots)
    ]
    if orphaned:
        message = f"{len(orphaned)} sign-change cells without a converged root; intersections may be missing"
        logger.warning("oracle_surface: %s", message)
        warnings.append(message)

    intersections = []
    certified = 0
    for theta in roots:
        if abs(np.linalg.det(jacobian(theta))) > 1e-10 * scale:
            certified += 1
        point = eval_power_surface(surface, theta)
        intersections.append(OracleIntersection(np.asarray(theta), _project(line, point), point))
    logger.debug("oracle_surface: %d seeds, %d roots", len(seeds), len(intersections))
    return OracleResult(tuple(intersections), SAMPLED_REFINED, certified, tuple(warnings))


def oracle(geometry, line: QueryLine, settings: Optional[Settings] = None) -> OracleResult:
    if isinstance(geometry, PowerSurface):
        return oracle_surface(geometry, line, settings)
    return oracle_curve(geometry, line, settings)
