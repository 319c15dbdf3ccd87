"""Line queries against a moving family.

The moving lines evaluated on the query line ``r(xi) = c0 + xi * c1`` give a
rectangular pencil ``A - xi B`` whose left null vectors at an intersection are
the auxiliary basis ``P~(theta)``. A square sub-pencil yields every
intersection as a generalized eigenvalue (plus fictitious ones, rejected by
the residual test), and the eigenvector ratios give the curve/surface
parameters.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import numpy.polynomial.polynomial as npoly
import scipy.linalg
from tqdm import tqdm

from ..config import Settings, get_settings
from ..errors import (
    AmbiguousPreimageError,
    InsufficientFamilyError,
    SchemaValidationError,
    ShapeMismatchError,
    UnresolvedMultiplicityError,
)
from ..geometry.polybasis import PowerSurface, evaluate, poly_multiply
from ..linalg.backend import GeneralizedEigenResult, generalized_eig, left_null_space, scale_columns
from .implicitize import AuxBasis, Geometry, MovingFamily, implicitize

logger = logging.getLogger(__name__)

# Fraction of |phi|^2 below which a ratio denominator counts as vanishing.
_AMBIGUOUS_RATIO = 1e-14
# Relative conditioning below which a Delta matrix is treated as singular.
_DEGENERATE_DELTA = 1e-10
_DOMAIN_SLACK = 1e-9


class Status(str, Enum):
    CONFIRMED = "confirmed"
    FICTITIOUS = "fictitious"
    COMPLEX = "complex-discarded"
    INFINITE = "infinite-discarded"


_STATUS_ORDER = {Status.CONFIRMED: 0, Status.FICTITIOUS: 1, Status.COMPLEX: 2, Status.INFINITE: 3}


@dataclass(frozen=True)
class QueryLine:
    """r(xi) = origin + xi * direction."""

    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        origin = np.array(self.origin, dtype=float)
        direction = np.array(self.direction, dtype=float)
        if origin.ndim != 1 or origin.size not in (2, 3) or origin.shape != direction.shape:
            raise ShapeMismatchError(
                f"line origin {origin.shape} and direction {direction.shape} must be matching 2- or 3-vectors",
                field="origin",
            )
        if not np.linalg.norm(direction) > 0.0:
            raise SchemaValidationError("line direction must be nonzero", field="direction")
        origin.setflags(write=False)
        direction.setflags(write=False)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "direction", direction)

    @property
    def space_dim(self) -> int:
        return self.origin.size

    def point(self, xi: float) -> np.ndarray:
        return self.origin + xi * self.direction

    def reparametrize(self, shift: float, scale: float) -> "QueryLine":
        """Same line with origin moved by ``shift`` directions and direction scaled by ``scale``."""
        return QueryLine(self.origin + shift * self.direction, scale * self.direction)


@dataclass(frozen=True)
class Pencil:
    """Rectangular pencil A - xi B: one row per auxiliary monomial, one column per moving line."""

    a: np.ndarray
    b: np.ndarray
    aux: AuxBasis

    @property
    def aux_basis_size(self) -> int:
        return self.a.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.a.shape

    def at(self, xi: float) -> np.ndarray:
        return self.a - xi * self.b


@dataclass(frozen=True)
class Candidate:
    """An eigenvalue (alpha, beta) with the parameter recovered for it, before classification."""

    alpha: complex
    beta: float
    theta: Optional[np.ndarray] = None
    multiplicity: int = 1
    note: Optional[str] = None

    @property
    def xi(self) -> complex:
        if self.beta == 0.0:
            return complex(np.inf, 0.0)
        return complex(self.alpha) / self.beta


@dataclass(frozen=True)
class IntersectionRecord:
    xi: float
    theta: Optional[np.ndarray]
    point: Optional[np.ndarray]
    residual: Optional[float]
    status: Status
    multiplicity: int = 1
    xi_imag: float = 0.0
    in_domain: Optional[bool] = None
    note: Optional[str] = None
    alpha: complex = 0j
    beta: float = 0.0
    scaled_residual: Optional[float] = None

    @property
    def confirmed(self) -> bool:
        return self.status is Status.CONFIRMED


@dataclass(frozen=True)
class IntersectionResult:
    """Records of one line query together with the pipeline metadata that produced them."""

    records: Tuple[IntersectionRecord, ...]
    family: MovingFamily
    pencil_shape: Tuple[int, int]
    selected_columns: Tuple[int, ...]

    @property
    def confirmed(self) -> Tuple[IntersectionRecord, ...]:
        return tuple(r for r in self.records if r.confirmed)


def assemble_pencil(family: MovingFamily, line: QueryLine) -> Pencil:
    """A[l, i] = (c0, 1) . g_l^(i) and B[l, i] = -(c1, 0) . g_l^(i)."""
    if line.space_dim != family.space_dim:
        raise ShapeMismatchError(
            f"{line.space_dim}D line cannot query a family in {family.space_dim}D", field="origin"
        )
    origin = np.append(line.origin, 1.0)
    direction = np.append(line.direction, 0.0)
    a = np.einsum("d,idl->li", origin, family.vectors)
    b = -np.einsum("d,idl->li", direction, family.vectors)
    return Pencil(a=a, b=b, aux=family.aux)


def select_square(pencil: Pencil, strategy: str = "cond") -> Tuple[np.ndarray, np.ndarray, Tuple[int, ...]]:
    """Largest square sub-pencil.

    ``cond`` picks the columns a pivoted QR of the stacked ``[A; B]`` ranks first;
    ``first`` and ``last`` take the leading or trailing columns.
    """
    rows, columns = pencil.shape
    if columns < rows:
        raise InsufficientFamilyError(f"pencil has {columns} columns for {rows} rows")
    if columns == rows:
        selected = tuple(range(columns))
    elif strategy == "first":
        selected = tuple(range(rows))
    elif strategy == "last":
        selected = tuple(range(columns - rows, columns))
    elif strategy == "cond":
        _, pivots = scipy.linalg.qr(np.vstack([pencil.a, pencil.b]), mode="r", pivoting=True)
        selected = tuple(sorted(int(c) for c in pivots[:rows]))
    else:
        raise ValueError(f"unknown column selection strategy {strategy!r}")
    logger.debug("select_square: %s columns %s of %d", strategy, selected, columns)
    index = list(selected)
    return pencil.a[:, index], pencil.b[:, index], selected


def _ratio(phi: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> complex:
    """Least-squares theta in phi[hi] ~ theta * phi[lo]."""
    denominator = np.vdot(phi[lo], phi[lo]).real
    if denominator <= _AMBIGUOUS_RATIO * np.vdot(phi, phi).real:
        raise AmbiguousPreimageError("eigenvector has vanishing leading components")
    return np.vdot(phi[lo], phi[hi]) / denominator


def recover_theta_simple(phi, aux: AuxBasis) -> np.ndarray:
    """Parameters from a single left eigenvector phi ~ P~(theta).

    Directions with auxiliary degree 0 carry no ratio and come back as NaN.
    """
    phi = np.asarray(phi)
    if not np.linalg.norm(phi) > 0.0:
        raise AmbiguousPreimageError("zero eigenvector")
    theta = np.full(aux.ndim, np.nan)
    for direction in range(aux.ndim):
        lo, hi = aux.shift_pairs(direction)
        if lo.size:
            theta[direction] = _ratio(phi, lo, hi).real
    return theta


def _delta_windows(kernel: np.ndarray, p: int, aux: AuxBasis, direction: int) -> List[np.ndarray]:
    lo, _ = aux.shift_pairs(direction)
    if lo.size < p:
        return []
    if aux.ndim == 1:
        return [lo[i:i + p] for i in range(lo.size - p + 1)]
    _, pivots = scipy.linalg.qr(kernel[:, lo], mode="r", pivoting=True)
    return [lo[pivots[:p]]]


def recover_theta_multiple(kernel, p: int, aux: Optional[AuxBasis] = None) -> np.ndarray:
    """Parameters of p preimages sharing one eigenvalue.

    ``kernel`` has p rows spanning {P~(theta_1), ..., P~(theta_p)}. Taking p
    columns and the same columns shifted by one power gives square matrices
    (Delta_i, Delta_{i+1}); the eigenvalues of (Delta_{i+1} - theta Delta_i) are
    the parameters along the shift direction, and the left eigenvectors u give
    ``u @ kernel ~ P~(theta_a)`` for the remaining directions. Returns an array
    of shape (p, ndim), complex when preimages are.
    """
    kernel = np.atleast_2d(np.asarray(kernel))
    if kernel.shape[0] != p:
        raise ShapeMismatchError(f"kernel has {kernel.shape[0]} rows for multiplicity {p}")
    if aux is None:
        aux = AuxBasis((kernel.shape[1] - 1,))

    best = None
    for direction in range(aux.ndim):
        stride = aux.stride(direction)
        for window in _delta_windows(kernel, p, aux, direction):
            delta = kernel[:, window]
            singular_values = scipy.linalg.svdvals(delta)
            quality = singular_values[-1] / singular_values[0] if singular_values[0] > 0 else 0.0
            if best is None or quality > best[0]:
                best = (quality, direction, delta, kernel[:, window + stride])
    if best is None or best[0] <= _DEGENERATE_DELTA:
        raise UnresolvedMultiplicityError(f"no regular Delta pair for multiplicity {p}")

    _, direction, delta, shifted = best
    eig = generalized_eig(shifted, delta)
    thetas = []
    for k in range(p):
        if eig.beta[k] == 0.0:
            logger.warning("preimage at infinity dropped from a multiplicity-%d eigenvalue", p)
            continue
        theta = np.full(aux.ndim, np.nan, dtype=complex)
        theta[direction] = eig.alpha[k] / eig.beta[k]
        phi = eig.left_vectors[:, k] @ kernel
        for other in range(aux.ndim):
            lo, hi = aux.shift_pairs(other)
            if other != direction and lo.size:
                theta[other] = _ratio(phi, lo, hi)
        thetas.append(theta)
    return np.array(thetas, dtype=complex).reshape(-1, aux.ndim)


def pencil_left_null_space(pencil: Pencil, xi: float, tol: float) -> np.ndarray:
    """Rows spanning the left null space of the full rectangular pencil at xi."""
    return left_null_space(pencil.at(xi), tol)


def _nearest_parameter(coeffs: np.ndarray, point: np.ndarray) -> float:
    """Real t minimizing |sum_j coeffs[j] t**j - point|^2."""
    shifted = np.array(coeffs, dtype=float)
    shifted[0] -= point
    objective = sum(poly_multiply(shifted[:, k], shifted[:, k]) for k in range(shifted.shape[1]))
    derivative = npoly.polyder(objective)
    if not np.any(derivative):
        return 0.0
    roots = npoly.polyroots(npoly.polytrim(derivative))
    real = roots[np.abs(roots.imag) <= 1e-8 * (1.0 + np.abs(roots.real))].real
    if real.size == 0:
        return 0.0
    return float(real[np.argmin(npoly.polyval(real, objective))])


def solve_missing_parameter(geometry: Geometry, theta, point) -> np.ndarray:
    """Fill NaN parameter directions by minimizing |x(theta) - point| along them."""
    theta = np.array(theta, dtype=float)
    missing = np.isnan(theta)
    if not missing.any():
        return theta
    if isinstance(geometry, PowerSurface):
        if missing.all():
            raise AmbiguousPreimageError("no parameter direction could be recovered")
        if missing[1]:
            theta[1] = _nearest_parameter(npoly.polyval(theta[0], geometry.coeffs), point)
        else:
            theta[0] = _nearest_parameter(npoly.polyval(theta[1], geometry.coeffs.transpose(1, 0, 2)), point)
    else:
        theta[0] = _nearest_parameter(geometry.coeffs, point)
    return theta


def _is_complex(value, tol: float) -> bool:
    value = np.asarray(value)
    return bool(np.any(np.abs(value.imag) > tol * (1.0 + np.abs(value.real))))


def classify_and_filter(
    candidates: Sequence[Candidate],
    geometry: Geometry,
    line: QueryLine,
    confirm_tol: float = 1e-6,
    complex_tol: float = 1e-8,
) -> List[IntersectionRecord]:
    """Residual test |x(theta) - r(xi)| <= confirm_tol * (1 + |x(theta)|) on real candidates."""
    records = []
    for candidate in candidates:
        xi = candidate.xi
        common = dict(
            multiplicity=candidate.multiplicity,
            note=candidate.note,
            alpha=complex(candidate.alpha),
            beta=float(candidate.beta),
        )
        if candidate.beta == 0.0:
            records.append(IntersectionRecord(np.inf, None, None, None, Status.INFINITE, **common))
            continue
        if _is_complex(xi, complex_tol):
            records.append(
                IntersectionRecord(xi.real, None, None, None, Status.COMPLEX, xi_imag=xi.imag, **common)
            )
            continue
        point = line.point(xi.real)
        if candidate.theta is None:
            records.append(IntersectionRecord(xi.real, None, point, None, Status.FICTITIOUS, **common))
            continue
        if _is_complex(candidate.theta, complex_tol):
            records.append(IntersectionRecord(xi.real, None, point, None, Status.COMPLEX, **common))
            continue
        theta = np.real(np.asarray(candidate.theta, dtype=complex))
        on_geometry = evaluate(geometry, theta if isinstance(geometry, PowerSurface) else theta[0])
        residual = float(np.linalg.norm(on_geometry - point))
        scaled = residual / (1.0 + float(np.linalg.norm(on_geometry)))
        status = Status.CONFIRMED if scaled <= confirm_tol else Status.FICTITIOUS
        records.append(
            IntersectionRecord(xi.real, theta, point, residual, status, scaled_residual=scaled, **common)
        )
    return records


def _cluster(values: np.ndarray, tol: float) -> List[List[int]]:
    order = np.argsort(values)
    groups: List[List[int]] = []
    for index in order:
        if groups and abs(values[index] - values[groups[-1][-1]]) <= tol * (1.0 + abs(values[index])):
            groups[-1].append(int(index))
        else:
            groups.append([int(index)])
    return groups


def _real_rows(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column to a real vector (its largest entry made real and positive)."""
    rows = []
    for column in vectors.T:
        pivot = column[np.argmax(np.abs(column))]
        rows.append((column * np.conj(pivot) / abs(pivot)).real)
    return np.array(rows)


def _preimage_candidates(
    xi: float,
    pair: Tuple[complex, float],
    vectors: np.ndarray,
    pencil: Pencil,
    geometry: Geometry,
    line: QueryLine,
    settings: Settings,
) -> List[Candidate]:
    multiplicity = vectors.shape[1]
    kernel = pencil_left_null_space(pencil, xi, settings.pencil_null_tol)
    if kernel.shape[0] == 0:
        # Not a rank drop of the full pencil: keep the sub-pencil eigenvectors.
        kernel = _real_rows(vectors)
    p = kernel.shape[0]
    try:
        if p == 1:
            thetas = [recover_theta_simple(kernel[0], pencil.aux)]
        else:
            thetas = list(recover_theta_multiple(kernel, p, pencil.aux))
    except AmbiguousPreimageError:
        return [Candidate(*pair, None, multiplicity, note="ambiguous-preimage")]
    except UnresolvedMultiplicityError as exc:
        logger.warning("xi=%.6g: %s", xi, exc.message)
        return [Candidate(*pair, None, multiplicity, note="unresolved-multiplicity")]

    point = line.point(xi)
    candidates = []
    for theta in thetas:
        if not _is_complex(theta, settings.complex_tol):
            theta = solve_missing_parameter(geometry, np.real(theta), point)
        candidates.append(Candidate(*pair, theta, multiplicity))
    return candidates


def eigen_candidates(
    eig: GeneralizedEigenResult,
    pencil: Pencil,
    geometry: Geometry,
    line: QueryLine,
    settings: Settings,
    scale: float = 1.0,
) -> List[Candidate]:
    """Group real eigenvalues into clusters and recover their preimages."""
    candidates = []
    real_index = []
    xi = eig.eigenvalues()
    for k in range(len(xi)):
        if eig.beta[k] == 0.0:
            candidates.append(Candidate(eig.alpha[k], 0.0))
        elif max(abs(eig.alpha[k]), eig.beta[k]) <= settings.infinite_tol * scale:
            logger.warning("singular square pencil: indeterminate eigenvalue pair dropped")
            candidates.append(Candidate(eig.alpha[k], 0.0, note="singular-pencil"))
        elif _is_complex(xi[k], settings.complex_tol):
            candidates.append(Candidate(eig.alpha[k], eig.beta[k]))
        else:
            real_index.append(k)

    values = xi[real_index].real
    for group in _cluster(values, settings.cluster_tol):
        members = [real_index[g] for g in group]
        center = float(np.mean(values[group]))
        # A cluster is reported through its mean; a lone eigenvalue keeps its QZ pair.
        pair = (eig.alpha[members[0]].real, eig.beta[members[0]]) if len(members) == 1 else (center, 1.0)
        candidates.extend(
            _preimage_candidates(center, pair, eig.left_vectors[:, members], pencil, geometry, line, settings)
        )
    return candidates


def _same_intersection(a: IntersectionRecord, b: IntersectionRecord, tol: float) -> bool:
    return (
        abs(a.xi - b.xi) <= tol * (1.0 + abs(a.xi))
        and np.allclose(a.theta, b.theta, rtol=tol, atol=tol)
    )


def _deduplicate(records: List[IntersectionRecord], tol: float) -> List[IntersectionRecord]:
    kept: List[IntersectionRecord] = []
    for record in records:
        if record.confirmed and any(k.confirmed and _same_intersection(k, record, tol) for k in kept):
            continue
        kept.append(record)
    return kept


def _flag_domain(record: IntersectionRecord, domain: str) -> IntersectionRecord:
    if domain != "unit" or record.theta is None:
        return record
    inside = bool(np.all((record.theta >= -_DOMAIN_SLACK) & (record.theta <= 1.0 + _DOMAIN_SLACK)))
    return replace(record, in_domain=inside)


def _record_order(record: IntersectionRecord):
    return _STATUS_ORDER[record.status], record.xi, record.xi_imag


def run_query(
    geometry: Geometry,
    line: QueryLine,
    settings: Optional[Settings] = None,
    family: Optional[MovingFamily] = None,
    q_g=None,
) -> IntersectionResult:
    """Full pipeline for one line, keeping the intermediate metadata."""
    settings = settings or get_settings()
    if family is None:
        family = implicitize(geometry, q_g, settings)
    pencil = assemble_pencil(family, line)
    a, b, selected = select_square(pencil, settings.strategy)
    if settings.column_scaling:
        a, b = scale_columns(a, b)
    eig = generalized_eig(a, b, settings.infinite_tol)
    scale = np.linalg.norm(a) + np.linalg.norm(b)
    candidates = eigen_candidates(eig, pencil, geometry, line, settings, scale)
    records = classify_and_filter(candidates, geometry, line, settings.confirm_tol, settings.complex_tol)
    records = sorted(records, key=_record_order)
    records = _deduplicate(records, settings.cluster_tol)
    records = [_flag_domain(r, settings.domain) for r in records]
    logger.debug(
        "line query: pencil %s, %d candidates, %d confirmed",
        pencil.shape, len(records), sum(r.confirmed for r in records),
    )
    return IntersectionResult(
        records=tuple(records),
        family=family,
        pencil_shape=pencil.shape,
        selected_columns=selected,
    )


def intersect_line(
    geometry: Geometry,
    line: QueryLine,
    settings: Optional[Settings] = None,
    family: Optional[MovingFamily] = None,
    q_g=None,
) -> List[IntersectionRecord]:
    """All intersection records of one line, confirmed ones first and sorted by xi."""
    return list(run_query(geometry, line, settings, family, q_g).records)


def intersect_lines(
    geometry: Geometry,
    lines: Sequence[QueryLine],
    settings: Optional[Settings] = None,
    family: Optional[MovingFamily] = None,
    q_g=None,
    jobs: Optional[int] = None,
    progress: bool = False,
) -> List[IntersectionResult]:
    """Batch queries sharing one family; results follow the input order."""
    settings = settings or get_settings()
    if family is None:
        family = implicitize(geometry, q_g, settings)
    jobs = jobs or settings.jobs

    def query(line: QueryLine) -> IntersectionResult:
        return run_query(geometry, line, settings, family)

    bar = tqdm(total=len(lines), desc="Intersecting lines", disable=not progress)
    with bar:
        if jobs == 1:
            results = []
            for line in lines:
                results.append(query(line))
                bar.update()
            return results
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = []
            for result in pool.map(query, lines):
                results.append(result)
                bar.update()
            return results
