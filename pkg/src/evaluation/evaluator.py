"""Agreement between pipeline records and the brute-force oracle."""

import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..config import Settings, get_settings
from ..implicit.intersect import IntersectionRecord, QueryLine, intersect_lines
from ..implicit.implicitize import Geometry, MovingFamily
from ..utils.helpers import relative_close
from .oracle import SAMPLED_REFINED, OracleResult, oracle

logger = logging.getLogger(__name__)


class OracleAgreement(BaseModel):
    """Result of comparing one line's confirmed records with the oracle."""

    matched: List[Tuple[float, float]] = Field(default_factory=list, description="(pipeline xi, oracle xi) pairs")
    missed: List[float] = Field(default_factory=list, description="Oracle xi with no confirmed record")
    spurious: List[float] = Field(default_factory=list, description="Confirmed xi the oracle did not find")
    oracle_warnings: List[str] = Field(default_factory=list)

    @property
    def agrees(self) -> bool:
        return not self.missed and not self.spurious

    @property
    def excused(self) -> bool:
        """A discrepancy the oracle itself flagged as possibly incomplete."""
        return not self.agrees and bool(self.oracle_warnings)

    @property
    def accepted(self) -> bool:
        return self.agrees or self.excused


def compare_with_oracle(
    records: Sequence[IntersectionRecord],
    oracle_result: OracleResult,
    tol: float = 1e-7,
    box: Optional[Tuple[float, float]] = None,
) -> OracleAgreement:
    """One-to-one matching of confirmed xi values against oracle xi values.

    With ``box`` (the oracle's parameter box), unmatched records whose theta lies
    outside it are not counted as spurious.
    """
    confirmed = [r for r in records if r.confirmed]
    outside = set()
    if box is not None:
        lo, hi = box
        outside = {id(r) for r in confirmed if not np.all((r.theta >= lo) & (r.theta <= hi))}
    remaining = sorted(confirmed, key=lambda r: r.xi)
    matched = []
    missed = []
    for expected in sorted(oracle_result.xi):
        if remaining:
            nearest = min(range(len(remaining)), key=lambda k: abs(remaining[k].xi - expected))
            if relative_close(remaining[nearest].xi, expected, tol):
                matched.append((remaining.pop(nearest).xi, float(expected)))
                continue
        missed.append(float(expected))
    return OracleAgreement(
        matched=matched,
        missed=missed,
        spurious=[r.xi for r in remaining if id(r) not in outside],
        oracle_warnings=list(oracle_result.warnings),
    )


def summarize_agreement(agreements: Sequence[OracleAgreement]) -> Dict[str, Any]:
    """Aggregate metrics over a batch of comparisons."""
    if not agreements:
        return {}
    total = len(agreements)
    agreeing = sum(1 for a in agreements if a.agrees)
    excused = sum(1 for a in agreements if a.excused)
    return {
        "total_lines": total,
        "agreeing": agreeing,
        "excused": excused,
        "agreement_rate": round(agreeing / total, 4),
        "matched": sum(len(a.matched) for a in agreements),
        "missed": sum(len(a.missed) for a in agreements),
        "spurious": sum(len(a.spurious) for a in agreements),
    }


class OracleEvaluator:
    """Runs the pipeline and the oracle side by side on a batch of lines."""

    def __init__(self, settings: Optional[Settings] = None, tol: float = 1e-7, surface_tol: float = 1e-6):
        self.settings = settings or get_settings()
        self.tol = tol
        self.surface_tol = surface_tol

    def evaluate_line(
        self, geometry: Geometry, line: QueryLine, records: Sequence[IntersectionRecord]
    ) -> Tuple[OracleResult, OracleAgreement]:
        result = oracle(geometry, line, self.settings)
        if result.method == SAMPLED_REFINED:
            agreement = compare_with_oracle(records, result, self.surface_tol, self.settings.oracle_box)
        else:
            agreement = compare_with_oracle(records, result, self.tol)
        if not agreement.agrees:
            logger.warning(
                "oracle disagreement: missed %s spurious %s%s",
                agreement.missed,
                agreement.spurious,
                " (excused)" if agreement.excused else "",
            )
        return result, agreement

    def evaluate_batch(
        self,
        geometry: Geometry,
        lines: Sequence[QueryLine],
        family: Optional[MovingFamily] = None,
    ) -> List[OracleAgreement]:
        """
        Intersect every line and compare against the oracle.

        Args:
            geometry: Power-form curve or surface
            lines: Query lines
            family: Optional precomputed moving family

        Returns:
            One agreement per line, in input order
        """
        results = intersect_lines(geometry, lines, self.settings, family)
        return [self.evaluate_line(geometry, line, r.records)[1] for line, r in zip(lines, results)]

    def calculate_metrics(self, agreements: Sequence[OracleAgreement]) -> Dict[str, Any]:
        return summarize_agreement(agreements)
