"""Verification against an independent brute-force oracle."""

from .evaluator import OracleAgreement, OracleEvaluator, compare_with_oracle, summarize_agreement
from .oracle import OracleIntersection, OracleResult, oracle, oracle_curve, oracle_surface

__all__ = [
    "OracleAgreement",
    "OracleEvaluator",
    "compare_with_oracle",
    "summarize_agreement",
    "OracleIntersection",
    "OracleResult",
    "oracle",
    "oracle_curve",
    "oracle_surface",
]
