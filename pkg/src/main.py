"""Main entry point for linecut."""

import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence

from pydantic import ValidationError

from . import __version__
from .config import Settings, get_settings
from .config.settings import DOMAINS, STRATEGIES
from .data.schemas import FamilyDump, LineResult, LineSpec, OracleOut, RecordOut, ReportFile
from .data.storage import load_geometry, load_lines, write_json, write_samples
from .errors import LinecutError, SchemaValidationError
from .evaluation.evaluator import OracleEvaluator, summarize_agreement
from .geometry.polybasis import PowerSurface, sample_curve, sample_surface
from .implicit.implicitize import implicitize
from .implicit.intersect import QueryLine, intersect_lines
from .utils.helpers import format_vector
from .utils.logging import setup_logging

logger = logging.getLogger(__name__)


def parse_qg(text: Optional[str]):
    """'3' gives 3; '2,3' gives (2, 3)."""
    if text is None:
        return None
    parts = [int(p) for p in text.split(",")]
    if len(parts) == 1:
        return parts[0]
    if len(parts) == 2:
        return tuple(parts)
    raise argparse.ArgumentTypeError("--qg takes one integer or two separated by a comma")


def _qg_for(geometry, q_g):
    if q_g is not None and isinstance(geometry, PowerSurface) and isinstance(q_g, int):
        return (q_g, q_g)
    return q_g


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


class Linecut:
    """Facade over implicitization, line queries, oracle checks and sampling."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    def intersect(
        self,
        geometry,
        lines: Sequence[QueryLine],
        q_g=None,
        show_all: bool = False,
        oracle_check: bool = False,
        progress: bool = False,
    ) -> ReportFile:
        """Build the intersection report for a batch of lines."""
        digits = self.settings.digits
        family = implicitize(geometry, _qg_for(geometry, q_g), self.settings)
        results = intersect_lines(
            geometry, lines, self.settings, family, progress=progress and len(lines) > 1
        )
        evaluator = OracleEvaluator(self.settings) if oracle_check else None

        blocks: List[LineResult] = []
        agreements = []
        for line, result in zip(lines, results):
            records = result.records if show_all else result.confirmed
            block = LineResult(
                line=LineSpec.from_query_line(line),
                records=[RecordOut.from_record(r, digits) for r in records],
                pencil_shape=result.pencil_shape,
                selected_columns=list(result.selected_columns),
            )
            if evaluator is not None:
                oracle_result, agreement = evaluator.evaluate_line(geometry, line, result.records)
                agreements.append(agreement)
                block.oracle = OracleOut(
                    agrees=agreement.agrees,
                    excused=agreement.excused,
                    method=oracle_result.method,
                    matched=len(agreement.matched),
                    missed=format_vector(agreement.missed, digits),
                    spurious=format_vector(agreement.spurious, digits),
                    warnings=agreement.oracle_warnings,
                )
            blocks.append(block)

        metadata = {
            "version": __version__,
            "geometry_kind": family.geometry_kind,
            "q_g": family.aux_degree,
            "c_shape": list(family.c_shape),
            "rank": family.rank,
            "nullity": family.nullity,
            "strategy": self.settings.strategy,
            "domain": self.settings.domain,
            "confirm_tol": self.settings.confirm_tol,
            "residual": "|x(theta) - r(xi)| / (1 + |x(theta)|)",
            "rank_tol": self.settings.rank_tol,
            "show_all": show_all,
            "digits": digits,
            "lines": len(lines),
        }
        if agreements:
            metadata["oracle"] = summarize_agreement(agreements)
        return ReportFile(metadata=metadata, results=blocks)

    def implicitize(self, geometry, q_g=None) -> FamilyDump:
        digits = self.settings.digits
        family = implicitize(geometry, _qg_for(geometry, q_g), self.settings)
        declared = geometry.bidegree if isinstance(geometry, PowerSurface) else geometry.degree
        effective = family.effective_degree
        if effective is not None and not isinstance(geometry, PowerSurface):
            effective = effective[0]
        return FamilyDump(
            geometry_kind=family.geometry_kind,
            q_g=family.aux_degree,
            c_shape=family.c_shape,
            rank=family.rank,
            nullity=family.nullity,
            algebraic_degree=family.algebraic_degree,
            declared_degree=declared,
            effective_degree=effective,
            singular_values=format_vector(family.singular_values, digits),
            column_blocks=[f"{name}:{family.aux.size}" for name in _block_names(family.space_dim)],
            family=[[format_vector(block, digits) for block in vector] for vector in family.vectors],
        )

    def sample(self, geometry, count: int):
        if isinstance(geometry, PowerSurface):
            return sample_surface(geometry, count)
        return sample_curve(geometry, count)


def _block_names(space_dim: int) -> List[str]:
    return [f"x{k + 1}" for k in range(space_dim)] + ["1"]


class _Parser(argparse.ArgumentParser):
    """Usage errors become input errors (exit 1) instead of argparse's exit 2."""

    def error(self, message):
        raise SchemaValidationError(message, field="argv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="linecut",
        description="Line intersections with polynomial curves and surfaces by moving-line implicitization",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", type=str, help="Override the configured log level")
    common.add_argument("--digits", type=_positive_int, help="Significant digits in the output")
    common.add_argument("--output", type=str, help="Write to this file instead of stdout")

    intersect = subparsers.add_parser("intersect", parents=[common], help="Intersect lines with a curve or surface")
    intersect.add_argument("geometry", help="Geometry JSON file")
    intersect.add_argument("lines", help="Lines JSON file")
    intersect.add_argument("--qg", type=parse_qg, help="Auxiliary degree (surfaces: 'q1,q2')")
    intersect.add_argument("--strategy", choices=STRATEGIES, help="Square sub-pencil column selection")
    intersect.add_argument("--confirm-tol", type=_positive_float, help="Relative residual for confirmation")
    intersect.add_argument("--rank-tol", type=_positive_float, help="Relative SVD rank threshold")
    intersect.add_argument("--domain", choices=DOMAINS, help="Flag preimages inside the unit domain")
    intersect.add_argument("--show-all", action="store_true", help="Include fictitious and discarded records")
    intersect.add_argument("--oracle-check", action="store_true", help="Compare each line with the oracle")
    intersect.add_argument("--jobs", type=_positive_int, help="Worker threads for the line batch")
    intersect.add_argument("--progress", action="store_true", help="Progress bar on stderr")

    implicit = subparsers.add_parser("implicitize", parents=[common], help="Dump the moving family of a geometry")
    implicit.add_argument("geometry", help="Geometry JSON file")
    implicit.add_argument("--qg", type=parse_qg, help="Auxiliary degree (surfaces: 'q1,q2')")
    implicit.add_argument("--rank-tol", type=_positive_float, help="Relative SVD rank threshold")

    sample = subparsers.add_parser("sample", parents=[common], help="Uniform parameter samples as CSV")
    sample.add_argument("geometry", help="Geometry JSON file")
    sample.add_argument("--count", type=_positive_int, default=101, help="Samples per parameter direction")
    return parser


_OVERRIDES = ("log_level", "digits", "strategy", "confirm_tol", "rank_tol", "domain", "jobs")


def load_settings() -> Settings:
    """Environment settings; invalid values are input errors."""
    try:
        return get_settings()
    except ValidationError as exc:
        error = exc.errors()[0]
        path = ".".join(str(part) for part in error["loc"]) or "settings"
        raise SchemaValidationError(error["msg"], field=path) from exc


def settings_from_args(args: argparse.Namespace, base: Optional[Settings] = None) -> Settings:
    base = base or load_settings()
    update = {
        name: getattr(args, name)
        for name in _OVERRIDES
        if getattr(args, name, None) is not None
    }
    return base.model_copy(update=update)


def run(args: argparse.Namespace, settings: Settings) -> None:
    app = Linecut(settings)
    geometry = load_geometry(args.geometry, settings)

    if args.command == "intersect":
        lines = load_lines(args.lines)
        report = app.intersect(
            geometry,
            lines,
            q_g=args.qg,
            show_all=args.show_all,
            oracle_check=args.oracle_check,
            progress=args.progress,
        )
        write_json(report, args.output)
    elif args.command == "implicitize":
        write_json(app.implicitize(geometry, args.qg), args.output)
    elif args.command == "sample":
        theta, points = app.sample(geometry, args.count)
        write_samples(theta, points, args.output, settings.digits)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point; returns the process exit code."""
    parser = build_parser()
    args = None
    try:
        args = parser.parse_args(argv)
        settings = settings_from_args(args)
        setup_logging(settings)
        run(args, settings)
    except LinecutError as exc:
        logger.debug("%s failed: %s", getattr(args, "command", None), exc.message)
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
