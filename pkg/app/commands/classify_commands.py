import argparse
import logging
from typing import List, Optional

from app.commands.base import (
    EXIT_INDETERMINATE,
    EXIT_OK,
    add_budget_flags,
    add_degree_flag,
    add_lambda_flags,
    add_records_flag,
    emit_records,
    summary,
)
from app.exceptions import PottsError
from app.schemas.command import RunConfig
from app.schemas.sphere import FamilyParams
from app.schemas.verdict import EquivalenceReport, VerdictKind
from app.services.classification_service import classification_service

logger = logging.getLogger(__name__)

CLASSIFY_HEADER = [
    "d",
    "lambda_re",
    "lambda_im",
    "verdict",
    "depth",
    "iterations",
    "quasicircle",
    "xi_in_basin_infinity",
    "omega_in_basin_one",
    "critical_value_in_basin_infinity",
    "zero_in_basin_one",
]
CENTER_HEADER = ["d", "n", "lambda_re", "lambda_im", "residual", "newton_iterations", "verdict"]
FIXED_HEADER = ["x", "multiplier", "stability"]


def _flag(value: Optional[bool]) -> str:
    if value is None:
        return "undetermined"
    return "true" if value else "false"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("classify", help="capture depth and quasicircle conditions of parameters")
    add_degree_flag(parser)
    add_lambda_flags(parser)
    add_budget_flags(parser)
    add_records_flag(parser)
    parser.set_defaults(handler=run_classify, command_name="classify")

    parser = subparsers.add_parser("centers", help="parameters whose critical orbit lands on 1 after n steps")
    add_degree_flag(parser)
    parser.add_argument("--n", type=int, help="capture depth of the center")
    parser.add_argument("--seed", metavar="RE,IM", help="Newton seed for a single center")
    parser.add_argument("--window", metavar="RE0,RE1,IM0,IM1", help="enumerate centers seeded from this window")
    parser.add_argument("--grid", type=int, default=40, help="seed grid per side for --window (default: %(default)s)")
    add_budget_flags(parser)
    add_records_flag(parser)
    parser.set_defaults(handler=run_centers, command_name="centers")

    parser = subparsers.add_parser("real-fixed", help="real fixed points of U with their multipliers")
    add_degree_flag(parser)
    add_lambda_flags(parser)
    parser.add_argument("--interval", default="1,100", metavar="A,B", help="scan interval (default: %(default)s)")
    add_records_flag(parser)
    parser.set_defaults(handler=run_real_fixed, command_name="real-fixed")


def run_classify(config: RunConfig) -> int:
    cfg = config.basin_config
    rows: List[List[str]] = []
    indeterminate = False
    for lam in config.lambda_values:
        p = FamilyParams.create(config.d, lam, degenerate=lam == 0)
        verdict = classification_service.classify_parameter(p, cfg)
        try:
            report = classification_service.equiv_condition_check(p, cfg)
        except PottsError as e:
            logger.debug(f"Equivalence conditions undetermined for {p.label()}: {e}")
            report = EquivalenceReport(
                quasicircle=None,
                xi_in_basin_infinity=None,
                omega_in_basin_one=None,
                critical_value_in_basin_infinity=None,
                zero_in_basin_one=None,
            )
        if verdict.kind == VerdictKind.NON_ESCAPING:
            indeterminate = True

        quasicircle = verdict.kind == VerdictKind.CAPTURE_DEPTH and verdict.depth == 0
        rows.append(
            [
                str(config.d),
                f"{lam.real:.10g}",
                f"{lam.imag:.10g}",
                verdict.label,
                "" if verdict.depth is None else str(verdict.depth),
                str(verdict.iterations_used),
                _flag(report.quasicircle),
                _flag(report.xi_in_basin_infinity),
                _flag(report.omega_in_basin_one),
                _flag(report.critical_value_in_basin_infinity),
                _flag(report.zero_in_basin_one),
            ]
        )
        if verdict.kind == VerdictKind.DEGENERATE:
            summary(f"{p.label()}: {verdict.label}")
        else:
            summary(f"{p.label()}: {verdict.label}, quasicircle={_flag(quasicircle)}")

    emit_records(config, CLASSIFY_HEADER, rows, "classification")
    return EXIT_INDETERMINATE if indeterminate else EXIT_OK


def run_centers(config: RunConfig) -> int:
    cfg = config.basin_config
    if config.seed is not None:
        seed = complex(*config.seed)
        p0 = FamilyParams.create(config.d, seed, degenerate=seed == 0)
        centers = [classification_service.find_center(p0, config.n, seed, cfg)]
    else:
        centers = classification_service.enumerate_centers(config.d, config.n, config.window, config.grid, cfg)

    rows = [
        [
            str(config.d),
            str(c.n),
            f"{c.lam_re:.12g}",
            f"{c.lam_im:.12g}",
            f"{c.residual:.3e}",
            str(c.iterations),
            c.verdict or "",
        ]
        for c in centers
    ]
    emit_records(config, CENTER_HEADER, rows, "center")
    summary(f"{len(centers)} center(s) of depth {config.n} for d={config.d}")
    return EXIT_OK


def run_real_fixed(config: RunConfig) -> int:
    lam = config.lambda_values[0]
    p = FamilyParams.create(config.d, lam, degenerate=lam == 0)
    report = classification_service.real_fixed_points(p, config.interval)
    rows = [[f"{fp.x:.14g}", f"{fp.multiplier:.10g}", fp.stability.value] for fp in report.points]
    emit_records(config, FIXED_HEADER, rows, "real fixed point")

    summary(f"{len(report.points)} real fixed point(s) of U on [{config.interval[0]}, {config.interval[1]}] for {p.label()}")
    if report.increasing_on_ray is not None:
        summary(f"U increasing on the scanned part of [1, inf): {_flag(report.increasing_on_ray)} (min step {report.min_increment:.3e})")
    if report.adjacent_sign_changes:
        summary("warning: sign changes in adjacent grid cells; nearby roots may have merged")
    return EXIT_OK
