import argparse
import logging
from typing import List

from app.commands.base import (
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    add_degree_flag,
    add_lambda_flags,
    add_records_flag,
    emit_records,
    summary,
)
from app.exceptions import DomainError, PottsError
from app.schemas.command import RunConfig
from app.schemas.dimension import DimensionRecord
from app.schemas.sphere import FamilyParams
from app.services.dimension_service import DimensionService

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    for name, handler, help_text in (
        ("dimension", run_dimension, "Bowen dimension from periodic points vs the asymptotic formula"),
        ("verify-asymptotic", run_verify_asymptotic, "check the asymptotic dimension formula along a lambda ladder"),
    ):
        parser = subparsers.add_parser(name, help=help_text)
        add_degree_flag(parser)
        add_lambda_flags(parser)
        parser.add_argument("--n", type=int, help="period (default: 12 for d=2, the degree's limit otherwise)")
        parser.add_argument(
            "--deviation-samples",
            type=int,
            default=1000 if name == "verify-asymptotic" else 0,
            help="periodic points used for the distance of J to the unit circle; 0 skips it (default: %(default)s)",
        )
        add_records_flag(parser)
        parser.set_defaults(handler=handler, command_name=name)


def _records(config: RunConfig, lambdas: List[complex]) -> List[DimensionRecord]:
    service = DimensionService(workers=config.workers)
    records: List[DimensionRecord] = []
    for lam in lambdas:
        try:
            p = FamilyParams.create(config.d, lam)
            service.check_regime(p, config.period)
        except (DomainError, ValueError) as e:
            summary(f"skipped lambda={lam}: {e}")
            continue
        records.append(service.dimension_record(p, config.period, config.deviation_samples))
    return records


def _emit(config: RunConfig, records: List[DimensionRecord]) -> None:
    header = DimensionRecord.header() + ["difference"]
    rows = [r.row() + [f"{r.D_bowen - r.D_formula:.3e}"] for r in records]
    emit_records(config, header, rows, "dimension")
    try:
        constant = DimensionService().fit_error_constant(records)
        summary(f"fitted error constant C = max |D_bowen - D_formula| / |alpha|^3 = {constant:.4g}")
    except PottsError:
        pass


def run_dimension(config: RunConfig) -> int:
    records = _records(config, config.lambda_values)
    if not records:
        summary("no lambda in the quasicircle regime was processed")
        return EXIT_USAGE
    _emit(config, records)
    return EXIT_OK


def run_verify_asymptotic(config: RunConfig) -> int:
    records = _records(config, config.ladder)
    if not records:
        summary("no lambda in the quasicircle regime was processed")
        return EXIT_USAGE
    _emit(config, records)

    failed = False
    for r in records:
        bound = 3.0 * r.alpha_modulus ** 3
        ok = r.error <= bound
        failed = failed or not ok
        summary(f"lambda={r.lam_re:.6g}{r.lam_im:+.6g}i: |D_bowen - D_formula| = {r.error:.3e} (bound {bound:.3e}) {'ok' if ok else 'FAILED'}")

    deviations = [r.deviation for r in records]
    if config.deviation_samples and len(deviations) > 1:
        decreasing = all(b < a for a, b in zip(deviations, deviations[1:]))
        summary(f"circle deviation decreasing along the ladder: {'yes' if decreasing else 'no'}")
    return EXIT_NUMERICAL if failed else EXIT_OK
