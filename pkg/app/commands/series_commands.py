import argparse
import logging
import math
from typing import Callable, List

from app.commands.base import EXIT_NUMERICAL, EXIT_OK, add_degree_flag, add_records_flag, emit_records, summary
from app.config import settings
from app.exceptions import PottsError
from app.schemas.command import RunConfig
from app.schemas.series import IdentityRecord, SeriesConfig
from app.services.series_service import series_service

logger = logging.getLogger(__name__)

HEADER = ["group", "n", "name", "value_re", "value_im", "expected_re", "expected_im", "residual", "tolerance", "status"]


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("series-check", help="functional equations and averaging identities of the circle motion")
    add_degree_flag(parser)
    parser.add_argument("--n-list", metavar="N1,N2,...", help="periods to average over (default: 3,4 for d=2, else 2,3)")
    parser.add_argument("--alpha", metavar="A1,A2,...", help="alphas for the second-order average, each 0 < |alpha| <= 0.05")
    parser.add_argument("--D", type=float, default=1.0, help="exponent D of the second-order average (default: %(default)s)")
    parser.add_argument("--K", type=int, default=settings.series.truncation_K, help="series truncation (default: %(default)s)")
    add_records_flag(parser)
    parser.set_defaults(handler=run_series_check, command_name="series-check")


def _row(group: str, n: str, record: IdentityRecord) -> List[str]:
    return [
        group,
        n,
        record.name,
        f"{record.value_re:.15g}",
        f"{record.value_im:.15g}",
        f"{record.expected_re:.15g}",
        f"{record.expected_im:.15g}",
        f"{record.residual:.3e}",
        f"{record.tolerance:.1e}",
        "pass" if record.passed else "FAIL",
    ]


def _sweep_records(config: RunConfig, n: int) -> List[IdentityRecord]:
    """Log-log slopes of both discrepancies, their fitted |alpha|^3 constant and the Richardson coefficient."""
    sweep = series_service.second_order_sweep(config.d, n, D=config.D, alphas=config.alphas)
    return [
        IdentityRecord.create("discrepancy slope (fixed points)", sweep.slope_fixed_points, 3.0, 0.3),
        # reported only; the circle-motion side carries the truncation error of phi_alpha
        IdentityRecord.create("discrepancy slope (motion)", sweep.slope_motion, 3.0, math.inf),
        IdentityRecord.create("fitted constant c in discrepancy <= c |alpha|^3", sweep.fitted_constant, 0.0, math.inf),
        IdentityRecord.create(
            "|alpha|^2 coefficient (sweep)",
            sweep.quadratic_coefficient,
            sweep.expected_coefficient,
            0.05 * sweep.expected_coefficient,
        ),
    ]


def run_series_check(config: RunConfig) -> int:
    cfg = SeriesConfig.for_degree(config.d, config.K)
    q = cfg.q
    rows: List[List[str]] = []
    failures = 0

    def run_item(group: str, n: str, compute: Callable[[], List[IdentityRecord]]) -> None:
        nonlocal failures
        try:
            records = compute()
        except PottsError as e:
            logger.error(f"{group} (n={n}) failed: {e}")
            rows.append([group, n, str(e), "", "", "", "", "", "", "error"])
            failures += 1
            return
        for record in records:
            rows.append(_row(group, n, record))
            if not record.passed:
                failures += 1

    run_item(
        "functional-equation",
        "",
        lambda: [
            IdentityRecord.create("u1(z^q) - q u1(z) = -q z", series_service.u1_equation_residual(cfg), 0.0, 1e-10),
            IdentityRecord.create("u2 equation", series_service.u2_equation_residual(cfg), 0.0, 1e-10),
            IdentityRecord.create("reduced u2 equation", series_service.reduced_equation_residual(cfg), 0.0, 1e-10),
            IdentityRecord.create("formal solution l=2", series_service.formal_solution_residual(2, cfg), 0.0, 1e-10),
            IdentityRecord.create("formal solution l=-1", series_service.formal_solution_residual(-1, cfg), 0.0, 1e-10),
        ],
    )

    for n in config.series_periods:
        label = str(n)

        def modular(n=n) -> List[IdentityRecord]:
            report = series_service.modular_lemma_check(q, n, 3 * n)
            return [IdentityRecord.create(f"modular lemma q={q} m<={3 * n}", float(report.passed), 1.0, 0.0)]

        run_item("modular-lemma", label, modular)
        if n >= 2:
            run_item("appendix-sum", label, lambda n=n: series_service.appendix_sums(q, n, cfg))
        run_item("pointwise", label, lambda n=n: series_service.pointwise_tables(q, n, cfg))
        run_item("vanishing", label, lambda n=n: series_service.vanishing_averages(q, n, cfg))
        for alpha in config.alphas:
            run_item(
                "second-order",
                label,
                lambda n=n, alpha=alpha: [series_service.second_order_coefficient(config.d, n, config.D, alpha)],
            )
        if len(config.alphas) >= 3:
            run_item("second-order-sweep", label, lambda n=n: _sweep_records(config, n))

    emit_records(config, HEADER, rows, "identity")
    summary(f"series-check d={config.d}: {len(rows)} record(s), {failures} failure(s)")
    return EXIT_NUMERICAL if failures else EXIT_OK
