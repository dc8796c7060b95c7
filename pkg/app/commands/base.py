import argparse
import logging
import sys
from typing import Iterable, Optional, Sequence

from app.config import settings
from app.schemas.command import RunConfig
from app.storages import get_storage_provider, render_records
from app.utils.helper import load_lambda_list, parse_complex, parse_float_list, parse_float_tuple, parse_int_list

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INDETERMINATE = 2
EXIT_NUMERICAL = 3


def add_degree_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-d", type=int, default=2, help="degree d >= 2 (default: %(default)s)")


def add_lambda_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lambda", dest="lambda_values", action="append", metavar="RE,IM", help="parameter lambda; repeatable")
    parser.add_argument("--lambda-file", help="file with one 're,im' per line, '#' starts a comment")


def add_budget_flags(parser: argparse.ArgumentParser) -> None:
    basin = settings.basin
    parser.add_argument("--max-iter", type=int, default=basin.max_iter, help="U-iteration budget (default: %(default)s)")
    parser.add_argument("--attract-eps", type=float, default=basin.attract_eps, help="trap radius around 1 (default: %(default)s)")
    parser.add_argument("--escape-R", type=float, default=basin.escape_R, help="escape radius (default: %(default)s)")


def add_records_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--records", metavar="NAME", help="write records to <output-dir>/records/NAME.tsv instead of stdout")


def build_config(command: str, args: argparse.Namespace) -> RunConfig:
    """Turn parsed arguments into a validated RunConfig before any computation."""
    options = {
        "command": command,
        "workers": args.workers,
        "log_level": args.log_level,
        "output_dir": args.output_dir,
        "storage": args.storage,
    }
    if hasattr(args, "d"):
        options["d"] = args.d
    if hasattr(args, "lambda_values"):
        options["lambdas"] = [(z.real, z.imag) for z in load_lambda_list(args.lambda_values, args.lambda_file)]
    for name in ("n", "grid", "width", "height", "palette", "name", "records", "max_iter", "attract_eps",
                 "escape_R", "K", "D", "deviation_samples"):
        if hasattr(args, name):
            options[name] = getattr(args, name)
    if getattr(args, "seed", None):
        z = parse_complex(args.seed, "--seed")
        options["seed"] = (z.real, z.imag)
    if getattr(args, "window", None):
        options["window"] = parse_float_tuple(args.window, 4, "--window")
    if getattr(args, "interval", None):
        options["interval"] = parse_float_tuple(args.interval, 2, "--interval")
    if getattr(args, "n_list", None):
        options["n_list"] = parse_int_list(args.n_list, "--n-list")
    if getattr(args, "alpha", None):
        options["alphas"] = parse_float_list(args.alpha, "--alpha")
    return RunConfig.build(**options)


def emit_records(config: RunConfig, header: Sequence[str], rows: Iterable[Sequence[str]], name: str) -> Optional[str]:
    """Records go to standard output unless --records names a file."""
    if config.records:
        path = get_storage_provider(config.storage).save_records(header, rows, config.records, settings.records_version)
        logger.info(f"Wrote {name} records to {path}")
        return path
    sys.stdout.write(render_records(header, rows, settings.records_version))
    sys.stdout.flush()
    return None


def summary(message: str) -> None:
    """Human-readable lines go to the diagnostic stream."""
    print(message, file=sys.stderr)
