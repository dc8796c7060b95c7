import argparse
import logging
import sys
from typing import List, Optional

from app.commands import register_commands
from app.commands.base import EXIT_NUMERICAL, EXIT_USAGE, build_config
from app.config import settings
from app.exceptions import PottsError
from app.storages import reset_storage_provider

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="potts",
        description="Dynamics, parameter space and Hausdorff dimension of the diamond hierarchical Potts maps",
    )
    parser.add_argument("--workers", type=int, default=settings.workers, help="worker processes; 1 runs serially (default: %(default)s)")
    parser.add_argument("--log-level", default=settings.log_level, help="logging level (default: %(default)s)")
    parser.add_argument("--output-dir", default=settings.storage.output_dir, help="output directory, also POTTS_OUTPUT_DIR (default: %(default)s)")
    parser.add_argument("--storage", default=settings.storage.storage_provider, help="storage provider (default: %(default)s)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_commands(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # --help exits 0, argparse usage errors exit 2
        return 0 if e.code in (0, None) else EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format=settings.log_format,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )

    try:
        config = build_config(args.command_name, args)
        settings.workers = config.workers
        settings.storage.output_dir = config.output_dir or settings.storage.output_dir
        reset_storage_provider()
        logger.info(f"=== potts {config.command} (workers={config.workers}) ===")
        return args.handler(config)
    except PottsError as e:
        print(e.detail.render(), file=sys.stderr)
        if e.exit_code == EXIT_USAGE:
            parser.print_usage(sys.stderr)
        else:
            logger.error(f"{args.command} failed: {e}")
        if e.details:
            logger.debug(f"Error details: {e.details}")
        return e.exit_code
    except Exception as e:
        logger.error(f"Internal failure: {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
