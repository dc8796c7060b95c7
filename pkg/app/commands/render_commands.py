import argparse
import logging

from app.commands.base import EXIT_OK, add_budget_flags, add_degree_flag, add_lambda_flags, summary
from app.config import settings
from app.schemas.command import RunConfig
from app.schemas.raster import PALETTES, RasterSpec
from app.services.render_service import render_service
from app.storages import get_storage_provider

logger = logging.getLogger(__name__)


def _add_raster_flags(parser: argparse.ArgumentParser, default_name: str) -> None:
    parser.add_argument("--window", metavar="RE0,RE1,IM0,IM1", help="plane rectangle")
    parser.add_argument("--width", type=int, default=settings.render.size, help="pixels per row (default: %(default)s)")
    parser.add_argument("--height", type=int, default=settings.render.size, help="rows (default: %(default)s)")
    parser.add_argument("--palette", default=settings.render.palette, choices=PALETTES, help="(default: %(default)s)")
    parser.add_argument("--name", default=default_name, help="output base name (default: %(default)s)")


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("render-julia", help="basin raster of the dynamical plane for one lambda")
    add_degree_flag(parser)
    add_lambda_flags(parser)
    _add_raster_flags(parser, "julia")
    add_budget_flags(parser)
    parser.set_defaults(handler=run_render, command_name="render-julia")

    parser = subparsers.add_parser("render-param", help="capture-depth raster of the lambda plane")
    add_degree_flag(parser)
    _add_raster_flags(parser, "parameter")
    add_budget_flags(parser)
    parser.set_defaults(handler=run_render, command_name="render-param")


def raster_spec(config: RunConfig) -> RasterSpec:
    re_min, re_max, im_min, im_max = config.render_window
    lam_re, lam_im = config.lambdas[0] if config.lambdas else (0.0, 0.0)
    return RasterSpec(
        re_min=re_min,
        re_max=re_max,
        im_min=im_min,
        im_max=im_max,
        width=config.width,
        height=config.height,
        mode="dynamical" if config.command == "render-julia" else "parameter",
        d=config.d,
        lam_re=lam_re,
        lam_im=lam_im,
        cfg=config.basin_config,
    )


def run_render(config: RunConfig) -> int:
    spec = raster_spec(config)
    grid = render_service.render(spec, workers=config.workers)
    response = render_service.write_image(grid, config.palette, config.name, get_storage_provider(config.storage))
    summary(f"{spec.mode} raster {spec.width}x{spec.height}: {response.image_path}, {response.metadata_path}")
    return EXIT_OK
