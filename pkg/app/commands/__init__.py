import argparse

from . import classify_commands, dimension_commands, render_commands, series_commands


def register_commands(subparsers: argparse._SubParsersAction) -> None:
    for module in (classify_commands, render_commands, dimension_commands, series_commands):
        module.register(subparsers)


__all__ = [
    "register_commands",
    "classify_commands",
    "dimension_commands",
    "render_commands",
    "series_commands",
]
