"""Argument parser for the ``tinymyo`` command."""

from __future__ import annotations

import argparse

from src.api.commands import COMMANDS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tinymyo",
        description="EMG foundation-model inference engine: preprocessing, FP32 and int8 "
        "inference, arena planning, and tiling schedules",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for info logs, -vv for debug logs"
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, module in COMMANDS.items():
        sub = subparsers.add_parser(name, help=module.HELP, description=module.HELP)
        module.register(sub)
        sub.set_defaults(handler=module.handle)
    return parser


__all__ = ["build_parser"]
