"""``tinymyo count``: MAC table and parameter report."""

from __future__ import annotations

import argparse
from pathlib import Path

from injector import Injector

from src.api.commands.common import add_config_arguments, emit
from src.app.application.encoder import count_parameters, expected_parameters
from src.app.application.sched import count_macs, mac_table
from src.app.application.sched.macs import millions
from src.app.domain.config import RunConfig
from src.app.domain.errors import EXIT_OK
from src.app.domain.model.types import ParamReport
from src.app.domain.sched.types import MacBreakdown
from src.app.infrastructure.storage import load_model

HELP = "Print the per-block MAC table and the parameter report"


def register(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--weights", type=Path, help="Count the tensors of this container instead of the config"
    )
    parser.add_argument(
        "--with-heads", action="store_true", help="Include the classification and regression heads"
    )
    parser.add_argument("--json", action="store_true", help="Emit JSON instead of a table")
    add_config_arguments(parser)


def format_table(breakdown: MacBreakdown, params: ParamReport) -> str:
    rows = mac_table(breakdown)
    width = max(len(str(r["component"])) for r in rows)
    lines = [f"{'Component':<{width}}  {'MACs':>6}  {'Share':>5}"]
    lines += [f"{r['component']:<{width}}  {r['macs_m']:>6}  {r['share']:>5}" for r in rows]
    lines.append(f"{'Per block':<{width}}  {millions(breakdown.block_total):>5}M")
    lines.append(f"{'Model':<{width}}  {millions(breakdown.model_total):>5}M")
    lines.append("")
    lines += [f"{name:<{width}}  {value:>9,}" for name, value in params.to_dict().items()]
    return "\n".join(lines) + "\n"


def handle(args: argparse.Namespace, injector: Injector) -> int:
    config = injector.get(RunConfig)
    if args.weights is not None:
        bundle = load_model(args.weights)
        cfg = bundle.config
        params = count_parameters(bundle.weights, bundle.decoder, bundle.classifier, bundle.regression)
    else:
        cfg = config.model
        params = expected_parameters(cfg, config.head if args.with_heads else None)
    breakdown = count_macs(cfg, config.head.num_classes)

    if args.json:
        emit(
            {
                "macs": mac_table(breakdown),
                "block_macs": breakdown.block_total,
                "model_macs": breakdown.model_total,
                "model_flops": breakdown.model_flops,
                "parameters": params.to_dict(),
            },
            None,
        )
    else:
        print(format_table(breakdown, params), end="")
    return EXIT_OK
