"""``tinymyo schedule``: tile, simulate, and audit one inference."""

from __future__ import annotations

import argparse
import logging
from dataclasses import asdict
from pathlib import Path

from injector import Injector

from src.api.commands.common import add_config_arguments, add_output_argument, emit
from src.app.application.sched import (
    audit_schedule,
    count_macs,
    plan_tiles,
    simulate,
    summarize_schedule,
)
from src.app.domain.config import RunConfig
from src.app.domain.errors import EXIT_NUMERIC, EXIT_OK
from src.app.domain.sched.types import MemoryHierarchy
from src.app.infrastructure.storage import schedule_to_dict, tile_plan_to_dict, write_json
from src.app.infrastructure.trace import write_chrome_trace

logger = logging.getLogger(__name__)

HELP = "Tile every GEMM, simulate the double-buffered schedule, and audit it"


def register(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--schedule-out", type=Path, help="Write the full event list as JSON")
    parser.add_argument("--trace", type=Path, help="Write a Chrome trace-event JSON file")
    add_config_arguments(parser)
    add_output_argument(parser)


def handle(args: argparse.Namespace, injector: Injector) -> int:
    config = injector.get(RunConfig)
    hier = injector.get(MemoryHierarchy)

    plan = plan_tiles(config.model, hier)
    macs = count_macs(config.model, config.head.num_classes)
    schedule = simulate(plan, hier, macs)
    problems = audit_schedule(schedule, plan, hier)
    report = summarize_schedule(plan, macs, schedule, hier)

    if args.schedule_out is not None:
        write_json(args.schedule_out, schedule_to_dict(schedule))
    if args.trace is not None:
        write_chrome_trace(args.trace, schedule, hier.clock_hz)

    emit(
        {
            "report": asdict(report),
            "compute_cycles": schedule.compute_cycles,
            "transfer_cycles": schedule.transfer_cycles,
            "events": len(schedule.events),
            "tiling": tile_plan_to_dict(plan),
            "audit": problems,
        },
        args.out,
    )
    if problems:
        logger.error(f"❌ Schedule audit found {len(problems)} problems")
        return EXIT_NUMERIC
    return EXIT_OK
