"""``tinymyo plan``: liveness analysis and a verified static arena."""

from __future__ import annotations

import argparse
import logging
from dataclasses import asdict
from pathlib import Path

from injector import Injector

from src.api.commands.common import add_config_arguments, add_output_argument, emit
from src.app.application.planner import (
    build_inference_graph,
    compute_liveness,
    liveness_lower_bound,
    plan_arena,
    unshared_bytes,
    verify_plan,
)
from src.app.domain.config import PlannerConfig, RunConfig
from src.app.domain.errors import EXIT_OK, EXIT_VALIDATION
from src.app.infrastructure.storage import graph_from_dict, plan_to_dict, read_json

logger = logging.getLogger(__name__)

HELP = "Plan a static tensor arena for an op graph (the inference graph by default)"


def register(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "graph", type=Path, nargs="?", help="Op graph JSON; omitted means the model's inference graph"
    )
    parser.add_argument("--alignment", type=int, help="Offset alignment in bytes (power of two)")
    parser.add_argument(
        "--merge-inplace", action="store_true", help="Share storage between in-place outputs and inputs"
    )
    add_config_arguments(parser)
    add_output_argument(parser)


def handle(args: argparse.Namespace, injector: Injector) -> int:
    config = injector.get(RunConfig)
    planner = injector.get(PlannerConfig)
    alignment = args.alignment or planner.alignment
    merge = args.merge_inplace or planner.merge_inplace

    if args.graph is not None:
        graph = graph_from_dict(read_json(args.graph))
    else:
        graph = build_inference_graph(config.model, config.head.num_classes)

    lifetimes = compute_liveness(graph, merge_inplace=merge)
    plan = plan_arena(lifetimes, alignment)
    violations = verify_plan(lifetimes, plan)
    baseline = unshared_bytes(compute_liveness(graph), alignment)

    document = plan_to_dict(plan) | {
        "lower_bound_bytes": liveness_lower_bound(lifetimes),
        "unshared_bytes": baseline,
        "ratio_to_unshared": plan.arena_bytes / baseline if baseline else 0.0,
        "merge_inplace": merge,
        "violations": [asdict(v) for v in violations],
    }
    emit(document, args.out)
    if violations:
        logger.error(f"❌ Arena plan has {len(violations)} violations")
        return EXIT_VALIDATION
    return EXIT_OK
