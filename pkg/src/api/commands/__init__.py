"""One module per subcommand; each exposes ``register`` and ``handle``."""

from src.api.commands import count, evaluate, init, plan, preprocess, quantize, run, schedule

COMMANDS = {
    "init": init,
    "preprocess": preprocess,
    "run": run,
    "quantize": quantize,
    "plan": plan,
    "schedule": schedule,
    "count": count,
    "eval": evaluate,
}

__all__ = ["COMMANDS"]
