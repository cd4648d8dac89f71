"""Command line: ``hjbandit <command> [--config FILE] [-v]``.

Exit status is 0 on success, 2 for configuration errors and 3 for
numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from hjbandit import __version__
from hjbandit.errors import BanditError

from .commands import (
    EVAL_POLICIES,
    cmd_eval_policy,
    cmd_minimax,
    cmd_simulate,
    cmd_solve,
)
from .config import ExperimentConfig, load_config, parse_config
from .emit import ResultWriter

log = logging.getLogger(__name__)

__all__ = ["ExperimentConfig", "build_parser", "load_config", "main", "parse_config"]

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# subcommands that are `solve` for a fixed problem variant
_VARIANTS = {
    "batched": "batched",
    "best-arm": "best-arm",
    "discounted": "discounted",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hjbandit",
        description="Bandit experiments in the diffusion limit: PDE solves, "
        "policy evaluation, Monte-Carlo checks and the minimax search.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-c", "--config", help="YAML experiment file (default: built-in defaults)"
    )
    common.add_argument(
        "-o", "--output", help="output directory, overrides output.directory"
    )
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="more logging; repeat for debug output",
    )

    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True
    commands.add_parser(
        "solve", parents=[common], help="solve the configured problem variant"
    )
    evaluate = commands.add_parser(
        "eval-policy", parents=[common], help="risk of a policy against the optimum"
    )
    evaluate.add_argument("--policy", choices=EVAL_POLICIES, default="thompson")
    evaluate.add_argument(
        "--delta", type=float, default=7.8, help="UCB exploration weight"
    )
    evaluate.add_argument(
        "--p", type=float, default=0.5, help="pull probability of `constant`"
    )
    simulate = commands.add_parser(
        "simulate", parents=[common], help="Monte-Carlo Bayes risk over horizons"
    )
    simulate.add_argument(
        "--ucb-delta", type=float, help="also simulate UCB with this weight"
    )
    commands.add_parser(
        "minimax", parents=[common], help="search the least-favourable prior"
    )
    for name in _VARIANTS:
        commands.add_parser(name, parents=[common], help=f"solve the {name} problem")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def _run(args: argparse.Namespace) -> Dict[str, Any]:
    config = load_config(args.config)
    directory = args.output or config.output_directory()
    out = ResultWriter(directory, config.digest())
    if args.command == "solve":
        summary = cmd_solve(config, out)
    elif args.command in _VARIANTS:
        summary = cmd_solve(config, out, problem=_VARIANTS[args.command])
    elif args.command == "eval-policy":
        summary = cmd_eval_policy(
            config, out, policy=args.policy, delta=args.delta, p=args.p
        )
    elif args.command == "simulate":
        summary = cmd_simulate(config, out, ucb_delta=args.ucb_delta)
    else:
        summary = cmd_minimax(config, out)
    log.info("Wrote %d file(s) to %s", len(out.written), directory)
    return summary


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        _run(args)
    except BanditError as exc:
        log.error("%s", exc)
        return exc.exit_code
    except OSError as exc:
        log.error("Cannot write results: %s", exc)
        return 2
    return 0
