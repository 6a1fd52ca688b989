"""
Command-line entry point
Location: cli/main.py

    python -m cli.main geodesic --surface data/square_torus.hts --from P0:0.1,0.1 --to P0:0.4,0.5 --json

Exit codes: 0 pass or computed, 1 failed verdict, 2 precondition error,
3 I/O or parse error.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from pydantic import ValidationError  # noqa: E402

from agents.coordinator import Coordinator  # noqa: E402
from cli.routes import SUBCOMMANDS, exit_code_for, route_inputs  # noqa: E402
from cli.schema import ErrorEnvelope, OutputMode, RunConfig  # noqa: E402
from config import CLI_CONFIG  # noqa: E402
from utils.logger import configure_logging  # noqa: E402
from utils.report_writer import dumps_report  # noqa: E402


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """--json/--svg/--seed/--tol, accepted before or after the subcommand."""
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--json", action="store_true", default=default(False), help="write the JSON report to stdout")
    parser.add_argument("--svg", metavar="PATH", default=default(None), help="write the figure to PATH")
    parser.add_argument("--seed", type=int, default=default(CLI_CONFIG["default_seed"]), help="random seed")
    parser.add_argument("--tol", dest="tolerance", type=float, default=default(None), help="verdict tolerance")
    parser.add_argument("-v", "--verbose", action="store_true", default=default(False), help="debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hts", description="Half-translation surface workbench")
    _global_options(parser, suppress=False)
    subparsers = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    for name, route in SUBCOMMANDS.items():
        sub = subparsers.add_parser(name, help=route.help, description=route.help)
        for option in route.options:
            sub.add_argument(*option.flags, dest=option.dest, help=option.help, **option.kwargs)
        _global_options(sub, suppress=True)

    return parser


def _output_mode(args: argparse.Namespace) -> OutputMode:
    if args.json:
        return OutputMode.json
    return OutputMode.svg if args.svg else OutputMode.text


def _print_text(outcome: dict) -> None:
    verdict = outcome["verdict"]
    label = "computed" if verdict is None else ("pass" if verdict else "FAIL")
    print(f"{outcome['subcommand']}: {label}")
    print(dumps_report(outcome["report"]), end="")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging("DEBUG" if args.verbose else None)

    try:
        config = RunConfig(
            subcommand=args.subcommand,
            inputs=route_inputs(vars(args)),
            output_mode=_output_mode(args),
            svg=args.svg,
            seed=args.seed,
            tolerance=args.tolerance,
        )
    except ValidationError as e:
        parser.error(e.errors()[0]["msg"])

    coordinator = Coordinator()
    outcome = coordinator.execute_pipeline(config)
    code = exit_code_for(outcome)

    if outcome["status"] != "COMPLETED":
        error = ErrorEnvelope(
            subcommand=config.subcommand,
            failed_at=outcome["failed_at"],
            error=str(outcome["error"]),
            error_type=outcome["error_type"],
            hypothesis=outcome.get("hypothesis"),
            exit_code=code,
        )
        if config.output_mode == OutputMode.json:
            print(dumps_report(error), end="")
        print(f"error [{error.error_type}] at {error.failed_at}: {error.error}", file=sys.stderr)
        return code

    if config.output_mode == OutputMode.json:
        print(dumps_report(coordinator.envelope(outcome)), end="")
    elif config.output_mode == OutputMode.svg:
        print(outcome["svg"] or "no figure for this subcommand")
    else:
        _print_text(outcome)
    return code


if __name__ == "__main__":
    sys.exit(main())
