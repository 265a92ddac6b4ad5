"""Command line interface.

    mottlight <subcommand> [--scenario FILE|NAME] [--out DIR] [--threads N] [--seed S]
    mottlight --list-scenarios

Subcommands are the experiment kinds (eit-scan, store, decay-scan, ramsey,
deflect). Without --scenario the subcommand runs with the default
parameters of its kind.

Exit codes:
    0  success
    1  other library error
    2  usage error (argparse)
    3  scenario parse error
    4  numerical failure
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from mottlight import __version__, create_runner
from mottlight.core.exceptions import (
    ConfigurationError,
    MottLightException,
    NumericalError,
    ScenarioParseError,
    ScenarioRunError,
)
from mottlight.scenario.parser import (
    ExperimentKind,
    list_scenarios,
    load_bundled,
    parse_scenario,
    resolve_scenario,
)

logger = logging.getLogger("mottlight.cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 3
EXIT_NUMERIC = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mottlight",
        description="Simulate EIT, light storage and deflection in a Mott insulator.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--list-scenarios", action="store_true", help="print the bundled scenarios and exit"
    )
    parser.add_argument(
        "--config",
        default="production",
        choices=("development", "testing", "production"),
        help="tool configuration (logging, grid defaults)",
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario file or bundled scenario name")
    common.add_argument("--out", help="output directory (default: OUTPUT_DIR/<name>)")
    common.add_argument("--threads", type=int, help="worker threads for scan points")
    common.add_argument("--seed", type=int, help="RNG seed for noisy-fit analyses")

    subparsers = parser.add_subparsers(dest="command", metavar="subcommand")
    for kind in ExperimentKind:
        subparsers.add_parser(kind.value, parents=[common], help=f"run a {kind.value} scenario")
    return parser


def _load(command: str, reference: Optional[str]):
    kind = ExperimentKind(command)
    if reference is None:
        return parse_scenario(f"[scenario]\nkind = {kind.value}\n", name=kind.value)
    config = resolve_scenario(reference)
    if config.kind is not kind:
        raise ScenarioParseError(
            f"scenario '{config.name}' is a {config.kind.value} scenario, "
            f"not {kind.value}",
            section="scenario",
            key="kind",
        )
    return config


def _print_scenarios():
    for name in list_scenarios():
        try:
            kind = load_bundled(name).kind.value
        except ScenarioParseError as e:
            kind = f"invalid ({e})"
        print(f"{name:12s} {kind}")


def _print_report(report, out_dir):
    print(f"{report.name} ({report.kind})")
    for key, value in report.headline.items():
        if isinstance(value, float):
            print(f"  {key}: {value:.6g}")
        elif not isinstance(value, list):
            print(f"  {key}: {value}")
    print(f"  outputs: {out_dir}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.list_scenarios:
        _print_scenarios()
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2

    try:
        if args.threads is not None and args.threads < 1:
            parser.error("--threads must be >= 1")
        runner = create_runner(args.config, threads=args.threads)
        config = _load(args.command, args.scenario)
        if args.seed is not None:
            config = config.with_seed(args.seed)
        out_dir = Path(args.out) if args.out else Path(runner.tool_config.OUTPUT_DIR) / config.name
        report = runner.run(config, out_dir)
    except ScenarioParseError as e:
        logger.error("Scenario error: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ScenarioRunError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC if isinstance(e.cause, NumericalError) else EXIT_ERROR
    except ConfigurationError as e:
        logger.error("Configuration error: %s", e)
        print(f"error: configuration: {e}", file=sys.stderr)
        return EXIT_ERROR
    except MottLightException as e:
        logger.error("Run failed: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR

    _print_report(report, out_dir)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
