"""Command-line entry point for the experiment harness."""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from spacetime_qc.config import Config, load_config
from spacetime_qc.harness.export import SERIES_COLUMNS, emit_plot_data
from spacetime_qc.harness.schemas import (
    ExperimentConfig,
    ExperimentKind,
    config_from_assignments,
    parse_assignments,
)
from spacetime_qc.utils.logger import get_logger, setup_logging

EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_TOLERANCE = 2

DESCRIPTIONS = {
    ExperimentKind.TELEPORT_VERIFY: "Gate teleportation against a dense oracle",
    ExperimentKind.SPACETIME_RANDOM: "Random-circuit spacetime conversion",
    ExperimentKind.SPACETIME_CLIFFORD: "Clifford spacetime conversion",
    ExperimentKind.SHADOW_RUN: "Ancilla-assisted shadow estimation",
    ExperimentKind.DESIGN_CHECK: "Design and projected-ensemble identities",
    ExperimentKind.ACCDIM: "Accessible-dimension rank sweep",
    ExperimentKind.BOUNDS_TABLE: "Complexity bound tables",
}


class UsageErrorParser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = UsageErrorParser(description="Spacetime conversion and shadow experiments")
    parser.add_argument(
        "--check-config",
        dest="show_settings",
        action="store_true",
        help="Print the environment configuration and exit",
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Experiment config file (key = value lines)")
    common.add_argument("--seed", type=int, help="Master seed (u64)")
    common.add_argument("--workers", type=int, help="Worker threads")
    common.add_argument("--out", help="Append the result record to this NDJSON file")
    common.add_argument("--emit-plot", metavar="SERIES", help=f"Print a plot table: {', '.join(SERIES_COLUMNS)}")
    common.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override one config field (repeatable)",
    )
    common.add_argument("--check-config", action="store_true", help="Print the resolved experiment config and exit")

    subparsers = parser.add_subparsers(dest="kind", metavar="EXPERIMENT", parser_class=UsageErrorParser)
    for kind in ExperimentKind:
        subparsers.add_parser(kind.value, parents=[common], help=DESCRIPTIONS[kind])
    return parser


def resolve_experiment(args: argparse.Namespace, settings: Config) -> ExperimentConfig:
    """Merge config file, environment defaults, --param overrides and flags."""
    raw = {"workers": str(settings.harness.workers), "sample_chunk": str(settings.harness.sample_chunk)}
    if args.config:
        raw.update(parse_assignments(Path(args.config).read_text().splitlines()))
    if raw.setdefault("kind", args.kind) != args.kind:
        raise ValueError(f"Config file is for {raw['kind']!r}, not {args.kind!r}")
    raw.update(parse_assignments(args.param))
    if args.seed is not None:
        raw["seed"] = str(args.seed)
    if args.workers is not None:
        raw["workers"] = str(args.workers)
    return config_from_assignments(raw)


def resolve_output(path: str, settings: Config) -> Path:
    """Bare file names go to the results directory."""
    out = Path(path)
    if out.parent == Path("."):
        return Path(settings.harness.results_dir) / out
    return out


def print_settings(settings: Config) -> None:
    print("=" * 60)
    print("CONFIGURATION")
    print("=" * 60)
    print(f"  Max dense qubits: {settings.simulation.max_dense_qubits}")
    print(f"  Validate gates: {settings.simulation.validate_gates}")
    print(f"  Unitarity tol: {settings.simulation.unitarity_tol}")
    print(f"  Workers: {settings.harness.workers}")
    print(f"  Results dir: {settings.harness.results_dir}")
    print(f"  Sample chunk: {settings.harness.sample_chunk}")
    print(f"  Log level: {settings.logging.level}")
    print("=" * 60)


def print_experiment(experiment: ExperimentConfig) -> None:
    print("=" * 60)
    print(f"EXPERIMENT {experiment.kind.value}")
    print("=" * 60)
    for line in experiment.to_text().splitlines():
        print(f"  {line}")
    print(f"  digest = {experiment.digest()}")
    print("=" * 60)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    # Load configuration
    settings = load_config()

    # Setup logging
    setup_logging(
        level=settings.logging.level,
        format_type=settings.logging.format,
        file_path=settings.logging.file_path,
    )

    logger = get_logger(__name__)

    if args.kind is None:
        if args.show_settings:
            print_settings(settings)
            return EXIT_PASS
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    if args.emit_plot and args.emit_plot not in SERIES_COLUMNS:
        print(f"error: unknown series {args.emit_plot!r}; choose from {', '.join(SERIES_COLUMNS)}", file=sys.stderr)
        return EXIT_USAGE

    try:
        experiment = resolve_experiment(args, settings)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    if args.check_config:
        print_experiment(experiment)
        return EXIT_PASS

    from spacetime_qc.harness.runner import run
    from spacetime_qc.harness.storage import append_record

    try:
        record = run(experiment)
    except ValueError as e:
        logger.error("experiment rejected", error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    if args.out:
        append_record(resolve_output(args.out, settings), record)
    if args.emit_plot:
        sys.stdout.write(emit_plot_data(record, args.emit_plot))
    elif not args.out:
        print(record.to_json_line())

    if not record.passed:
        for failure in record.failures:
            logger.warning("tolerance failure", detail=failure)
        return EXIT_TOLERANCE
    return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
