"""
Main entry point for relscat.

Subcommands:
    run <config>        run one experiment recipe and write its outputs
    list                print the experiment registry
    dump-kernel <kind>  write the radial profile of a free kernel as CSV

Exit status is 0 when the experiment passes, 2 when it runs but misses its
acceptance criterion, and 1 on configuration, numerical or I/O errors.
"""

import argparse
import contextlib
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import scipy.fft

from .core.config import ConfigManager, ExperimentConfig, XDGPaths, resolve_threads
from .core.error_handler import ConfigError, DomainError, RelscatError, get_error_handler
from .core.logging_manager import LogLevel, get_logging_manager
from .experiments.base import ExperimentResult
from .experiments.manager import get_experiment_manager
from .spectral.field_io import write_field, write_radial_csv, write_table
from .spectral.grid import make_grid
from .spectral.kernel_ops import KINDS, RadialKernel, radial_profile
from .spectral.potential import Potential

EXIT_PASS = 0
EXIT_ERROR = 1
EXIT_FAIL = 2

logger = logging.getLogger("relscat.main")


def parse_args(args: List[str]) -> dict:
    """
    Parse command line arguments.

    Args:
        args: Command line arguments, program name first

    Returns:
        Dictionary of parsed arguments
    """
    parser = argparse.ArgumentParser(
        prog="relscat",
        description="relscat - numerics for the massless relativistic Schrodinger operator",
    )

    # Logging options, accepted after every subcommand
    logging_options = argparse.ArgumentParser(add_help=False)
    log_group = logging_options.add_argument_group("Logging Options")
    log_group.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Set the log level",
    )
    log_group.add_argument(
        "--debug", action="store_true", help="Enable debug mode globally"
    )
    log_group.add_argument(
        "--debug-component",
        action="append",
        help="Enable debug mode for a component, e.g. spectral.scattering "
        "(can be used multiple times)",
    )

    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser(
        "run", parents=[logging_options], help="Run an experiment recipe"
    )
    run.add_argument("config", help="Path to the TOML (or JSON) recipe")
    run.add_argument("--out", help="Output directory (default: XDG data dir)")
    run.add_argument("--threads", type=int, help="Cap on FFT worker threads")

    commands.add_parser(
        "list", parents=[logging_options], help="List the available experiments"
    )

    dump = commands.add_parser(
        "dump-kernel",
        parents=[logging_options],
        help="Write a radial kernel profile as CSV",
    )
    dump.add_argument("kind", choices=KINDS)
    dump.add_argument("--lambda", dest="lam", type=float, default=0.0)
    dump.add_argument("--t", type=complex, default=0.0)
    dump.add_argument("--sign", choices=["+", "-"], default="+")
    dump.add_argument("--rmax", type=float, default=10.0)
    dump.add_argument("--points", type=int, default=200)
    dump.add_argument("--out", help="CSV path (default: stdout)")

    return vars(parser.parse_args(args[1:]))


def _setup_logging(args: Dict[str, Any], config: Optional[ExperimentConfig] = None) -> None:
    """Initialize logging from the recipe's logging block, overridden by flags."""
    settings = config.logging if config is not None else None
    level_name = args.get("log_level") or (settings.log_level if settings else "INFO")
    debug_mode = bool(args.get("debug")) or bool(settings and settings.debug_mode)

    logging_manager = get_logging_manager()
    logging_manager.initialize(
        log_level=LogLevel.from_name(level_name),
        debug_mode=debug_mode,
        log_to_file=bool(settings and settings.log_to_file),
    )
    components = list(settings.debug_components) if settings else []
    components += args.get("debug_component") or []
    for component in components:
        logging_manager.enable_debug_mode(component)


def _check_potential(config: ExperimentConfig) -> None:
    """Refuse potentials that are not contained in the inner half of the box."""
    grid = make_grid(config.grid.n, config.grid.L)
    V = Potential.from_config(config.potential)
    outside = V.mass_outside(grid, grid.L / 2.0)
    if outside > config.tolerances.support_mass:
        raise DomainError(
            f"potential carries {outside:.3e} of its mass outside |x| > L/2 = "
            f"{grid.L / 2.0}; enlarge L or shrink the potential"
        )


def write_outputs(result: ExperimentResult, config: ExperimentConfig, out_dir: Path) -> Path:
    """Write summary.json, the CSV tables and the binary fields of a run."""
    out_dir.mkdir(parents=True, exist_ok=True)
    for stem, columns in result.tables.items():
        write_table(out_dir / f"{stem}.csv", columns)
    for stem, f in result.fields.items():
        write_field(out_dir / f"{stem}.rsc", f)
    summary = out_dir / "summary.json"
    summary.write_text(
        json.dumps(result.summary(config), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return summary


def run_command(args: Dict[str, Any]) -> int:
    error_handler = get_error_handler()
    config_manager = ConfigManager()
    try:
        config = config_manager.load(args["config"])
    except ConfigError as e:
        _setup_logging(args)
        error_handler.handle_config_error(
            "Invalid experiment recipe", exception=e, config_file=args["config"]
        )
        print(f"relscat: {e}", file=sys.stderr)
        return EXIT_ERROR

    _setup_logging(args, config)
    out_dir = Path(args.get("out") or config.output_dir or XDGPaths.runs_dir(config.experiment))
    try:
        _check_potential(config)
        threads = resolve_threads(args.get("threads"), config)
        workers = (
            scipy.fft.set_workers(threads) if threads is not None else contextlib.nullcontext()
        )
        with workers:
            result = get_experiment_manager().run(config, config_manager)
    except ConfigError as e:
        error_handler.handle_config_error(
            "Invalid experiment recipe", exception=e, config_file=args["config"]
        )
        print(f"relscat: {e}", file=sys.stderr)
        return EXIT_ERROR
    except RelscatError as e:
        error_handler.handle_numeric_error(
            "Experiment failed", exception=e, operation=config.experiment
        )
        print(f"relscat: {config.experiment}: {e}", file=sys.stderr)
        return EXIT_ERROR

    logger.info(f"Writing results to {out_dir}")
    try:
        summary = write_outputs(result, config, out_dir)
    except OSError as e:
        error_handler.handle_io_error("Cannot write results", exception=e, path=str(out_dir))
        print(f"relscat: cannot write results to {out_dir}: {e}", file=sys.stderr)
        return EXIT_ERROR

    verdict = "PASS" if result.passed else "FAIL"
    print(f"{result.name}: {verdict} ({summary})")
    return EXIT_PASS if result.passed else EXIT_FAIL


def list_command(args: Dict[str, Any]) -> int:
    _setup_logging(args)
    for line in get_experiment_manager().list_experiments():
        print(line)
    return EXIT_PASS


def dump_kernel_command(args: Dict[str, Any]) -> int:
    _setup_logging(args)
    try:
        if args["points"] < 2 or not args["rmax"] > 0:
            raise DomainError("dump-kernel needs --points >= 2 and --rmax > 0")
        kernel = RadialKernel(
            args["kind"], lam=args["lam"], t=args["t"], sign=1 if args["sign"] == "+" else -1
        )
        r = np.linspace(args["rmax"] / args["points"], args["rmax"], args["points"])
        values = radial_profile(kernel, r)
    except RelscatError as e:
        get_error_handler().handle_numeric_error(
            "Cannot evaluate kernel", exception=e, operation="dump-kernel"
        )
        print(f"relscat: {e}", file=sys.stderr)
        return EXIT_ERROR

    if args.get("out"):
        try:
            write_radial_csv(args["out"], r, values)
        except OSError as e:
            get_error_handler().handle_io_error(
                "Cannot write kernel profile", exception=e, path=args["out"]
            )
            print(f"relscat: {e}", file=sys.stderr)
            return EXIT_ERROR
    else:
        print("r,re,im")
        for radius, value in zip(r, values):
            print(f"{radius:.12e},{value.real:.12e},{value.imag:.12e}")
    return EXIT_PASS


COMMANDS = {
    "run": run_command,
    "list": list_command,
    "dump-kernel": dump_kernel_command,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point for relscat.

    Returns:
        Exit code (0 pass, 2 acceptance failure, 1 error)
    """
    args = parse_args(argv if argv is not None else sys.argv)
    try:
        return COMMANDS[args["command"]](args)
    except Exception as e:
        logging.getLogger("relscat").error(f"Unhandled exception in main: {e}")
        return EXIT_ERROR
    finally:
        get_logging_manager().shutdown()


if __name__ == "__main__":
    sys.exit(main())
