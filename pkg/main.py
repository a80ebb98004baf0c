# main.py - qednp command line: run scenarios, fit decay curves, validate configs
import os
import sys
import logging
import argparse

from pydantic import ValidationError

# Add the project root to the Python path
current_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.append(current_dir)

import config
from runner.scenario_config import load_config
from runner.scenario_runner import fit_curve, run
from utils.errors import ConfigError, QednpError, UnitError

logger = logging.getLogger("qednp")

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_PARTIAL = 4


def setup_logging(level: str):
    """Configure the root logger once for the whole process"""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(config.LOG_FILE),
            logging.StreamHandler()
        ]
    )


def _resolve_jobs(requested: int) -> int:
    """QEDNP_JOBS, when set, overrides --jobs"""
    env = os.getenv("QEDNP_JOBS")
    if env:
        try:
            return max(int(env), 1)
        except ValueError:
            logger.warning(f"Ignoring non-integer QEDNP_JOBS={env!r}")
    return max(requested, 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qednp", description="Quantum-emitter nanophotonics scenarios and fits")
    parser.add_argument('--log-level', type=str, default=config.LOG_LEVEL,
                        help='Logging level (default: QEDNP_LOG_LEVEL or INFO)')
    commands = parser.add_subparsers(dest="command", required=True)

    run_cmd = commands.add_parser("run", help="Run a scenario file")
    run_cmd.add_argument('config', type=str, help='Scenario file (INI)')
    run_cmd.add_argument('--out', type=str, default=None,
                         help='Output directory (default: [output] dir or QEDNP_OUTPUT_DIR)')
    run_cmd.add_argument('--jobs', type=int, default=1, help='Worker processes for sweeps (QEDNP_JOBS overrides)')
    run_cmd.add_argument('--plot', action='store_true', help='Write a plot next to every CSV')

    fit_cmd = commands.add_parser("fit", help="Fit a decay curve CSV (t_ns, counts)")
    fit_cmd.add_argument('curve', type=str, help='Decay curve CSV')
    fit_cmd.add_argument('--model', choices=["biexp"], default="biexp", help='Decay model (default: biexp)')
    fit_cmd.add_argument('--rho-b0', type=float, default=0.5, help='Initial bright population (default: 0.5)')
    fit_cmd.add_argument('--rho-d0', type=float, default=0.5, help='Initial dark population (default: 0.5)')
    fit_cmd.add_argument('--out', type=str, default=None, help='Output directory (default: QEDNP_OUTPUT_DIR)')

    validate_cmd = commands.add_parser("validate", help="Check a scenario file without running it")
    validate_cmd.add_argument('config', type=str, help='Scenario file (INI)')
    return parser


def _command_run(args) -> int:
    cfg = load_config(args.config)
    report = run(cfg, out_dir=args.out, jobs=_resolve_jobs(args.jobs), make_plots=args.plot)
    print("\n".join(report.summary_lines()))
    return EXIT_OK if report.ok else EXIT_PARTIAL


def _command_fit(args) -> int:
    if not os.path.exists(args.curve):
        print(f"Error: decay curve not found at {args.curve}")
        return EXIT_CONFIG
    report = fit_curve(args.curve, out_dir=args.out, rho_b0=args.rho_b0, rho_d0=args.rho_d0)
    print("\n".join(report.summary_lines()))
    return EXIT_OK


def _command_validate(args) -> int:
    cfg = load_config(args.config)
    points = cfg.plan()
    sweep = f", sweep over {cfg.sweep.param}" if cfg.sweep is not None else ""
    print(f"{args.config}: valid {cfg.kind} scenario '{cfg.id}' with {len(points)} point(s){sweep}")
    return EXIT_OK


def main(argv=None) -> int:
    """
    Entry point of the qednp command

    Returns:
        int: 0 success, 2 configuration error, 3 numerical or domain error,
            4 partial sweep failure, 1 unexpected error
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)

    handlers = {"run": _command_run, "fit": _command_fit, "validate": _command_validate}
    try:
        return handlers[args.command](args)
    except (ConfigError, UnitError, ValidationError) as e:
        logger.error(f"Configuration error: {e}")
        print(f"Error: {e}")
        return EXIT_CONFIG
    except QednpError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"Error: {e}")
        return EXIT_NUMERIC
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        print(f"Unexpected error: {e}")
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
