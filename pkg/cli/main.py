"""
Command-line entry point
"""
import argparse
import sys
from datetime import datetime
from typing import List, Optional

from pydantic import ValidationError

from cli import commands
from cli.experiment_config import load_config
from helper.exceptions import CheckFailedError, ConfigError, ToolkitError
from logs.logger import system_logger
from settings import settings

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_CHECK = 3

EPILOG = """
outputs (every file starts with a header: tool, version, config hash, seeds):
  build       P.jsonl, frequencies.csv (j, omega), hamiltonian.json, structure.json
  normalform  Z.jsonl, RN.jsonl, RT.jsonl, S_<r>.jsonl, diagnostics.json, params.json,
              frequencies.csv, certificate.json
  scan        scan.json, violations.csv (l, k, divisor, threshold)
  measure     measure.json, measure.csv (N, gamma, samples, failures, fraction, ci_low, ci_high, advisory_bound)
  simulate    trajectory_<i>.csv (t, norm_p, H, momentum[, abs_u[j]...]) or stability.csv
              (epsilon, escape_time, survived)
  scaling     scaling.json, scaling_<target>.csv (R, max_drift, mean_drift)
  verify      verify.json

exit codes: 0 ok, 1 runtime error, 2 config error, 3 check failure
"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dnls-birkhoff",
        description="Birkhoff normal forms and stability experiments for derivative NLS equations",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--threads", type=int, default=None, help="Worker cap (default: available cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, hamiltonian: bool = False, normalform: bool = False):
        command = sub.add_parser(name, help=help_text)
        command.add_argument("--config", required=True, help="Experiment config (JSON)")
        command.add_argument("--out", required=True, help="Output directory")
        if hamiltonian:
            command.add_argument("--hamiltonian", help="Directory written by build (default: rebuild from config)")
        if normalform:
            command.add_argument("--normalform", help="Directory written by normalform")
        return command

    add("build", "Build the Hamiltonian and check its structure")
    add("normalform", "Run the Birkhoff normal form", hamiltonian=True)
    add("scan", "Scan frequencies for small divisors", hamiltonian=True)
    add("measure", "Estimate the measure of resonant potentials")
    add("simulate", "Integrate trajectories or measure stability times", hamiltonian=True)
    add("scaling", "Fit drift exponents over a norm ladder", hamiltonian=True, normalform=True)
    add("verify", "Run structural and consistency checks", hamiltonian=True, normalform=True)
    return parser


def dispatch(args: argparse.Namespace) -> str:
    config = load_config(args.config)
    hamiltonian = getattr(args, "hamiltonian", None)
    normalform = getattr(args, "normalform", None)
    if args.command == "build":
        return commands.cmd_build(config, args.out)
    if args.command == "normalform":
        return commands.cmd_normalform(config, hamiltonian, args.out)
    if args.command == "scan":
        return commands.cmd_scan(config, hamiltonian, args.out)
    if args.command == "measure":
        return commands.cmd_measure(config, args.out)
    if args.command == "simulate":
        return commands.cmd_simulate(config, hamiltonian, args.out)
    if args.command == "scaling":
        return commands.cmd_scaling(config, hamiltonian, normalform, args.out)
    return commands.cmd_verify(config, hamiltonian, normalform, args.out)


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run one subcommand and map the outcome to an exit code"""
    args = build_parser().parse_args(argv)
    if args.threads is not None:
        settings.WORKER_THREADS = max(1, args.threads)
    system_logger.info("=" * 60)
    system_logger.info(f"{settings.APP_NAME} {settings.VERSION}: {args.command}")
    system_logger.info("=" * 60)
    try:
        path = dispatch(args)
    except (ConfigError, ValidationError) as e:
        system_logger.error(f"Config error: {e}")
        return EXIT_CONFIG
    except CheckFailedError as e:
        system_logger.error(f"Check failed: {e}")
        return EXIT_CHECK
    except ToolkitError as e:
        system_logger.error(f"{type(e).__name__}: {e}")
        return EXIT_RUNTIME
    except Exception as e:
        system_logger.error(f"Unexpected error in {args.command}: {e}", exc_info=True)
        return EXIT_RUNTIME
    elapsed = (datetime.now() - settings.ON_INITIALIZE_TIME).total_seconds()
    system_logger.info(f"Done: {path} ({elapsed:.1f}s since start)")
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
