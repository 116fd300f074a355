#!/usr/bin/env python
"""Run the verification suite; exit 0 only when every selected check passes."""
from typing import List
import argparse
import sys
from datetime import datetime

from kplume.cli_tools.cli_utilities import (
    EXIT_OK,
    EXIT_VERIFY_FAILED,
    OutputSet,
    add_common_args,
    add_settings_args,
    json_text,
    print_version,
    run_command,
    settings_from_args,
    setup_logging,
)
from kplume.verification import FIGURE_N, Verifier, format_report, list_checks

COMMAND = "kplume-verify"
SETTINGS = ("point_budget", "mass_threshold")


def parse_arguments(args: List[str]) -> argparse.Namespace:
    """Parse command-line arguments."""
    description = "Check the exact engines against their oracles and structural properties"
    parser = argparse.ArgumentParser(prog=COMMAND, description=description)
    parser.add_argument(
        "--only", help="Run only this check (repeatable)", action="append", default=None
    )
    parser.add_argument("--list-checks", help="List available checks", action="store_true")
    parser.add_argument(
        "--inject-fault",
        help="Perturb one pmf cell by 1e-6 (self-test: the run must fail)",
        action="store_true",
    )
    parser.add_argument("--a", help="Symmetry check a (default 0.1)", type=float, default=0.1)
    parser.add_argument("--b", help="Symmetry check b (default 0.9)", type=float, default=0.9)
    parser.add_argument(
        "--n", help=f"Symmetry check n (default {FIGURE_N})", type=int, default=FIGURE_N
    )
    parser.add_argument(
        "--particles", help="Monte Carlo particles (default 10^6)", type=int, default=10 ** 6
    )
    parser.add_argument("--seed", help="Seed (default 2021)", type=int, default=2021)
    add_settings_args(parser, SETTINGS)
    add_common_args(parser, fmt=False)
    return parser.parse_args(args)


def _run(args: List[str]) -> int:
    start_time = datetime.now()
    cli_args = parse_arguments(args)
    if cli_args.version:
        return print_version(COMMAND)
    setup_logging(cli_args)
    settings = settings_from_args(cli_args, SETTINGS)

    if cli_args.list_checks:
        for name, description in list_checks():
            print(f"{name:<24}{description}")
        return EXIT_OK

    verifier = Verifier(
        only=cli_args.only,
        a=cli_args.a,
        b=cli_args.b,
        n=cli_args.n,
        particles=cli_args.particles,
        seed=cli_args.seed,
        inject_fault=cli_args.inject_fault,
    )
    results = verifier.run()
    print(format_report(results))

    if cli_args.out is not None:
        output = OutputSet(COMMAND, args, cli_args.out)
        params = {
            "a": cli_args.a,
            "b": cli_args.b,
            "particles": cli_args.particles,
            "inject_fault": cli_args.inject_fault,
            "only": cli_args.only,
        }
        body = {
            "passed": verifier.passed,
            "results": [result.as_dict() for result in results],
        }
        output.write(json_text("verify", cli_args.n, params, body))
        output.finish(params, seed=cli_args.seed, settings=settings.output_settings(SETTINGS))

    if cli_args.display_runtime:
        print(f"Total time: {datetime.now() - start_time}")
    return EXIT_OK if verifier.passed else EXIT_VERIFY_FAILED


def main(args: List[str]) -> int:
    return run_command(COMMAND, _run, args)


def main_ep() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
