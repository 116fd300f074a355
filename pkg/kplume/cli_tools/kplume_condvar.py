#!/usr/bin/env python
"""Write the lateral conditional variance curve x -> Var(S_Y(n) | S_X(n) = x)."""
from typing import Any, Dict, List
import argparse
import sys
from datetime import datetime

from kplume.cli_tools.cli_utilities import (
    EXIT_OK,
    OutputSet,
    add_common_args,
    add_settings_args,
    add_kinetics_args,
    add_model_args,
    csv_text,
    json_text,
    kinetics_from_args,
    model_from_args,
    print_version,
    require,
    resolved_params,
    run_command,
    settings_from_args,
    setup_logging,
)
from kplume.gaussian import DEFAULT_GRID_STEP, GaussianDispersion, condvar_curve

COMMAND = "kplume-condvar"
SETTINGS = ("point_budget", "mass_threshold")
HEADER = ["x", "marginal", "cond_mean", "cond_var"]


def parse_arguments(args: List[str]) -> argparse.Namespace:
    """Parse command-line arguments."""
    description = "Conditional variance of the lateral position given the longitudinal one"
    parser = argparse.ArgumentParser(prog=COMMAND, description=description)
    add_model_args(parser)
    add_kinetics_args(parser)
    parser.add_argument(
        "--grid-step",
        help=f"Gaussian x-grid spacing (default {DEFAULT_GRID_STEP})",
        type=float,
        default=DEFAULT_GRID_STEP,
    )
    parser.add_argument(
        "--no-atom-factor",
        help="Gaussian model: drop the (1 - f_n(0)) prefactor (continuous part only)",
        action="store_true",
    )
    add_settings_args(parser, SETTINGS)
    add_common_args(parser)
    cli_args = parser.parse_args(args)
    require(parser, cli_args, "a", "b", "n")
    return cli_args


def _run(args: List[str]) -> int:
    start_time = datetime.now()
    cli_args = parse_arguments(args)
    if cli_args.version:
        return print_version(COMMAND)
    setup_logging(cli_args)
    settings = settings_from_args(cli_args, SETTINGS)

    dispersion = model_from_args(cli_args)
    params = kinetics_from_args(cli_args)
    run_params = resolved_params(cli_args, dispersion)
    if isinstance(dispersion, GaussianDispersion):
        atom_factor = not cli_args.no_atom_factor
        curve = condvar_curve(
            dispersion.model(params, cli_args.n), step=cli_args.grid_step, atom_factor=atom_factor
        )
        run_params["grid_step"] = cli_args.grid_step
        run_params["atom_factor"] = atom_factor
    else:
        curve = dispersion.condvar(params, cli_args.n)

    rows = [(entry.x, entry.marginal, entry.cond_mean, entry.cond_var) for entry in curve]
    output = OutputSet(COMMAND, args, cli_args.out)
    if cli_args.format == "json":
        body: Dict[str, Any] = {"columns": HEADER, "rows": rows}
        output.write(json_text(dispersion.model_name, cli_args.n, run_params, body))
    else:
        output.write(csv_text(HEADER, rows))

    output.finish(run_params, settings=settings.output_settings(SETTINGS))
    if cli_args.display_runtime:
        print(f"Total time: {datetime.now() - start_time}", file=sys.stderr)
    return EXIT_OK


def main(args: List[str]) -> int:
    return run_command(COMMAND, _run, args)


def main_ep() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
