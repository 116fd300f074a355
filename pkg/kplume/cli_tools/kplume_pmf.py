#!/usr/bin/env python
"""Write the law of the particle position S(n) for one dispersion model."""
from typing import Any, Dict, List, Tuple
import argparse
import math
import sys
from datetime import datetime

import numpy as np

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
    stem_path,
)
from kplume.gaussian import (
    GaussianDispersion,
    GaussianModel,
    atom_mass,
    default_domain,
    density,
    grid,
    marginal_density,
)
from kplume.lattice.base_lattice import BaseLatticeModel

COMMAND = "kplume-pmf"
SETTINGS = ("point_budget",)
DEFAULT_DENSITY_STEP = 0.5


def parse_arguments(args: List[str]) -> argparse.Namespace:
    """Parse command-line arguments."""
    description = "Joint pmf (lattice models) or density plus atom (Gaussian model) of S(n)"
    parser = argparse.ArgumentParser(prog=COMMAND, description=description)
    add_model_args(parser)
    add_kinetics_args(parser)
    parser.add_argument(
        "--marginal", help="Write the x-marginal instead of the joint law", action="store_true"
    )
    parser.add_argument(
        "--method",
        help="Lattice engine: closed form where available, or convolution",
        choices=["closed", "convolution"],
        default="closed",
    )
    parser.add_argument(
        "--grid-step",
        help=f"Gaussian density grid spacing (default {DEFAULT_DENSITY_STEP})",
        type=float,
        default=DEFAULT_DENSITY_STEP,
    )
    add_settings_args(parser, SETTINGS)
    add_common_args(parser)
    cli_args = parser.parse_args(args)
    require(parser, cli_args, "a", "b", "n")
    return cli_args


def _lattice_rows(
    model: BaseLatticeModel, cli_args: argparse.Namespace
) -> Tuple[List[str], List[Tuple[Any, ...]]]:
    params = kinetics_from_args(cli_args)
    if cli_args.method == "convolution":
        pmf = model.joint_pmf_convolution(params, cli_args.n)
    else:
        pmf = model.joint_pmf(params, cli_args.n)
    if cli_args.marginal:
        return ["x", "p"], [(x, p) for x, p in sorted(pmf.marginal_x().items())]
    return ["x", "y", "p"], [(x, y, p) for (x, y), p in pmf.items()]


def _gaussian_rows(
    model: GaussianModel, cli_args: argparse.Namespace
) -> Tuple[List[str], List[Tuple[Any, ...]]]:
    xs = grid(model, cli_args.grid_step)
    if cli_args.marginal:
        values = np.atleast_1d(marginal_density(model, xs))
        return ["x", "density"], [(float(x), float(v)) for x, v in zip(xs, values)]
    half_height = 4.0 * math.sqrt(2.0 * model.n * model.beta)
    ys = grid(model, cli_args.grid_step, (-half_height, half_height))
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    values = density(model, gx, gy)
    rows = [
        (float(x), float(y), float(v))
        for x, y, v in zip(gx.ravel(), gy.ravel(), np.asarray(values).ravel())
    ]
    return ["x", "y", "p"], rows


def _run(args: List[str]) -> int:
    start_time = datetime.now()
    cli_args = parse_arguments(args)
    if cli_args.version:
        return print_version(COMMAND)
    setup_logging(cli_args)
    settings = settings_from_args(cli_args, SETTINGS)

    dispersion = model_from_args(cli_args)
    output = OutputSet(COMMAND, args, cli_args.out)
    run_params = resolved_params(cli_args, dispersion)
    body: Dict[str, Any] = {}
    atom = None

    if isinstance(dispersion, GaussianDispersion):
        model = dispersion.model(kinetics_from_args(cli_args), cli_args.n)
        header, rows = _gaussian_rows(model, cli_args)
        atom = atom_mass(model)
        run_params["grid_step"] = cli_args.grid_step
        body["domain"] = list(default_domain(model))
        body["atom"] = {"x": 0, "y": 0, "mass": atom}
    else:
        run_params["method"] = cli_args.method
        header, rows = _lattice_rows(dispersion, cli_args)

    if cli_args.format == "json":
        body["columns"] = header
        body["rows"] = rows
        output.write(json_text(dispersion.model_name, cli_args.n, run_params, body))
    else:
        output.write(csv_text(header, rows))
        if atom is not None and cli_args.out is not None:
            output.write(
                csv_text(["x", "y", "mass"], [(0, 0, atom)]),
                stem_path(cli_args.out, "_atom", ".csv"),
            )
        elif atom is not None:
            print(f"atom: x=0 y=0 mass={atom!r}", file=sys.stderr)

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
