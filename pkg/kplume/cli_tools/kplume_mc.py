#!/usr/bin/env python
"""Simulate a plume of independent particles and write its empirical summaries."""
from typing import Any, Dict, List, Tuple
import argparse
import json
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
    stem_path,
)
from kplume.gaussian import GaussianDispersion, condvar_curve
from kplume.kplume_globals import SCHEMA_VERSION
from kplume.montecarlo import (
    EmpiricalSummary,
    SimulationConfig,
    concordance,
    mean_deviation,
    simulate,
    total_variation,
)

COMMAND = "kplume-mc"
SETTINGS = ("point_budget", "mass_threshold", "bin_width", "block_size")
DEFAULT_PARTICLES = 100000
CONDVAR_HEADER = ["x", "count", "cond_mean", "cond_var", "cond_var_se"]


def parse_arguments(args: List[str]) -> argparse.Namespace:
    """Parse command-line arguments."""
    description = "Monte Carlo particle tracking for any dispersion model"
    parser = argparse.ArgumentParser(prog=COMMAND, description=description)
    add_model_args(parser)
    add_kinetics_args(parser)
    parser.add_argument(
        "--particles",
        help=f"Number of particles (default {DEFAULT_PARTICLES})",
        type=int,
        default=DEFAULT_PARTICLES,
    )
    parser.add_argument("--seed", help="Random seed (default 0)", type=int, default=0)
    parser.add_argument(
        "--compare",
        help="Add TV distance and variance z-scores against the exact law to the summary",
        action="store_true",
    )
    add_settings_args(parser, SETTINGS)
    add_common_args(parser)
    cli_args = parser.parse_args(args)
    require(parser, cli_args, "a", "b", "n")
    return cli_args


def _histogram_rows(summary: EmpiricalSummary) -> List[Tuple[Any, ...]]:
    if summary.bin_width is None:
        return [(x, y, count) for (x, y), count in summary.histogram.items()]
    return [
        (summary.position(ix), summary.position(iy), count)
        for (ix, iy), count in summary.histogram.items()
    ]


def _comparison(config: SimulationConfig, summary: EmpiricalSummary) -> Dict[str, Any]:
    model = config.model
    if isinstance(model, GaussianDispersion):
        xs = [row.x for row in summary.column_stats()]
        curve = condvar_curve(model.model(config.kinetics, config.n), xs, atom_factor=False)
        return {"worst_var_z": concordance(summary, curve)}
    exact = model.joint_pmf(config.kinetics, config.n)
    curve = model.condvar(config.kinetics, config.n)
    return {
        "total_variation": total_variation(summary, exact),
        "worst_var_z": concordance(summary, curve),
        "worst_mean_z": mean_deviation(summary),
    }


def _run(args: List[str]) -> int:
    start_time = datetime.now()
    cli_args = parse_arguments(args)
    if cli_args.version:
        return print_version(COMMAND)
    setup_logging(cli_args)
    settings = settings_from_args(cli_args, SETTINGS)

    dispersion = model_from_args(cli_args)
    bin_width = settings.bin_width
    config = SimulationConfig(
        dispersion,
        kinetics_from_args(cli_args),
        cli_args.n,
        cli_args.particles,
        cli_args.seed,
        bin_width=bin_width,
        block_size=settings.block_size,
    )
    summary = simulate(config)

    run_params = resolved_params(cli_args, dispersion)
    run_params.update({"particles": cli_args.particles, "block_size": settings.block_size})
    if config.is_gaussian:
        run_params["bin_width"] = bin_width
    summary_body: Dict[str, Any] = {"summary": summary.as_dict()}
    if cli_args.compare:
        summary_body["comparison"] = _comparison(config, summary)

    output = OutputSet(COMMAND, args, cli_args.out)
    histogram = _histogram_rows(summary)
    stats = [
        (row.x, row.count, row.cond_mean, row.cond_var, row.cond_var_se)
        for row in summary.column_stats()
    ]
    if cli_args.format == "json":
        body = {
            "histogram": histogram,
            "condvar": {"columns": CONDVAR_HEADER, "rows": stats},
        }
        body.update(summary_body)
        output.write(json_text(dispersion.model_name, cli_args.n, run_params, body))
    else:
        output.write(csv_text(["x", "y", "count"], histogram))
        if cli_args.out is not None:
            output.write(
                csv_text(CONDVAR_HEADER, stats), stem_path(cli_args.out, "_condvar", ".csv")
            )
            output.write(
                json_text(dispersion.model_name, cli_args.n, run_params, summary_body),
                stem_path(cli_args.out, "_summary", ".json"),
            )
        else:
            payload = dict(summary_body, schema_version=SCHEMA_VERSION)
            print(json.dumps(payload, sort_keys=True, default=float), file=sys.stderr)

    output.finish(run_params, seed=cli_args.seed, settings=settings.output_settings(SETTINGS))
    if cli_args.display_runtime:
        print(f"Total time: {datetime.now() - start_time}", file=sys.stderr)
    return EXIT_OK


def main(args: List[str]) -> int:
    return run_command(COMMAND, _run, args)


def main_ep() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
