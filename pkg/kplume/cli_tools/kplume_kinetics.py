#!/usr/bin/env python
"""Write the occupation-time law f_n of the free/adsorbed chain."""
from typing import List
import argparse
import sys
from datetime import datetime

from kplume.cli_tools.cli_utilities import (
    EXIT_OK,
    OutputSet,
    add_common_args,
    add_kinetics_args,
    csv_text,
    json_text,
    kinetics_from_args,
    print_version,
    require,
    resolved_params,
    run_command,
    setup_logging,
)
from kplume.kinetics import count_modes, occupation_mean, occupation_pmf, occupation_variance

COMMAND = "kplume-kinetics"


def parse_arguments(args: List[str]) -> argparse.Namespace:
    """Parse command-line arguments."""
    description = "Markov binomial law of the number of free steps K_n"
    parser = argparse.ArgumentParser(prog=COMMAND, description=description)
    add_kinetics_args(parser)
    parser.add_argument("--modes", help="Report the modes of f_n", action="store_true")
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

    params = kinetics_from_args(cli_args)
    pmf = occupation_pmf(params, cli_args.n)
    report = count_modes(pmf) if cli_args.modes else None
    output = OutputSet(COMMAND, args, cli_args.out)
    run_params = resolved_params(cli_args)

    if cli_args.format == "json":
        body = {
            "pmf": [float(p) for p in pmf.probs],
            "mean": occupation_mean(pmf),
            "variance": occupation_variance(pmf),
        }
        if report is not None:
            body["modes"] = {"count": report.count, "locations": report.locations}
        output.write(json_text("kinetics", cli_args.n, run_params, body))
    else:
        rows = [(k, float(p)) for k, p in enumerate(pmf.probs)]
        output.write(csv_text(["k", "f_n_k"], rows))
        if report is not None:
            print(f"modes: count={report.count} locations={report.locations}", file=sys.stderr)

    output.finish(run_params)
    if cli_args.display_runtime:
        print(f"Total time: {datetime.now() - start_time}", file=sys.stderr)
    return EXIT_OK


def main(args: List[str]) -> int:
    return run_command(COMMAND, _run, args)


def main_ep() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
