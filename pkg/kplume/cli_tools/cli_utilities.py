"""Argument handling and output plumbing shared by the kplume command-line tools."""
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple
from dataclasses import replace
import argparse
import csv
import io
import json
import logging
import os
import sys

from kplume import __version__, log
from kplume.exceptions import KplumeBaseException, ParameterException
from kplume.kinetics import InitialDistribution, KineticsParams
from kplume.kplume_globals import SCHEMA_VERSION
from kplume.model_dispatcher import (
    MODEL_ALIASES,
    MODEL_PARAMS,
    ModelHandler,
    DispersionModel,
    canonical_model,
    models,
)
from kplume.run_manifest import RunManifest, manifest_path
from kplume.utilities import (
    Settings,
    active_settings,
    apply_settings,
    format_float,
    load_settings,
)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"
LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

# Settings that change what a command writes; each gets a flag and is recorded in manifests
SETTING_FLAGS: Dict[str, Tuple[str, type, str]] = {
    "point_budget": ("--point-budget", int, "Maximum lattice points in one convolution table"),
    "mass_threshold": ("--mass-threshold", float, "Hide columns with mass at or below this"),
    "bin_width": ("--bin-width", float, "Gaussian x/y bin width"),
    "block_size": ("--block-size", int, "Particles per RNG block"),
}


def add_common_args(parser: argparse.ArgumentParser, fmt: bool = True) -> None:
    parser.add_argument("--out", help="Write output to this file", action="store", type=str)
    if fmt:
        parser.add_argument(
            "--format",
            help="Output format",
            choices=["csv", "json"],
            default="csv",
        )
    parser.add_argument(
        "--from-manifest",
        help="Replay the run recorded in a manifest (later flags override)",
        action="store",
        type=str,
    )
    parser.add_argument(
        "--log-level", help="Logging level", choices=LOG_LEVELS, default="WARNING"
    )
    parser.add_argument("--log-file", help="Write log records to this file", type=str)
    parser.add_argument(
        "--display-runtime", help="Display program runtime", action="store_true"
    )
    parser.add_argument("--version", help="Display version", action="store_true")


def add_kinetics_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--a", help="Adsorption probability (free -> adsorbed)", type=float)
    parser.add_argument("--b", help="Desorption probability (adsorbed -> free)", type=float)
    parser.add_argument(
        "--init",
        help="Initial distribution: stationary, free, adsorbed or custom:<pf>",
        default="stationary",
        type=str,
    )
    parser.add_argument("--n", help="Number of time steps", type=int)


def add_model_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--model",
        help="Dispersion model",
        choices=models + sorted(MODEL_ALIASES),
        default="simple",
    )
    parser.add_argument("--alpha", help="Horizontal dispersion weight", type=float)
    parser.add_argument("--beta", help="Vertical dispersion weight", type=float)
    parser.add_argument("--xi", help="Diagonal weight of the nearest-neighbour model", type=float)


def add_settings_args(parser: argparse.ArgumentParser, keys: Sequence[str]) -> None:
    for key in keys:
        flag, kind, text = SETTING_FLAGS[key]
        parser.add_argument(flag, help=f"{text} (default from .kplume.yml)", type=kind)


def settings_from_args(cli_args: argparse.Namespace, keys: Sequence[str]) -> Settings:
    """Layer the given flags over .kplume.yml and make the result the run-wide settings."""
    settings = load_settings()
    given = {key: getattr(cli_args, key) for key in keys}
    overrides = {key: value for key, value in given.items() if value is not None}
    settings = replace(settings, **overrides)
    apply_settings(settings)
    return settings


def require(parser: argparse.ArgumentParser, cli_args: argparse.Namespace, *names: str) -> None:
    """parser.error() unless every named option was given (skipped for --version)."""
    if cli_args.version:
        return
    missing = [f"--{name}" for name in names if getattr(cli_args, name) is None]
    if missing:
        parser.error(f"Missing required option(s): {', '.join(missing)}")


def expand_manifest_args(args: Sequence[str]) -> List[str]:
    """Replace --from-manifest PATH by the recorded argv, keeping later flags after it."""
    args = list(args)
    for i, arg in enumerate(args):
        path = None
        if arg == "--from-manifest" and i + 1 < len(args):
            path, rest = args[i + 1], args[:i] + args[i + 2 :]
        elif arg.startswith("--from-manifest="):
            path, rest = arg.split("=", 1)[1], args[:i] + args[i + 1 :]
        if path is not None:
            manifest = RunManifest.load(path)
            log.info(f"Replaying {manifest.command} from {path}")
            return manifest.replay_argv() + rest
    return args


def setup_logging(cli_args: argparse.Namespace) -> None:
    level = getattr(logging, cli_args.log_level)
    kwargs: Dict[str, Any] = {"level": level, "format": LOG_FORMAT}
    if cli_args.log_file:
        kwargs["filename"] = cli_args.log_file
    logging.basicConfig(**kwargs)
    log.setLevel(level)


def kinetics_from_args(cli_args: argparse.Namespace) -> KineticsParams:
    return KineticsParams(cli_args.a, cli_args.b, InitialDistribution.parse(cli_args.init))


def model_kwargs(cli_args: argparse.Namespace) -> Dict[str, Any]:
    """Dispersion parameters for ModelHandler; fills beta = 1/2 - alpha on the lattice."""
    key = canonical_model(cli_args.model)
    alpha, beta = cli_args.alpha, cli_args.beta
    if key in ("simple", "ff45"):
        if alpha is None and beta is not None:
            alpha = 0.5 - beta
        elif beta is None and alpha is not None:
            beta = 0.5 - alpha
    kwargs = {"alpha": alpha, "beta": beta, "xi": cli_args.xi}
    given = {name: value for name, value in kwargs.items() if value is not None}
    ignored = sorted(set(given) - set(MODEL_PARAMS[key]))
    if ignored:
        raise ParameterException(f"Model {key!r} does not take {ignored}")
    return given


def model_from_args(cli_args: argparse.Namespace) -> DispersionModel:
    return ModelHandler(model=cli_args.model, **model_kwargs(cli_args))


def resolved_params(
    cli_args: argparse.Namespace, model: Optional[DispersionModel] = None
) -> Dict[str, Any]:
    params: Dict[str, Any] = {"a": cli_args.a, "b": cli_args.b, "init": cli_args.init}
    if model is not None:
        params.update(model.params_dict())
    return params


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV with floats at 17 significant digits and '\\n' line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


def _json_default(value: Any) -> Any:
    if hasattr(value, "item"):
        return value.item()
    raise TypeError(f"Cannot serialise {value!r}")


def json_text(model: str, n: Optional[int], params: Dict[str, Any], body: Dict[str, Any]) -> str:
    """JSON document carrying model, n, params and schema_version ahead of the data."""
    payload: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "model": model,
        "n": n,
        "params": params,
    }
    payload.update(body)
    return json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"


def stem_path(out: str, suffix: str, extension: str) -> str:
    """results/pmf.csv, "_atom", ".csv" -> results/pmf_atom.csv."""
    stem, _ = os.path.splitext(out)
    return f"{stem}{suffix}{extension}"


class OutputSet(object):
    """Files written by one command run; finish() writes the manifest next to the primary file."""

    def __init__(self, command: str, argv: Sequence[str], out: Optional[str]) -> None:
        self.command = command
        self.argv = list(argv)
        self.out = out
        self.paths: List[str] = []

    def write(self, text: str, path: Optional[str] = None) -> None:
        """Write to path (default --out); the primary text goes to stdout without --out."""
        target = path if path is not None else self.out
        if target is None:
            sys.stdout.write(text)
            return
        directory = os.path.dirname(target)
        if directory and not os.path.isdir(directory):
            os.makedirs(directory)
        with io.open(target, "wt", encoding="utf-8", newline="") as f:
            f.write(text)
        self.paths.append(target)

    def finish(
        self,
        params: Dict[str, Any],
        seed: Optional[int] = None,
        settings: Optional[Dict[str, Any]] = None,
    ) -> Optional[str]:
        if self.out is None:
            return None
        manifest = RunManifest(
            self.command,
            self.argv,
            params=params,
            seed=seed,
            version=__version__,
            settings=settings,
        )
        for path in self.paths:
            manifest.add_output(path)
        return manifest.write(manifest_path(self.out))


def run_command(
    name: str, body: Callable[[List[str]], int], args: Sequence[str]
) -> int:
    """Expand manifests and map kplume errors onto exit codes; settings are restored afterwards."""
    previous = active_settings()
    try:
        expanded = expand_manifest_args(args)
        return body(expanded)
    # ParameterException is also a ValueError; unknown model keys raise plain ValueError
    except (KplumeBaseException, ValueError) as e:
        print(f"{name}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        apply_settings(previous)


def print_version(name: str) -> int:
    print(f"{name} v{__version__}")
    return EXIT_OK
