"""Miscellaneous utility functions."""
from typing import Any, Callable, Dict, Iterable, List, Optional, TypeVar, Union
from typing import TYPE_CHECKING
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from glob import glob
import io
import os

from kplume import log
from kplume.exceptions import ConfigInvalidException
from kplume.kplume_globals import (
    DEFAULT_BIN_WIDTH,
    FLOAT_FORMAT,
    MASS_THRESHOLD,
    MC_BLOCK_SIZE,
    POINT_BUDGET,
)

if TYPE_CHECKING:
    from os import PathLike

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class Settings:
    """Run-wide tunables; defaults come from kplume_globals, overrides from .kplume.yml."""

    point_budget: int = POINT_BUDGET
    mass_threshold: float = MASS_THRESHOLD
    bin_width: float = DEFAULT_BIN_WIDTH
    threads: int = 0
    block_size: int = MC_BLOCK_SIZE

    def output_settings(self, keys: Iterable[str]) -> Dict[str, Any]:
        """The named settings as a plain dict, for manifests."""
        return {key: getattr(self, key) for key in keys}


_ACTIVE_SETTINGS = Settings()


def active_settings() -> Settings:
    """Settings the library falls back to when a call leaves a tunable unset."""
    return _ACTIVE_SETTINGS


def apply_settings(settings: Settings) -> Settings:
    """Install settings as the run-wide defaults; returns the ones they replace."""
    global _ACTIVE_SETTINGS
    check_settings(settings)
    previous = _ACTIVE_SETTINGS
    _ACTIVE_SETTINGS = settings
    log.debug(f"apply_settings: {settings}")
    return previous


def check_settings(settings: Settings) -> None:
    if settings.point_budget < 1 or settings.block_size < 1 or settings.threads < 0:
        raise ConfigInvalidException(f"Settings out of range: {settings}")
    if settings.bin_width <= 0 or settings.mass_threshold < 0:
        raise ConfigInvalidException(f"Settings out of range: {settings}")


def resolve_threshold(threshold: Optional[float] = None) -> float:
    return active_settings().mass_threshold if threshold is None else threshold


def resolve_point_budget(point_budget: Optional[int] = None) -> int:
    return active_settings().point_budget if point_budget is None else point_budget


def load_yaml_file(yaml_file: Union[str, bytes, "PathLike[Any]"]) -> Any:
    """Read YAML file."""
    try:
        import yaml
    except ImportError:
        raise ConfigInvalidException("Unable to import yaml module.")
    try:
        with io.open(yaml_file, "rt", encoding="utf-8") as fname:
            return yaml.safe_load(fname)
    except IOError:
        raise ConfigInvalidException(f"Unable to open YAML file: {yaml_file!r}")
    except yaml.YAMLError as e:
        raise ConfigInvalidException(f"Invalid YAML in {yaml_file!r}: {e}")


def find_cfg_file(
    file_name: Union[str, bytes, "PathLike[Any]", None] = None
) -> Union[str, bytes, "PathLike[Any]", None]:
    """
    Search for the kplume configuration file in the following order:
    KPLUME_CFG environment variable
    Current directory
    Home directory
    Look for file named: .kplume.yml or kplume.yml
    Also allow KPLUME_CFG to point directly at a file

    Returns None when no configuration file exists (defaults apply).
    """
    if file_name and os.path.isfile(file_name):
        return file_name
    optional_path = os.environ.get("KPLUME_CFG", "")
    if os.path.isfile(optional_path):
        return optional_path
    search_paths = [optional_path, ".", os.path.expanduser("~")]
    # Filter optional_path if null
    search_paths = [path for path in search_paths if path]
    for path in search_paths:
        files = glob(f"{path}/.kplume.yml") + glob(f"{path}/kplume.yml")
        if files:
            return files[0]
    return None


def load_settings(file_name: Union[str, bytes, "PathLike[Any]", None] = None) -> Settings:
    """Find and load .kplume.yml, layering its values over the package defaults."""
    settings = Settings()
    cfg_file = find_cfg_file(file_name)
    if cfg_file is None:
        return settings
    data = load_yaml_file(cfg_file)
    if data is None:
        return settings
    if not isinstance(data, dict):
        raise ConfigInvalidException(f"{cfg_file!r} must contain a mapping")

    known = {f.name: f.type for f in fields(Settings)}
    overrides: Dict[str, Any] = {}
    for key, value in data.items():
        if key not in known:
            raise ConfigInvalidException(
                f"Unknown setting {key!r} in {cfg_file!r}; valid keys: {sorted(known)}"
            )
        expected = int if key in ("point_budget", "threads", "block_size") else float
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigInvalidException(f"Setting {key!r} must be numeric, got {value!r}")
        if expected is int and not isinstance(value, int):
            raise ConfigInvalidException(f"Setting {key!r} must be an integer, got {value!r}")
        overrides[key] = expected(value)
    log.debug(f"load_settings: {cfg_file!r} overrides {overrides}")
    settings = replace(settings, **overrides)
    check_settings(settings)
    return settings


def worker_count(settings: Optional[Settings] = None) -> int:
    """
    Number of worker threads to use.

    KPLUME_THREADS takes precedence over the configuration file; 0 means one worker per CPU.
    """
    raw = os.environ.get("KPLUME_THREADS")
    if raw is not None and raw.strip() != "":
        try:
            threads = int(raw)
        except ValueError:
            raise ConfigInvalidException(f"KPLUME_THREADS must be an integer, got {raw!r}")
        if threads < 0:
            raise ConfigInvalidException(f"KPLUME_THREADS must be >= 0, got {threads}")
    else:
        threads = settings.threads if settings is not None else 0
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads


def parallel_map(
    func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None
) -> List[R]:
    """Ordered map over a thread pool; the result never depends on the worker count."""
    items = list(items)
    if workers is None:
        workers = worker_count(active_settings())
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as executor:
        return list(executor.map(func, items))


def format_float(value: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return FLOAT_FORMAT.format(float(value))


def ensure_dir_exists(verify_dir: str) -> None:
    """Ensure directory exists. Create if necessary."""
    if not os.path.exists(verify_dir):
        # Doesn't exist create dir
        os.makedirs(verify_dir)
    else:
        # Exists
        if not os.path.isdir(verify_dir):
            # Not a dir, raise an exception
            raise ValueError(f"{verify_dir} is not a directory")
