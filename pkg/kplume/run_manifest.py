"""
Run manifests: a JSON record written next to every CLI output file.

A manifest stores the resolved parameters of a run and the exact argument vector that
produced it, so `--from-manifest PATH` can replay the run. Output files carry no timestamps;
only the manifest does, so a replayed run reproduces the output bytes.
"""
from typing import Any, Dict, List, Optional
from datetime import datetime, timezone
import hashlib
import io
import json
import os

from kplume import log
from kplume.exceptions import ConfigInvalidException
from kplume.kplume_globals import SCHEMA_VERSION

MANIFEST_SUFFIX = ".manifest.json"


def manifest_path(out_path: str) -> str:
    return f"{out_path}{MANIFEST_SUFFIX}"


def file_digest(file_name: str) -> str:
    """sha256 of a file's bytes."""
    digest = hashlib.sha256()
    with open(file_name, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


class RunManifest:
    def __init__(
        self,
        command: str,
        argv: List[str],
        params: Optional[Dict[str, Any]] = None,
        seed: Optional[int] = None,
        version: str = "",
        file_name: Optional[str] = None,
        timestamp: Optional[str] = None,
        settings: Optional[Dict[str, Any]] = None,
    ) -> None:
        self.command = command
        self.argv = list(argv)
        self.params = params if params is not None else {}
        self.settings = settings if settings is not None else {}
        self.seed = seed
        self.version = version
        self.file_name = file_name
        if timestamp is None:
            timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        self.timestamp = timestamp
        self.outputs: Dict[str, str] = {}

    def add_output(self, path: str) -> None:
        """Record an output file together with its sha256."""
        self.outputs[path] = file_digest(path)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "argv": self.argv,
            "params": self.params,
            "settings": self.settings,
            "seed": self.seed,
            "version": self.version,
            "timestamp": self.timestamp,
            "outputs": self.outputs,
        }

    def write(self, file_name: Optional[str] = None) -> str:
        """Write the manifest as JSON; returns the path written."""
        target = file_name or self.file_name
        if target is None:
            raise ValueError("RunManifest.write needs a file name")
        with io.open(target, "wt", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
        log.debug(f"RunManifest: wrote {target} outputs={sorted(self.outputs)}")
        return target

    @classmethod
    def load(cls, file_name: str) -> "RunManifest":
        try:
            with io.open(file_name, "rt", encoding="utf-8") as f:
                data = json.load(f)
        except IOError:
            raise ConfigInvalidException(f"Unable to open manifest: {file_name!r}")
        except json.JSONDecodeError as e:
            raise ConfigInvalidException(f"Invalid manifest JSON in {file_name!r}: {e}")
        if not isinstance(data, dict) or "argv" not in data or "command" not in data:
            raise ConfigInvalidException(f"{file_name!r} is not a kplume run manifest")
        manifest = cls(
            data["command"],
            data["argv"],
            params=data.get("params"),
            seed=data.get("seed"),
            version=data.get("version", ""),
            file_name=file_name,
            timestamp=data.get("timestamp"),
            settings=data.get("settings"),
        )
        manifest.outputs = dict(data.get("outputs", {}))
        return manifest

    def replay_argv(self) -> List[str]:
        """
        Argument vector to rerun the recorded command; never chains another replay.

        Recorded settings are appended as flags so the replay ignores later edits to .kplume.yml.
        """
        argv: List[str] = []
        skip = False
        for arg in self.argv:
            if skip:
                skip = False
                continue
            if arg == "--from-manifest":
                skip = True
                continue
            if arg.startswith("--from-manifest="):
                continue
            argv.append(arg)
        for key, value in sorted(self.settings.items()):
            argv.extend([f"--{key.replace('_', '-')}", repr(value)])
        return argv

    def verify_outputs(self) -> Dict[str, bool]:
        """Compare the recorded digests against the files currently on disk."""
        return {
            path: os.path.isfile(path) and file_digest(path) == digest
            for path, digest in self.outputs.items()
        }
