#!/usr/bin/env python
import hashlib
import json

import pytest

from kplume.exceptions import ConfigInvalidException
from kplume.run_manifest import RunManifest, file_digest, manifest_path


def test_manifest_path():
    assert manifest_path("out/pmf.csv") == "out/pmf.csv.manifest.json"


def test_file_digest(tmp_path):
    target = tmp_path / "data.csv"
    target.write_bytes(b"x,p\n0,1\n")
    assert file_digest(str(target)) == hashlib.sha256(b"x,p\n0,1\n").hexdigest()


def test_write_and_load(tmp_path):
    output = tmp_path / "pmf.csv"
    output.write_text("x,y,p\n")
    manifest = RunManifest(
        "kplume-pmf",
        ["--a", "0.1", "--b", "0.9", "--n", "5", "--out", str(output)],
        params={"a": 0.1, "b": 0.9},
        version="0.1.0",
        timestamp="2021-01-01T00:00:00+00:00",
    )
    manifest.add_output(str(output))
    path = manifest.write(manifest_path(str(output)))

    data = json.loads(open(path).read())
    assert data["schema_version"] == 1
    assert data["command"] == "kplume-pmf"
    assert data["seed"] is None
    assert data["settings"] == {}

    loaded = RunManifest.load(path)
    assert loaded.argv == manifest.argv
    assert loaded.params == {"a": 0.1, "b": 0.9}
    assert loaded.timestamp == "2021-01-01T00:00:00+00:00"
    assert loaded.verify_outputs() == {str(output): True}

    output.write_text("x,y,p\n0,0,1\n")
    assert loaded.verify_outputs() == {str(output): False}


def test_write_needs_target():
    with pytest.raises(ValueError):
        RunManifest("kplume-pmf", []).write()


def test_replay_argv_drops_manifest_flags():
    manifest = RunManifest(
        "kplume-mc",
        ["--from-manifest", "old.json", "--seed", "3", "--from-manifest=other.json", "--n", "4"],
    )
    assert manifest.replay_argv() == ["--seed", "3", "--n", "4"]


def test_load_invalid(tmp_path):
    with pytest.raises(ConfigInvalidException):
        RunManifest.load(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigInvalidException):
        RunManifest.load(str(broken))
    foreign = tmp_path / "foreign.json"
    foreign.write_text(json.dumps({"hello": "world"}))
    with pytest.raises(ConfigInvalidException):
        RunManifest.load(str(foreign))


def test_replay_argv_appends_recorded_settings(tmp_path):
    manifest = RunManifest(
        "kplume-condvar",
        ["--n", "4", "--mass-threshold", "0.5"],
        settings={"point_budget": 1000, "mass_threshold": 0.5},
    )
    path = manifest.write(str(tmp_path / "run.manifest.json"))
    loaded = RunManifest.load(path)
    assert loaded.settings == {"point_budget": 1000, "mass_threshold": 0.5}
    assert loaded.replay_argv() == [
        "--n",
        "4",
        "--mass-threshold",
        "0.5",
        "--mass-threshold",
        "0.5",
        "--point-budget",
        "1000",
    ]
