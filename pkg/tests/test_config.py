"""Tests for config layering and worker resolution."""

import math
import os
import tempfile
from pathlib import Path

import pytest
import yaml

from zml.config import DEFAULT_CACHE_DIR, load_config_file, resolve_config
from zml.errors import ConfigError
from zml.parallel import map_ordered, resolve_workers

MOMENT_VALUES = {
    "k": 1.0, "theta": 0.0, "T": 1000.0, "split": 1,
    "seed": None, "threads": "1", "cache_dir": None, "output": None,
}


def _write_yaml(data) -> str:
    with tempfile.NamedTemporaryFile(mode="w", suffix=".yaml", delete=False) as f:
        yaml.dump(data, f)
        return f.name


# --- Loading Tests ---


def test_load_config_file():
    path = _write_yaml({"command": "moment", "seed": 7, "parameters": {"k": 0.5}})
    try:
        data = load_config_file(path)
        assert data["seed"] == 7
        assert data["parameters"] == {"k": 0.5}
    finally:
        os.unlink(path)


def test_load_empty_config_file():
    path = _write_yaml(None)
    try:
        assert load_config_file(path) == {}
    finally:
        os.unlink(path)


def test_load_config_rejects_unknown_keys():
    path = _write_yaml({"command": "moment", "workers": 4})
    try:
        with pytest.raises(ConfigError, match="workers"):
            load_config_file(path)
    finally:
        os.unlink(path)


def test_load_config_rejects_non_mapping():
    path = _write_yaml([1, 2, 3])
    try:
        with pytest.raises(ConfigError):
            load_config_file(path)
    finally:
        os.unlink(path)
    path = _write_yaml({"parameters": [1, 2]})
    try:
        with pytest.raises(ConfigError):
            load_config_file(path)
    finally:
        os.unlink(path)


# --- Resolution Tests ---


def test_resolve_defaults():
    cfg = resolve_config("moment", dict(MOMENT_VALUES))
    assert cfg.command == "moment"
    assert cfg.seed == 0
    assert cfg.threads == 1
    assert cfg.workers == 1
    assert cfg.cache_dir == Path(DEFAULT_CACHE_DIR)
    assert cfg.output is None
    assert cfg.parameters == {"k": 1.0, "theta": 0.0, "T": 1000.0, "split": 1}


def test_file_beats_defaults():
    file_data = {"command": "moment", "seed": 11, "threads": 2,
                 "cache_dir": "/tmp/zml-a", "parameters": {"k": 0.5, "T": 2000}}
    cfg = resolve_config("moment", dict(MOMENT_VALUES), (), file_data)
    assert cfg.parameters["k"] == 0.5
    assert cfg.parameters["T"] == 2000
    assert cfg.seed == 11
    assert cfg.threads == 2
    assert cfg.cache_dir == Path("/tmp/zml-a")


def test_explicit_flags_beat_file():
    values = dict(MOMENT_VALUES, k=2.0, cache_dir="/tmp/zml-env")
    file_data = {"cache_dir": "/tmp/zml-file", "parameters": {"k": 0.5, "theta": 0.3}}
    cfg = resolve_config("moment", values, {"k", "cache_dir"}, file_data)
    assert cfg.parameters["k"] == 2.0
    assert cfg.parameters["theta"] == 0.3
    assert cfg.cache_dir == Path("/tmp/zml-env")


def test_resolve_rejects_other_command():
    with pytest.raises(ConfigError, match="tail"):
        resolve_config("moment", dict(MOMENT_VALUES), (), {"command": "tail"})


def test_resolve_rejects_unknown_parameter():
    with pytest.raises(ConfigError, match="samples"):
        resolve_config("moment", dict(MOMENT_VALUES), (), {"parameters": {"samples": 10}})


def test_resolve_seed_range():
    with pytest.raises(ConfigError):
        resolve_config("moment", dict(MOMENT_VALUES, seed=-1), {"seed"})
    with pytest.raises(ConfigError):
        resolve_config("moment", dict(MOMENT_VALUES, seed=2**64), {"seed"})
    cfg = resolve_config("moment", dict(MOMENT_VALUES, seed=2**64 - 1), {"seed"})
    assert cfg.seed == 2**64 - 1


def test_resolve_threads():
    assert resolve_config("moment", dict(MOMENT_VALUES, threads="auto")).threads == "auto"
    with pytest.raises(ConfigError):
        resolve_config("moment", dict(MOMENT_VALUES, threads="many"))
    with pytest.raises(ConfigError):
        resolve_config("moment", dict(MOMENT_VALUES, threads=0))


def test_config_to_dict():
    cfg = resolve_config("moment", dict(MOMENT_VALUES, output="out/m.csv"), {"output"})
    data = cfg.to_dict()
    assert data["output"] == "out/m.csv"
    assert data["parameters"]["T"] == 1000.0
    assert data["cache_dir"] == DEFAULT_CACHE_DIR


# --- Worker Tests ---


def test_resolve_workers():
    assert resolve_workers(None) == 1
    assert resolve_workers(3) == 3
    assert resolve_workers("0") == 1
    assert resolve_workers("auto") >= 1


def test_map_ordered_keeps_order():
    items = [0.1 * i for i in range(20)]
    serial = map_ordered(math.sin, items)
    assert map_ordered(math.sin, items, workers=3) == serial
    assert serial == [math.sin(x) for x in items]
