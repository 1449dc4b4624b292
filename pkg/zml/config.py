"""Run configuration: YAML files layered under command-line flags.

A config file is a YAML mapping::

    command: moment
    seed: 7
    threads: auto
    cache_dir: ./zml-cache
    output: runs/moment.csv
    parameters:
      k: 1.0
      theta: 0.0
      T: 2000

Resolution order, lowest to highest: command defaults, file values,
environment (``ZML_CACHE_DIR``), explicit flags. Unknown keys anywhere
are rejected.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from zml.errors import ConfigError
from zml.parallel import resolve_workers

CACHE_ENV = "ZML_CACHE_DIR"
DEFAULT_CACHE_DIR = ".zml-cache"
TOP_LEVEL_KEYS = frozenset({"command", "parameters", "cache_dir", "output", "seed", "threads"})
# Keys that live at top level rather than under ``parameters``.
RUN_KEYS = ("cache_dir", "output", "seed", "threads")
SEED_LIMIT = 2**64


@dataclass
class RunConfig:
    """Fully resolved configuration for one command run."""

    command: str
    parameters: dict[str, Any] = field(default_factory=dict)
    cache_dir: Path = Path(DEFAULT_CACHE_DIR)
    output: Path | None = None
    seed: int = 0
    threads: int | str = 1

    @property
    def workers(self) -> int:
        return resolve_workers(self.threads)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": dict(self.parameters),
            "cache_dir": str(self.cache_dir),
            "output": str(self.output) if self.output else None,
            "seed": self.seed,
            "threads": self.threads,
        }


def load_config_file(path: str | Path) -> dict:
    """Load and shape-check a YAML config file."""
    with open(path, encoding="utf-8") as f:
        data = yaml.safe_load(f)

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")

    unknown = sorted(set(data) - TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown key(s): {', '.join(unknown)}")

    params = data.get("parameters", {}) or {}
    if not isinstance(params, dict):
        raise ConfigError(f"{path}: 'parameters' must be a mapping")
    data["parameters"] = params
    return data


def resolve_config(
    command: str,
    values: dict[str, Any],
    explicit: Iterable[str] = (),
    file_data: dict | None = None,
) -> RunConfig:
    """Merge command values with an optional config file.

    Args:
        command: Full command name, e.g. ``"zeros scan"``.
        values: Every option value the command received (defaults included).
        explicit: Names whose values came from the command line or the
            environment; these beat the file.
        file_data: Parsed config file, if any.
    """
    explicit = set(explicit)
    file_data = file_data or {}

    file_command = file_data.get("command")
    if file_command and file_command != command:
        raise ConfigError(f"config is for {file_command!r}, running {command!r}")

    file_params = file_data.get("parameters", {})
    allowed = set(values) - set(RUN_KEYS)
    unknown = sorted(set(file_params) - allowed)
    if unknown:
        raise ConfigError(f"unknown parameter(s) for {command!r}: {', '.join(unknown)}")

    merged = dict(values)
    for key, value in file_params.items():
        if key not in explicit:
            merged[key] = value
    for key in RUN_KEYS:
        if key in file_data and key not in explicit:
            merged[key] = file_data[key]

    seed = int(merged.get("seed") or 0)
    if not 0 <= seed < SEED_LIMIT:
        raise ConfigError(f"seed must be a 64-bit unsigned integer, got {seed}")

    threads = merged.get("threads", 1)
    if threads != "auto":
        try:
            threads = int(threads)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"threads must be an integer or 'auto', got {threads!r}") from e
        if threads < 1:
            raise ConfigError("threads must be >= 1")

    output = merged.get("output")
    return RunConfig(
        command=command,
        parameters={k: v for k, v in merged.items() if k not in RUN_KEYS},
        cache_dir=Path(merged.get("cache_dir") or DEFAULT_CACHE_DIR),
        output=Path(output) if output else None,
        seed=seed,
        threads=threads,
    )
