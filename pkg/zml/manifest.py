"""Run manifests: auditable records of every CLI run.

Each run writes a manifest echoing the fully resolved configuration,
the package version, wall time and key results. Manifests are written
next to the run's output and appended to a JSONL history in the cache
directory, so any artifact can be traced back to the exact settings
that produced it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from zml import __version__
from zml.report import jsonable


@dataclass
class RunManifest:
    """One run of one command."""

    command: str
    config: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    wall_time_s: float = 0.0
    exit_code: int = 0
    version: str = __version__
    created_at: str = ""  # Only field that varies between identical runs

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": jsonable(self.config),
            "results": jsonable(self.results),
            "outputs": list(self.outputs),
            "wall_time_s": self.wall_time_s,
            "exit_code": self.exit_code,
            "version": self.version,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> RunManifest:
        return cls(
            command=data["command"],
            config=data.get("config", {}),
            results=data.get("results", {}),
            outputs=data.get("outputs", []),
            wall_time_s=data.get("wall_time_s", 0.0),
            exit_code=data.get("exit_code", 0),
            version=data.get("version", ""),
            created_at=data.get("created_at", ""),
        )


class ManifestStore:
    """Append-only JSONL history of run manifests."""

    HISTORY_FILE = "runs.jsonl"

    def __init__(self, store_dir: str | Path):
        self.store_dir = Path(store_dir)
        self.store_file = self.store_dir / self.HISTORY_FILE

    def record(self, manifest: RunManifest) -> None:
        """Append a manifest to the history."""
        self.store_dir.mkdir(parents=True, exist_ok=True)
        if not manifest.created_at:
            manifest.created_at = datetime.now(timezone.utc).isoformat()
        with open(self.store_file, "a", encoding="utf-8") as f:
            f.write(json.dumps(manifest.to_dict(), sort_keys=True) + "\n")

    def get_history(self, command: str | None = None) -> list[RunManifest]:
        """Retrieve manifests, optionally filtered by command."""
        if not self.store_file.exists():
            return []

        manifests = []
        with open(self.store_file, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                data = json.loads(line)
                if command and data.get("command") != command:
                    continue
                manifests.append(RunManifest.from_dict(data))
        return manifests

    def get_latest(self, command: str) -> RunManifest | None:
        history = self.get_history(command)
        return history[-1] if history else None


def write_sidecar(manifest: RunManifest, output: str | Path) -> Path:
    """Write ``<output>.manifest.json`` next to a run's main output."""
    if not manifest.created_at:
        manifest.created_at = datetime.now(timezone.utc).isoformat()
    path = Path(f"{output}.manifest.json")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n")
    return path
