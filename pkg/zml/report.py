"""Check reports and report files.

A ``CheckReport`` collects soft findings (``Issue`` records) produced by
audits and property checks. Hard failures are exceptions; everything a
run wants to *report* rather than *abort on* lands here.

CSV and JSON writers produce the artifacts every CLI command emits:
'.' decimals, LF line endings, floats in shortest round-trip form.
"""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path


class Severity(Enum):
    ERROR = "error"  # Hard invariant failed
    WARNING = "warning"  # Reported, not fatal
    INFO = "info"  # Measurement worth recording


@dataclass
class Issue:
    """A single finding from a check."""

    severity: Severity
    code: str  # Machine-readable issue code
    message: str
    where: str = ""  # Location, e.g. "t=512.3" or "[100, 200]"

    def to_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "code": self.code,
            "message": self.message,
            "where": self.where,
        }


@dataclass
class CheckReport:
    """Result of a check: findings plus named scalar measurements."""

    name: str
    issues: list[Issue] = field(default_factory=list)
    measurements: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not any(i.severity == Severity.ERROR for i in self.issues)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == Severity.ERROR]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == Severity.WARNING]

    def add(self, severity: Severity, code: str, message: str, where: str = "") -> None:
        self.issues.append(Issue(severity=severity, code=code, message=message, where=where))

    def error(self, code: str, message: str, where: str = "") -> None:
        self.add(Severity.ERROR, code, message, where)

    def warn(self, code: str, message: str, where: str = "") -> None:
        self.add(Severity.WARNING, code, message, where)

    def info(self, code: str, message: str, where: str = "") -> None:
        self.add(Severity.INFO, code, message, where)

    def merge(self, other: CheckReport) -> None:
        self.issues.extend(other.issues)
        for key, value in other.measurements.items():
            self.measurements[f"{other.name}.{key}"] = value

    def summary(self) -> str:
        e = len(self.errors)
        w = len(self.warnings)
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {e} error(s), {w} warning(s)"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "issues": [i.to_dict() for i in self.issues],
            "measurements": {k: jsonable(v) for k, v in self.measurements.items()},
        }


# ── Files ────────────────────────────────────────────────────────────


def format_cell(value) -> str:
    """Render one CSV cell. Floats use repr, which round-trips binary64."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    if hasattr(value, "item"):  # numpy scalars
        return format_cell(value.item())
    return str(value)


def write_csv(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence]) -> int:
    """Write a CSV file with a header row. Returns the number of data rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
            count += 1
    return count


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def jsonable(value):
    """Convert numpy scalars, tuples, paths and non-finite floats for JSON."""
    if hasattr(value, "item") and not isinstance(value, (list, dict)):
        try:
            value = value.item()
        except (TypeError, ValueError):
            pass
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "tolist"):
        return jsonable(value.tolist())
    return value


def write_json(path: str | Path, data: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(jsonable(data), indent=2, sort_keys=True) + "\n")
    return path
