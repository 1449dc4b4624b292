"""Tests for check reports, report files and run manifests."""

import json
import math
import tempfile
from pathlib import Path

import numpy as np

from zml.manifest import ManifestStore, RunManifest, write_sidecar
from zml.report import (
    CheckReport,
    Severity,
    format_cell,
    jsonable,
    read_csv,
    write_csv,
    write_json,
)


# --- CheckReport Tests ---


def test_report_passes_without_errors():
    report = CheckReport(name="audit")
    report.warn("coarse-grid", "grid factor below 4", "[100, 200]")
    report.info("count", "29 zeros")
    assert report.passed
    assert len(report.warnings) == 1
    assert report.errors == []
    assert report.summary() == "[PASS] audit: 0 error(s), 1 warning(s)"


def test_report_fails_on_error():
    report = CheckReport(name="residual")
    report.error("negative-Y", "Y(t) < 0", "t=512.3")
    assert not report.passed
    assert report.errors[0].severity == Severity.ERROR
    assert report.to_dict()["issues"][0]["where"] == "t=512.3"


def test_report_merge_prefixes_measurements():
    outer = CheckReport(name="suite")
    inner = CheckReport(name="weight", measurements={"max_gap": 0.25})
    inner.error("monotone", "weight increased")
    outer.merge(inner)
    assert outer.measurements == {"weight.max_gap": 0.25}
    assert not outer.passed


def test_report_to_dict_is_json_safe():
    report = CheckReport(name="x", measurements={"worst": math.inf, "mean": np.float64(0.5)})
    data = json.loads(json.dumps(report.to_dict()))
    assert data["measurements"] == {"worst": "inf", "mean": 0.5}


# --- File Tests ---


def test_format_cell():
    assert format_cell(0.1) == "0.1"
    assert format_cell(1e-300) == "1e-300"
    assert format_cell(True) == "true"
    assert format_cell(None) == ""
    assert format_cell(np.int64(7)) == "7"
    assert float(format_cell(math.pi)) == math.pi


def test_write_and_read_csv():
    with tempfile.TemporaryDirectory() as tmpdir:
        path = Path(tmpdir) / "nested" / "out.csv"
        count = write_csv(path, ("theta", "h_star"), [(0.0, 0.72894), (math.pi / 2, None)])
        assert count == 2
        raw = path.read_bytes()
        assert b"\r\n" not in raw
        rows = read_csv(path)
        assert rows[0] == {"theta": "0.0", "h_star": "0.72894"}
        assert rows[1]["h_star"] == ""
        assert float(rows[1]["theta"]) == math.pi / 2


def test_jsonable():
    value = jsonable({"z": 1 + 2j, "p": Path("a/b"), "arr": np.arange(3), "t": (1.0, -math.inf),
                      "s": Severity.WARNING})
    assert value == {"z": {"re": 1.0, "im": 2.0}, "p": "a/b", "arr": [0, 1, 2],
                     "t": [1.0, "-inf"], "s": "warning"}


def test_write_json():
    with tempfile.TemporaryDirectory() as tmpdir:
        path = write_json(Path(tmpdir) / "r.json", {"b": np.float64(2.5), "a": [1, 2]})
        assert json.loads(path.read_text()) == {"a": [1, 2], "b": 2.5}


# --- Manifest Tests ---


def test_manifest_store_record_and_retrieve():
    with tempfile.TemporaryDirectory() as tmpdir:
        store = ManifestStore(tmpdir)
        manifest = RunManifest(command="moment", config={"seed": 3},
                               results={"estimate": 1.5}, exit_code=0)
        store.record(manifest)
        history = store.get_history()
        assert len(history) == 1
        assert history[0].command == "moment"
        assert history[0].results == {"estimate": 1.5}
        assert history[0].created_at


def test_manifest_store_filter_and_latest():
    with tempfile.TemporaryDirectory() as tmpdir:
        store = ManifestStore(tmpdir)
        store.record(RunManifest(command="moment", exit_code=0))
        store.record(RunManifest(command="tail", exit_code=0))
        store.record(RunManifest(command="moment", exit_code=2))
        assert len(store.get_history("moment")) == 2
        assert store.get_latest("moment").exit_code == 2
        assert store.get_latest("partition") is None


def test_manifest_store_empty():
    with tempfile.TemporaryDirectory() as tmpdir:
        store = ManifestStore(Path(tmpdir) / "missing")
        assert store.get_history() == []


def test_write_sidecar():
    with tempfile.TemporaryDirectory() as tmpdir:
        out = Path(tmpdir) / "moment.csv"
        manifest = RunManifest(command="moment", results={"value": complex(1, -1)},
                               outputs=[str(out)])
        sidecar = write_sidecar(manifest, out)
        assert sidecar.name == "moment.csv.manifest.json"
        data = json.loads(sidecar.read_text())
        assert data["results"]["value"] == {"re": 1.0, "im": -1.0}
        assert data["version"]
        assert RunManifest.from_dict(data).outputs == [str(out)]
