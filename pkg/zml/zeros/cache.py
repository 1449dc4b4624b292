"""Binary zero cache with a JSON index.

File layout, all little-endian:

    magic "ZMLZ" | u32 version | u64 count | f64 lo | f64 hi | count x f64

Only real zeros are persisted; synthetic entries are dropped before any
write. An empty covered range is stored as (nan, nan).
"""

from __future__ import annotations

import json
import logging
import math
import struct
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from zml.errors import ZmlError
from zml.zeros import CACHE_MAGIC, CACHE_VERSION
from zml.zeros.models import ZeroOrigin, ZeroTable

logger = logging.getLogger(__name__)

_HEADER = struct.Struct("<4sIQdd")


class CacheFormatError(ZmlError, ValueError):
    """A cache file has the wrong magic, version or length."""


def encode_table(table: ZeroTable) -> bytes:
    real = table.real_part()
    dropped = len(table) - len(real)
    if dropped:
        logger.info("dropping %d synthetic zero(s) before caching", dropped)
    lo, hi = real.covered_range if real.covered_range is not None else (math.nan, math.nan)
    header = _HEADER.pack(CACHE_MAGIC, CACHE_VERSION, len(real), lo, hi)
    return header + real.gammas.astype("<f8").tobytes()


def decode_table(data: bytes, provenance: str = "cache",
                 origin: ZeroOrigin = ZeroOrigin.COMPUTED) -> ZeroTable:
    if len(data) < _HEADER.size:
        raise CacheFormatError(f"cache is {len(data)} bytes, shorter than its header")
    magic, version, count, lo, hi = _HEADER.unpack_from(data)
    if magic != CACHE_MAGIC:
        raise CacheFormatError(f"bad magic {magic!r}")
    if version != CACHE_VERSION:
        raise CacheFormatError(f"unsupported cache version {version}")
    expected = _HEADER.size + 8 * count
    if len(data) != expected:
        raise CacheFormatError(f"cache holds {len(data)} bytes, header implies {expected}")
    gammas = np.frombuffer(data, dtype="<f8", count=count, offset=_HEADER.size)
    covered = None if math.isnan(lo) else (lo, hi)
    return ZeroTable.from_ordinates(
        gammas.astype(float), origin=origin, covered_range=covered,
        provenance=provenance,
    )


class ZeroCache:
    """Directory of cached tables, indexed by ``index.json``."""

    INDEX_FILE = "index.json"
    SUFFIX = ".zmlz"

    def __init__(self, cache_dir: str | Path):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.index_path = self.cache_dir / self.INDEX_FILE
        self._index: dict[str, dict] = self._load_index()

    @staticmethod
    def key_for(table: ZeroTable) -> str:
        if table.covered_range is None:
            return "empty"
        lo, hi = table.covered_range
        return f"zeros_{lo:g}_{hi:g}"

    def save(self, table: ZeroTable, name: str | None = None) -> Path:
        """Write the real part of ``table`` and record it in the index."""
        key = name or self.key_for(table)
        path = self.cache_dir / f"{key}{self.SUFFIX}"
        real = table.real_part()
        path.write_bytes(encode_table(table))
        origins = sorted({e.origin.value for e in real.entries})
        self._index[key] = {
            "file": path.name,
            "count": len(real),
            "covered_range": list(real.covered_range) if real.covered_range else None,
            "provenance": table.provenance,
            "origin": origins[0] if len(origins) == 1 else ",".join(origins) or "computed",
            "saved_at": datetime.now(timezone.utc).isoformat(),
        }
        self._save_index()
        logger.info("cached %d zeros as %s", len(real), path)
        return path

    def load(self, key: str) -> ZeroTable:
        record = self._index.get(key)
        if record is None:
            raise KeyError(f"no cached table named {key!r}")
        data = (self.cache_dir / record["file"]).read_bytes()
        origin = record.get("origin", "computed")
        if origin not in ("computed", "ingested"):
            origin = "computed"
        return decode_table(
            data,
            provenance=record.get("provenance") or f"cache:{key}",
            origin=ZeroOrigin(origin),
        )

    def find_covering(self, lo: float, hi: float) -> ZeroTable | None:
        """The smallest cached table that covers [lo, hi], if any."""
        best: tuple[float, str] | None = None
        for key, record in self._index.items():
            covered = record.get("covered_range")
            if not covered:
                continue
            probe = ZeroTable(entries=[], covered_range=tuple(covered))
            if probe.covers(lo, hi):
                width = covered[1] - covered[0]
                if best is None or width < best[0]:
                    best = (width, key)
        return self.load(best[1]) if best else None

    def list_entries(self) -> list[dict]:
        return [{"name": key, **record} for key, record in sorted(self._index.items())]

    def _load_index(self) -> dict[str, dict]:
        if self.index_path.exists():
            with open(self.index_path) as f:
                return json.load(f)
        return {}

    def _save_index(self) -> None:
        with open(self.index_path, "w") as f:
            json.dump(self._index, f, indent=2, sort_keys=True)
