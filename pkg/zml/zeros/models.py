"""Zero table data models."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from zml.errors import CoverageError, DomainError
from zml.zeros import FIRST_ORDINATE_FLOOR


class ZeroOrigin(Enum):
    """Where a zero entry came from."""

    COMPUTED = "computed"  # Located by scan_zeros
    INGESTED = "ingested"  # Read from a text file
    SYNTHETIC = "synthetic"  # Injected for testing; never persisted


@dataclass(frozen=True)
class ZeroEntry:
    """A nontrivial zero rho = beta + i gamma."""

    beta: float
    gamma: float
    multiplicity: int = 1
    origin: ZeroOrigin = ZeroOrigin.COMPUTED

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise DomainError(f"beta must lie in (0, 1), got {self.beta!r}")
        if not self.gamma > 0.0:
            raise DomainError(f"gamma must be positive, got {self.gamma!r}")
        if self.multiplicity < 1:
            raise DomainError(f"multiplicity must be >= 1, got {self.multiplicity}")
        if self.origin != ZeroOrigin.SYNTHETIC and self.beta != 0.5:
            raise DomainError(f"{self.origin.value} zeros lie on the critical line")

    @property
    def synthetic(self) -> bool:
        return self.origin == ZeroOrigin.SYNTHETIC

    @property
    def offset(self) -> float:
        """|beta - 1/2|."""
        return abs(self.beta - 0.5)


@dataclass
class ZeroTable:
    """Zeros ascending by ordinate, complete on ``covered_range``.

    ``covered_range`` is the interval on which the table claims to list
    every zero. ``None`` means the table covers nothing; a lower end at or
    below the first ordinate means complete from 0. Model tables built by
    :meth:`from_model` cover (0, inf): their zero set is exactly the
    listed entries (plus conjugates).
    """

    entries: list[ZeroEntry] = field(default_factory=list)
    covered_range: tuple[float, float] | None = None
    provenance: str = ""

    def __post_init__(self):
        self.entries = sorted(self.entries, key=lambda e: (e.gamma, e.beta))
        for prev, cur in zip(self.entries, self.entries[1:]):
            if prev.gamma == cur.gamma and prev.beta == cur.beta:
                raise DomainError(f"duplicate zero at {cur.beta} + {cur.gamma}i")
        self.gammas = np.array([e.gamma for e in self.entries], dtype=float)
        self.betas = np.array([e.beta for e in self.entries], dtype=float)
        self.multiplicities = np.array([e.multiplicity for e in self.entries], dtype=np.int64)
        self._cumulative = np.concatenate([[0], np.cumsum(self.multiplicities)])

        if self.covered_range is not None:
            lo, hi = self.covered_range
            if lo > hi:
                raise DomainError(f"covered_range is reversed: {self.covered_range}")
            if len(self.entries) and (self.gammas[0] < lo or self.gammas[-1] > hi):
                real = self.gammas[[not e.synthetic for e in self.entries]]
                if real.size and (real[0] < lo or real[-1] > hi):
                    raise DomainError("covered_range must contain every listed ordinate")

    # ── Construction ─────────────────────────────────────────────────

    @classmethod
    def from_ordinates(
        cls,
        gammas: Iterable[float],
        origin: ZeroOrigin = ZeroOrigin.COMPUTED,
        covered_range: tuple[float, float] | None = None,
        provenance: str = "",
    ) -> ZeroTable:
        entries = [ZeroEntry(0.5, float(g), 1, origin) for g in gammas]
        return cls(entries=entries, covered_range=covered_range, provenance=provenance)

    @classmethod
    def from_model(cls, entries: Sequence[ZeroEntry] = (), provenance: str = "model") -> ZeroTable:
        """A table whose zero set is exactly ``entries``; covers (0, inf)."""
        return cls(entries=list(entries), covered_range=(0.0, math.inf), provenance=provenance)

    def with_entries(self, extra: Sequence[ZeroEntry], note: str) -> ZeroTable:
        provenance = f"{self.provenance}+{note}" if self.provenance else note
        return ZeroTable(
            entries=self.entries + list(extra),
            covered_range=self.covered_range,
            provenance=provenance,
        )

    def real_part(self) -> ZeroTable:
        """The same table without synthetic entries."""
        kept = [e for e in self.entries if not e.synthetic]
        return replace(self, entries=kept)

    # ── Queries ──────────────────────────────────────────────────────

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def is_model(self) -> bool:
        return self.covered_range is not None and math.isinf(self.covered_range[1])

    @property
    def has_synthetic(self) -> bool:
        return any(e.synthetic for e in self.entries)

    @property
    def max_offset(self) -> float:
        """Largest |beta - 1/2| in the table."""
        return float(np.max(np.abs(self.betas - 0.5))) if len(self) else 0.0

    def covers(self, lo: float, hi: float) -> bool:
        if self.covered_range is None:
            return False
        c_lo, c_hi = self.covered_range
        lo_ok = lo >= c_lo or c_lo <= FIRST_ORDINATE_FLOOR
        return lo_ok and hi <= c_hi

    def require_coverage(self, lo: float, hi: float) -> None:
        if not self.covers(lo, hi):
            raise CoverageError((lo, hi), self.covered_range)

    def count_below(self, T):
        """N(T): zeros with 0 < gamma <= T, counted with multiplicity."""
        idx = np.searchsorted(self.gammas, np.asarray(T, dtype=float), side="right")
        counts = self._cumulative[idx]
        return int(counts) if np.ndim(counts) == 0 else counts

    def window(self, lo: float, hi: float) -> slice:
        """Index slice of entries with lo <= gamma <= hi."""
        i = int(np.searchsorted(self.gammas, lo, side="left"))
        j = int(np.searchsorted(self.gammas, hi, side="right"))
        return slice(i, j)

    def nearest(self, ts) -> tuple[np.ndarray, np.ndarray]:
        """Distance to, and ordinate of, the nearest zero for each t."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if not len(self):
            return np.full(ts.shape, np.inf), np.full(ts.shape, np.nan)
        idx = np.searchsorted(self.gammas, ts)
        left = self.gammas[np.clip(idx - 1, 0, len(self) - 1)]
        right = self.gammas[np.clip(idx, 0, len(self) - 1)]
        use_left = np.abs(ts - left) <= np.abs(right - ts)
        nearest = np.where(use_left, left, right)
        return np.abs(ts - nearest), nearest

    def nudge_off_zeros(self, ts, radius) -> np.ndarray:
        """Move ordinates closer than ``radius`` to a zero out to twice that distance."""
        ts = np.array(ts, dtype=float)
        radius = np.broadcast_to(np.asarray(radius, dtype=float), ts.shape)
        dist, nearest = self.nearest(ts)
        close = dist < radius
        direction = np.where(ts >= nearest, 1.0, -1.0)
        ts[close] = nearest[close] + direction[close] * 2.0 * radius[close]
        return ts

    def summary(self) -> str:
        span = (
            "empty range"
            if self.covered_range is None
            else f"[{self.covered_range[0]:g}, {self.covered_range[1]:g}]"
        )
        synthetic = sum(1 for e in self.entries if e.synthetic)
        return f"{len(self)} zeros on {span} ({synthetic} synthetic) from {self.provenance}"

    def to_dict(self) -> dict:
        return {
            "count": len(self),
            "covered_range": list(self.covered_range) if self.covered_range else None,
            "provenance": self.provenance,
            "synthetic": sum(1 for e in self.entries if e.synthetic),
            "first": float(self.gammas[0]) if len(self) else None,
            "last": float(self.gammas[-1]) if len(self) else None,
        }
