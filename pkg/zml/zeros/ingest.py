"""Read text zero files: one decimal ordinate per line, ascending."""

from __future__ import annotations

import logging
import math
from pathlib import Path

from zml.errors import MonotonicityError, ParseError
from zml.zeros import FIRST_ORDINATE_FLOOR
from zml.zeros.models import ZeroOrigin, ZeroTable

logger = logging.getLogger(__name__)

FIRST_ZERO = 14.134725141734693
FIRST_ZERO_TOL = 1e-3


def parse_ordinates(lines) -> list[float]:
    """Ordinates from an iterable of lines. Blank and '#' lines are skipped."""
    values: list[float] = []
    for number, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            value = float(text.split()[0])
        except ValueError:
            raise ParseError(number, text) from None
        if not (math.isfinite(value) and value > 0):
            raise ParseError(number, text)
        if values and value <= values[-1]:
            raise MonotonicityError(number, values[-1], value)
        values.append(value)
    return values


def ingest_zeros(path: str | Path) -> ZeroTable:
    """Load an ordinate file as an ingested table.

    A file starting at the first zero covers [0, last]; otherwise the
    table covers [first, last] only. An empty file gives an empty table
    with no covered range.
    """
    path = Path(path)
    with open(path) as f:
        values = parse_ordinates(f)

    if not values:
        logger.info("%s holds no ordinates", path)
        return ZeroTable(entries=[], covered_range=None, provenance=f"ingest:{path.name}")

    starts_at_first = abs(values[0] - FIRST_ZERO) <= FIRST_ZERO_TOL
    lo = 0.0 if starts_at_first else values[0]
    if not starts_at_first and values[0] < FIRST_ORDINATE_FLOOR:
        logger.warning("%s starts below the first zero at %.6f", path, values[0])
    table = ZeroTable.from_ordinates(
        values,
        origin=ZeroOrigin.INGESTED,
        covered_range=(lo, values[-1]),
        provenance=f"ingest:{path.name}",
    )
    logger.info("ingested %d ordinates from %s", len(table), path)
    return table
