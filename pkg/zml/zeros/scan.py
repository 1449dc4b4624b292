"""Zero location by sign changes of Z(t), audited by Gram blocks.

1. Grid: step 2 pi / (grid_factor log(t / 2 pi)), i.e. ``grid_factor``
   samples per mean zero gap.
2. Refine: every sign change is bracketed and solved with brentq.
3. Audit: zeros between consecutive good Gram points g_m < g_n must
   number n - m (Rosser's rule, which holds throughout the desk range).
   Edge pieces before the first and after the last good Gram point are
   checked against N(x) = round(theta(x)/pi + 1 + S(x)) with S from the
   argument-tracking oracle.
4. Blocks that fail are rescanned at ``REFINE_FACTOR`` times the grid
   density before a mismatch is reported.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import lambertw

from zml.engine import PRECISE_BELOW, VALIDITY_FLOOR
from zml.engine.log_zeta import evaluate_z
from zml.engine.oracle import precise_z, s_by_argument
from zml.engine.riemann_siegel import hardy_z, rs_theta, rs_theta_prime
from zml.errors import AuditMismatchError, DomainError
from zml.parallel import map_ordered
from zml.report import CheckReport
from zml.zeros.models import ZeroOrigin, ZeroTable

logger = logging.getLogger(__name__)

MIN_GRID_FACTOR = 4.0
REFINE_FACTOR = 16.0
ROOT_XTOL = 1e-10
PIECE_GAPS = 400  # mean gaps per parallel piece
SCAN_ORDER = 4


# ── Gram points ──────────────────────────────────────────────────────


def gram_points(n_lo: int, n_hi: int) -> np.ndarray:
    """g_n for n_lo <= n <= n_hi, solving theta(g_n) = n pi."""
    n = np.arange(n_lo, n_hi + 1, dtype=float)
    if n.size == 0:
        return n
    # theta(t) ~ (t/2) log(t / 2 pi e) - pi/8 inverts through Lambert W
    g = 2 * np.pi * np.exp(1 + np.real(lambertw((n + 0.125) / np.e)))
    for _ in range(6):
        g = g - (rs_theta(np.maximum(g, VALIDITY_FLOOR)) - n * np.pi) / rs_theta_prime(g)
    return g


def gram_point(n: int) -> float:
    return float(gram_points(n, n)[0])


# ── Grid scan ────────────────────────────────────────────────────────


def _grid(lo: float, hi: float, grid_factor: float) -> np.ndarray:
    points = [lo]
    t = lo
    while t < hi:
        t += 2 * math.pi / (grid_factor * max(math.log(t / (2 * math.pi)), 0.25))
        points.append(min(t, hi))
    return np.array(points)


def _z_scalar(t: float) -> float:
    if t < PRECISE_BELOW:
        return precise_z(t)
    return float(hardy_z(t, SCAN_ORDER))


def _roots_in(lo: float, hi: float, grid_factor: float) -> np.ndarray:
    grid = _grid(lo, hi, grid_factor)
    z = evaluate_z(grid, SCAN_ORDER)
    roots = []
    for i in np.flatnonzero(np.signbit(z[:-1]) != np.signbit(z[1:])):
        a, b = float(grid[i]), float(grid[i + 1])
        if z[i] == 0.0:
            roots.append(a)
            continue
        if z[i + 1] == 0.0:
            continue  # picked up as the left end of the next bracket
        roots.append(brentq(_z_scalar, a, b, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps))
    return np.array(roots, dtype=float)


def _scan_piece(args: tuple[float, float, float]) -> np.ndarray:
    return _roots_in(*args)


def _pieces(t_lo: float, t_hi: float) -> list[tuple[float, float]]:
    width = PIECE_GAPS * 2 * math.pi / max(math.log(t_hi / (2 * math.pi)), 0.25)
    n = max(1, math.ceil((t_hi - t_lo) / width))
    edges = np.linspace(t_lo, t_hi, n + 1)
    return list(zip(edges[:-1], edges[1:]))


# ── Audit ────────────────────────────────────────────────────────────


@dataclass
class Block:
    """A stretch [lo, hi] with the number of zeros it must contain."""

    lo: float
    hi: float
    expected: int

    def found(self, roots: np.ndarray) -> int:
        return int(np.searchsorted(roots, self.hi, "right") - np.searchsorted(roots, self.lo, "right"))


def zero_count(t: float) -> int:
    """N(t) = round(theta/pi + 1 + S) with S from argument tracking."""
    return int(round(rs_theta(t) / math.pi + 1.0 + s_by_argument(t)))


def audit_blocks(t_lo: float, t_hi: float) -> list[Block]:
    """Gram blocks covering [t_lo, t_hi] with their required zero counts."""
    n_lo = math.ceil(rs_theta(t_lo) / math.pi)
    n_hi = math.floor(rs_theta(t_hi) / math.pi)
    g = gram_points(n_lo, n_hi)
    if g.size:
        z = evaluate_z(g, SCAN_ORDER)
        index = np.arange(n_lo, n_hi + 1)
        good = np.flatnonzero(np.where(index % 2 == 0, z, -z) > 0)
    else:
        good = np.array([], dtype=int)

    n_start, n_end = zero_count(t_lo), zero_count(t_hi)
    if good.size == 0:
        return [Block(t_lo, t_hi, n_end - n_start)]

    first, last = int(good[0]), int(good[-1])
    n_first = n_lo + first
    count_first = n_first + 1 + int(round(s_by_argument(float(g[first]))))
    blocks = [Block(t_lo, float(g[first]), count_first - n_start)]
    for a, b in zip(good[:-1], good[1:]):
        blocks.append(Block(float(g[a]), float(g[b]), int(b - a)))
    count_last = count_first + (last - first)
    blocks.append(Block(float(g[last]), t_hi, n_end - count_last))
    return [b for b in blocks if b.hi > b.lo]


def _nudge(t: float, roots: np.ndarray) -> float:
    if roots.size == 0:
        return t
    gap = float(np.min(np.abs(roots - t)))
    return t + 1e-6 if gap < 1e-7 else t


def audit_table(table: ZeroTable, lo: float | None = None, hi: float | None = None) -> CheckReport:
    """Check a table's zero counts block by block against Gram/argument counts."""
    report = CheckReport(name="zero-audit")
    if table.covered_range is None or not len(table):
        report.warn("empty", "table is empty; nothing to audit")
        return report
    c_lo, c_hi = table.covered_range
    lo = max(lo if lo is not None else c_lo, VALIDITY_FLOOR)
    hi = min(hi if hi is not None else c_hi, c_hi)
    roots = table.real_part().gammas
    lo, hi = _nudge(lo, roots), _nudge(hi, roots)

    blocks = audit_blocks(lo, hi)
    mismatched = 0
    for block in blocks:
        found = block.found(roots)
        if found != block.expected:
            mismatched += 1
            report.error(
                "count-mismatch",
                f"expected {block.expected} zero(s), table has {found}",
                where=f"[{block.lo:.6f}, {block.hi:.6f}]",
            )
    expected_total = sum(b.expected for b in blocks)
    report.measurements.update(
        {
            "blocks": float(len(blocks)),
            "mismatched_blocks": float(mismatched),
            "expected_total": float(expected_total),
            "found_total": float(sum(b.found(roots) for b in blocks)),
        }
    )
    return report


# ── Public entry ─────────────────────────────────────────────────────


def scan_zeros_with_report(
    t_lo: float,
    t_hi: float,
    grid_factor: float = 8.0,
    workers: int = 1,
    strict: bool = True,
) -> tuple[ZeroTable, CheckReport]:
    """Locate the zeros of Z on [t_lo, t_hi] and audit completeness.

    Raises:
        DomainError: for t_lo < 10, an empty interval, or grid_factor <= 0.
        AuditMismatchError: if a block still disagrees after refinement
            and ``strict`` is set.
    """
    if not VALIDITY_FLOOR <= t_lo < t_hi:
        raise DomainError(f"need {VALIDITY_FLOOR} <= t_lo < t_hi, got [{t_lo}, {t_hi}]")
    if grid_factor <= 0:
        raise DomainError(f"grid_factor must be positive, got {grid_factor}")

    report = CheckReport(name="zero-scan")
    if grid_factor < MIN_GRID_FACTOR:
        logger.warning("grid_factor %.3g is below %.0f samples per gap", grid_factor,
                       MIN_GRID_FACTOR)
        report.warn("coarse-grid", f"grid_factor {grid_factor:g} < {MIN_GRID_FACTOR:g}")

    pieces = [(a, b, grid_factor) for a, b in _pieces(t_lo, t_hi)]
    parts = map_ordered(_scan_piece, pieces, workers)
    roots = np.unique(np.concatenate(parts)) if parts else np.array([])

    t_lo_a, t_hi_a = _nudge(t_lo, roots), _nudge(t_hi, roots)
    blocks = audit_blocks(t_lo_a, t_hi_a)
    for block in blocks:
        if block.found(roots) == block.expected:
            continue
        logger.info("refining [%.4f, %.4f]: expected %d, found %d", block.lo, block.hi,
                    block.expected, block.found(roots))
        fine = _roots_in(block.lo, block.hi, grid_factor * REFINE_FACTOR)
        keep = (roots <= block.lo) | (roots > block.hi)
        inside = fine[(fine > block.lo) & (fine <= block.hi)]
        roots = np.sort(np.concatenate([roots[keep], inside]))
        found = block.found(roots)
        if found != block.expected:
            report.error(
                "count-mismatch",
                f"expected {block.expected} zero(s), found {found} after refinement",
                where=f"[{block.lo:.6f}, {block.hi:.6f}]",
            )
            if strict:
                raise AuditMismatchError((block.lo, block.hi), block.expected, found)
            logger.warning("zero count mismatch on [%.6f, %.6f]", block.lo, block.hi)

    report.measurements.update(
        {"zeros": float(roots.size), "blocks": float(len(blocks)), "grid_factor": grid_factor}
    )
    table = ZeroTable.from_ordinates(
        roots,
        origin=ZeroOrigin.COMPUTED,
        covered_range=(t_lo, t_hi),
        provenance=f"scan[{t_lo:g},{t_hi:g}] grid_factor={grid_factor:g}",
    )
    return table, report


def scan_zeros(t_lo: float, t_hi: float, grid_factor: float = 8.0, workers: int = 1) -> ZeroTable:
    table, _ = scan_zeros_with_report(t_lo, t_hi, grid_factor, workers)
    return table
