"""Panel quadrature of

    M_{k,theta}(T) = int_T^{2T} exp(2k Re e^{-i theta} log zeta(1/2 + it)) dt.

Im log zeta jumps at every zero ordinate, so [T, 2T] is cut at the zeros
and each open panel is integrated separately with Gauss–Legendre rules,
bisected until the difference between one rule and the rule on both
halves falls below tolerance. Nodes never touch panel ends, so the
vanishing of |zeta|^{2k} at a zero costs only extra bisections.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from zml.engine.log_zeta import DEFAULT_ORDER, log_zeta_arrays
from zml.errors import DomainError, OverflowGuardError
from zml.moments import EXP_LIMIT, GL_ORDER, MAX_DEPTH
from zml.parallel import map_ordered
from zml.zeros.models import ZeroTable

logger = logging.getLogger(__name__)

EULER_GAMMA = 0.57721566490153286061
MOMENT_COLUMNS = ("k", "theta", "T", "estimate", "error_estimate", "n_panels")
PANELS_PER_JOB = 64
REL_TOL = 1e-9
LOG_REL_TOL = 1e-6
ABS_TOL = 1e-12


@dataclass(frozen=True)
class MomentEstimate:
    k: float
    theta: float
    T: float
    value: float
    error_estimate: float
    n_panels: int
    n_evaluations: int
    order: int = GL_ORDER
    split: int = 1
    unconverged: int = 0

    @property
    def grid(self) -> str:
        return (f"{self.n_panels} panels between zeros, split {self.split}x, "
                f"adaptive Gauss-Legendre order {self.order}")

    def as_row(self) -> tuple:
        return (self.k, self.theta, self.T, self.value, self.error_estimate, self.n_panels)

    def summary(self) -> str:
        return (f"M_(k={self.k:g}, theta={self.theta:.4f})(T={self.T:g}) = "
                f"{self.value:.10g} ± {self.error_estimate:.2g} ({self.grid})")

    def to_dict(self) -> dict:
        return dict(zip(MOMENT_COLUMNS, self.as_row())) | {
            "n_evaluations": self.n_evaluations, "order": self.order,
            "split": self.split, "unconverged": self.unconverged, "grid": self.grid,
        }


def _check_args(k: float, theta: float, T: float) -> None:
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if abs(theta) > math.pi / 2 + 1e-12:
        raise DomainError(f"theta must lie in [-pi/2, pi/2], got {theta}")
    if T < 100:
        raise DomainError(f"T must be >= 100, got {T}")


def panel_edges(T: float, table: ZeroTable, split: int = 1) -> np.ndarray:
    """T, the distinct zero ordinates in (T, 2T), 2T; each gap cut into ``split`` parts."""
    table.require_coverage(0.0, 2 * T)
    inner = np.unique(table.gammas[table.window(T, 2 * T)])
    inner = inner[(inner > T) & (inner < 2 * T)]
    edges = np.concatenate([[T], inner, [2 * T]])
    if split > 1:
        frac = np.arange(split) / split
        starts = edges[:-1, None] + frac[None, :] * np.diff(edges)[:, None]
        edges = np.concatenate([starts.ravel(), [2 * T]])
    return edges


# ── Integrands ───────────────────────────────────────────────────────


def _twisted(ts: np.ndarray, theta: float, table: ZeroTable, correction_order: int) -> np.ndarray:
    re_log, s_of_t = log_zeta_arrays(ts, table, correction_order, exclusion_factor=0.0)
    return math.cos(theta) * re_log + math.sin(theta) * math.pi * s_of_t


def _integrand(ts, mode: str, k: float, theta: float, table: ZeroTable,
               correction_order: int) -> np.ndarray:
    if mode == "exp" and k == 0:
        return np.ones_like(ts)
    value = _twisted(ts, theta, table, correction_order)
    if mode == "log":
        return value
    exponent = 2 * k * value
    top = float(np.max(exponent))
    if top > EXP_LIMIT:
        raise OverflowGuardError(
            f"integrand exponent reaches {top:.1f} near t = {ts[int(np.argmax(exponent))]:.6f}; "
            "reduce k"
        )
    return np.exp(exponent)


# ── Adaptive Gauss–Legendre ──────────────────────────────────────────


def _gl_many(lo: np.ndarray, hi: np.ndarray, fn, nodes: np.ndarray, weights: np.ndarray):
    """Order-n rule on each [lo_i, hi_i] with one vectorised call to ``fn``."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    ts = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    values = fn(ts).reshape(lo.size, nodes.size)
    return half * (values @ weights)


def _integrate_panels(args) -> tuple[np.ndarray, np.ndarray, int, int]:
    """(value, error) per panel, evaluation count, unconverged intervals."""
    lo, hi, mode, k, theta, table, correction_order, rel_tol = args
    nodes, weights = np.polynomial.legendre.leggauss(GL_ORDER)

    def fn(ts):
        return _integrand(ts, mode, k, theta, table, correction_order)

    n = lo.size
    value = np.zeros(n)
    error = np.zeros(n)
    owner = np.arange(n)
    a, b = lo.copy(), hi.copy()
    coarse = _gl_many(a, b, fn, nodes, weights)
    evaluations = n * GL_ORDER
    unconverged = 0
    for depth in range(MAX_DEPTH + 1):
        mid = 0.5 * (a + b)
        left = _gl_many(a, mid, fn, nodes, weights)
        right = _gl_many(mid, b, fn, nodes, weights)
        evaluations += 2 * a.size * GL_ORDER
        fine = left + right
        diff = np.abs(fine - coarse)
        done = diff <= rel_tol * np.abs(fine) + ABS_TOL * (b - a)
        if depth == MAX_DEPTH:
            unconverged = int(np.count_nonzero(~done))
            done[:] = True
        np.add.at(value, owner[done], fine[done])
        np.add.at(error, owner[done], diff[done])
        keep = ~done
        if not keep.any():
            break
        owner = np.concatenate([owner[keep], owner[keep]])
        a, b = np.concatenate([a[keep], mid[keep]]), np.concatenate([mid[keep], b[keep]])
        coarse = np.concatenate([left[keep], right[keep]])
    return value, error, evaluations, unconverged


def integrate_over_panels(T: float, table: ZeroTable, mode: str, k: float, theta: float,
                          split: int = 1, workers: int = 1,
                          correction_order: int = DEFAULT_ORDER):
    """Integrate over [T, 2T]; panel totals are summed pairwise in panel order."""
    edges = panel_edges(T, table, split)
    lo, hi = edges[:-1], edges[1:]
    jobs = [
        (lo[s : s + PANELS_PER_JOB], hi[s : s + PANELS_PER_JOB], mode, k, theta, table,
         correction_order, LOG_REL_TOL if mode == "log" else REL_TOL)
        for s in range(0, lo.size, PANELS_PER_JOB)
    ]
    parts = map_ordered(_integrate_panels, jobs, workers)
    values = np.concatenate([p[0] for p in parts])
    errors = np.concatenate([p[1] for p in parts])
    evaluations = sum(p[2] for p in parts)
    unconverged = sum(p[3] for p in parts)
    if unconverged and mode == "exp":
        logger.warning("%d interval(s) hit the bisection depth limit %d", unconverged, MAX_DEPTH)
    return float(np.sum(values)), float(np.sum(errors)), lo.size, evaluations, unconverged


def moment_estimate(k: float, theta: float, T: float, table: ZeroTable, split: int = 1,
                    workers: int = 1, correction_order: int = DEFAULT_ORDER) -> MomentEstimate:
    """M_{k,theta}(T) by panel quadrature.

    Args:
        split: Cut each gap between consecutive zeros into this many panels.

    Raises:
        DomainError: for k < 0, |theta| > pi/2 or T < 100.
        CoverageError: if the table does not cover [0, 2T].
        OverflowGuardError: if 2k Re e^{-i theta} log zeta exceeds the binary64 range.
    """
    _check_args(k, theta, T)
    if split < 1:
        raise DomainError(f"split must be >= 1, got {split}")
    value, error, n_panels, evaluations, unconverged = integrate_over_panels(
        T, table, "exp", k, theta, split, workers, correction_order
    )
    estimate = MomentEstimate(k, theta, T, value, error, n_panels, evaluations,
                              split=split, unconverged=unconverged)
    logger.info(estimate.summary())
    return estimate


def log_moment_mean(theta: float, T: float, table: ZeroTable, workers: int = 1) -> float:
    """(1/T) int_T^{2T} Re e^{-i theta} log zeta(1/2 + it) dt."""
    _check_args(0.0, theta, T)
    value, *_ = integrate_over_panels(T, table, "log", 0.0, theta, workers=workers)
    return value / T


def jensen_lower_bound(k: float, theta: float, T: float, table: ZeroTable,
                       workers: int = 1) -> float:
    """T exp(2k mean), a lower bound for M_{k,theta}(T) by convexity."""
    return T * math.exp(2 * k * log_moment_mean(theta, T, table, workers))


def second_moment_asymptotic(T: float) -> float:
    """2T log(2T / 2 pi) - T log(T / 2 pi) + (2 gamma_E - 1) T."""
    return (2 * T * math.log(2 * T / (2 * math.pi)) - T * math.log(T / (2 * math.pi))
            + (2 * EULER_GAMMA - 1) * T)


def fit_log_exponent(Ts, values, k: float | None = None) -> dict[str, float]:
    """Least-squares slope of log(M / T) against log log T.

    The slope estimates the power of log T in M/T; with ``k`` given the
    conjectured power k^2 and the ratio slope / k^2 are included.
    """
    Ts = np.asarray(Ts, dtype=float)
    values = np.asarray(values, dtype=float)
    if Ts.size < 2 or Ts.size != values.size:
        raise DomainError("need at least two (T, value) pairs of equal length")
    slope, intercept = np.polyfit(np.log(np.log(Ts)), np.log(values / Ts), 1)
    out = {"slope": float(slope), "intercept": float(intercept)}
    if k is not None and k != 0:
        out["conjectured"] = k * k
        out["ratio"] = float(slope) / (k * k)
    return out
