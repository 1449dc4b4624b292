"""Sampled tails of Re e^{-i theta} log zeta and the large-deviation shapes."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from zml.engine.log_zeta import EXCLUSION_FACTOR, exclusion_radius, log_zeta_arrays
from zml.errors import DomainError, PreconditionError
from zml.moments import MIN_TAIL_SAMPLES
from zml.zeros.density import resolve_phi
from zml.zeros.models import ZeroTable

logger = logging.getLogger(__name__)

TAIL_COLUMNS = ("V", "survival")
CONFIDENCE = 0.95


@dataclass
class TailCurve:
    theta: float
    T: float
    points: list[tuple[float, float]] = field(default_factory=list)
    n_samples: int = 0
    counts: list[int] = field(default_factory=list)

    def interval(self, index: int) -> tuple[float, float]:
        """Wilson confidence interval for the survival at ``points[index]``."""
        ci = binomtest(self.counts[index], self.n_samples).proportion_ci(
            confidence_level=CONFIDENCE, method="wilson"
        )
        return float(ci.low), float(ci.high)

    def rows(self) -> list[tuple[float, float]]:
        return list(self.points)

    def summary(self) -> str:
        return f"tail theta={self.theta:.4f} T={self.T:g}: {len(self.points)} V values, {self.n_samples} samples"

    def to_dict(self) -> dict:
        return {"theta": self.theta, "T": self.T, "n_samples": self.n_samples,
                "points": [list(p) for p in self.points]}


def sample_heights(T: float, n_samples: int, table: ZeroTable) -> np.ndarray:
    """Equispaced midpoints of [T, 2T], pushed out of the exclusion radius of every zero."""
    ts = T + (np.arange(n_samples) + 0.5) * (T / n_samples)
    return table.nudge_off_zeros(ts, exclusion_radius(ts, EXCLUSION_FACTOR))


def tail_survival(theta: float, T: float, V_grid, n_samples: int, table: ZeroTable) -> TailCurve:
    """Empirical P_T(Re e^{-i theta} log zeta(1/2 + it) > V) for V in ``V_grid``.

    Raises:
        PreconditionError: if n_samples < 10^4.
        CoverageError: if the table does not cover [0, 2T].
    """
    if n_samples < MIN_TAIL_SAMPLES:
        raise PreconditionError(f"n_samples must be >= {MIN_TAIL_SAMPLES}, got {n_samples}")
    ts = sample_heights(T, n_samples, table)
    re_log, s_of_t = log_zeta_arrays(ts, table, exclusion_factor=0.0)
    values = math.cos(theta) * re_log + math.sin(theta) * math.pi * s_of_t
    ordered = np.sort(values)
    grid = np.sort(np.asarray(V_grid, dtype=float))
    above = n_samples - np.searchsorted(ordered, grid, side="right")
    curve = TailCurve(theta=theta, T=T, n_samples=n_samples, counts=[int(c) for c in above])
    curve.points = [(float(v), int(c) / n_samples) for v, c in zip(grid, above)]
    logger.debug(curve.summary())
    return curve


# ── Shapes ───────────────────────────────────────────────────────────


def gaussian_overlay(V, T: float, K: float):
    """exp(-V^2 / (4 e K^2 log log T))."""
    v = np.asarray(V, dtype=float)
    value = np.exp(-(v**2) / (4 * math.e * K**2 * math.log(math.log(T))))
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class TailBoundShape:
    V: float
    gaussian: float
    v_log_v: float
    density: float
    in_range: bool

    @property
    def total(self) -> float:
        return self.gaussian + self.v_log_v + self.density

    def to_dict(self) -> dict:
        return {"V": self.V, "gaussian": self.gaussian, "v_log_v": self.v_log_v,
                "density": self.density, "total": self.total, "in_range": self.in_range}


def tail_bound_shape(V: float, T: float, K: float, A: float, lam: float,
                     Phi="selberg") -> TailBoundShape:
    """The three large-deviation terms

        exp(-V^2 / (4e K^2 log log T)) + exp(-(A/K) V log V)
            + e^K Phi(T) V / log T * exp(-(1 - 1/K) 2 A lam V).

    ``in_range`` records whether V >= (log log log T)^3.
    """
    if K <= 1:
        raise DomainError(f"K must exceed 1, got {K}")
    if V <= 0:
        raise DomainError(f"V must be positive, got {V}")
    if T <= math.exp(math.e):
        raise DomainError(f"T must exceed e^e, got {T}")
    phi = resolve_phi(Phi)(T)
    log_T = math.log(T)
    return TailBoundShape(
        V=V,
        gaussian=float(gaussian_overlay(V, T, K)),
        v_log_v=math.exp(-(A / K) * V * math.log(V)),
        density=math.exp(K) * phi * V / log_T * math.exp(-(1 - 1 / K) * 2 * A * lam * V),
        in_range=V >= math.log(math.log(log_T)) ** 3,
    )
