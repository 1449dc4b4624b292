"""Time averages of products of G_(i,j) against their model expectations.

Over [T, 2T] the Dirichlet polynomials p^{-it} behave like the model
variables X(p): the integral of prod_i G_(i,j)(t)^{n_i} equals
T prod_i E[G_(i,j)^{n_i}] up to an error of order T^{1/2}.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from zml.errors import DomainError
from zml.partition.regime import RegimeParams
from zml.random_model.expectation import exact_poly_moment, window_coefficients

logger = logging.getLogger(__name__)

POINTS_PER_PERIOD = 16
BUDGET_FACTOR = 10.0
_CHUNK = 1 << 16


@dataclass(frozen=True)
class TimeAverageReport:
    n_list: tuple[int, ...]
    T: float
    time_average: float
    expectation: float
    budget: float
    caps_ok: bool
    n_points: int

    @property
    def difference(self) -> float:
        return abs(self.time_average - self.expectation)

    @property
    def within_budget(self) -> bool:
        return self.difference <= self.budget

    def summary(self) -> str:
        flag = "" if self.caps_ok else " (exponents exceed the caps)"
        return (
            f"n={list(self.n_list)} T={self.T:g}: time average {self.time_average:.6g}, "
            f"expectation {self.expectation:.6g}, |diff| {self.difference:.3g} "
            f"vs budget {self.budget:.3g}{flag}"
        )

    def to_dict(self) -> dict:
        return {
            "n_list": list(self.n_list), "T": self.T, "time_average": self.time_average,
            "expectation": self.expectation, "difference": self.difference,
            "budget": self.budget, "within_budget": self.within_budget,
            "caps_ok": self.caps_ok, "n_points": self.n_points,
        }


def exponent_caps_ok(n_list, regime: RegimeParams) -> bool:
    """n_i <= (1/5)(j + 1 - i)^{-2} delta_i^{-1} for i <= j = m - 1, and
    n_m <= (2 delta_m)^{-1} for the last window m."""
    m = len(n_list)
    j = m - 1
    for i, n in enumerate(n_list[:-1], start=1):
        if n > 0.2 / ((j + 1 - i) ** 2 * regime.delta[i]):
            return False
    return n_list[-1] <= 1 / (2 * regime.delta[m])


def time_average_vs_expectation(n_list, regime: RegimeParams, T: float | None = None,
                                prime_cap: int | None = 3) -> TimeAverageReport:
    """Compare (1/T) int_T^{2T} prod_i G_(i,m)(t)^{n_i} dt with prod_i E[G_(i,m)^{n_i}].

    Window i (1 <= i <= m = len(n_list)) is truncated to its first
    ``prime_cap`` primes. The integral is a trapezoid rule with
    ``POINTS_PER_PERIOD`` points per period of the fastest oscillation.
    """
    n_list = tuple(int(n) for n in n_list)
    if not n_list or any(n < 0 for n in n_list):
        raise DomainError(f"exponents must be non-negative integers, got {n_list}")
    m = len(n_list)
    regime.check_index(m)
    T = regime.T if T is None else float(T)

    windows = [window_coefficients(regime, i, m, prime_cap) for i in range(1, m + 1)]
    expectation = math.prod(
        exact_poly_moment(p, c1, c2, n) for (p, c1, c2), n in zip(windows, n_list)
    )

    top = sum(2 * n * math.log(p.max()) for (p, _, _), n in zip(windows, n_list) if n and p.size)
    step = 2 * math.pi / (POINTS_PER_PERIOD * max(top, 1.0))
    n_points = int(math.ceil(T / step)) + 1
    ts = np.linspace(T, 2 * T, n_points)
    dt = ts[1] - ts[0]

    total = 0.0
    for start in range(0, n_points, _CHUNK):
        part = ts[start : start + _CHUNK]
        values = np.ones_like(part)
        for (p, c1, c2), n in zip(windows, n_list):
            if not n:
                continue
            phase = np.exp(-1j * np.outer(part, np.log(p.astype(float))))
            values *= (phase @ c1 + (phase * phase) @ c2).real ** n
        w = np.ones_like(part)
        if start == 0:
            w[0] = 0.5
        if start + part.size == n_points:
            w[-1] = 0.5
        total += float(np.dot(w, values))
    time_average = total * dt / T

    scale = sum(float(np.sum(8 * np.sqrt(p.astype(float)))) for p, _, _ in windows)
    budget = BUDGET_FACTOR * scale / math.sqrt(T)
    report = TimeAverageReport(
        n_list, T, time_average, expectation, budget,
        exponent_caps_ok(n_list, regime), n_points,
    )
    logger.debug(report.summary())
    return report
