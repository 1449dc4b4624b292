"""sigma, P and Y, and the zero sums they are built from.

Zero sums run over every table entry and its conjugate. Where a table
stops, the remaining zeros are replaced by the density
log(gamma / 2 pi) / (2 pi), with an error bound from
|S(t)| <= 0.112 log t + 0.278 log log t + 2.51.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from zml.approx import DEFAULT_TAIL_TOL
from zml.approx.kernel import weight_w
from zml.approx.primes import sieve_primes
from zml.constants import big_a, optimize_h
from zml.errors import CoverageError, DomainError, PreconditionError, ProximityError
from zml.zeros import FIRST_ORDINATE_FLOOR
from zml.zeros.density import mean_gap, s_bound, zero_density
from zml.zeros.models import ZeroEntry, ZeroTable

logger = logging.getLogger(__name__)

TAIL_SLACK = 3.0


@dataclass(frozen=True)
class ApproxParams:
    """theta, K, X and h; h defaults to the maximiser h(theta)."""

    theta: float
    K: float
    X: float
    h: float | None = None

    def __post_init__(self):
        if self.K < 1:
            raise DomainError(f"K must be >= 1, got {self.K}")
        if self.X < 3:
            raise DomainError(f"X must be >= 3, got {self.X}")
        if self.h is None:
            object.__setattr__(self, "h", optimize_h(self.theta).h_star)
        elif not 0 < self.h < 1:
            raise DomainError(f"h must lie in (0, 1), got {self.h}")

    @property
    def log_X(self) -> float:
        return math.log(self.X)

    @property
    def A(self) -> float:
        return float(big_a(self.h, self.theta))

    @property
    def floor(self) -> float:
        return 0.5 + self.K / (self.h * self.log_X)

    def check_point(self, t: float) -> None:
        """Hypotheses of the approximate formula at t: |t| >= 3, 3 <= X <= |t|^6."""
        if abs(t) < 3:
            raise PreconditionError(f"|t| must be >= 3, got {t}")
        if self.log_X > 6 * math.log(abs(t)):
            raise PreconditionError(f"X = {self.X:g} exceeds |t|^6 at t = {t}")

    def to_dict(self) -> dict:
        return {"theta": self.theta, "K": self.K, "X": self.X, "h": self.h}


@dataclass(frozen=True)
class ParamsPolicy:
    """t -> ApproxParams with X = |t|^x_power."""

    theta: float
    K: float
    x_power: float = 2.0
    h: float | None = None

    def __post_init__(self):
        if self.h is None:
            object.__setattr__(self, "h", optimize_h(self.theta).h_star)

    def __call__(self, t: float) -> ApproxParams:
        return ApproxParams(theta=self.theta, K=self.K, X=abs(t) ** self.x_power, h=self.h)


# ── sigma ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class SigmaValue:
    sigma: float
    attained_by: ZeroEntry | None = None

    @property
    def at_floor(self) -> bool:
        return self.attained_by is None

    @property
    def s_offset(self) -> float:
        return self.sigma - 0.5


def sigma_window(params: ApproxParams, table: ZeroTable) -> float:
    """Half-width K X^{max|beta - 1/2|} / log X beyond which no zero qualifies."""
    return params.K * math.exp(table.max_offset * params.log_X) / params.log_X


def sigma_select(t: float, params: ApproxParams, table: ZeroTable) -> SigmaValue:
    """sigma = 1/2 + (1/h) max{beta - 1/2, K / log X} over zeros with
    |t - gamma| <= K X^{|beta - 1/2|} / log X; conjugate zeros included.

    Raises:
        CoverageError: if the table does not cover the search window.
    """
    gap = params.K / params.log_X
    width = sigma_window(params, table)
    if not table.is_model:
        table.require_coverage(max(t - width, 0.0), t + width)

    best, winner = gap, None
    for sign in (1.0, -1.0):
        lo, hi = sign * t - width, sign * t + width
        for entry in table.entries[table.window(lo, hi)]:
            offset = entry.beta - 0.5
            reach = params.K * math.exp(abs(offset) * params.log_X) / params.log_X
            if abs(t - sign * entry.gamma) <= reach and offset > best:
                best, winner = offset, entry
    return SigmaValue(sigma=0.5 + best / params.h, attained_by=winner)


# ── Dirichlet polynomial ─────────────────────────────────────────────


def _prime_terms(t: float, sigma: float, X: float):
    primes = sieve_primes(X).primes.astype(float)
    logs = np.log(primes)
    s = complex(sigma, t)
    p_s = np.exp(-s * logs)
    return primes, logs, p_s, weight_w(primes, X)


def dirichlet_P(t: float, params: ApproxParams, table: ZeroTable,
                sigma: SigmaValue | None = None) -> complex:
    """P(t, X) = sum_{p <= X} [w(p) p^{-s} (1 + (sigma - 1/2) log p) + p^{-2s} / 2]."""
    sigma = sigma or sigma_select(t, params, table)
    _, logs, p_s, w = _prime_terms(t, sigma.sigma, params.X)
    terms = w * p_s * (1 + sigma.s_offset * logs) + 0.5 * p_s * p_s
    return complex(np.sum(terms))


def prime_core(t: float, sigma: float, X: float) -> float:
    """Re sum_{p <= X} w(p) log p p^{-s} at s = sigma + it."""
    _, logs, p_s, w = _prime_terms(t, sigma, X)
    return float(np.sum(w * logs * p_s).real)


# ── Zero sums ────────────────────────────────────────────────────────


@dataclass(frozen=True)
class ZeroSum:
    value: float
    tail: float
    error_bound: float
    converged: bool
    n_terms: int

    def to_dict(self) -> dict:
        return {"value": self.value, "tail": self.tail, "error_bound": self.error_bound,
                "converged": self.converged, "n_terms": self.n_terms}


def minimal_window(t: float, sigma: float) -> float:
    return max(4 * (sigma - 0.5), 10 * mean_gap(t))


def _uncovered(table: ZeroTable) -> list[tuple[float, float]]:
    lo, hi = table.covered_range
    regions = []
    if lo > FIRST_ORDINATE_FLOOR:
        regions.append((FIRST_ORDINATE_FLOOR, lo))
    if math.isfinite(hi):
        regions.append((hi, math.inf))
    return regions


def zero_sum(
    t: float,
    sigma: float,
    table: ZeroTable,
    term: Callable[[np.ndarray, np.ndarray], np.ndarray],
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> ZeroSum:
    """sum over the zero set of ``term(beta, gamma)``, gamma signed.

    Raises:
        CoverageError: if the table misses the minimal window around t.
    """
    if tail_tol <= 0:
        raise DomainError(f"tail_tol must be positive, got {tail_tol}")
    if not table.is_model:
        w = minimal_window(t, sigma)
        if not table.covers(max(t - w, 0.0), t + w):
            raise CoverageError((max(t - w, 0.0), t + w), table.covered_range)

    direct = 0.0
    if len(table):
        m = table.multiplicities
        values = m * (term(table.betas, table.gammas) + term(table.betas, -table.gammas))
        direct = float(np.sum(values))

    tail, bound = 0.0, 0.0
    if not table.is_model:
        half = np.array([0.5])

        def both(g: float) -> float:
            return float(term(half, np.array([g]))[0] + term(half, np.array([-g]))[0])

        for lo, hi in _uncovered(table):
            value, _ = quad(lambda g: zero_density(g) * both(g), lo, hi, limit=200)
            tail += value
            edges = [lo] if math.isinf(hi) else [lo, hi]
            bound += sum(TAIL_SLACK * s_bound(max(e, 3.0)) * abs(both(e)) for e in edges)

    return ZeroSum(
        value=direct + tail,
        tail=tail,
        error_bound=bound,
        converged=bound <= tail_tol,
        n_terms=2 * len(table),
    )


def y_term(t: float, sigma: float):
    """Summand of Y, masked to the zeros of the set S."""

    def term(beta: np.ndarray, gamma: np.ndarray) -> np.ndarray:
        d2 = (t - gamma) ** 2
        den = (beta - 0.5) ** 2 + d2
        if np.any(den == 0):
            i = int(np.flatnonzero(den == 0)[0])
            raise ProximityError(t, float(gamma[i]), 0.0)
        in_s = np.abs(beta - 0.5) <= np.sqrt(0.5 * (sigma - 0.5) ** 2 + d2)
        return np.where(in_s, 0.5 * np.log(((sigma - beta) ** 2 + d2) / den), 0.0)

    return term


def balance_term(t: float, sigma: float):
    def term(beta: np.ndarray, gamma: np.ndarray) -> np.ndarray:
        return (sigma - beta) / ((sigma - beta) ** 2 + (t - gamma) ** 2)

    return term


def zero_term_Y(
    t: float,
    params: ApproxParams,
    table: ZeroTable,
    tail_tol: float = DEFAULT_TAIL_TOL,
    sigma: SigmaValue | None = None,
    warn: bool = True,
) -> ZeroSum:
    """Y(t, X) = (1/2) sum_{rho in S} log(((sigma - beta)^2 + (t - gamma)^2)
    / ((beta - 1/2)^2 + (t - gamma)^2)), with its tail bound attached."""
    sigma = sigma or sigma_select(t, params, table)
    result = zero_sum(t, sigma.sigma, table, y_term(t, sigma.sigma), tail_tol)
    if warn and not result.converged:
        logger.warning("Y at t=%.6f: tail bound %.3e exceeds tail_tol %.1e", t,
                       result.error_bound, tail_tol)
    return result


@dataclass(frozen=True)
class Balance:
    zero_side: float
    prime_side: float
    zero_error: float
    sigma: float

    @property
    def ratio(self) -> float:
        return self.zero_side / self.prime_side if self.prime_side else math.nan

    def to_dict(self) -> dict:
        return {"zero_side": self.zero_side, "prime_side": self.prime_side,
                "ratio": self.ratio, "zero_error": self.zero_error, "sigma": self.sigma}


def zero_prime_balance(t: float, params: ApproxParams, table: ZeroTable,
                       tail_tol: float = DEFAULT_TAIL_TOL) -> Balance:
    """Both sides of
    sum_rho (sigma - beta) / ((sigma - beta)^2 + (t - gamma)^2)
        ~ (1/2) log|t| - Re sum_{p <= X} w(p) log p p^{-s}.
    """
    params.check_point(t)
    sigma = sigma_select(t, params, table)
    zeros = zero_sum(t, sigma.sigma, table, balance_term(t, sigma.sigma), tail_tol)
    prime_side = 0.5 * math.log(abs(t)) - prime_core(t, sigma.sigma, params.X)
    return Balance(zero_side=zeros.value, prime_side=prime_side,
                   zero_error=zeros.error_bound, sigma=sigma.sigma)
