"""Mean values of Dirichlet polynomials over primes:

    int_T^{2T} |sum_{p <= X} a(p) p^{-it}|^{2k} dt  <<  T k! (sum |a(p)|^2)^k,

valid for X^k <= T.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from zml.approx.primes import sieve_primes
from zml.errors import DomainError, PreconditionError
from zml.report import CheckReport

logger = logging.getLogger(__name__)

OVERSAMPLE = 8
CHUNK = 1 << 15


@dataclass(frozen=True)
class MeanValue:
    lhs: float
    rhs: float
    step: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else (0.0 if self.lhs == 0 else math.inf)


def _validate(a_coeffs: dict[int, complex], k: int, T: float, X: float):
    if k < 1 or int(k) != k:
        raise DomainError(f"k must be a positive integer, got {k}")
    if X < 2:
        raise DomainError(f"X must be >= 2, got {X}")
    if k * math.log(X) > math.log(T):
        raise PreconditionError(f"X^k = {X:g}^{k} exceeds T = {T:g}")
    primes = np.array(sorted(a_coeffs), dtype=np.int64)
    if primes.size and primes.max() > X:
        raise DomainError(f"coefficient at p = {primes.max()} > X = {X:g}")
    known = set(sieve_primes(max(X, 2)).primes.tolist())
    bad = [int(p) for p in primes if int(p) not in known]
    if bad:
        raise DomainError(f"coefficients must sit on primes, got {bad[:5]}")
    return primes, np.array([complex(a_coeffs[int(p)]) for p in primes])


def mean_value_check(a_coeffs: dict[int, complex], k: int, T: float, X: float) -> MeanValue:
    """lhs by fixed-step trapezoid quadrature, step 2 pi / (8 k log X); rhs = T k! (sum |a|^2)^k.

    Raises:
        PreconditionError: if X^k > T.
    """
    primes, coeffs = _validate(a_coeffs, k, T, X)
    rhs = T * math.factorial(k) * float(np.sum(np.abs(coeffs) ** 2)) ** k
    step_bound = 2 * math.pi / (OVERSAMPLE * k * math.log(max(X, 3)))
    n = math.ceil(T / step_bound)
    step = T / n
    if not primes.size or not np.any(coeffs):
        return MeanValue(lhs=0.0, rhs=rhs, step=step)

    log_p = np.log(primes.astype(float))
    total = 0.0
    for start in range(0, n + 1, CHUNK):
        idx = np.arange(start, min(start + CHUNK, n + 1))
        ts = T + idx * step
        values = np.abs(np.exp(-1j * np.outer(ts, log_p)) @ coeffs) ** (2 * k)
        weights = np.where((idx == 0) | (idx == n), 0.5, 1.0)
        total += float(np.sum(values * weights))
    return MeanValue(lhs=total * step, rhs=rhs, step=step)


def mean_value_suite(
    n_specs: int,
    seed: int,
    T: float = 1e5,
    X: float = 50.0,
    k_max: int = 2,
) -> CheckReport:
    """Random coefficient sets; reports the largest observed lhs / rhs."""
    rng = np.random.default_rng(seed)
    primes = sieve_primes(X).primes
    report = CheckReport(name="mean-value")
    worst = 0.0
    for n in range(n_specs):
        k = int(rng.integers(1, k_max + 1))
        if k * math.log(X) > math.log(T):
            k = max(1, int(math.log(T) // math.log(X)))
        size = int(rng.integers(1, primes.size + 1))
        chosen = rng.choice(primes, size=size, replace=False)
        coeffs = rng.normal(size=size) + 1j * rng.normal(size=size)
        result = mean_value_check(dict(zip(chosen.tolist(), coeffs)), k, T, X)
        worst = max(worst, result.ratio)
        logger.debug("mean-value spec %d: k=%d, %d primes, ratio %.4f", n, k, size,
                     result.ratio)
    report.measurements.update({"empirical_C": worst, "specs": float(n_specs)})
    return report
