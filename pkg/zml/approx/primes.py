"""Segmented prime sieve and the von Mangoldt support."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from zml.approx import SIEVE_LIMIT
from zml.errors import CapacityError, DomainError

SEGMENT = 1 << 22


@dataclass(frozen=True)
class PrimeList:
    bound: int
    primes: np.ndarray

    def __len__(self) -> int:
        return int(self.primes.size)

    @property
    def logs(self) -> np.ndarray:
        return np.log(self.primes.astype(float))

    def to_dict(self) -> dict:
        return {"bound": self.bound, "count": len(self),
                "largest": int(self.primes[-1]) if len(self) else None}


def _small_sieve(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return np.flatnonzero(flags)


@lru_cache(maxsize=8)
def _sieve(n: int) -> np.ndarray:
    if n <= SEGMENT:
        out = _small_sieve(n)
    else:
        base = _small_sieve(math.isqrt(n))
        parts = [base]
        for lo in range(math.isqrt(n) + 1, n + 1, SEGMENT):
            hi = min(lo + SEGMENT, n + 1)
            flags = np.ones(hi - lo, dtype=bool)
            for p in base:
                p = int(p)
                if p * p >= hi:
                    break
                start = max(p * p, -(-lo // p) * p)
                flags[start - lo :: p] = False
            parts.append(np.flatnonzero(flags) + lo)
        out = np.concatenate(parts)
    out = out.astype(np.int64)
    out.setflags(write=False)
    return out


def sieve_primes(X: float, limit: float = SIEVE_LIMIT) -> PrimeList:
    """All primes <= X.

    Raises:
        DomainError: for X < 2.
        CapacityError: for X above ``limit``.
    """
    if X < 2:
        raise DomainError(f"sieve bound must be >= 2, got {X}")
    if X > limit:
        raise CapacityError(f"sieve bound {X:g} exceeds the configured limit {limit:g}")
    n = int(math.floor(X))
    return PrimeList(bound=n, primes=_sieve(n))


def prime_powers(N: float, limit: float = SIEVE_LIMIT) -> tuple[np.ndarray, np.ndarray]:
    """(n, Lambda(n)) for every prime power n <= N, ascending in n."""
    primes = sieve_primes(N, limit).primes
    ns, lams = [], []
    power = primes.astype(np.float64)
    logs = np.log(power)
    while power.size:
        ns.append(power)
        lams.append(logs)
        power = power * primes[: power.size]
        keep = power <= N
        power, logs = power[keep], logs[keep]
    n = np.concatenate(ns)
    lam = np.concatenate(lams)
    order = np.argsort(n, kind="stable")
    return n[order], lam[order]
