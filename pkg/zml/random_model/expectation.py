"""Exact expectations in the random model.

For independent X(p) uniform on the unit circle,

    E[ prod X(p_i)^{a_i} / prod X(q_j)^{b_j} ] = 1

exactly when the two products of prime powers agree, and 0 otherwise.
Everything here reduces to that rule: polynomials in the X(p) are
expanded into monomials and each monomial contributes its coefficient
times 0 or 1.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from zml.errors import CombinatorialBlowupError, DomainError
from zml.partition.regime import RegimeParams, coeff_arrays
from zml.random_model import CIRCLE_POINTS, EXPANSION_GUARD

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MonomialSpec:
    """prod X(p)^a over ``numerator`` divided by prod X(q)^b over ``denominator``."""

    numerator: tuple[tuple[int, int], ...] = ()
    denominator: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        for p, e in (*self.numerator, *self.denominator):
            if e <= 0:
                raise DomainError(f"exponents must be positive, got {e} on {p}")
            if p < 2:
                raise DomainError(f"not a prime index: {p}")

    @classmethod
    def of(cls, numerator: Iterable[tuple[int, int]] = (),
           denominator: Iterable[tuple[int, int]] = ()) -> MonomialSpec:
        """Build a spec, merging repeated primes within each side."""
        return cls(_merge(numerator), _merge(denominator))

    def exponents(self) -> dict[int, int]:
        """Net exponent per prime, numerator minus denominator."""
        net: Counter[int] = Counter()
        for p, e in self.numerator:
            net[p] += e
        for p, e in self.denominator:
            net[p] -= e
        return {p: e for p, e in net.items() if e}


def _merge(pairs: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    acc: Counter[int] = Counter()
    for p, e in pairs:
        acc[int(p)] += int(e)
    return tuple(sorted(acc.items()))


def expect_monomial(spec: MonomialSpec) -> int:
    """1 if every prime carries the same total exponent on both sides, else 0."""
    return 0 if spec.exponents() else 1


# ── Moments of G ─────────────────────────────────────────────────────

# a(p, X) = Re(c1 X + c2 X^2) = (c1 X + conj(c1) X^-1 + c2 X^2 + conj(c2) X^-2) / 2
_POWERS = (1, -1, 2, -2)


def _single_prime_moments(p: int, c1: complex, c2: complex, n: int) -> list[complex]:
    """E[a(p, X)^r] for r = 0..n, grouping the 4^r monomials by their multiplicities."""
    halves = (c1 / 2, c1.conjugate() / 2, c2 / 2, c2.conjugate() / 2)
    out = [1.0 + 0j]
    for r in range(1, n + 1):
        total = 0j
        for counts in _compositions(r, 4):
            up = counts[0] + 2 * counts[2]
            down = counts[1] + 2 * counts[3]
            spec = MonomialSpec(((p, up),) if up else (), ((p, down),) if down else ())
            if not expect_monomial(spec):
                continue
            weight = math.factorial(r)
            term = 1.0 + 0j
            for c, b in zip(counts, halves):
                weight //= math.factorial(c)
                term *= b**c
            total += weight * term
        out.append(total)
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def exact_poly_moment(primes, c1, c2, n: int) -> float:
    """E[(sum_p Re(c1(p) X(p) + c2(p) X(p)^2))^n].

    The n-th power is expanded multinomially across primes; independent
    primes factor, so each prime contributes E[a(p)^r] for its share r.

    Raises:
        CombinatorialBlowupError: if the full expansion has more than
            ``EXPANSION_GUARD`` monomials.
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a non-negative integer, got {n}")
    primes = np.atleast_1d(np.asarray(primes, dtype=np.int64))
    size = len(_POWERS) * primes.size
    if n and n * math.log(max(size, 1)) > math.log(EXPANSION_GUARD):
        raise CombinatorialBlowupError(
            f"{size}^{n} monomials exceed the guard of {EXPANSION_GUARD:.0e}; lower n or prime_cap"
        )
    acc = [1.0 + 0j] + [0j] * n
    for p, a, b in zip(primes, np.atleast_1d(c1), np.atleast_1d(c2)):
        mu = _single_prime_moments(int(p), complex(a), complex(b), n)
        acc = [
            sum(math.comb(m, r) * acc[m - r] * mu[r] for r in range(m + 1))
            for m in range(n + 1)
        ]
    return float(acc[n].real)


def window_coefficients(regime: RegimeParams, i: int, j: int, prime_cap: int | None = None):
    """(primes, c1, c2) of G_(i,j) with c1 = phi_j / sqrt(p), c2 = psi_j / (2p)."""
    primes = regime.window_primes(i, prime_cap)
    if not primes.size:
        return primes, np.zeros(0, complex), np.zeros(0, complex)
    phi, psi = coeff_arrays(primes, j, regime)
    p = primes.astype(float)
    return primes, phi / np.sqrt(p), psi / (2 * p)


def exact_G_moment(n: int, i: int, j: int, regime: RegimeParams,
                   prime_cap: int | None = None) -> float:
    """E[G_(i,j)(X)^n] over the window of T^{delta_{i-1}} < p <= T^{delta_i},
    truncated to its first ``prime_cap`` primes."""
    regime.check_index(j)
    primes, c1, c2 = window_coefficients(regime, i, j, prime_cap)
    return exact_poly_moment(primes, c1, c2, n)


# ── Power sums ───────────────────────────────────────────────────────


def exact_power_moment(a_coeffs: dict[int, complex], k: int, ell: int = 1) -> float:
    """E|sum_p a(p) X(p)^ell|^{2k} by full expansion over ordered prime tuples."""
    if ell == 0:
        raise DomainError("ell must be nonzero")
    primes = sorted(int(p) for p in a_coeffs)
    size = len(primes) ** (2 * k)
    if size > EXPANSION_GUARD:
        raise CombinatorialBlowupError(f"{size} terms exceed the guard of {EXPANSION_GUARD:.0e}")
    e = abs(ell)
    total = 0j
    tuples = list(itertools.product(primes, repeat=k))
    weights = [math.prod(complex(a_coeffs[p]) for p in tup) for tup in tuples]
    for top, wt in zip(tuples, weights):
        for bottom, wb in zip(tuples, weights):
            spec = MonomialSpec.of(((p, e) for p in top), ((q, e) for q in bottom))
            if expect_monomial(spec):
                total += wt * wb.conjugate()
    return float(total.real)


def factorial_moment_bound(a_coeffs: dict[int, complex], k: int) -> float:
    """k! (sum |a(p)|^2)^k."""
    return math.factorial(k) * sum(abs(complex(a)) ** 2 for a in a_coeffs.values()) ** k


# ── Exponential moments ──────────────────────────────────────────────


def circle_log_average(c1, c2, k: float, points: int = CIRCLE_POINTS) -> np.ndarray:
    """log E[exp(2k Re(c1 X + c2 X^2))] per prime, trapezoid on the circle."""
    phis = 2 * np.pi * np.arange(points) / points
    z = np.exp(1j * phis)
    c1 = np.atleast_1d(np.asarray(c1, dtype=complex))
    c2 = np.atleast_1d(np.asarray(c2, dtype=complex))
    expo = 2 * k * (np.outer(c1, z) + np.outer(c2, z * z)).real
    top = expo.max(axis=1, keepdims=True)
    return top[:, 0] + np.log(np.exp(expo - top).mean(axis=1))


def exp_moment_reference(expr, points: int = CIRCLE_POINTS) -> float:
    """prod_p E[exp(2k a(p, X))] for an expression carrying ``c1``, ``c2`` and ``k``."""
    if expr.k == 0:
        return 1.0
    log_value = float(circle_log_average(expr.c1, expr.c2, expr.k, points).sum())
    logger.debug("exp-moment reference: log value %.6g over %d primes", log_value, len(expr.c1))
    return math.exp(log_value)
