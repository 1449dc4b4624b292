"""Independent high-precision oracle: Euler–Maclaurin summation in mpmath.

Shares no code with the Riemann–Siegel fast path. Working precision is
``target_digits + GUARD_DIGITS``; the summation depth N and the number
of Bernoulli correction terms are chosen from |s| and the target, and N
is doubled when the asymptotic correction series stalls before reaching
the target.
"""

from __future__ import annotations

import logging
import math

import mpmath

from zml.errors import PoleError, PrecisionError

logger = logging.getLogger(__name__)

MAX_DIGITS = 30
GUARD_DIGITS = 15
MAX_EM_TERMS = 200
MAX_RESTARTS = 4


def _em_sum(s: mpmath.mpc, digits: int) -> mpmath.mpc:
    eps = mpmath.mpf(10) ** (-(digits + 2))
    base = int(math.ceil(float(abs(s)) / math.pi)) + 10

    for attempt in range(MAX_RESTARTS):
        n = base * 2**attempt
        head = mpmath.fsum(mpmath.power(m, -s) for m in range(1, n))
        big_n = mpmath.mpf(n)
        tail = mpmath.power(big_n, 1 - s) / (s - 1) + mpmath.power(big_n, -s) / 2
        rising = s  # s (s+1) ... (s+2j-2)
        npow = mpmath.power(big_n, -s - 1)
        inv_n2 = 1 / (big_n * big_n)
        previous = mpmath.inf
        for j in range(1, MAX_EM_TERMS + 1):
            term = mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * rising * npow
            tail += term
            size = abs(term)
            if size < eps:
                return head + tail
            if size > previous:
                break  # asymptotic series turned; enlarge N
            previous = size
            rising *= (s + 2 * j - 1) * (s + 2 * j)
            npow *= inv_n2
        logger.debug("Euler–Maclaurin stalled at N=%d for s=%s; doubling", n, s)

    raise PrecisionError(
        f"Euler–Maclaurin could not reach {digits} digits at s = {complex(s)!r}"
    )


def zeta_oracle(s: complex, target_digits: int = 15, max_digits: int = MAX_DIGITS,
                as_mp: bool = False):
    """zeta(s) with absolute error below 10^-target_digits.

    Raises:
        PoleError: at s = 1.
        PrecisionError: if ``target_digits`` exceeds ``max_digits`` or the
            correction series cannot reach the target.
    """
    if target_digits > max_digits:
        raise PrecisionError(
            f"{target_digits} digits requested, configured working limit is {max_digits}"
        )
    if complex(s) == 1:
        raise PoleError("zeta has a pole at s = 1")

    with mpmath.workdps(target_digits + GUARD_DIGITS):
        value = _em_sum(mpmath.mpc(s), target_digits)
        return value if as_mp else complex(value)


def theta_exact(t: float, digits: int = 20) -> float:
    """theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi."""
    with mpmath.workdps(digits + GUARD_DIGITS):
        t_mp = mpmath.mpf(t)
        value = mpmath.im(mpmath.loggamma(mpmath.mpc(0.25, t_mp / 2))) - t_mp / 2 * mpmath.log(
            mpmath.pi
        )
        return float(value)


def precise_z(t: float, digits: int = 12) -> float:
    """Z(t) = Re(e^{i theta(t)} zeta(1/2 + it)) from the oracle."""
    with mpmath.workdps(digits + GUARD_DIGITS):
        t_mp = mpmath.mpf(t)
        theta = mpmath.im(mpmath.loggamma(mpmath.mpc(0.25, t_mp / 2))) - t_mp / 2 * mpmath.log(
            mpmath.pi
        )
        zeta = _em_sum(mpmath.mpc(0.5, t_mp), digits)
        return float(mpmath.re(mpmath.expj(theta) * zeta))


def _wrap(angle: float) -> float:
    return (angle + math.pi) % (2 * math.pi) - math.pi


def s_by_argument(t: float, digits: int = 10, sigma_start: float = 3.0,
                  max_depth: int = 40) -> float:
    """S(t) by continuous variation of arg zeta along [sigma_start, 1/2] + it.

    Re zeta > 0 on Re s = sigma_start, so the principal argument there is
    the continuous one. Segments are bisected until consecutive argument
    increments stay below pi/4.
    """

    def arg_at(sigma: float) -> float:
        return float(mpmath.arg(zeta_oracle(complex(sigma, t), digits, as_mp=True)))

    grid = [sigma_start - (sigma_start - 0.5) * i / 16 for i in range(17)]
    stack = [(grid[i], grid[i + 1], 0) for i in reversed(range(16))]
    cache = {sigma: arg_at(sigma) for sigma in grid}

    total = cache[grid[0]]
    while stack:
        left, right, depth = stack.pop()
        delta = _wrap(cache[right] - cache[left])
        if abs(delta) > math.pi / 4 and depth < max_depth:
            mid = 0.5 * (left + right)
            cache[mid] = arg_at(mid)
            stack.append((mid, right, depth + 1))
            stack.append((left, mid, depth + 1))
            continue
        total += delta
    return total / math.pi


def oracle_log_derivative(s: complex, digits: int = 20) -> complex:
    """zeta'/zeta(s) by a central difference of the oracle."""
    step = 10.0 ** (-(digits // 2))
    with mpmath.workdps(2 * digits + GUARD_DIGITS):
        s_mp = mpmath.mpc(s)
        h = mpmath.mpf(step)
        work = min(MAX_DIGITS, 2 * digits)
        up = zeta_oracle(s_mp + h, work, as_mp=True)
        down = zeta_oracle(s_mp - h, work, as_mp=True)
        mid = zeta_oracle(s_mp, work, as_mp=True)
        return complex((up - down) / (2 * h) / mid)
