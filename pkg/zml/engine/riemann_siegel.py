"""Riemann–Siegel theta and Hardy Z in binary64.

Z(t) = 2 sum_{n <= a} n^{-1/2} cos(theta(t) - t log n) + R(t),  a = sqrt(t / 2 pi),

with R(t) = (-1)^{N-1} a^{-1/2} sum_k C_k(p) a^{-k}, N = floor(a), p = a - N.
The correction functions C_k are built from the Taylor series of
Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p) in z = 1 - 2p and its
derivatives. Truncation after C_k leaves an error of order
t^{-(2k + 3)/4}.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import Polynomial

from zml.engine import VALIDITY_FLOOR
from zml.errors import DomainError

MAX_ORDER = 4
DEFAULT_ORDER = 2
_CHUNK = 4096

# Taylor coefficients of Psi in even powers of z = 1 - 2p (z^0, z^2, ..., z^42).
_PSI_EVEN = (
    0.38268343236508977173,
    0.43724046807752044936,
    0.13237657548034352332,
    -0.01360502604767418865,
    -0.01356762197010358089,
    -0.00162372532314446528,
    0.00029705353733379691,
    0.00007943300879521470,
    0.00000046556124614505,
    -0.00000143272516309551,
    -0.00000010354847112313,
    0.00000001235792708386,
    0.00000000178810838580,
    -0.00000000003391414390,
    -0.00000000001632663390,
    -0.00000000000037851093,
    0.00000000000009327423,
    0.00000000000000522184,
    -0.00000000000000033507,
    -0.00000000000000003412,
    0.00000000000000000058,
    0.00000000000000000015,
)


def _build_corrections() -> tuple[Polynomial, ...]:
    coef = np.zeros(2 * len(_PSI_EVEN) - 1)
    coef[::2] = _PSI_EVEN
    psi = Polynomial(coef)

    def d(m: int) -> Polynomial:
        # d/dp = -2 d/dz
        return (-2.0) ** m * psi.deriv(m) if m else psi

    pi2 = math.pi**2
    c0 = psi
    c1 = -d(3) / (96 * pi2)
    c2 = d(2) / (64 * pi2) + d(6) / (18432 * pi2**2)
    c3 = -d(1) / (64 * pi2) - d(5) / (3840 * pi2**2) - d(9) / (5308416 * pi2**3)
    c4 = (
        d(0) / (128 * pi2)
        + 19 * d(4) / (24576 * pi2**2)
        + 11 * d(8) / (5898240 * pi2**3)
        + d(12) / (2038431744 * pi2**4)
    )
    return (c0, c1, c2, c3, c4)


CORRECTIONS = _build_corrections()


def _check_floor(t: np.ndarray) -> None:
    if t.size and float(np.min(t)) < VALIDITY_FLOOR:
        raise DomainError(
            f"t = {float(np.min(t))!r} is below the Riemann–Siegel validity floor "
            f"{VALIDITY_FLOOR}"
        )


def rs_theta(t):
    """theta(t) from its asymptotic series; valid for t >= 10.

    Accepts a scalar or an array and returns the same shape.
    """
    arr = np.asarray(t, dtype=float)
    _check_floor(arr)
    value = (
        0.5 * arr * np.log(arr / (2 * math.pi))
        - 0.5 * arr
        - math.pi / 8
        + 1.0 / (48 * arr)
        + 7.0 / (5760 * arr**3)
    )
    return float(value) if np.ndim(value) == 0 else value


def rs_theta_prime(t):
    """theta'(t) = (1/2) log(t / 2 pi) to the same order as ``rs_theta``."""
    arr = np.asarray(t, dtype=float)
    value = 0.5 * np.log(arr / (2 * math.pi)) - 1.0 / (48 * arr**2) - 7.0 / (1920 * arr**4)
    return float(value) if np.ndim(value) == 0 else value


def rs_remainder(t, correction_order: int = DEFAULT_ORDER):
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    a = np.sqrt(arr / (2 * math.pi))
    n = np.floor(a)
    z = 1.0 - 2.0 * (a - n)
    total = np.zeros_like(arr)
    inv_a = 1.0 / a
    scale = np.ones_like(arr)
    for k in range(correction_order + 1):
        total += CORRECTIONS[k](z) * scale
        scale = scale * inv_a
    sign = np.where(n.astype(np.int64) % 2 == 1, 1.0, -1.0)  # (-1)^(N-1)
    return sign * total / np.sqrt(a)


def hardy_z(t, correction_order: int = DEFAULT_ORDER):
    """Hardy's Z(t) by the Riemann–Siegel formula.

    Args:
        t: Height(s), all >= 10.
        correction_order: Number of correction terms C_1..C_order (0-4).

    Returns:
        Z(t), scalar or array matching ``t``.
    """
    if correction_order not in range(MAX_ORDER + 1):
        raise DomainError(f"correction_order must be in 0..{MAX_ORDER}, got {correction_order}")
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    _check_floor(arr)

    out = np.empty_like(arr)
    for start in range(0, arr.size, _CHUNK):
        chunk = arr[start : start + _CHUNK]
        theta = rs_theta(chunk)
        a = np.sqrt(chunk / (2 * math.pi))
        n_main = np.floor(a).astype(np.int64)
        n = np.arange(1, int(n_main.max()) + 1, dtype=float)
        phase = theta[:, None] - chunk[:, None] * np.log(n)[None, :]
        terms = np.cos(phase) / np.sqrt(n)[None, :]
        terms[n[None, :] > n_main[:, None]] = 0.0
        out[start : start + _CHUNK] = 2.0 * terms.sum(axis=1)
    out += rs_remainder(arr, correction_order)
    return float(out[0]) if np.ndim(t) == 0 else out.reshape(np.shape(t))
