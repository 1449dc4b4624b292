"""The smoothing kernel u, its Mellin transform and the weight w_X.

    u(x) = (9 log x - 3) / x     e^{1/3} <= x <= e^{2/3}
    u(x) = (9 - 9 log x) / x     e^{2/3} <= x <= e
    u(x) = 0                     otherwise

In the variable v = log x, u(e^v) e^v is the triangle of height 3 on
[1/3, 1], so int u = 1 and int u(x) x^{-z} dx = 9 (e^{-z/6} - e^{-z/2})^2 / z^2.
The weight w_X(y) = int_{y^{1/log X}}^inf u with a = log y / log X is

    1                        a <= 1/3
    1/2 + 3a - (9/2) a^2     1/3 <= a <= 2/3
    (9/2) (1 - a)^2          2/3 <= a <= 1
    0                        a >= 1
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from zml.errors import DomainError
from zml.report import CheckReport

SERIES_RADIUS = 1e-3
E13, E23 = math.exp(1 / 3), math.exp(2 / 3)


def kernel_u(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        lx = np.log(np.where(x > 0, x, 1.0))
        rising = (9 * lx - 3) / x
        falling = (9 - 9 * lx) / x
    value = np.where((x >= E13) & (x <= E23), rising, 0.0)
    value = np.where((x > E23) & (x <= math.e), falling, value)
    return float(value) if value.ndim == 0 else value


def kernel_u_tilde(z):
    """u~(1 - z) = int_0^inf u(x) x^{-z} dx, equal to 1 at z = 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < SERIES_RADIUS
    safe = np.where(small, 1.0, z)
    closed = 9.0 * ((np.exp(-safe / 6) - np.exp(-safe / 2)) / safe) ** 2
    series = 9.0 * (1 / 3 - z / 9 + 13 * z**2 / 648 - 5 * z**3 / 1944) ** 2
    value = np.where(small, series, closed)
    return complex(value) if value.ndim == 0 else value


def mellin_u_numeric(z: complex) -> complex:
    """int u(x) x^{-z} dx by adaptive quadrature; the oracle for ``kernel_u_tilde``."""

    def part(f):
        total = 0.0
        for lo, hi in ((E13, E23), (E23, math.e)):
            value, _ = quad(f, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)
            total += value
        return total

    re = part(lambda x: kernel_u(x) * (x ** (-z)).real)
    im = part(lambda x: kernel_u(x) * (x ** (-z)).imag)
    return complex(re, im)


def _check_weight_args(y, X: float) -> np.ndarray:
    if X < 3:
        raise DomainError(f"X must be >= 3, got {X}")
    y = np.asarray(y, dtype=float)
    if y.size and np.min(y) < 1:
        raise DomainError("weight_w needs y >= 1")
    return y


def weight_from_ratio(a):
    """w as a function of a = log y / log X."""
    a = np.asarray(a, dtype=float)
    value = np.select(
        [a <= 1 / 3, a <= 2 / 3, a <= 1],
        [np.ones_like(a), 0.5 + 3 * a - 4.5 * a * a, 4.5 * (1 - a) ** 2],
        default=0.0,
    )
    return float(value) if value.ndim == 0 else value


def weight_w(y, X: float):
    """w_X(y); scalar or array in y."""
    y = _check_weight_args(y, X)
    return weight_from_ratio(np.log(y) / math.log(X))


def weight_w_integral(y: float, X: float) -> float:
    """int_{y^{1/log X}}^inf u(x) dx, computed numerically."""
    _check_weight_args(y, X)
    lower = y ** (1 / math.log(X))
    if lower >= math.e:
        return 0.0
    total = 0.0
    for lo, hi in ((E13, E23), (E23, math.e)):
        lo = max(lo, lower)
        if hi > lo:
            value, _ = quad(kernel_u, lo, hi, epsabs=1e-14, epsrel=1e-13)
            total += value
    return total


def printed_weight(y, X: float):
    """w_X with the middle branch exactly as printed:
    (9 (log X/y)^2 - 6 (log X^{2/3}/y)^2) / (2 (log X^{2/3})^2).

    Differs from :func:`weight_w` only on X^{1/3} < y < X^{2/3}.
    """
    y = _check_weight_args(y, X)
    a = np.log(y) / math.log(X)
    middle = (9 * (1 - a) ** 2 - 6 * (2 / 3 - a) ** 2) / (2 * (2 / 3) ** 2)
    value = np.select(
        [a <= 1 / 3, a <= 2 / 3, a <= 1],
        [np.ones_like(a), middle, 4.5 * (1 - a) ** 2],
        default=0.0,
    )
    return float(value) if value.ndim == 0 else value


def weight_branch_report(X: float = 1e6) -> CheckReport:
    report = CheckReport(name="weight-branches")
    for a in (1 / 3, 0.5, 2 / 3):
        y = X**a
        derived, printed = weight_w(y, X), printed_weight(y, X)
        integral = weight_w_integral(y, X)
        report.measurements[f"derived@{a:.4f}"] = derived
        report.measurements[f"printed@{a:.4f}"] = printed
        report.measurements[f"integral@{a:.4f}"] = integral
        if abs(printed - integral) > 1e-8:
            report.warn(
                "printed-branch",
                f"printed middle branch gives {printed:.6f}, the kernel integral {integral:.6f}",
                where=f"a={a:.4f}",
            )
        if abs(derived - integral) > 1e-8:
            report.error("derived-branch", f"closed form {derived!r} != integral {integral!r}",
                         where=f"a={a:.4f}")
    return report
