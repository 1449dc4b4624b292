"""log zeta(1/2 + it) as (log|Z(t)|, pi S(t)) driven by a zero table.

S(t) = N(t) - theta(t)/pi - 1, where N(t) counts table zeros (with
multiplicity) up to t. Between zeros S decreases with slope
-theta'(t)/pi; at a zero of multiplicity m it jumps by +m.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from zml.engine import PRECISE_BELOW
from zml.engine.oracle import precise_z
from zml.engine.riemann_siegel import hardy_z, rs_theta
from zml.errors import ProximityError
from zml.zeros.models import ZeroTable

EXCLUSION_FACTOR = 1e-4
DEFAULT_ORDER = 4


@dataclass(frozen=True)
class CriticalPoint:
    """zeta on the critical line at height t."""

    t: float
    z_value: float
    theta_value: float
    zeta_value: complex

    @property
    def modulus(self) -> float:
        return abs(self.zeta_value)

    def consistent(self, tol: float = 1e-12) -> bool:
        rotated = self.z_value * cmath.exp(-1j * self.theta_value)
        return (
            abs(abs(self.zeta_value) - abs(self.z_value)) <= tol
            and abs(self.zeta_value - rotated) <= tol
        )


@dataclass(frozen=True)
class LogZetaValue:
    """log zeta(1/2 + it) off the zero ordinates."""

    t: float
    re_log: float
    s_of_t: float

    @property
    def im_log(self) -> float:
        return math.pi * self.s_of_t

    @property
    def value(self) -> complex:
        return complex(self.re_log, self.im_log)

    def twisted(self, theta: float) -> float:
        """Re e^{-i theta} log zeta."""
        return math.cos(theta) * self.re_log + math.sin(theta) * self.im_log


def evaluate_z(ts, correction_order: int = DEFAULT_ORDER,
               precise_below: float = PRECISE_BELOW) -> np.ndarray:
    """Z(t) on an array: oracle below ``precise_below``, Riemann–Siegel above."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    out = np.empty_like(ts)
    low = ts < precise_below
    if np.any(~low):
        out[~low] = hardy_z(ts[~low], correction_order)
    for idx in np.flatnonzero(low):
        out[idx] = precise_z(float(ts[idx]))
    return out


def zeta_critical(t: float, correction_order: int = DEFAULT_ORDER,
                  precise_below: float = PRECISE_BELOW) -> CriticalPoint:
    theta = rs_theta(t)
    z = float(evaluate_z(t, correction_order, precise_below)[0])
    return CriticalPoint(t=t, z_value=z, theta_value=theta, zeta_value=z * cmath.exp(-1j * theta))


def exclusion_radius(t, factor: float = EXCLUSION_FACTOR):
    """factor times the local mean zero gap 2 pi / log(t / 2 pi)."""
    return factor * 2 * np.pi / np.log(np.asarray(t, dtype=float) / (2 * np.pi))


def log_zeta_arrays(
    ts,
    table: ZeroTable,
    correction_order: int = DEFAULT_ORDER,
    exclusion_factor: float = EXCLUSION_FACTOR,
    precise_below: float = PRECISE_BELOW,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised (log|zeta|, S) at the ordinates ``ts``.

    Raises:
        CoverageError: if the table does not cover [0, max(ts)].
        ProximityError: if some t is inside the exclusion radius of a zero.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    table.require_coverage(0.0, float(ts.max()))

    if exclusion_factor > 0 and len(table):
        dist, nearest = table.nearest(ts)
        radius = exclusion_radius(ts, exclusion_factor)
        bad = np.flatnonzero(dist < radius)
        if bad.size:
            i = int(bad[0])
            raise ProximityError(float(ts[i]), float(nearest[i]), float(radius[i]))

    z = evaluate_z(ts, correction_order, precise_below)
    with np.errstate(divide="ignore"):
        re_log = np.log(np.abs(z))
    s_of_t = table.count_below(ts) - rs_theta(ts) / np.pi - 1.0
    return re_log, s_of_t


def log_zeta_critical(
    t: float,
    table: ZeroTable,
    correction_order: int = DEFAULT_ORDER,
    exclusion_factor: float = EXCLUSION_FACTOR,
) -> LogZetaValue:
    re_log, s_of_t = log_zeta_arrays([t], table, correction_order, exclusion_factor)
    return LogZetaValue(t=float(t), re_log=float(re_log[0]), s_of_t=float(s_of_t[0]))
