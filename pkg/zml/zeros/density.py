"""Zero density: N(sigma, T), density-estimate shapes, synthetic zeros.

A zero-density estimate is the statement

    N(sigma, T) << T^{1 - lam (sigma - 1/2)} Phi(T),   sigma >= 1/2 + 1/log T,

for a pair (lam, Phi). Only the shapes are evaluated here; the implied
constants are not known.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace

import numpy as np

from zml.errors import DomainError
from zml.report import CheckReport
from zml.zeros.models import ZeroEntry, ZeroOrigin, ZeroTable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DensityEstimate:
    """A (lam, Phi) pair, Phi given as a function of T."""

    name: str
    lam: float
    phi: Callable[[float], float]

    def bound(self, T: float, sigma: float) -> float:
        return density_bound(T, sigma, self.lam, self.phi(T))


def _log_power(power: float) -> Callable[[float], float]:
    def phi(T: float) -> float:
        return math.log(T) ** power

    return phi


PHI_SHAPES: dict[str, Callable[[float], float]] = {
    "ingham": _log_power(5.0),
    "selberg": _log_power(1.0),
}

DENSITY_PRESETS: dict[str, DensityEstimate] = {
    "ingham": DensityEstimate("ingham", 4.0 / 3.0, _log_power(5.0)),
    "selberg": DensityEstimate("selberg", 0.25, _log_power(1.0)),
    "conrey": DensityEstimate("conrey", 8.0 / 7.0, _log_power(1.0)),
    "density": DensityEstimate("density", 2.0, _log_power(1.0)),
}


def resolve_phi(spec: str | Callable[[float], float]) -> Callable[[float], float]:
    """Phi from a shape name (``ingham`` = (log T)^5, ``selberg`` = log T) or a callable."""
    if callable(spec):
        return spec
    try:
        return PHI_SHAPES[spec]
    except KeyError:
        raise DomainError(
            f"unknown Phi shape {spec!r}; expected one of {sorted(PHI_SHAPES)} or a callable"
        ) from None


# ── Counting ─────────────────────────────────────────────────────────


def count_N_sigma(table: ZeroTable, sigma: float, T: float,
                  report: CheckReport | None = None) -> int:
    """N(sigma, T): zeros with beta > sigma and 0 <= gamma <= T, with multiplicity.

    The count is exact for every sigma >= 1/2. Below 1/2 + 1/log T the
    density estimate says nothing, so a ``sigma-below-floor`` warning is
    logged and added to ``report`` when one is given.
    """
    if T <= math.e:
        raise DomainError(f"T must exceed e, got {T!r}")
    if sigma < 0.5:
        raise DomainError(f"sigma must be >= 1/2, got {sigma!r}")
    floor = 0.5 + 1.0 / math.log(T)
    if sigma < floor:
        message = f"sigma = {sigma:g} is below 1/2 + 1/log T = {floor:.6f}"
        logger.warning(message)
        if report is not None:
            report.warn("sigma-below-floor", message, f"T={T:g}")
    table.require_coverage(0.0, T)
    sl = table.window(0.0, T)
    mask = table.betas[sl] > sigma
    return int(table.multiplicities[sl][mask].sum())


def density_bound(T: float, sigma: float, lam: float, phi_at_T: float) -> float:
    """T^{1 - lam (sigma - 1/2)} Phi(T)."""
    return T ** (1.0 - lam * (sigma - 0.5)) * phi_at_T


def exceptional_measure_bound(K: float, log_X: float, T: float, lam: float,
                              phi_at_T: float) -> float:
    """Shape K e^K Phi(T)/log X * exp(-lam K log T / log X) bounding
    meas([T, 2T] minus E_K(X, T)) / T."""
    return K * math.exp(K) * phi_at_T / log_X * math.exp(-lam * K * math.log(T) / log_X)


# ── Smooth density of ordinates ──────────────────────────────────────


def zero_density(gamma):
    """Mean number of ordinates per unit height, log(gamma / 2 pi) / 2 pi."""
    g = np.asarray(gamma, dtype=float)
    return np.log(g / (2 * np.pi)) / (2 * np.pi)


def mean_gap(t: float) -> float:
    """Mean spacing 2 pi / log(t / 2 pi) (clamped for small t)."""
    return 2 * math.pi / max(math.log(t / (2 * math.pi)), 0.25)


def s_bound(t: float) -> float:
    """Explicit bound on |S(t)| valid for t >= e."""
    t = max(t, math.e)
    return 0.112 * math.log(t) + 0.278 * math.log(math.log(t)) + 2.51


# ── Synthetic zeros ──────────────────────────────────────────────────


def inject_synthetic(
    table: ZeroTable, zeros: Sequence[ZeroEntry | tuple[float, float]]
) -> ZeroTable:
    """Merge synthetic zeros into a table. Partners 1 - beta are not added.

    Zeros may be given as entries or as (beta, gamma) pairs.
    """
    forced = []
    for z in zeros:
        if not isinstance(z, ZeroEntry):
            beta, gamma = z
            if not 0.0 < beta < 1.0:
                raise DomainError(f"synthetic beta must lie in (0, 1), got {beta!r}")
            z = synthetic_zero(beta, gamma)
        forced.append(replace(z, origin=ZeroOrigin.SYNTHETIC))
    logger.debug("injecting %d synthetic zero(s)", len(forced))
    return table.with_entries(forced, f"synthetic({len(forced)})")


def synthetic_zero(beta: float, gamma: float, multiplicity: int = 1) -> ZeroEntry:
    return ZeroEntry(beta=beta, gamma=gamma, multiplicity=multiplicity,
                     origin=ZeroOrigin.SYNTHETIC)
