"""Regime parameters, the delta ladder and the coefficients phi_j, psi_j."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from zml.approx.kernel import weight_from_ratio
from zml.approx.primes import sieve_primes
from zml.constants import big_a, optimize_h
from zml.errors import DomainError, PreconditionError, RegimeIndexError

logger = logging.getLogger(__name__)

THRESHOLD_FACTOR = 80.0
A_THRESHOLD_BASE = 20 * math.e**2
MAX_PHASES = 1 << 22  # complex entries per phase block


@dataclass(frozen=True)
class RegimeOverrides:
    """Explicit replacements used to reach multi-range paths at desk scale.

    ``delta`` replaces the whole ladder (it must start at 0 and increase);
    ``threshold`` replaces e^{-80 A kappa K}; ``a_threshold_scale``
    multiplies every A(i, j) threshold.
    """

    L: float | None = None
    K: float | None = None
    threshold: float | None = None
    a_threshold_scale: float = 1.0
    delta: tuple[float, ...] | None = None

    @property
    def active(self) -> bool:
        return (
            self.L is not None
            or self.K is not None
            or self.threshold is not None
            or self.a_threshold_scale != 1.0
            or self.delta is not None
        )

    @classmethod
    def from_dict(cls, data: dict | None) -> RegimeOverrides:
        data = dict(data or {})
        if data.get("delta") is not None:
            data["delta"] = tuple(float(d) for d in data["delta"])
        unknown = set(data) - {"L", "K", "threshold", "a_threshold_scale", "delta"}
        if unknown:
            raise DomainError(f"unknown regime override(s): {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class RegimeParams:
    T: float
    k: float
    kappa: float
    K: float
    theta: float
    h: float
    A: float
    L: float
    delta: tuple[float, ...]
    I_index: int
    log_threshold: float
    overridden: bool = False
    a_threshold_scale: float = 1.0
    _prime_cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def log_T(self) -> float:
        return math.log(self.T)

    def log_X(self, j: int) -> float:
        """log T^{delta_j}."""
        return self.delta[j] * self.log_T

    def X(self, j: int) -> float:
        return math.exp(self.log_X(j))

    def check_index(self, j: int) -> None:
        if not 1 <= j <= self.I_index:
            raise RegimeIndexError(f"index {j} outside 1..{self.I_index}")

    def a_threshold(self, i: int, j: int) -> float:
        """Bound on |G_(i,j)| defining A(i, j)."""
        return self.a_threshold_scale / (
            A_THRESHOLD_BASE * self.kappa * (j + 1 - i) ** 2 * self.delta[i]
        )

    def window_primes(self, i: int, cap: int | None = None) -> np.ndarray:
        """Primes p with T^{delta_{i-1}} < p <= T^{delta_i}, or the first ``cap`` of them.

        With a cap the sieve stops once enough primes are found, so windows
        far beyond the sieve limit can still be sampled from below.
        """
        self.check_index(i)
        if i in self._prime_cache:
            primes = self._prime_cache[i]
            return primes if cap is None else primes[:cap]
        lo = self.X(i - 1) if i > 1 else 1.0
        hi = self.X(i)
        if cap is None:
            self._prime_cache[i] = _primes_between(lo, hi)
            return self._prime_cache[i]
        bound = min(hi, lo + max(64.0, 4.0 * cap * math.log(max(lo, math.e))))
        while True:
            primes = _primes_between(lo, bound)
            if primes.size >= cap or bound >= hi:
                return primes[:cap]
            bound = min(hi, 2.0 * bound)

    def summary(self) -> str:
        flag = " (overridden)" if self.overridden else ""
        return (
            f"T={self.T:g} k={self.k:g} K={self.K:g} theta={self.theta:.4f} "
            f"L={self.L:.4f} I={self.I_index}{flag}"
        )

    def to_dict(self) -> dict:
        return {
            "T": self.T, "k": self.k, "kappa": self.kappa, "K": self.K,
            "theta": self.theta, "h": self.h, "A": self.A, "L": self.L,
            "delta": list(self.delta), "I_index": self.I_index,
            "log_threshold": self.log_threshold, "overridden": self.overridden,
            "a_threshold_scale": self.a_threshold_scale,
        }


def _primes_between(lo: float, hi: float) -> np.ndarray:
    if hi < 2:
        return np.array([], dtype=np.int64)
    primes = sieve_primes(hi).primes
    return primes[primes > lo]


def default_L(T: float) -> float:
    return (math.log(T) / math.log(math.log(T))) ** 0.125


def delta_ladder(L: float) -> tuple[float, ...]:
    """delta_0 = 0 and delta_i = (L + 1 - i)^{-8} for 1 <= i <= ceil(L)."""
    return (0.0,) + tuple((L + 1 - i) ** -8 for i in range(1, math.ceil(L) + 1))


def index_I(delta: tuple[float, ...], log_threshold: float) -> int:
    """1 + max{i : delta_i <= threshold}, capped at the top of the ladder."""
    qualifying = [i for i, d in enumerate(delta) if d == 0 or math.log(d) <= log_threshold]
    return min(1 + max(qualifying), len(delta) - 1)


def build_regime(
    T: float,
    k: float,
    K: float,
    theta: float,
    overrides: RegimeOverrides | None = None,
) -> RegimeParams:
    """Regime parameters at height T.

    Raises:
        DomainError: for T < 100, k < 0, K < 1 or a malformed override ladder.
    """
    if T < 100:
        raise DomainError(f"T must be >= 100, got {T}")
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    overrides = overrides or RegimeOverrides()
    K = overrides.K if overrides.K is not None else K
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")

    h = optimize_h(theta).h_star
    A = float(big_a(h, theta))
    kappa = k + 3

    if overrides.delta is not None:
        delta = tuple(overrides.delta)
        if len(delta) < 2 or delta[0] != 0 or any(b <= a for a, b in zip(delta, delta[1:])):
            raise DomainError(f"delta ladder must start at 0 and increase, got {delta}")
        L = overrides.L if overrides.L is not None else float(len(delta) - 1)
    else:
        L = overrides.L if overrides.L is not None else default_L(T)
        if L <= 0:
            raise DomainError(f"L must be positive, got {L}")
        delta = delta_ladder(L)

    if overrides.threshold is not None:
        if overrides.threshold <= 0:
            raise DomainError(f"threshold must be positive, got {overrides.threshold}")
        log_threshold = math.log(overrides.threshold)
    else:
        log_threshold = -THRESHOLD_FACTOR * A * kappa * K

    regime = RegimeParams(
        T=T, k=k, kappa=kappa, K=K, theta=theta, h=h, A=A, L=L, delta=delta,
        I_index=index_I(delta, log_threshold), log_threshold=log_threshold,
        overridden=overrides.active, a_threshold_scale=overrides.a_threshold_scale,
    )
    logger.debug("regime: %s", regime.summary())
    return regime


# ── Coefficients ─────────────────────────────────────────────────────


def coeff_arrays(primes: np.ndarray, j: int, regime: RegimeParams):
    """(phi_j(p), psi_j(p)) for an array of primes p <= T^{delta_j}."""
    regime.check_index(j)
    log_X = regime.log_X(j)
    p = np.asarray(primes, dtype=float)
    if p.size and p.max() > math.exp(log_X) * (1 + 1e-12):
        raise PreconditionError(f"prime {p.max():g} exceeds T^delta_{j} = {math.exp(log_X):g}")
    log_p = np.log(p)
    rot = complex(math.cos(regime.theta), -math.sin(regime.theta))
    ratio = log_p / log_X
    w = weight_from_ratio(ratio)
    damp = np.exp(-regime.K * ratio / regime.h)
    phi = w * damp * (
        rot * (1 + regime.K * ratio / regime.h)
        - (regime.K / regime.A + 9 / regime.h) * ratio
    )
    psi = rot * damp * damp
    return phi, psi


def coeffs_phi_psi(p: int, j: int, regime: RegimeParams) -> tuple[complex, complex]:
    """phi_j(p) and psi_j(p).

    Raises:
        RegimeIndexError: if j is outside 1..I.
        PreconditionError: if p > T^{delta_j}.
    """
    phi, psi = coeff_arrays(np.array([p]), j, regime)
    return complex(phi[0]), complex(psi[0])


def poly_G(t, i: int, j: int, regime: RegimeParams, chunk: int = 2048):
    """G_(i,j)(t) = sum over T^{delta_{i-1}} < p <= T^{delta_i} of
    Re(phi_j(p) p^{-1/2 - it} + psi_j(p) p^{-1-2it} / 2); vectorised in t."""
    if not 1 <= i <= j:
        raise RegimeIndexError(f"need 1 <= i <= j, got ({i}, {j})")
    regime.check_index(j)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    primes = regime.window_primes(i)
    out = np.zeros_like(ts)
    if primes.size:
        phi, psi = coeff_arrays(primes, j, regime)
        log_p = np.log(primes.astype(float))
        c1 = phi / np.sqrt(primes)
        c2 = psi / (2 * primes)
        chunk = max(1, min(chunk, MAX_PHASES // primes.size))
        for start in range(0, ts.size, chunk):
            part = ts[start : start + chunk]
            phase = np.exp(-1j * np.outer(part, log_p))
            out[start : start + chunk] = (phase @ c1 + (phase * phase) @ c2).real
    return float(out[0]) if np.ndim(t) == 0 else out
