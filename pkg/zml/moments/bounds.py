"""Right-hand sides of the moment upper bound, term by term.

For 0 <= k < A(h, theta) lam - eps,

    M_{k,theta}(T) <= exp(C1 e^{C1 k}) T (log T)^{k^2}
        + C1 T (log T)^{k^2 (1 + (k + eps) / (A lam - (k + eps)))} (Phi(T) / log T)^{(k + eps) / (A lam)}
        + C1 T Phi(T) / log T.

C1 is not effective, so it is a parameter (default 1). Every term is
formed in log space; ``total`` is inf when it leaves binary64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import logsumexp

from zml.constants import C0, big_a, corollary_values, optimize_h
from zml.errors import DomainError, HypothesisViolationError
from zml.zeros.density import resolve_phi

MAX_EPS = 0.01
TERM_NAMES = ("main", "mixed", "density")


@dataclass(frozen=True)
class TheoremBound:
    k: float
    theta: float
    lam: float
    T: float
    eps: float
    C1: float
    A: float
    log_terms: tuple[float, float, float]
    log_corollary: float | None = None

    @property
    def log_total(self) -> float:
        return float(logsumexp(self.log_terms))

    @property
    def terms(self) -> dict[str, float]:
        return {name: _safe_exp(v) for name, v in zip(TERM_NAMES, self.log_terms)}

    @property
    def total(self) -> float:
        return _safe_exp(self.log_total)

    @property
    def corollary(self) -> float | None:
        return None if self.log_corollary is None else _safe_exp(self.log_corollary)

    def to_dict(self) -> dict:
        return {
            "k": self.k, "theta": self.theta, "lambda": self.lam, "T": self.T,
            "eps": self.eps, "C1": self.C1, "A": self.A, "terms": self.terms,
            "log_terms": dict(zip(TERM_NAMES, self.log_terms)),
            "total": self.total, "log_total": self.log_total,
            "corollary": self.corollary,
        }


def _safe_exp(x: float) -> float:
    return math.inf if x > 709.0 else math.exp(x)


def _log(x: float) -> float:
    return -math.inf if x == 0 else math.log(x)


def theorem_bound_eval(k: float, theta: float, lam: float, Phi, T: float,
                       eps: float = MAX_EPS, C1: float = 1.0) -> TheoremBound:
    """Evaluate the three terms at (k, theta, lam, Phi, T).

    When |theta| = pi/2 the envelope T (log T)^{B(k) + eps} is added, with
    B(k) = k^2 (1 + k/(c0 - k)) + 4k/c0, provided k < c0.

    Raises:
        HypothesisViolationError: if k >= A(h, theta) lam - eps.
        DomainError: for eps outside (0, 1/100], C1 <= 0, lam <= 0 or T <= e.
    """
    if not 0 < eps <= MAX_EPS:
        raise DomainError(f"eps must lie in (0, {MAX_EPS}], got {eps}")
    if C1 <= 0 or lam <= 0:
        raise DomainError(f"C1 and lambda must be positive, got C1={C1}, lambda={lam}")
    if T <= math.e:
        raise DomainError(f"T must exceed e, got {T}")
    if k < 0:
        raise HypothesisViolationError(f"k must be >= 0, got {k}")
    A = float(big_a(optimize_h(theta).h_star, theta))
    limit = A * lam - eps
    if k >= limit:
        raise HypothesisViolationError(
            f"k = {k} is not below A(h, theta) lambda - eps = {limit:.6g}"
        )

    log_T = math.log(T)
    loglog_T = math.log(log_T)
    log_ratio = _log(resolve_phi(Phi)(T)) - loglog_T
    ke = k + eps
    main = C1 * math.exp(C1 * k) + log_T + k * k * loglog_T
    mixed = (
        math.log(C1) + log_T
        + k * k * (1 + ke / (A * lam - ke)) * loglog_T
        + ke / (A * lam) * log_ratio
    )
    density = math.log(C1) + log_T + log_ratio

    log_corollary = None
    if math.isclose(abs(theta), math.pi / 2) and k < C0:
        B, _ = corollary_values(k)
        log_corollary = log_T + (B + eps) * loglog_T
    return TheoremBound(k, theta, lam, T, eps, C1, A, (main, mixed, density), log_corollary)
