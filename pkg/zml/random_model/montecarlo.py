"""Monte Carlo estimators over the random model."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from zml.errors import DomainError, PreconditionError
from zml.parallel import map_ordered
from zml.report import CheckReport
from zml.partition.regime import RegimeParams
from zml.random_model import MIN_TRIALS, TRIAL_CHUNK
from zml.random_model.expectation import (
    exact_poly_moment,
    exact_power_moment,
    exp_moment_reference,
    factorial_moment_bound,
    window_coefficients,
)
from zml.random_model.sampler import UnitSampler

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ("expr_id", "estimate", "std_error", "exact_value", "bound")
EXACT_MAX_PRIMES = 6
EXACT_MAX_K = 3
SE_TOLERANCE = 4.0


# ── Expressions ──────────────────────────────────────────────────────


def _g_values(units: np.ndarray, c1: np.ndarray, c2: np.ndarray) -> np.ndarray:
    return (units @ c1 + (units * units) @ c2).real


@dataclass
class GMoment:
    """G_(i,j)(X)^n over a (possibly truncated) prime window."""

    regime: RegimeParams
    i: int
    j: int
    n: int
    prime_cap: int | None = None
    primes: np.ndarray = field(init=False, repr=False)
    c1: np.ndarray = field(init=False, repr=False)
    c2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.regime.check_index(self.j)
        self.primes, self.c1, self.c2 = window_coefficients(
            self.regime, self.i, self.j, self.prime_cap
        )

    @property
    def expr_id(self) -> str:
        return f"G({self.i},{self.j})^{self.n}"

    def evaluate(self, units: np.ndarray) -> np.ndarray:
        return _g_values(units, self.c1, self.c2) ** self.n

    def exact_value(self) -> float:
        return exact_poly_moment(self.primes, self.c1, self.c2, self.n)

    def bound(self) -> float | None:
        return None


@dataclass
class ExpSumG:
    """exp(2k sum_{i <= j} G_(i,j)(X)); j defaults to the top index I."""

    regime: RegimeParams
    k: float
    j: int | None = None
    prime_cap: int | None = None
    primes: np.ndarray = field(init=False, repr=False)
    c1: np.ndarray = field(init=False, repr=False)
    c2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.k < 0:
            raise DomainError(f"k must be >= 0, got {self.k}")
        if self.prime_cap is not None and self.prime_cap < 1:
            raise DomainError(f"prime_cap must be >= 1, got {self.prime_cap}")
        j = self.regime.I_index if self.j is None else self.j
        self.regime.check_index(j)
        self.j = j
        parts = []
        remaining = self.prime_cap
        for i in range(1, j + 1):
            if remaining == 0:
                break
            part = window_coefficients(self.regime, i, j, remaining)
            parts.append(part)
            if remaining is not None:
                remaining -= part[0].size
        self.primes = np.concatenate([p for p, _, _ in parts])
        self.c1 = np.concatenate([a for _, a, _ in parts])
        self.c2 = np.concatenate([b for _, _, b in parts])

    @property
    def expr_id(self) -> str:
        return f"exp(2*{self.k:g}*sumG(.,{self.j}))"

    def evaluate(self, units: np.ndarray) -> np.ndarray:
        if self.k == 0:
            return np.ones(units.shape[0])
        return np.exp(2 * self.k * _g_values(units, self.c1, self.c2))

    def exact_value(self) -> float:
        return exp_moment_reference(self)

    def bound(self) -> float | None:
        return None

    def shape_ratio(self) -> float:
        """Reference value / (log X)^{k^2}, divided by exp(-k^2 log log kappa)."""
        log_X = self.regime.log_X(self.j)
        k2 = self.k**2
        return self.exact_value() / log_X**k2 / math.exp(-k2 * math.log(math.log(self.regime.kappa)))


@dataclass
class AbsPower:
    """|sum_p a(p) X(p)^ell|^{2k}."""

    a_coeffs: dict[int, complex]
    k: int
    ell: int = 1
    primes: np.ndarray = field(init=False, repr=False)
    coeffs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.ell == 0:
            raise DomainError("ell must be nonzero")
        self.primes = np.array(sorted(self.a_coeffs), dtype=np.int64)
        self.coeffs = np.array([complex(self.a_coeffs[int(p)]) for p in self.primes])

    @property
    def expr_id(self) -> str:
        return f"|sum a X^{self.ell}|^{2 * self.k}"

    def evaluate(self, units: np.ndarray) -> np.ndarray:
        return np.abs((units**self.ell) @ self.coeffs) ** (2 * self.k)

    @property
    def exact_feasible(self) -> bool:
        return self.primes.size <= EXACT_MAX_PRIMES and self.k <= EXACT_MAX_K

    def exact_value(self) -> float | None:
        if not self.exact_feasible:
            return None
        return exact_power_moment(self.a_coeffs, self.k, self.ell)

    def bound(self) -> float:
        return factorial_moment_bound(self.a_coeffs, self.k)


# ── Estimation ───────────────────────────────────────────────────────


@dataclass(frozen=True)
class MCResult:
    expr_id: str
    mean: float
    std_error: float
    trials: int
    exact_value: float | None = None
    bound: float | None = None

    @property
    def z_score(self) -> float | None:
        if self.exact_value is None:
            return None
        if self.std_error == 0:
            return 0.0 if self.mean == self.exact_value else math.inf
        return (self.mean - self.exact_value) / self.std_error

    def agrees(self, n_se: float = SE_TOLERANCE) -> bool:
        z = self.z_score
        return z is None or abs(z) <= n_se

    def as_row(self) -> tuple:
        return (self.expr_id, self.mean, self.std_error, self.exact_value, self.bound)

    def summary(self) -> str:
        exact = "" if self.exact_value is None else f" (exact {self.exact_value:.6g})"
        return f"{self.expr_id}: {self.mean:.6g} ± {self.std_error:.2g}{exact} [{self.trials} trials]"

    def to_dict(self) -> dict:
        return dict(zip(REPORT_COLUMNS, self.as_row())) | {"trials": self.trials}


def _mc_chunk(args) -> tuple[int, float, float]:
    """(count, mean, sum of squared deviations) of one block of trials."""
    expr, seed, start, count = args
    units = UnitSampler(seed).units(expr.primes, start, count)
    values = expr.evaluate(units)
    mean = float(np.mean(values))
    return count, mean, float(np.sum((values - mean) ** 2))


def _combine(parts) -> tuple[int, float, float]:
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in parts:
        total = n + nb
        delta = mb - mean
        mean += delta * nb / total
        m2 += m2b + delta * delta * n * nb / total
        n = total
    return n, mean, m2


def mc_estimate(expr, trials: int, seed: int, workers: int = 1,
                chunk: int = TRIAL_CHUNK, with_exact: bool = False) -> MCResult:
    """Sample mean and standard error of ``expr`` over ``trials`` draws.

    Trials are cut into fixed blocks and reduced in block order, so the
    result depends on (seed, trials, chunk) only.

    Raises:
        PreconditionError: if trials < 1000.
    """
    if trials < MIN_TRIALS:
        raise PreconditionError(f"need at least {MIN_TRIALS} trials, got {trials}")
    if chunk % 4:
        raise DomainError(f"chunk must be a multiple of 4, got {chunk}")
    jobs = [(expr, seed, start, min(chunk, trials - start)) for start in range(0, trials, chunk)]
    logger.debug("%s: %d trials in %d chunk(s)", expr.expr_id, trials, len(jobs))
    n, mean, m2 = _combine(map_ordered(_mc_chunk, jobs, workers))
    se = math.sqrt(m2 / (n - 1) / n)
    exact = expr.exact_value() if with_exact else None
    return MCResult(expr.expr_id, mean, se, n, exact, expr.bound())


@dataclass(frozen=True)
class MomentBound:
    value: float
    bound: float
    std_error: float
    exact: bool

    @property
    def violated(self) -> bool:
        slack = SE_TOLERANCE * self.std_error + 1e-12 * max(1.0, self.bound)
        return self.value > self.bound + slack

    def to_dict(self) -> dict:
        return {"value": self.value, "bound": self.bound, "std_error": self.std_error,
                "exact": self.exact, "violated": self.violated}


def check_moment_bound(a_coeffs: dict[int, complex], k: int, ell: int = 1,
                       trials: int = 100_000, seed: int = 0, workers: int = 1) -> MomentBound:
    """E|sum a(p) X(p)^ell|^{2k} against k! (sum |a|^2)^k.

    Exact for at most six primes and k <= 3, Monte Carlo otherwise.
    """
    if k < 1:
        raise PreconditionError(f"k must be >= 1, got {k}")
    expr = AbsPower(a_coeffs, k, ell)
    if expr.exact_feasible:
        return MomentBound(expr.exact_value(), expr.bound(), 0.0, True)
    est = mc_estimate(expr, trials, seed, workers)
    return MomentBound(est.mean, expr.bound(), est.std_error, False)


# ── Sampler checks ───────────────────────────────────────────────────


@dataclass(frozen=True)
class UniformityResult:
    statistic: float
    critical: float
    pvalue: float

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical


def angular_uniformity(sampler: UnitSampler, primes, trials: int = 100_000,
                       alpha: float = 0.01) -> UniformityResult:
    """Kolmogorov–Smirnov test of sampled angles against the uniform law.

    The largest statistic over ``primes`` is compared with the
    Bonferroni-corrected critical value.
    """
    primes = np.atleast_1d(np.asarray(primes, dtype=np.int64))
    angles = sampler.angles(primes, 0, trials) / (2 * math.pi)
    results = [stats.kstest(angles[:, c], "uniform") for c in range(primes.size)]
    worst = max(results, key=lambda r: r.statistic)
    critical = float(stats.kstwo.ppf(1 - alpha / primes.size, trials))
    return UniformityResult(float(worst.statistic), critical, float(worst.pvalue))


# ── Randomized suites ────────────────────────────────────────────────

SUITE_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)
SUITE_COLUMNS = ("spec", "primes", "k", "ell", "exact", "mc", "std_error", "bound")


def moment_bound_suite(n_specs: int, seed: int, trials: int = 20_000,
                       workers: int = 1) -> tuple[CheckReport, list[tuple]]:
    """Random small specs: exact value against k! (sum |a|^2)^k and against Monte Carlo.

    Each spec draws up to four primes, complex coefficients, k in 1..3
    and ell in {-2, -1, 1, 2}. Bound violations and exact/Monte Carlo
    disagreements beyond 4 standard errors are errors in the report.
    """
    rng = np.random.default_rng(seed)
    report = CheckReport(name="moment-bound")
    rows = []
    worst = 0.0
    for n in range(n_specs):
        size = int(rng.integers(1, 5))
        chosen = sorted(int(p) for p in rng.choice(SUITE_PRIMES, size=size, replace=False))
        coeffs = rng.normal(size=size) + 1j * rng.normal(size=size)
        k = int(rng.integers(1, EXACT_MAX_K + 1))
        ell = int(rng.choice([-2, -1, 1, 2]))
        expr = AbsPower(dict(zip(chosen, coeffs.tolist())), k, ell)
        exact = expr.exact_value()
        bound = expr.bound()
        est = mc_estimate(expr, trials, (seed + n) % 2**64, workers)
        rows.append((n, " ".join(map(str, chosen)), k, ell, exact, est.mean, est.std_error, bound))
        worst = max(worst, exact / bound if bound else 0.0)
        where = f"spec {n}"
        if MomentBound(exact, bound, 0.0, True).violated:
            report.error("bound-violated", f"exact {exact:.6g} > bound {bound:.6g}", where)
        if abs(est.mean - exact) > SE_TOLERANCE * est.std_error + 1e-12 * max(1.0, exact):
            report.error(
                "mc-disagrees",
                f"Monte Carlo {est.mean:.6g} ± {est.std_error:.2g} vs exact {exact:.6g}",
                where,
            )
    report.measurements.update({"max_ratio": worst, "specs": float(n_specs)})
    logger.info("moment-bound suite: %s", report.summary())
    return report, rows
