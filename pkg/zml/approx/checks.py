"""Numerical checks of the approximate formula and its ingredients."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from zml.approx import DEFAULT_TAIL_TOL
from zml.approx.formula import (
    ApproxParams,
    dirichlet_P,
    prime_core,
    sigma_select,
    zero_term_Y,
)
from zml.approx.kernel import kernel_u_tilde, weight_w
from zml.approx.primes import prime_powers
from zml.engine.log_zeta import log_zeta_critical
from zml.engine.oracle import oracle_log_derivative
from zml.errors import DomainError, InvariantViolation, PreconditionError
from zml.parallel import map_ordered
from zml.report import CheckReport
from zml.zeros.density import s_bound, zero_density
from zml.zeros.models import ZeroTable

logger = logging.getLogger(__name__)

C1_SOFT_LIMIT = 100.0
PSI_CONSTANT = 1.03883  # psi(x) < 1.03883 x for all x > 0
LHS_TERMS = 10**6
RESIDUAL_COLUMNS = ("t", "X", "sigma", "lhs", "rhs_factor", "core_term", "min_C1", "Y_value")


# ── Residual of the approximate formula ──────────────────────────────


@dataclass(frozen=True)
class ResidualRow:
    t: float
    X: float
    sigma: float
    lhs: float
    rhs_factor: float
    core_term: float
    min_C1: float
    Y_value: float
    Y_converged: bool = True

    def as_row(self) -> tuple:
        return tuple(getattr(self, c) for c in RESIDUAL_COLUMNS)


@dataclass
class ResidualReport:
    rows: list[ResidualRow] = field(default_factory=list)
    report: CheckReport = field(default_factory=lambda: CheckReport(name="approx-residual"))

    @property
    def min_c1(self) -> np.ndarray:
        return np.array([r.min_C1 for r in self.rows])

    def distribution(self) -> dict[str, float]:
        c1 = self.min_c1
        if not c1.size:
            return {}
        q = np.quantile(c1, [0.5, 0.9, 0.99])
        return {"max": float(c1.max()), "median": float(q[0]), "p90": float(q[1]),
                "p99": float(q[2]), "min": float(c1.min())}

    def summary(self) -> str:
        d = self.distribution()
        if not d:
            return "no samples"
        return (f"{len(self.rows)} samples, min C1: median {d['median']:.4g}, "
                f"max {d['max']:.4g}; {self.report.summary()}")


def residual_at(t: float, params: ApproxParams, table: ZeroTable,
                tail_tol: float = DEFAULT_TAIL_TOL) -> ResidualRow:
    """LHS, RHS factor, core term and minimal C1 at one height."""
    params.check_point(t)
    sigma = sigma_select(t, params, table)
    log_zeta = log_zeta_critical(t, table)
    P = dirichlet_P(t, params, table, sigma)
    Y = zero_term_Y(t, params, table, tail_tol, sigma, warn=False)

    c, s = math.cos(params.theta), math.sin(params.theta)
    lhs = abs(log_zeta.twisted(params.theta) - (c * P.real + s * P.imag) + c * Y.value)
    factor = (params.h / params.A + 9 / params.K) * sigma.s_offset
    core = 0.5 * math.log(abs(t)) - prime_core(t, sigma.sigma, params.X)
    return ResidualRow(
        t=t,
        X=params.X,
        sigma=sigma.sigma,
        lhs=lhs,
        rhs_factor=factor,
        core_term=core,
        min_C1=(lhs / factor - core) / params.log_X,
        Y_value=Y.value,
        Y_converged=Y.converged,
    )


def _residual_chunk(args) -> list[ResidualRow]:
    ts, policy, table, tail_tol = args
    return [residual_at(t, policy(t), table, tail_tol) for t in ts]


def residual_report(
    t_samples,
    params_policy,
    table: ZeroTable,
    workers: int = 1,
    tail_tol: float = DEFAULT_TAIL_TOL,
    chunk: int = 25,
) -> ResidualReport:
    """Evaluate the approximate formula at every sample.

    ``params_policy`` maps t to ApproxParams; it must be picklable when
    ``workers > 1`` (see :class:`zml.approx.formula.ParamsPolicy`).

    Raises:
        PreconditionError: if a sample violates |t| >= 3, 3 <= X <= |t|^6.
        InvariantViolation: if Y < 0 at any sample.
    """
    ts = [float(t) for t in t_samples]
    for t in ts:
        params_policy(t).check_point(t)
    batches = [(ts[i : i + chunk], params_policy, table, tail_tol)
               for i in range(0, len(ts), chunk)]
    rows = [row for part in map_ordered(_residual_chunk, batches, workers) for row in part]

    result = ResidualReport(rows=rows)
    for row in rows:
        if row.Y_value < 0:
            raise InvariantViolation(f"Y = {row.Y_value!r} < 0 at t = {row.t!r}")
    unconverged = sum(1 for r in rows if not r.Y_converged)
    if unconverged:
        logger.warning("%d of %d samples missed the Y tail tolerance", unconverged, len(rows))
        result.report.warn("tail-tolerance", f"{unconverged} sample(s) above tail_tol {tail_tol:g}")
    dist = result.distribution()
    result.report.measurements.update(dist)
    if dist and dist["max"] >= C1_SOFT_LIMIT:
        result.report.warn("large-C1", f"max minimal C1 {dist['max']:.4g} >= {C1_SOFT_LIMIT:g}")
    return result


# ── Explicit formula ─────────────────────────────────────────────────


@dataclass(frozen=True)
class ExplicitFormulaCheck:
    s: complex
    X: float
    lhs: complex
    rhs: complex
    prime_term: complex
    zero_term: complex
    trivial_term: complex
    pole_term: complex
    oracle: complex
    lhs_tail_bound: float
    zero_tail_bound: float
    trivial_tail_bound: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def tail_bound(self) -> float:
        return self.lhs_tail_bound + self.zero_tail_bound + self.trivial_tail_bound

    @property
    def passed(self) -> bool:
        return self.residual <= self.tail_bound + 1e-10

    def to_dict(self) -> dict:
        return {
            "s": self.s, "X": self.X, "lhs": self.lhs, "rhs": self.rhs,
            "residual": self.residual, "tail_bound": self.tail_bound,
            "prime_term": self.prime_term, "zero_term": self.zero_term,
            "trivial_term": self.trivial_term, "pole_term": self.pole_term,
            "oracle": self.oracle, "oracle_gap": abs(self.oracle - self.lhs),
            "passed": self.passed,
        }


def _kernel_over(w: np.ndarray, log_X: float) -> np.ndarray:
    return kernel_u_tilde(w * log_X) / w


def explicit_formula_check(
    s: complex,
    X: float,
    n_zeros: int,
    table: ZeroTable,
    lhs_terms: int = LHS_TERMS,
) -> ExplicitFormulaCheck:
    """Compare -sum Lambda(n) n^{-s} with the smoothed explicit formula

        -sum Lambda(n) n^{-s} w(n) + sum_rho u~(1 - (s - rho) log X) / (s - rho)
        + sum_n u~(1 - (s + 2n) log X) / (s + 2n) - u~(1 - (s - 1) log X) / (s - 1)

    over the first ``n_zeros`` zeros of ``table`` and their conjugates.
    """
    s = complex(s)
    if s.real < 1.5:
        raise PreconditionError(f"Re s must be >= 1.5, got {s.real}")
    if X < 3:
        raise DomainError(f"X must be >= 3, got {X}")
    if n_zeros < 0:
        raise DomainError(f"n_zeros must be >= 0, got {n_zeros}")
    log_X = math.log(X)

    n, lam = prime_powers(max(lhs_terms, X))
    terms = lam * np.exp(-s * np.log(n))
    lhs = -complex(np.sum(terms[n <= lhs_terms]))
    lhs_tail = PSI_CONSTANT * s.real / (s.real - 1) * lhs_terms ** (1 - s.real)
    within = n <= X
    prime_term = -complex(np.sum(terms[within] * weight_w(n[within], X)))

    real = table.real_part()
    if n_zeros > len(real):
        raise DomainError(f"table holds {len(real)} zeros, {n_zeros} requested")
    rho_gamma = real.gammas[:n_zeros]
    if n_zeros:
        real.require_coverage(0.0, float(rho_gamma[-1]))
    rho = 0.5 + 1j * rho_gamma
    zero_term = complex(np.sum(_kernel_over(s - rho, log_X) + _kernel_over(s - rho.conj(), log_X)))

    def majorant(g: float) -> float:
        total = 0.0
        for gamma in (g, -g):
            w = s - complex(0.5, gamma)
            z = w * log_X
            total += 9 * (math.exp(-z.real / 6) + math.exp(-z.real / 2)) ** 2 / abs(z) ** 2 / abs(w)
        return total

    start = float(rho_gamma[-1]) if n_zeros else 14.0
    tail, _ = quad(lambda g: float(zero_density(g)) * majorant(g), start, math.inf, limit=200)
    zero_tail = tail + 3 * s_bound(start) * majorant(start)

    trivial = s + 2 * np.arange(1, 201)
    trivial_terms = _kernel_over(trivial, log_X)
    trivial_term = complex(np.sum(trivial_terms))
    trivial_tail = 2 * abs(complex(trivial_terms[-1]))
    pole_term = complex(_kernel_over(np.array([s - 1]), log_X)[0])

    rhs = prime_term + zero_term + trivial_term - pole_term
    check = ExplicitFormulaCheck(
        s=s, X=X, lhs=lhs, rhs=rhs, prime_term=prime_term, zero_term=zero_term,
        trivial_term=trivial_term, pole_term=pole_term, oracle=oracle_log_derivative(s),
        lhs_tail_bound=lhs_tail, zero_tail_bound=zero_tail, trivial_tail_bound=trivial_tail,
    )
    logger.debug("explicit formula at s=%s: residual %.3e, bound %.3e", s, check.residual,
                 check.tail_bound)
    return check


# ── Inequalities ─────────────────────────────────────────────────────


def selberg_inequality_check(
    t: float, sigma: float, h: float, zeros
) -> tuple[float, float]:
    """(lhs, rhs) of

        sum (sigma - 1/2) / ((sigma - beta)^2 + (t - gamma)^2)
            <= (1 + h^2)/(1 - h^2) sum (sigma - beta) / ((sigma - beta)^2 + (t - gamma)^2)

    for a zero set given as (beta, gamma) pairs. The inequality holds when
    the set is closed under beta -> 1 - beta and every |beta - 1/2| <= h (sigma - 1/2).
    """
    if not 0 < h < 1:
        raise DomainError(f"h must lie in (0, 1), got {h}")
    arr = np.asarray(zeros, dtype=float).reshape(-1, 2)
    beta, gamma = arr[:, 0], arr[:, 1]
    den = (sigma - beta) ** 2 + (t - gamma) ** 2
    lhs = float(np.sum((sigma - 0.5) / den))
    rhs = float((1 + h * h) / (1 - h * h) * np.sum((sigma - beta) / den))
    return lhs, rhs


def h_ratio_check(n: int = 10001) -> CheckReport:
    """(1 + h^2) / (h (1 - h)) <= 25/3 on [2/5, 3/4], with equality at 3/4."""
    report = CheckReport(name="h-ratio")
    h = np.linspace(0.4, 0.75, n)
    ratio = (1 + h * h) / (h * (1 - h))
    worst = int(np.argmax(ratio))
    report.measurements.update({"max_ratio": float(ratio[worst]), "argmax": float(h[worst])})
    if ratio[worst] > 25 / 3 + 1e-12:
        report.error("ratio-bound", f"ratio {ratio[worst]!r} exceeds 25/3",
                     where=f"h={h[worst]:.6f}")
    return report
