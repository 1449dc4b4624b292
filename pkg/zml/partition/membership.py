"""Membership of t in A(i,j), B(j), T and S(j), and sampled measures.

    T    = all A(i, I) for i <= I, and B(I)
    S(0) = some A(1, l) fails for l <= I, or B(1) fails
    S(j) = all A(i, j) for i <= j, B(j), and (some A(j+1, l) fails for
           l > j, or B(j+1) fails)                       1 <= j <= I - 1

If t is not in T, let i0 be the least i with B(i) failing or A(i, l)
failing for some l >= i; then t lies in S(i0 - 1). The sets may overlap.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.stats import binomtest

from zml.approx.formula import ApproxParams, sigma_select
from zml.errors import PreconditionError
from zml.parallel import map_ordered
from zml.partition import MIN_PARTITION_SAMPLES, SAMPLE_CHUNK
from zml.partition.regime import RegimeParams, poly_G
from zml.report import CheckReport
from zml.zeros.density import resolve_phi
from zml.zeros.models import ZeroTable

logger = logging.getLogger(__name__)

CONFIDENCE = 0.95
PARTITION_COLUMNS = ("bucket", "estimate", "ci_low", "ci_high", "n_samples", "seed")


class BucketKind(Enum):
    T_SET = "t_set"
    S = "s"


@dataclass(frozen=True)
class Bucket:
    kind: BucketKind
    j: int | None = None

    @property
    def label(self) -> str:
        return "T" if self.kind is BucketKind.T_SET else f"S({self.j})"


@dataclass
class Membership:
    t: float
    in_A: dict[tuple[int, int], bool] = field(default_factory=dict)
    in_B: dict[int, bool] = field(default_factory=dict)
    buckets: tuple[Bucket, ...] = ()
    first_failure: int | None = None

    @property
    def in_T(self) -> bool:
        return any(b.kind is BucketKind.T_SET for b in self.buckets)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(b.label for b in self.buckets)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "buckets": list(self.labels),
            "first_failure": self.first_failure,
            "in_B": {str(j): v for j, v in self.in_B.items()},
            "in_A": {f"{i},{j}": v for (i, j), v in self.in_A.items()},
        }


# ── Exceptional set ──────────────────────────────────────────────────


def in_exceptional_free_set(t: float, K: float, log_X: float, table: ZeroTable) -> bool:
    """t in E_K(X, T): no zero beta + i gamma (or conjugate) with
    beta > 1/2 + K/log X and |t - gamma| <= K X^{beta - 1/2} / log X."""
    gap = K / log_X
    if not len(table):
        return True
    offset = table.betas - 0.5
    candidates = offset > gap
    if not np.any(candidates):
        return True
    reach = K * np.exp(offset[candidates] * log_X) / log_X
    gammas = table.gammas[candidates]
    hit = (np.abs(t - gammas) <= reach) | (np.abs(t + gammas) <= reach)
    return not bool(np.any(hit))


def _in_B(t: float, j: int, regime: RegimeParams, table: ZeroTable) -> bool:
    params = ApproxParams(theta=regime.theta, K=regime.K, X=regime.X(j), h=regime.h)
    return sigma_select(t, params, table).at_floor


# ── Classification ───────────────────────────────────────────────────


def _assign(m: Membership, I: int) -> Membership:
    A, B = m.in_A, m.in_B

    def fails(i: int) -> bool:
        return not B[i] or any(not A[(i, ell)] for ell in range(i, I + 1))

    buckets = []
    if all(A[(i, I)] for i in range(1, I + 1)) and B[I]:
        buckets.append(Bucket(BucketKind.T_SET))
    if fails(1):
        buckets.append(Bucket(BucketKind.S, 0))
    for j in range(1, I):
        if all(A[(i, j)] for i in range(1, j + 1)) and B[j] and fails(j + 1):
            buckets.append(Bucket(BucketKind.S, j))
    m.buckets = tuple(buckets)
    m.first_failure = next((i for i in range(1, I + 1) if fails(i)), None)
    return m


def classify_many(ts, regime: RegimeParams, table: ZeroTable) -> list[Membership]:
    """Memberships for an array of heights in [T, 2T]; B is evaluated first.

    Raises:
        PreconditionError: if some t lies outside [T, 2T].
        CoverageError: if the table does not cover a sigma search window.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if ts.size and (ts.min() < regime.T or ts.max() > 2 * regime.T):
        raise PreconditionError(f"t must lie in [{regime.T:g}, {2 * regime.T:g}]")
    I = regime.I_index
    members = [Membership(t=float(t)) for t in ts]
    for j in range(1, I + 1):
        for m in members:
            m.in_B[j] = _in_B(m.t, j, regime, table)
    for i in range(1, I + 1):
        for j in range(i, I + 1):
            bound = regime.a_threshold(i, j)
            ok = np.abs(poly_G(ts, i, j, regime)) <= bound
            for m, flag in zip(members, ok):
                m.in_A[(i, j)] = bool(flag)
    return [_assign(m, I) for m in members]


def classify_t(t: float, regime: RegimeParams, table: ZeroTable) -> Membership:
    return classify_many([t], regime, table)[0]


# ── Measures ─────────────────────────────────────────────────────────


def exceptional_s0_bound(T: float, Phi="selberg") -> float:
    """(Phi(T) + 1) exp(-log T / log log T), the shape bounding meas S(0) / T."""
    phi = resolve_phi(Phi)
    return (phi(T) + 1) * math.exp(-math.log(T) / math.log(math.log(T)))


@dataclass(frozen=True)
class BucketEstimate:
    bucket: str
    count: int
    estimate: float
    ci_low: float
    ci_high: float


@dataclass
class PartitionReport:
    regime: RegimeParams
    n_samples: int
    seed: int
    estimates: list[BucketEstimate] = field(default_factory=list)
    uncovered: int = 0
    s0_bound: float = math.nan
    report: CheckReport = field(default_factory=lambda: CheckReport(name="partition"))

    def estimate(self, bucket: str) -> BucketEstimate:
        for e in self.estimates:
            if e.bucket == bucket:
                return e
        raise KeyError(bucket)

    def rows(self) -> list[tuple]:
        return [(e.bucket, e.estimate, e.ci_low, e.ci_high, self.n_samples, self.seed)
                for e in self.estimates]

    def summary(self) -> str:
        parts = ", ".join(f"{e.bucket}={e.estimate:.4f}" for e in self.estimates
                          if not e.bucket.startswith("B^c"))
        return f"{self.regime.summary()}: {parts}; {self.report.summary()}"

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.to_dict(),
            "n_samples": self.n_samples,
            "seed": self.seed,
            "uncovered": self.uncovered,
            "s0_bound": self.s0_bound,
            "estimates": [e.__dict__ for e in self.estimates],
            "report": self.report.to_dict(),
        }


def _labels(I: int) -> list[str]:
    return (["T"] + [f"S({j})" for j in range(I)] + ["S(0)[B]"]
            + [f"B^c({j})" for j in range(1, I + 1)])


def _partition_chunk(args) -> tuple[dict[str, int], int]:
    seq, size, regime, table = args
    rng = np.random.Generator(np.random.Philox(seq))
    ts = regime.T + regime.T * rng.random(size)
    counts = dict.fromkeys(_labels(regime.I_index), 0)
    uncovered = 0
    for m in classify_many(ts, regime, table):
        if not m.buckets:
            uncovered += 1
        for label in m.labels:
            counts[label] += 1
        if not m.in_B[1]:
            counts["S(0)[B]"] += 1
        for j, ok in m.in_B.items():
            if not ok:
                counts[f"B^c({j})"] += 1
    return counts, uncovered


def measure_partition(
    regime: RegimeParams,
    table: ZeroTable,
    n_samples: int,
    seed: int,
    workers: int = 1,
    Phi="selberg",
) -> PartitionReport:
    """Monte Carlo measure of each bucket as a fraction of [T, 2T].

    Samples are drawn per fixed-size chunk from seed sequences spawned
    from ``seed``, so results do not depend on ``workers``.
    """
    if n_samples < MIN_PARTITION_SAMPLES:
        raise PreconditionError(f"n_samples must be >= {MIN_PARTITION_SAMPLES}, got {n_samples}")
    n_chunks = math.ceil(n_samples / SAMPLE_CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(SAMPLE_CHUNK, n_samples - c * SAMPLE_CHUNK) for c in range(n_chunks)]
    parts = map_ordered(
        _partition_chunk, [(s, n, regime, table) for s, n in zip(children, sizes)], workers
    )

    totals = dict.fromkeys(_labels(regime.I_index), 0)
    uncovered = 0
    for counts, missing in parts:
        uncovered += missing
        for label, count in counts.items():
            totals[label] += count

    result = PartitionReport(regime=regime, n_samples=n_samples, seed=seed,
                             uncovered=uncovered,
                             s0_bound=exceptional_s0_bound(regime.T, Phi))
    for label, count in totals.items():
        ci = binomtest(count, n_samples).proportion_ci(confidence_level=CONFIDENCE,
                                                       method="wilson")
        result.estimates.append(
            BucketEstimate(bucket=label, count=count, estimate=count / n_samples,
                           ci_low=float(ci.low), ci_high=float(ci.high))
        )
    if uncovered:
        result.report.error("coverage", f"{uncovered} sample(s) fell in no bucket")
    result.report.measurements.update(
        {"covered_fraction": 1 - uncovered / n_samples, "s0_bound": result.s0_bound,
         "I_index": float(regime.I_index)}
    )
    logger.info("partition: %s", result.summary())
    return result
