"""The constants a(h), b(h), A(h, theta), the optimal h(theta), and the
corollary quantities c0 and B(k).

    a(h) = 1                                          0 < h <= 1/sqrt(2)
    a(h) = 1 + F(h) log(1 + 2 G(h))                   1/sqrt(2) < h < 1
    b(h) = pi (1 + h^2)^2 / (2 (1 - h^2))
    A(h, theta) = h / (a(h) |cos theta| + b(h) |sin theta|)

with F = (4h^2-1)^2 (1+h^2) / (8 (4h^2+1)(1-h^2)) and
G = (2h^2-1)(4h^2+1) / ((h^2+1)(4h^2-1)^2). a is continuous at
1/sqrt(2) but its derivative jumps there, so A(., theta) can peak on the
kink.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from zml.errors import DomainError
from zml.parallel import map_ordered
from zml.report import CheckReport

logger = logging.getLogger(__name__)

KINK = 1.0 / math.sqrt(2.0)
GRID_LO, GRID_HI, GRID_SIZE = 0.35, 0.8, 1001
MIN_TOL = 1e-12
C0 = 2.0 / (3.0 * math.pi)  # (4/3) A(h(pi/2), pi/2)

H_RANGE = (0.4, 0.75)
A_RANGE = (1.0 / 9.0, 1.0)

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2


# ── Formulas ─────────────────────────────────────────────────────────


def _f_g(h):
    h2 = h * h
    f = (4 * h2 - 1) ** 2 * (1 + h2) / (8 * (4 * h2 + 1) * (1 - h2))
    r = (4 * h2 + 1) / ((h2 + 1) * (4 * h2 - 1) ** 2)
    return f, (2 * h2 - 1) * r, r


def a_of_h(h):
    """a(h); scalar or array."""
    h = np.asarray(h, dtype=float)
    upper = h > KINK
    safe = np.where(upper, h, 0.9)
    f, g, _ = _f_g(safe)
    value = np.where(upper, 1.0 + f * np.log1p(2 * g), 1.0)
    return float(value) if value.ndim == 0 else value


def b_of_h(h):
    h = np.asarray(h, dtype=float)
    value = math.pi * (1 + h * h) ** 2 / (2 * (1 - h * h))
    return float(value) if value.ndim == 0 else value


def _check_h(h) -> None:
    arr = np.asarray(h, dtype=float)
    if arr.size and (np.min(arr) <= 0 or np.max(arr) >= 1):
        raise DomainError(f"h must lie in (0, 1), got {h!r}")


def big_a(h, theta: float):
    """A(h, theta); vectorised over h."""
    c, s = abs(math.cos(theta)), abs(math.sin(theta))
    return np.asarray(h) / (a_of_h(h) * c + b_of_h(h) * s)


@dataclass(frozen=True)
class ConstantsAt:
    h: float
    theta: float
    a_val: float
    b_val: float
    A_val: float

    def to_dict(self) -> dict:
        return {"h": self.h, "theta": self.theta, "a": self.a_val, "b": self.b_val,
                "A": self.A_val}


def eval_constants(h: float, theta: float) -> ConstantsAt:
    """a, b and A at (h, theta).

    Raises:
        DomainError: if h is outside (0, 1).
    """
    _check_h(h)
    a_val, b_val = a_of_h(h), b_of_h(h)
    A_val = h / (a_val * abs(math.cos(theta)) + b_val * abs(math.sin(theta)))
    return ConstantsAt(h=float(h), theta=float(theta), a_val=a_val, b_val=b_val, A_val=A_val)


@dataclass(frozen=True)
class ConstantsDerivatives:
    h: float
    a_prime: float
    b_prime: float
    D_prime: float

    def stationarity(self, theta: float) -> float:
        """D - h D', zero exactly where dA/dh vanishes."""
        D = a_of_h(self.h) * abs(math.cos(theta)) + b_of_h(self.h) * abs(math.sin(theta))
        return D - self.h * self.D_prime


def constants_derivatives(h: float, theta: float, side: str = "auto") -> ConstantsDerivatives:
    """a'(h), b'(h) and D'(h) for D = a |cos theta| + b |sin theta|.

    At the kink the one-sided derivative is chosen by ``side``
    ("left" or "right"); "auto" means left at h <= 1/sqrt(2).
    """
    _check_h(h)
    h2 = h * h
    upper = h > KINK if side == "auto" else side == "right"
    if upper:
        f, g, r = _f_g(h)
        f_log = 16 * h / (4 * h2 - 1) + 2 * h / (1 + h2) - 8 * h / (4 * h2 + 1) + 2 * h / (1 - h2)
        r_log = 8 * h / (4 * h2 + 1) - 2 * h / (h2 + 1) - 16 * h / (4 * h2 - 1)
        g_prime = 4 * h * r + g * r_log
        a_prime = f * f_log * math.log1p(2 * g) + f * 2 * g_prime / (1 + 2 * g)
    else:
        a_prime = 0.0
    b_prime = math.pi * h * (1 + h2) * (3 - h2) / (1 - h2) ** 2
    D_prime = a_prime * abs(math.cos(theta)) + b_prime * abs(math.sin(theta))
    return ConstantsDerivatives(h=h, a_prime=a_prime, b_prime=b_prime, D_prime=D_prime)


# ── Optimisation ─────────────────────────────────────────────────────


@dataclass(frozen=True)
class OptimalH:
    theta: float
    h_star: float
    A_star: float
    method_meta: dict = field(default_factory=dict)

    @property
    def a_star(self) -> float:
        return float(a_of_h(self.h_star))

    @property
    def b_star(self) -> float:
        return float(b_of_h(self.h_star))

    def in_range(self) -> bool:
        return H_RANGE[0] < self.h_star < H_RANGE[1] and A_RANGE[0] < self.A_star < A_RANGE[1]

    def to_dict(self) -> dict:
        return {"theta": self.theta, "h_star": self.h_star, "A_star": self.A_star,
                "a": self.a_star, "b": self.b_star, **self.method_meta}


def golden_section_max(f, a: float, b: float, tol: float) -> tuple[float, float]:
    """Golden-section search for a maximum; returns a bracket of width <= tol."""
    a, b = min(a, b), max(a, b)
    width = b - a
    if width <= tol:
        return a, b
    n = int(math.ceil(math.log(tol / width) / math.log(INV_PHI)))
    c, d = a + INV_PHI_SQUARE * width, a + INV_PHI * width
    yc, yd = f(c), f(d)
    for _ in range(n - 1):
        width *= INV_PHI
        if yc > yd:
            b, d, yd = d, c, yc
            c = a + INV_PHI_SQUARE * width
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            d = a + INV_PHI * width
            yd = f(d)
    return (a, d) if yc > yd else (c, b)


def _stationary_points(theta: float, lo: float, hi: float, tol: float) -> list[float]:
    pieces = [(lo, min(hi, KINK)), (max(lo, KINK), hi)]
    roots = []
    for left, right in pieces:
        if right - left <= 0:
            continue
        side = "left" if right <= KINK else "right"

        def g(h, side=side):
            return constants_derivatives(h, theta, side).stationarity(theta)

        g_left, g_right = g(left), g(right)
        if g_left == 0.0:
            roots.append(left)
        elif g_left * g_right < 0:
            roots.append(brentq(g, left, right, xtol=min(tol, 1e-15),
                                rtol=4 * np.finfo(float).eps))
    return roots


def optimize_h(theta: float, tol: float = 1e-12) -> OptimalH:
    """The maximiser of A(., theta) on (0, 1).

    A 1001-point grid on [0.35, 0.8] locates the peak; golden-section search
    narrows the neighbouring bracket to ``tol``; the result is then polished
    at a root of D - h D' or at the kink, whichever gives the larger A.
    Ties go to the smallest h.
    """
    if tol < MIN_TOL:
        raise DomainError(f"tol must be >= {MIN_TOL}, got {tol}")
    grid = np.linspace(GRID_LO, GRID_HI, GRID_SIZE)
    values = big_a(grid, theta)
    best = float(values.max())
    ties = np.flatnonzero(values >= best - tol * max(best, 1.0))
    lo = grid[max(int(ties[0]) - 1, 0)]
    hi = grid[min(int(ties[-1]) + 1, GRID_SIZE - 1)]

    a, b = golden_section_max(lambda h: float(big_a(h, theta)), lo, hi, tol)
    candidates = [("golden", 0.5 * (a + b))]
    candidates += [("stationary", h) for h in _stationary_points(theta, lo, hi, tol)]
    if lo <= KINK <= hi:
        candidates.append(("kink", KINK))

    scored = sorted(candidates, key=lambda item: (-float(big_a(item[1], theta)), item[1]))
    top = float(big_a(scored[0][1], theta))
    method, h_star = min(
        (c for c in scored if float(big_a(c[1], theta)) >= top * (1 - 1e-15)),
        key=lambda item: item[1],
    )
    return OptimalH(
        theta=float(theta),
        h_star=float(h_star),
        A_star=float(big_a(h_star, theta)),
        method_meta={"grid_size": GRID_SIZE, "tol": tol, "method": method},
    )


# ── Sweep ────────────────────────────────────────────────────────────


@dataclass
class ThetaSweep:
    """Optimal h over a uniform theta grid on [0, pi/2]."""

    points: list[OptimalH] = field(default_factory=list)
    max_violation: float = 0.0
    report: CheckReport = field(default_factory=lambda: CheckReport(name="theta-sweep"))

    @property
    def monotone(self) -> bool:
        return self.max_violation <= 0.0

    def summary(self) -> str:
        return (
            f"{len(self.points)} theta values, max upward violation {self.max_violation:.3e}; "
            f"{self.report.summary()}"
        )


def _optimize_worker(args: tuple[float, float]) -> OptimalH:
    theta, tol = args
    return optimize_h(theta, tol)


def theta_sweep(n: int, tol: float = 1e-12, workers: int = 1,
                violation_tol: float = 1e-5) -> ThetaSweep:
    """Sweep theta over n points of [0, pi/2] and check h(theta) is non-increasing."""
    if n < 2:
        raise DomainError(f"theta_sweep needs at least 2 points, got {n}")
    thetas = np.linspace(0.0, math.pi / 2, n)
    points = map_ordered(_optimize_worker, [(float(t), tol) for t in thetas], workers)

    h = np.array([p.h_star for p in points])
    violation = float(max(np.max(np.diff(h)), 0.0))
    sweep = ThetaSweep(points=points, max_violation=violation)
    sweep.report.measurements["max_violation"] = violation
    if violation > violation_tol:
        sweep.report.error(
            "not-monotone",
            f"h(theta) rises by {violation:.3e}",
            where=f"theta={thetas[int(np.argmax(np.diff(h))) + 1]:.6f}",
        )
    elif violation > 0:
        sweep.report.info("round-off", f"upward step of {violation:.3e} within tolerance")
    for p in points:
        if not p.in_range():
            sweep.report.error(
                "out-of-range",
                f"h*={p.h_star:.6f}, A*={p.A_star:.6f} outside (2/5, 3/4) x (1/9, 1)",
                where=f"theta={p.theta:.6f}",
            )
    logger.debug("theta sweep: %s", sweep.summary())
    return sweep


# ── Corollary ────────────────────────────────────────────────────────


def corollary_values(k: float) -> tuple[float, float]:
    """(B(k), c0) with B(k) = k^2 (1 + k / (c0 - k)) + 4k / c0.

    Raises:
        DomainError: for k < 0 or k >= c0.
    """
    if k < 0 or k >= C0:
        raise DomainError(f"k must satisfy 0 <= k < c0 = {C0:.7f}, got {k}")
    return k * k * (1 + k / (C0 - k)) + 4 * k / C0, C0
