"""Tests for the kernel, weight, sigma, P, Y and the formula checks."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from zml.approx.checks import (
    RESIDUAL_COLUMNS,
    explicit_formula_check,
    h_ratio_check,
    residual_at,
    residual_report,
    selberg_inequality_check,
)
from zml.approx.formula import (
    ApproxParams,
    ParamsPolicy,
    SigmaValue,
    dirichlet_P,
    sigma_select,
    zero_prime_balance,
    zero_term_Y,
)
from zml.approx.kernel import (
    E13,
    E23,
    kernel_u,
    kernel_u_tilde,
    mellin_u_numeric,
    printed_weight,
    weight_branch_report,
    weight_w,
    weight_w_integral,
)
from zml.approx.primes import prime_powers, sieve_primes
from zml.errors import CapacityError, CoverageError, DomainError, PreconditionError
from zml.zeros.density import inject_synthetic, synthetic_zero
from zml.zeros.models import ZeroEntry, ZeroTable

# --- Kernel Tests ---


def test_kernel_integrates_to_one():
    total = sum(quad(kernel_u, lo, hi, epsabs=1e-14)[0] for lo, hi in ((E13, E23), (E23, math.e)))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_kernel_support():
    assert kernel_u(1.0) == 0.0
    assert kernel_u(3.0) == 0.0
    assert kernel_u(E23) == pytest.approx(3.0 / E23)


def test_kernel_tilde_at_zero():
    assert kernel_u_tilde(0.0) == pytest.approx(1.0)
    assert abs(kernel_u_tilde(1e-5) - kernel_u_tilde(2e-3)) < 1e-3


def test_kernel_tilde_matches_mellin():
    z = complex(2.0, 3.0)
    assert abs(kernel_u_tilde(z) - mellin_u_numeric(z)) < 1e-8


def test_kernel_tilde_series_matches_closed_form():
    z = 7.5e-4
    closed = 9.0 * ((math.exp(-z / 6) - math.exp(-z / 2)) / z) ** 2
    assert kernel_u_tilde(z).real == pytest.approx(closed, abs=1e-9)


# --- Weight Tests ---


def test_weight_branches():
    X = 1e6
    assert weight_w(X ** 0.2, X) == 1.0
    assert weight_w(X ** 0.5, X) == pytest.approx(7 / 8)
    assert weight_w(X, X) == pytest.approx(0.0)
    assert weight_w(X**2, X) == 0.0


def test_weight_matches_integral():
    rng = np.random.default_rng(11)
    for _ in range(50):
        X = float(np.exp(rng.uniform(math.log(3), 20)))
        y = float(np.exp(rng.uniform(0, 1.2 * math.log(X))))
        assert weight_w(y, X) == pytest.approx(weight_w_integral(y, X), abs=1e-10)


def test_weight_non_increasing():
    X = 1e4
    y = np.geomspace(1, 2 * X, 2001)
    assert np.all(np.diff(weight_w(y, X)) <= 1e-15)


def test_weight_bad_args():
    with pytest.raises(DomainError):
        weight_w(10.0, 2.0)
    with pytest.raises(DomainError):
        weight_w(0.5, 10.0)


def test_printed_weight_differs_in_middle():
    X = 1e6
    assert printed_weight(X**0.5, X) == pytest.approx(2.34375)
    assert printed_weight(X**0.9, X) == weight_w(X**0.9, X)
    report = weight_branch_report(X)
    assert report.passed
    assert any(i.code == "printed-branch" for i in report.warnings)


# --- Sieve Tests ---


def test_sieve_small():
    assert list(sieve_primes(10).primes) == [2, 3, 5, 7]
    assert len(sieve_primes(2)) == 1


def test_sieve_million():
    primes = sieve_primes(1e6)
    assert len(primes) == 78498
    mertens = float(np.sum(1.0 / primes.primes)) - math.log(math.log(1e6))
    assert mertens == pytest.approx(0.2615, abs=1e-3)


def test_sieve_segmented_matches_simple():
    big = sieve_primes(5_000_000).primes
    assert big.size == 348513


def test_sieve_limits():
    with pytest.raises(DomainError):
        sieve_primes(1.5)
    with pytest.raises(CapacityError):
        sieve_primes(1000, limit=100)


def test_prime_powers():
    n, lam = prime_powers(10)
    assert list(n) == [2, 3, 4, 5, 7, 8, 9]
    assert lam == pytest.approx(np.log([2, 3, 2, 5, 7, 2, 3]))


# --- Sigma Tests ---


def test_sigma_floor_on_empty_model(empty_model):
    params = ApproxParams(theta=0.0, K=50, X=math.exp(100), h=0.5)
    value = sigma_select(1000.0, params, empty_model)
    assert value.sigma == pytest.approx(1.5)
    assert value.at_floor


def test_sigma_synthetic_zero():
    table = ZeroTable.from_model([synthetic_zero(0.6, 1000.0)])
    params = ApproxParams(theta=0.0, K=1, X=math.exp(100), h=0.5)
    value = sigma_select(1000.0, params, table)
    assert value.sigma == pytest.approx(0.7)
    assert value.attained_by.beta == 0.6


def test_sigma_real_table_at_floor(scanned_table):
    policy = ParamsPolicy(theta=0.0, K=50)
    for t in (200.0, 777.0, 2500.0):
        params = policy(t)
        assert sigma_select(t, params, scanned_table).sigma == pytest.approx(params.floor)


def test_sigma_monotone_in_zero_set(scanned_table):
    params = ApproxParams(theta=0.0, K=2, X=1e6)
    base = sigma_select(1000.0, params, scanned_table).sigma
    forced = inject_synthetic(scanned_table, [(0.9, 1000.5)])
    assert sigma_select(1000.0, params, forced).sigma >= base


def test_sigma_coverage():
    table = ZeroTable.from_ordinates([14.134725141734693], covered_range=(0.0, 20.0))
    params = ApproxParams(theta=0.0, K=5, X=1e4, h=0.5)
    with pytest.raises(CoverageError):
        sigma_select(500.0, params, table)


def test_params_check_point():
    params = ApproxParams(theta=0.0, K=10, X=100.0**7, h=0.5)
    with pytest.raises(PreconditionError):
        params.check_point(100.0)
    with pytest.raises(PreconditionError):
        params.check_point(2.0)


def test_params_default_h():
    params = ApproxParams(theta=0.0, K=10, X=100.0)
    assert params.h == pytest.approx(0.72894, abs=1e-4)
    with pytest.raises(DomainError):
        ApproxParams(theta=0.0, K=0.5, X=100.0)


# --- Dirichlet Polynomial Tests ---


def test_dirichlet_two_primes(empty_model):
    params = ApproxParams(theta=0.0, K=1, X=3.0, h=0.5)
    t = 100.0
    sigma = params.floor
    s = complex(sigma, t)
    a = math.log(2) / math.log(3)
    w2 = 0.5 + 3 * a - 4.5 * a * a
    assert w2 == pytest.approx(0.6015, abs=1e-4)
    expected = (
        w2 * 2 ** (-s) * (1 + (sigma - 0.5) * math.log(2))
        + 0.5 * 2 ** (-2 * s)
        + 0.5 * 3 ** (-2 * s)
    )
    assert abs(dirichlet_P(t, params, empty_model) - expected) < 1e-12


def test_dirichlet_independent_of_theta(empty_model):
    a = ApproxParams(theta=0.0, K=4, X=1000.0, h=0.5)
    b = ApproxParams(theta=1.0, K=4, X=1000.0, h=0.5)
    assert dirichlet_P(300.0, a, empty_model) == dirichlet_P(300.0, b, empty_model)


# --- Zero Term Tests ---


def test_y_empty_model(empty_model):
    params = ApproxParams(theta=0.0, K=4, X=1000.0, h=0.5)
    result = zero_term_Y(300.0, params, empty_model)
    assert result.value == 0.0
    assert result.converged


def test_y_single_zero():
    t, d = 100.0, 0.3
    table = ZeroTable.from_model([ZeroEntry(beta=0.5, gamma=t + 1.0)])
    params = ApproxParams(theta=0.0, K=1, X=10.0, h=0.5)
    result = zero_term_Y(t, params, table, sigma=SigmaValue(sigma=0.5 + d))
    conjugate = 0.5 * math.log(1 + d * d / (2 * t + 1) ** 2)
    assert result.value == pytest.approx(0.5 * math.log(1 + d * d) + conjugate, abs=1e-14)


def test_y_non_negative_real_table(scanned_table):
    policy = ParamsPolicy(theta=math.pi / 2, K=50)
    for t in np.linspace(150.0, 1000.0, 7):
        t = float(scanned_table.nudge_off_zeros([t], 1e-3)[0])
        assert zero_term_Y(t, policy(t), scanned_table).value >= 0


def test_y_non_negative_synthetic(scanned_table):
    forced = inject_synthetic(scanned_table, [(0.7, 600.0), (0.3, 600.0)])
    params = ApproxParams(theta=0.0, K=2, X=1e4)
    assert zero_term_Y(600.5, params, forced).value >= 0


# --- Residual Tests ---


def test_residual_row(scanned_table):
    policy = ParamsPolicy(theta=0.0, K=50)
    row = residual_at(432.1, policy(432.1), scanned_table)
    assert len(row.as_row()) == len(RESIDUAL_COLUMNS)
    assert row.lhs >= 0
    assert row.rhs_factor > 0
    assert math.isfinite(row.min_C1)


def test_residual_report_small_sweep(scanned_table):
    ts = scanned_table.nudge_off_zeros(np.linspace(100.0, 1000.0, 12), 1e-3)
    result = residual_report(ts, ParamsPolicy(theta=math.pi / 2, K=50), scanned_table)
    assert len(result.rows) == 12
    assert all(r.Y_value >= 0 for r in result.rows)
    assert result.distribution()["max"] < 100


def test_residual_report_parallel_matches(scanned_table):
    ts = [123.4, 456.7, 789.1]
    policy = ParamsPolicy(theta=0.0, K=50)
    serial = residual_report(ts, policy, scanned_table, chunk=1)
    parallel = residual_report(ts, policy, scanned_table, workers=2, chunk=1)
    assert [r.min_C1 for r in serial.rows] == [r.min_C1 for r in parallel.rows]


def test_residual_x_too_large(scanned_table):
    with pytest.raises(PreconditionError):
        residual_report([200.0], ParamsPolicy(theta=0.0, K=50, x_power=7), scanned_table)


# --- Explicit Formula Tests ---


def test_explicit_formula_complex_point(scanned_table):
    check = explicit_formula_check(complex(2, 10), 1e4, 650, scanned_table)
    assert check.passed
    assert abs(check.oracle - check.lhs) < 1e-5


def test_explicit_formula_real_point(scanned_table):
    check = explicit_formula_check(2.0, 1e4, 650, scanned_table)
    assert check.passed
    assert abs(check.lhs.imag) < 1e-12


def test_explicit_formula_preconditions(scanned_table):
    with pytest.raises(PreconditionError):
        explicit_formula_check(complex(1.2, 10), 1e4, 10, scanned_table)
    with pytest.raises(DomainError):
        explicit_formula_check(2.0, 1e4, 10**6, scanned_table)


# --- Balance Tests ---


def test_balance_empty_model(empty_model):
    params = ApproxParams(theta=0.0, K=50, X=500.0**2)
    balance = zero_prime_balance(500.0, params, empty_model)
    assert balance.zero_side == 0.0
    assert balance.ratio == 0.0


def test_balance_real_table(scanned_table):
    params = ApproxParams(theta=0.0, K=50, X=500.0**2)
    balance = zero_prime_balance(500.0, params, scanned_table)
    assert balance.zero_side > 0
    assert math.isfinite(balance.ratio)


# --- Inequality Tests ---


def test_selberg_inequality_random():
    rng = np.random.default_rng(17)
    h = 0.5
    for _ in range(1000):
        t = float(rng.uniform(100, 200))
        d = float(rng.uniform(0.01, 1.0))
        sigma = 0.5 + d
        offsets = rng.uniform(0, h * d, 3)
        gammas = t + rng.uniform(-5, 5, 3)
        zeros = [(0.5 + o, g) for o, g in zip(offsets, gammas)]
        zeros += [(0.5 - o, g) for o, g in zip(offsets, gammas)]
        lhs, rhs = selberg_inequality_check(t, sigma, h, zeros)
        assert lhs <= rhs * (1 + 1e-12)


def test_selberg_bad_h():
    with pytest.raises(DomainError):
        selberg_inequality_check(100.0, 0.7, 1.0, [(0.5, 100.0)])


def test_h_ratio():
    report = h_ratio_check()
    assert report.passed
    assert report.measurements["max_ratio"] == pytest.approx(25 / 3)
    assert report.measurements["argmax"] == pytest.approx(0.75)
