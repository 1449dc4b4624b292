"""Tests for the random model: sampler, exact expectations, Monte Carlo, time averages."""

import math

import numpy as np
import pytest

from zml.errors import CombinatorialBlowupError, DomainError, PreconditionError
from zml.partition.regime import RegimeOverrides, build_regime, coeffs_phi_psi
from zml.random_model.expectation import (
    MonomialSpec,
    circle_log_average,
    exact_G_moment,
    exact_poly_moment,
    exact_power_moment,
    expect_monomial,
    factorial_moment_bound,
)
from zml.random_model.montecarlo import (
    AbsPower,
    ExpSumG,
    GMoment,
    angular_uniformity,
    check_moment_bound,
    mc_estimate,
    moment_bound_suite,
)
from zml.random_model.sampler import UnitSampler
from zml.random_model.time_average import exponent_caps_ok, time_average_vs_expectation


@pytest.fixture(scope="module")
def synthetic_regime():
    """T = 10^6 with windows {2, 3, 5}, {7, 11, 13} and everything up to T on top."""
    overrides = RegimeOverrides(delta=(0.0, 0.1297, 0.191, 1.0), threshold=0.5)
    return build_regime(1e6, 1.0, 20.0, 0.0, overrides)


# --- Sampler Tests ---


def test_sampler_deterministic():
    a = UnitSampler(42).uniforms(7, 0, 100)
    b = UnitSampler(42).uniforms(7, 0, 100)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, UnitSampler(43).uniforms(7, 0, 100))


def test_sampler_offsets_agree():
    sampler = UnitSampler(9)
    full = sampler.uniforms(11, 0, 64)
    for start in (1, 3, 4, 5, 17, 32):
        assert np.array_equal(sampler.uniforms(11, start, 64 - start), full[start:])


def test_sampler_primes_independent_streams():
    units = UnitSampler(1).units([2, 3], 0, 1000)
    assert units.shape == (1000, 2)
    assert not np.allclose(units[:, 0], units[:, 1])
    assert np.allclose(np.abs(units), 1.0)


def test_sampler_seed_range():
    with pytest.raises(DomainError):
        UnitSampler(-1)
    with pytest.raises(DomainError):
        UnitSampler(2**64)
    UnitSampler(2**64 - 1)


def test_angular_uniformity():
    result = angular_uniformity(UnitSampler(0), [2, 3, 5, 7], trials=100_000)
    assert result.passed
    assert 0 < result.critical < 0.01


# --- Monomial Tests ---


def test_expect_monomial_examples():
    assert expect_monomial(MonomialSpec.of([(2, 2)], [(2, 2)])) == 1
    assert expect_monomial(MonomialSpec.of([(2, 1)], [(3, 1)])) == 0
    assert expect_monomial(MonomialSpec.of([(2, 1), (3, 1)], [(2, 1), (3, 1)])) == 1
    assert expect_monomial(MonomialSpec()) == 1


def test_monomial_merging():
    spec = MonomialSpec.of([(2, 1), (2, 1)], [(2, 2)])
    assert spec.numerator == ((2, 2),)
    assert spec.exponents() == {}
    assert MonomialSpec.of([(2, 3)], [(2, 1)]).exponents() == {2: 2}


def test_monomial_multiplicative():
    two = MonomialSpec.of([(2, 1)], [(2, 1)])
    three = MonomialSpec.of([(3, 2)], [(3, 1)])
    both = MonomialSpec.of([(2, 1), (3, 2)], [(2, 1), (3, 1)])
    assert expect_monomial(both) == expect_monomial(two) * expect_monomial(three)


def test_monomial_bad_exponent():
    with pytest.raises(DomainError):
        MonomialSpec(((2, 0),), ())
    with pytest.raises(DomainError):
        MonomialSpec(((1, 1),), ())


# --- Exact Moment Tests ---


def test_first_moment_vanishes(synthetic_regime):
    assert exact_G_moment(1, 1, 1, synthetic_regime) == 0.0


def test_second_moment_single_prime(synthetic_regime):
    phi, psi = coeffs_phi_psi(2, 1, synthetic_regime)
    expected = abs(phi) ** 2 / 4 + abs(psi) ** 2 / 32
    value = exact_G_moment(2, 1, 1, synthetic_regime, prime_cap=1)
    assert value == pytest.approx(expected, rel=1e-12)


def test_poly_moment_brute_force():
    # E[(Re(c1 X + c2 X^2))^3] by quadrature over the circle
    c1, c2 = 0.7 - 0.2j, 0.3 + 0.4j
    z = np.exp(2j * np.pi * np.arange(64) / 64)
    brute = float(np.mean(np.real(c1 * z + c2 * z * z) ** 3))
    assert exact_poly_moment([5], [c1], [c2], 3) == pytest.approx(brute, abs=1e-14)


def test_poly_moment_two_primes_factor():
    c1 = np.array([0.5 + 0.1j, 0.2 - 0.3j])
    c2 = np.array([0.1j, 0.05])
    # E[(a + b)^2] = E[a^2] + E[b^2] for independent centred a, b
    joint = exact_poly_moment([2, 3], c1, c2, 2)
    split = exact_poly_moment([2], c1[:1], c2[:1], 2) + exact_poly_moment([3], c1[1:], c2[1:], 2)
    assert joint == pytest.approx(split, rel=1e-12)


def test_poly_moment_guard():
    primes = np.arange(2, 102)
    coeffs = np.ones(100, dtype=complex)
    with pytest.raises(CombinatorialBlowupError):
        exact_poly_moment(primes, coeffs, coeffs, 5)
    with pytest.raises(DomainError):
        exact_poly_moment([2], [1.0], [0.0], -1)


def test_power_moment_two_primes():
    a = {2: 1.0, 3: 1.0}
    assert exact_power_moment(a, 2) == pytest.approx(6.0)
    assert factorial_moment_bound(a, 2) == 8.0


def test_power_moment_guard():
    a = dict.fromkeys(range(2, 22), 1.0)
    with pytest.raises(CombinatorialBlowupError):
        exact_power_moment(a, 3)
    with pytest.raises(DomainError):
        exact_power_moment({2: 1.0}, 1, ell=0)


def test_circle_average_zero_coefficient():
    assert circle_log_average([0.0], [0.0], 1.0)[0] == pytest.approx(0.0, abs=1e-15)


# --- Moment Bound Tests ---


def test_moment_bound_k1_equality():
    a = {2: 0.5 + 0.5j, 5: -1.0, 7: 2j}
    result = check_moment_bound(a, 1)
    assert result.exact
    assert result.value == pytest.approx(0.5 + 1.0 + 4.0)
    assert result.value == pytest.approx(result.bound)
    assert not result.violated


def test_moment_bound_ell_relabelling():
    a = {2: 1.0, 3: 0.5j, 7: -0.25}
    for k in (2, 3):
        base = check_moment_bound(a, k, ell=1).value
        assert check_moment_bound(a, k, ell=2).value == base
        assert check_moment_bound(a, k, ell=-1).value == base


def test_moment_bound_monte_carlo_path():
    primes = [2, 3, 5, 7, 11, 13, 17]
    a = {p: 1 / math.sqrt(p) for p in primes}
    result = check_moment_bound(a, 2, trials=20_000, seed=3)
    assert not result.exact
    assert result.std_error > 0
    assert not result.violated


def test_moment_bound_needs_k():
    with pytest.raises(PreconditionError):
        check_moment_bound({2: 1.0}, 0)


def test_moment_bound_suite():
    report, rows = moment_bound_suite(50, seed=0)
    assert report.passed
    assert len(rows) == 50
    assert report.measurements["max_ratio"] <= 1.0 + 1e-12


# --- Monte Carlo Tests ---


def test_mc_prime_reciprocal_sum():
    a = {p: 1 / math.sqrt(p) for p in (2, 3, 5, 7)}
    expr = AbsPower(a, 1)
    assert expr.exact_value() == pytest.approx(1.17619, abs=1e-5)
    result = mc_estimate(expr, 100_000, seed=11, with_exact=True)
    assert abs(result.mean - 1.17619) <= 4 * result.std_error
    assert result.agrees()
    assert result.bound == pytest.approx(expr.exact_value())


def test_mc_parallel_matches_serial():
    expr = AbsPower({2: 1.0, 3: 1.0, 5: 1.0}, 2)
    serial = mc_estimate(expr, 40_000, seed=5, chunk=4096)
    parallel = mc_estimate(expr, 40_000, seed=5, chunk=4096, workers=3)
    assert serial.mean == parallel.mean
    assert serial.std_error == parallel.std_error


def test_mc_chunking_only_changes_rounding():
    expr = AbsPower({2: 1.0, 3: 1.0}, 1)
    small = mc_estimate(expr, 20_000, seed=5, chunk=1024)
    large = mc_estimate(expr, 20_000, seed=5, chunk=16384)
    assert small.mean == pytest.approx(large.mean, rel=1e-12)


def test_mc_g_moment_matches_exact(synthetic_regime):
    expr = GMoment(synthetic_regime, 1, 1, 3, prime_cap=2)
    result = mc_estimate(expr, 1_000_000, seed=2, with_exact=True)
    assert result.agrees(4.0)


def test_mc_exp_sum_k_zero(synthetic_regime):
    result = mc_estimate(ExpSumG(synthetic_regime, 0.0, j=2), 1000, seed=0, with_exact=True)
    assert result.mean == 1.0
    assert result.exact_value == 1.0


def test_mc_exp_sum_matches_reference(synthetic_regime):
    expr = ExpSumG(synthetic_regime, 0.5, j=2)
    assert list(expr.primes) == [2, 3, 5, 7, 11, 13]
    result = mc_estimate(expr, 100_000, seed=4, with_exact=True)
    assert result.agrees(4.0)


def test_exp_sum_shape_ratio_reported():
    regime = build_regime(
        math.exp(200), 1.0, 20.0, 0.0, RegimeOverrides(delta=(0.0, 0.5), threshold=0.9)
    )
    expr = ExpSumG(regime, 1.0, prime_cap=2000)
    assert regime.log_X(1) == pytest.approx(100.0)
    ratio = expr.shape_ratio()
    assert math.isfinite(ratio) and ratio > 0


def test_mc_trial_floor():
    expr = AbsPower({2: 1.0}, 1)
    with pytest.raises(PreconditionError):
        mc_estimate(expr, 500, seed=0)
    with pytest.raises(DomainError):
        mc_estimate(expr, 5000, seed=0, chunk=1001)


def test_exp_sum_negative_k(synthetic_regime):
    with pytest.raises(DomainError):
        ExpSumG(synthetic_regime, -1.0)


# --- Time Average Tests ---


def test_time_average_second_moment(synthetic_regime):
    report = time_average_vs_expectation([2], synthetic_regime, T=1e6)
    assert report.caps_ok
    assert report.expectation > 0
    assert report.within_budget


def test_time_average_first_moment(synthetic_regime):
    report = time_average_vs_expectation([1], synthetic_regime, T=1e5)
    assert report.expectation == 0.0
    assert report.within_budget


def test_time_average_two_windows(synthetic_regime):
    report = time_average_vs_expectation([1, 1], synthetic_regime, T=1e5)
    assert report.expectation == 0.0
    assert report.within_budget
    assert report.to_dict()["caps_ok"]


def test_exponent_caps(synthetic_regime):
    assert exponent_caps_ok([1, 1], synthetic_regime)
    assert not exponent_caps_ok([2, 1], synthetic_regime)
    assert not exponent_caps_ok([5], synthetic_regime)


def test_time_average_index_errors(synthetic_regime):
    from zml.errors import RegimeIndexError

    with pytest.raises(RegimeIndexError):
        time_average_vs_expectation([1, 1, 1, 1], synthetic_regime)
    with pytest.raises(DomainError):
        time_average_vs_expectation([-1], synthetic_regime)
