"""Tests for the regime ladder, G polynomials, set membership and the mean-value bound."""

import math

import numpy as np
import pytest

from zml.errors import DomainError, PreconditionError, RegimeIndexError
from zml.partition.mean_value import mean_value_check, mean_value_suite
from zml.partition.membership import (
    PARTITION_COLUMNS,
    classify_many,
    classify_t,
    exceptional_s0_bound,
    in_exceptional_free_set,
    measure_partition,
)
from zml.partition.regime import (
    RegimeOverrides,
    build_regime,
    coeff_arrays,
    coeffs_phi_psi,
    default_L,
    delta_ladder,
    poly_G,
)
from zml.zeros.density import inject_synthetic


def _desk_regime(scale: float = 1.0, K: float = 20.0):
    """T = 1000 with three prime windows: {2..7}, {11..19}, {23..43}."""
    overrides = RegimeOverrides(delta=(0.0, 0.3, 0.45, 0.55), threshold=0.8,
                                a_threshold_scale=scale)
    return build_regime(1000.0, 1.0, K, 0.0, overrides)


def _offline_regime():
    """T = 1000, K = 1 and windows wide enough for an offset of 0.4 to register."""
    overrides = RegimeOverrides(delta=(0.0, 0.45, 0.55), threshold=0.8, a_threshold_scale=50.0)
    return build_regime(1000.0, 1.0, 1.0, 0.0, overrides)


# --- Regime Tests ---


def test_default_L():
    assert default_L(1e6) == pytest.approx(1.23, abs=5e-3)


def test_true_regime_has_single_range():
    regime = build_regime(1e6, 1.0, 20.0, 0.0)
    assert regime.I_index == 1
    assert not regime.overridden
    assert regime.kappa == 4.0
    assert regime.delta[0] == 0.0


def test_ladder_override_L():
    regime = build_regime(1e6, 1.0, 20.0, 0.0, RegimeOverrides(L=3.0))
    assert regime.delta == pytest.approx((0.0, 1 / 6561, 1 / 256, 1.0))
    assert regime.overridden


def test_ladder_increasing():
    delta = delta_ladder(4.7)
    assert all(b > a for a, b in zip(delta, delta[1:]))
    assert len(delta) == 6


def test_desk_regime_index():
    regime = _desk_regime()
    assert regime.I_index == 3
    assert list(regime.window_primes(1)) == [2, 3, 5, 7]
    assert list(regime.window_primes(2)) == [11, 13, 17, 19]
    assert list(regime.window_primes(3)) == [23, 29, 31, 37, 41, 43]


def test_window_primes_capped_beyond_sieve():
    regime = build_regime(math.exp(200), 1.0, 20.0, 0.0,
                          RegimeOverrides(delta=(0.0, 0.5), threshold=0.9))
    assert list(regime.window_primes(1, cap=10)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert regime.window_primes(1, cap=3000).size == 3000


def test_regime_errors():
    with pytest.raises(DomainError):
        build_regime(50.0, 1.0, 20.0, 0.0)
    with pytest.raises(DomainError):
        build_regime(1000.0, -1.0, 20.0, 0.0)
    with pytest.raises(DomainError):
        build_regime(1000.0, 1.0, 20.0, 0.0, RegimeOverrides(delta=(0.1, 0.2)))
    with pytest.raises(DomainError):
        build_regime(1000.0, 1.0, 20.0, 0.0, RegimeOverrides(delta=(0.0, 0.3, 0.2)))


def test_overrides_from_dict():
    overrides = RegimeOverrides.from_dict({"delta": [0, 0.5], "threshold": 0.5})
    assert overrides.delta == (0.0, 0.5)
    assert overrides.active
    with pytest.raises(DomainError):
        RegimeOverrides.from_dict({"bogus": 1})


# --- Coefficient Tests ---


def test_phi_bounded_for_large_K():
    regime = build_regime(1e6, 1.0, 1000.0, 0.0, RegimeOverrides(delta=(0.0, 0.5)))
    assert regime.I_index == 1
    primes = regime.window_primes(1)
    phi, psi = coeff_arrays(primes, 1, regime)
    assert np.all(np.abs(phi) < 8)
    assert np.all(np.abs(psi) <= 1)


def test_phi_vanishes_at_window_edge():
    delta_1 = math.log(7) / math.log(1000)
    regime = build_regime(1000.0, 1.0, 20.0, 0.0,
                          RegimeOverrides(delta=(0.0, delta_1), threshold=0.9))
    phi, psi = coeffs_phi_psi(7, 1, regime)
    assert abs(phi) < 1e-12
    assert abs(psi) <= 1


def test_coeff_errors():
    regime = _desk_regime()
    with pytest.raises(RegimeIndexError):
        coeffs_phi_psi(2, 5, regime)
    with pytest.raises(PreconditionError):
        coeffs_phi_psi(53, 1, regime)


# --- G Polynomial Tests ---


def test_poly_G_hand_sum():
    regime = _desk_regime()
    total = 0.0
    for p in (2, 3, 5, 7):
        phi, psi = coeffs_phi_psi(p, 1, regime)
        total += phi.real / math.sqrt(p) + psi.real / (2 * p)
    assert poly_G(0.0, 1, 1, regime) == pytest.approx(total, abs=1e-14)


def test_poly_G_empty_window():
    regime = build_regime(1000.0, 1.0, 20.0, 0.0,
                          RegimeOverrides(delta=(0.0, 0.3, 0.31), threshold=0.8))
    assert regime.window_primes(2).size == 0
    assert poly_G(1234.5, 2, 2, regime) == 0.0


def test_poly_G_triangle_bound():
    regime = _desk_regime()
    ts = np.linspace(1000.0, 2000.0, 301)
    for i in range(1, 4):
        p = regime.window_primes(i).astype(float)
        bound = float(np.sum(8 / np.sqrt(p) + 1 / (2 * p)))
        assert np.max(np.abs(poly_G(ts, i, 3, regime))) <= bound


def test_poly_G_vector_matches_scalar():
    regime = _desk_regime()
    ts = np.array([1100.0, 1500.5, 1999.0])
    values = poly_G(ts, 2, 3, regime)
    assert values[1] == pytest.approx(poly_G(1500.5, 2, 3, regime), abs=1e-13)


def test_poly_G_index_errors():
    regime = _desk_regime()
    with pytest.raises(RegimeIndexError):
        poly_G(1000.0, 2, 1, regime)
    with pytest.raises(RegimeIndexError):
        poly_G(1000.0, 1, 4, regime)


# --- Membership Tests ---


def test_real_table_always_in_B(scanned_table):
    regime = _desk_regime()
    for m in classify_many(np.linspace(1000.0, 2000.0, 25), regime, scanned_table):
        assert all(m.in_B.values())
        assert m.buckets


def test_every_t_has_a_bucket(empty_model):
    rng = np.random.default_rng(0)
    for scale in (0.5, 5.0, 50.0):
        regime = _desk_regime(scale)
        ts = 1000.0 + 1000.0 * rng.random(500)
        assert all(m.buckets for m in classify_many(ts, regime, empty_model))


def test_off_line_zero_breaks_B(empty_model):
    regime = _offline_regime()
    forced = inject_synthetic(empty_model, [(0.9, 1500.0)])
    m = classify_t(1500.0, regime, forced)
    assert not m.in_B[1]
    assert "S(0)" in m.labels
    assert m.first_failure == 1


def test_B_matches_exceptional_set(empty_model):
    regime = _offline_regime()
    forced = inject_synthetic(empty_model, [(0.9, 1500.0), (0.8, 1200.0), (0.6, 1800.0)])
    ts = np.linspace(1100.0, 1900.0, 161)
    for m in classify_many(ts, regime, forced):
        for j in range(1, regime.I_index + 1):
            direct = in_exceptional_free_set(m.t, regime.K, regime.log_X(j), forced)
            assert m.in_B[j] == direct


def test_classify_outside_range(empty_model):
    with pytest.raises(PreconditionError):
        classify_t(2500.0, _desk_regime(), empty_model)


def test_membership_to_dict(empty_model):
    data = classify_t(1234.0, _desk_regime(), empty_model).to_dict()
    assert data["t"] == 1234.0
    assert data["buckets"]


# --- Measure Tests ---


def test_measure_real_table(scanned_table):
    report = measure_partition(_desk_regime(5.0), scanned_table, 1000, seed=1)
    assert report.estimate("S(0)[B]").count == 0
    assert report.uncovered == 0
    assert report.report.passed
    assert len(report.rows()[0]) == len(PARTITION_COLUMNS)


def test_measure_deterministic(empty_model):
    regime = _desk_regime(5.0)
    first = measure_partition(regime, empty_model, 2000, seed=7)
    again = measure_partition(regime, empty_model, 2000, seed=7, workers=2)
    assert [e.count for e in first.estimates] == [e.count for e in again.estimates]


def test_measure_covers_interval(empty_model):
    report = measure_partition(_desk_regime(5.0), empty_model, 1000, seed=3)
    buckets = [e for e in report.estimates if e.bucket == "T" or (e.bucket.startswith("S(")
                                                    and e.bucket != "S(0)[B]")]
    assert sum(e.estimate for e in buckets) >= 1.0


def test_measure_threshold_response(empty_model):
    loose = measure_partition(_desk_regime(20.0), empty_model, 1000, seed=5)
    tight = measure_partition(_desk_regime(2.0), empty_model, 1000, seed=5)
    assert tight.estimate("T").count <= loose.estimate("T").count
    assert tight.estimate("S(0)").count >= loose.estimate("S(0)").count


def test_measure_needs_samples(empty_model):
    with pytest.raises(PreconditionError):
        measure_partition(_desk_regime(), empty_model, 10, seed=0)


def test_s0_bound_shape():
    T = 1e6
    expected = (math.log(T) + 1) * math.exp(-math.log(T) / math.log(math.log(T)))
    assert exceptional_s0_bound(T) == pytest.approx(expected)


# --- Mean Value Tests ---


def test_mean_value_diagonal():
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
              73, 79, 83, 89, 97]
    result = mean_value_check(dict.fromkeys(primes, 1.0), 1, 1e5, 100.0)
    assert result.lhs / 1e5 == pytest.approx(25.0, rel=0.05)
    assert result.ratio == pytest.approx(1.0, rel=0.05)


def test_mean_value_single_prime():
    T = 1e4
    result = mean_value_check({2: 1.0}, 2, T, 50.0)
    assert result.lhs == pytest.approx(T, rel=1e-12)
    assert result.rhs == pytest.approx(2 * T)
    assert result.lhs <= 2 * result.rhs


def test_mean_value_zero_coefficients():
    result = mean_value_check({2: 0.0, 3: 0.0}, 1, 1e4, 10.0)
    assert result.lhs == 0.0
    assert result.rhs == 0.0
    assert result.ratio == 0.0


def test_mean_value_errors():
    with pytest.raises(PreconditionError):
        mean_value_check({2: 1.0}, 3, 1e5, 100.0)
    with pytest.raises(DomainError):
        mean_value_check({4: 1.0}, 1, 1e5, 100.0)
    with pytest.raises(DomainError):
        mean_value_check({2: 1.0}, 0, 1e5, 100.0)


def test_mean_value_suite():
    report = mean_value_suite(5, seed=2, T=1e4, X=30.0)
    assert report.passed
    assert 0 < report.measurements["empirical_C"] < 3
