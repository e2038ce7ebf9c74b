import math

import numpy as np
import pytest
from scipy import integrate
from scipy.stats import norm

from dualcert.distributions import DiscretizationSpec
from dualcert.exceptions import DomainError, NumericFailure
from dualcert.mechanisms import AddRemove, SubsampledGaussian, mechanism_profile
from dualcert.rdp import (
    DEFAULT_ORDERS,
    RdpCurve,
    rdp_compose,
    rdp_curve,
    rdp_group_corrected,
    rdp_privacy_profile,
    rdp_subsampled_gaussian,
    rdp_to_profile,
)


def _renyi_quad(order, logp, logq, lo, hi):
    """Renyi divergence between two log-densities by plain quad on a window."""
    val, _ = integrate.quad(lambda y: math.exp(order * logp(y) + (1.0 - order) * logq(y)),
                            lo, hi, limit=500, epsabs=0.0, epsrel=1e-12)
    return math.log(val) / (order - 1.0)


def test_zero_sampling_rate_gives_zero():
    assert rdp_subsampled_gaussian(4.0, 0.0, 1.0) == 0.0


def test_full_sampling_rate_is_gaussian():
    for order, sigma in [(2.0, 1.0), (10.0, 3.0), (1.5, 0.7)]:
        assert rdp_subsampled_gaussian(order, 1.0, sigma) == pytest.approx(
            order / (2 * sigma ** 2), rel=1e-6)
        # The quadrature path agrees with the closed form as q -> 1.
        near = rdp_subsampled_gaussian(order, 1.0 - 1e-9, sigma)
        assert near == pytest.approx(order / (2 * sigma ** 2), rel=1e-6)


def test_integer_order_two_closed_form():
    # E_base[(mix/base)^2] = 1 + q^2 (e^{1/sigma^2} - 1) for the add direction.
    q, sigma = 0.01, 1.0
    up = math.log1p(q * q * math.expm1(1.0 / sigma ** 2))
    assert rdp_subsampled_gaussian(2.0, q, sigma) >= up * (1 - 1e-8)
    assert rdp_subsampled_gaussian(2.0, q, sigma) == pytest.approx(up, rel=1e-3)


def test_monte_carlo_order_two(rng):
    q, sigma, n = 0.01, 1.0, 10_000_000
    y = rng.normal(0.0, sigma, n)
    ratio = (1 - q) + q * np.exp((2 * y - 1) / (2 * sigma ** 2))
    # Order 2 under the base: E[r^2] for mix || base and E[1/r] for base || mix.
    estimates = []
    for sample in (ratio ** 2, 1.0 / ratio):
        m = sample.mean()
        estimates.append((math.log(m), sample.std(ddof=1) / math.sqrt(n) / m))
    value, se = max(estimates)
    assert abs(rdp_subsampled_gaussian(2.0, q, sigma) - value) <= 3 * se


@pytest.mark.parametrize("order,q,sigma", [(2.0, 0.1, 1.0), (3.5, 0.05, 2.0), (8.0, 0.2, 1.5)])
def test_matches_plain_quadrature(order, q, sigma):
    def mix(y):
        return np.logaddexp(math.log1p(-q) + norm.logpdf(y, 0, sigma),
                            math.log(q) + norm.logpdf(y, 1, sigma))

    def base(y):
        return norm.logpdf(y, 0, sigma)

    lo, hi = -1.0 - order - 30 * sigma, 2.0 + order + 30 * sigma
    ref = max(_renyi_quad(order, mix, base, lo, hi), _renyi_quad(order, base, mix, lo, hi))
    assert rdp_subsampled_gaussian(order, q, sigma) == pytest.approx(ref, rel=1e-7)


def test_tiny_divergences_keep_relative_accuracy():
    # Small-q expansion: D_a ~ a q^2 (e^{1/s^2} - 1) / 2.
    q, sigma, a = 1e-5, 3.0, 2.0
    approx = a * q * q * math.expm1(1 / sigma ** 2) / 2
    got = rdp_subsampled_gaussian(a, q, sigma)
    assert got == pytest.approx(approx, rel=1e-3)


def test_group_of_one_is_plain():
    assert rdp_group_corrected(3.0, 0.05, 2.0, 1) == rdp_subsampled_gaussian(3.0, 0.05, 2.0)


def test_group_correction_parameters():
    q = 0.01
    expect = rdp_subsampled_gaussian(3.0, 1 - (1 - q) ** 2, 1.0)
    assert 1 - (1 - q) ** 2 == pytest.approx(0.0199)
    assert rdp_group_corrected(3.0, q, 2.0, 2) == pytest.approx(expect, rel=1e-12)


def test_group_correction_monotone_in_group_size():
    vals = [rdp_group_corrected(4.0, 0.01, 3.0, r) for r in range(1, 6)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_curve_is_non_decreasing_in_order():
    c = rdp_curve(0.05, 2.0, orders=DEFAULT_ORDERS[::8])
    assert np.all(np.diff(c.values) >= 0)


def test_compose_scales_linearly():
    c = RdpCurve([2.0, 4.0], [0.1, 0.3])
    assert np.allclose(rdp_compose(c, 1).values, c.values)
    assert np.allclose(rdp_compose(rdp_compose(c, 3), 2).values, rdp_compose(c, 6).values)
    assert np.allclose(rdp_compose(c, 2).values, 2 * c.values)
    with pytest.raises(DomainError):
        rdp_compose(c, 0)


def test_conversion_properties():
    zero = RdpCurve([2.0, 8.0], [0.0, 0.0])
    assert np.allclose(rdp_to_profile(zero, np.array([0.0, 0.5, 2.0])), [1.0, math.exp(-3.5),
                                                                          math.exp(-14.0)])
    c = rdp_curve(0.1, 1.0, orders=DEFAULT_ORDERS[::4])
    eps = np.linspace(0, 5, 51)
    for conv in ("classic", "cks"):
        d = rdp_to_profile(c, eps, conv)
        assert np.all(d <= 1.0)
        assert np.all(np.diff(d) <= 1e-15)
    assert np.all(rdp_to_profile(c, eps, "cks") <= rdp_to_profile(c, eps, "classic") + 1e-15)
    with pytest.raises(DomainError):
        rdp_to_profile(c, 1.0, "nope")


def test_rdp_profile_dominates_exact_gaussian():
    # Gaussian mechanism: RDP a/(2 s^2) for all orders; the conversion can only lose.
    sigma = 2.0
    orders = np.array(DEFAULT_ORDERS)
    c = RdpCurve(orders, orders / (2 * sigma ** 2))
    prof = rdp_privacy_profile(c)
    eps = np.linspace(-2, 3, 21)
    mu = 1 / sigma
    exact = norm.cdf(mu / 2 - eps / mu) - np.exp(eps) * norm.cdf(-mu / 2 - eps / mu)
    assert np.all(prof(eps) >= exact - 1e-12)


@pytest.mark.parametrize("r", [1, 8])
def test_profile_beats_rdp_for_training(r):
    spec = SubsampledGaussian(0.00256, 3.0, iterations=100)
    exact = mechanism_profile(spec, AddRemove(r, 0),
                              discretization=DiscretizationSpec(1e-4))[0]
    curve = rdp_compose(rdp_curve(0.00256, 3.0, r), 100)
    # Larger eps puts both values below the 1e-13 tail the PLD keeps pessimistically.
    eps = np.array([0.005, 0.02, 0.1])
    assert np.all(exact(eps) <= rdp_to_profile(curve, eps))


def test_overflow_is_reported():
    # a / (2 s^2) is about 2e14 here, beyond what the integrand can resolve.
    with pytest.raises(NumericFailure):
        rdp_subsampled_gaussian(400.0, 0.5, 1e-6)
    with pytest.raises(NumericFailure):
        rdp_subsampled_gaussian(400.0, 1.0, 1e-160)


def test_small_sigma_stays_accurate():
    # Well-separated components: D ~ a / (2 s^2) + a log(q) / (a - 1).
    a, q, s = 400.0, 0.5, 1e-3
    approx = a / (2 * s * s) + a * math.log(q) / (a - 1)
    assert rdp_subsampled_gaussian(a, q, s) == pytest.approx(approx, rel=1e-12)


def test_curve_validation():
    with pytest.raises(DomainError):
        RdpCurve([1.0], [0.1])
    with pytest.raises(DomainError):
        RdpCurve([2.0, 3.0], [0.1])
    with pytest.raises(DomainError):
        RdpCurve([2.0, 3.0], [0.5, 0.1])
    with pytest.raises(DomainError):
        RdpCurve([2.0], [-0.1])
    with pytest.raises(DomainError):
        rdp_subsampled_gaussian(1.0, 0.1, 1.0)
    with pytest.raises(DomainError):
        rdp_group_corrected(2.0, 0.1, 1.0, 0)
