import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from dualcert.distributions import Discrete, Gaussian, GaussianMixture, hs_divergence
from dualcert.duality import (
    PrivacyProfile,
    TradeoffCurve,
    curve_pointwise_min,
    default_epsilon_grid,
    dual_to_primal,
    left_continuous_inverse,
    opposite_profile,
    pointwise_min,
    primal_to_dual,
    refine_grid,
    symmetric_dual_to_primal,
)
from dualcert.exceptions import DomainError, ExtrapolationError
from dualcert.mechanisms import dpa_profile


def gauss_tradeoff(mu, alpha):
    return stats.norm.cdf(stats.norm.ppf(1 - np.asarray(alpha)) - mu)


def lower_hull(points):
    """Lower convex hull of (x, y) points sorted by x (monotone chain)."""
    hull = []
    for p in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        if hull and hull[-1][0] == p[0]:
            if p[1] < hull[-1][1]:
                hull[-1] = p
            continue
        hull.append(p)
    return hull


@st.composite
def tradeoff_curves(draw):
    n = draw(st.integers(0, 8))
    v0 = draw(st.floats(0.0, 1.0))
    pts = [(0.0, v0), (1.0, 0.0)]
    for _ in range(n):
        a = draw(st.floats(0.01, 0.99))
        pts.append((a, draw(st.floats(0.0, 1.0)) * (1.0 - a)))
    hull = lower_hull(pts)
    return TradeoffCurve(np.array([h[0] for h in hull]), np.array([h[1] for h in hull]))


def dpa(N, R):
    return PrivacyProfile(lambda e: dpa_profile(N, R, e), breakpoints=[0.0])


def test_dual_to_primal_examples():
    assert dual_to_primal(PrivacyProfile.identical(), 0.3) == pytest.approx(0.7, abs=1e-12)
    assert dual_to_primal(PrivacyProfile.gaussian(1.0), 0.5) == pytest.approx(
        stats.norm.cdf(-1.0), abs=1e-8)
    assert dual_to_primal(dpa(100, 5), 0.3) == pytest.approx(0.65, abs=1e-12)


def test_dual_to_primal_lower_bound_gaussian():
    a = np.linspace(0, 1, 201)
    for mu in (0.3, 1.0, 2.5):
        got = dual_to_primal(PrivacyProfile.gaussian(mu), a)
        exact = gauss_tradeoff(mu, a)
        assert np.all(got <= exact + 1e-12)
        assert np.all(got >= exact - 1e-6)


def test_dual_to_primal_empty_grid():
    prof = PrivacyProfile.gaussian(1.0).with_grid(np.array([]))
    # Breakpoints are empty too, so nothing is left to maximize over.
    with pytest.raises(DomainError):
        dual_to_primal(prof, 0.5, grid=np.array([]))


def test_grid_extension_reaches_far_maximizer():
    # The maximizer for small alpha sits far to the left of a short grid.
    prof = PrivacyProfile.gaussian(8.0)
    got = dual_to_primal(prof, 1e-12, grid=np.linspace(-1, 1, 21))
    assert got == pytest.approx(gauss_tradeoff(8.0, 1e-12), abs=1e-6)


@given(st.floats(0.1, 3.0), st.integers(21, 400))
def test_grid_refinement_never_decreases(mu, n):
    prof = PrivacyProfile.gaussian(mu)
    grid = np.linspace(-6, 6, n)
    a = np.linspace(0, 1, 50)
    coarse = dual_to_primal(prof, a, grid=grid, refine=False)
    fine = dual_to_primal(prof, a, grid=refine_grid(grid), refine=False)
    assert np.all(fine >= coarse - 1e-15)


def test_dual_curve_shape():
    p = GaussianMixture([(0.8, 0.0, 1.0), (0.2, 2.0, 1.0)])
    prof = PrivacyProfile.from_pair(p, Gaussian(0.0, 1.0))
    a = np.linspace(0, 1, 100)
    f = dual_to_primal(prof, a)
    assert np.all(f <= 1 - a + 1e-15)
    assert np.all(np.diff(f) <= 1e-12)
    assert np.all(np.diff(f, 2) >= -1e-7)


def test_primal_to_dual_examples():
    ident = TradeoffCurve.identity()
    assert primal_to_dual(ident, np.array([0.0, 0.5, 3.0])) == pytest.approx(0.0, abs=1e-15)
    curve = TradeoffCurve(np.array([0.0, 0.95, 1.0]), np.array([0.95, 0.0, 0.0]))
    assert primal_to_dual(curve, 0.1) == pytest.approx(0.05, abs=1e-15)


def test_primal_to_dual_gaussian_round_trip():
    prof = PrivacyProfile.gaussian(1.0)
    curve = TradeoffCurve.from_profile(prof, np.linspace(0, 1, 2000))
    assert primal_to_dual(curve, 0.0) == pytest.approx(2 * stats.norm.cdf(0.5) - 1, abs=1e-3)


@given(tradeoff_curves())
def test_round_trip(curve):
    prof = PrivacyProfile.from_curve(curve)
    back = dual_to_primal(prof, curve.alphas)
    assert np.max(np.abs(back - curve.values)) <= 1e-6


@given(tradeoff_curves())
def test_primal_to_dual_properties(curve):
    eps = np.linspace(-5, 5, 201)
    d = primal_to_dual(curve, eps)
    assert np.all(np.diff(d) <= 1e-12)
    assert np.all(d >= np.maximum(0, -np.expm1(eps)) - 1e-15)


def test_left_continuous_inverse():
    curve = TradeoffCurve(np.array([0.0, 0.2, 0.6, 1.0]), np.array([0.5, 0.1, 0.0, 0.0]))
    betas, inv = left_continuous_inverse(curve)
    assert betas.tolist() == [0.0, 0.1, 0.5, 1.0]
    assert inv.tolist() == [0.6, 0.2, 0.0, 0.0]


def test_opposite_examples():
    ident = PrivacyProfile.identical()
    assert opposite_profile(ident, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert opposite_profile(ident, -0.5) == pytest.approx(1 - math.exp(-0.5), abs=1e-12)
    assert 1 - math.exp(-0.5) == pytest.approx(0.393469, abs=1e-6)


def test_opposite_subsampled_pair():
    gamma, sigma = 0.2, 1.0
    remove = (GaussianMixture([(1 - gamma, 0, sigma), (gamma, 1, sigma)]), Gaussian(0, sigma))
    prof_remove = PrivacyProfile.from_pair(*remove)
    for e in np.linspace(-3, 3, 13):
        oracle = hs_divergence(remove[1], remove[0], e)
        assert opposite_profile(prof_remove, e) == pytest.approx(oracle, abs=1e-6)


def test_opposite_twice():
    p = GaussianMixture([(0.7, 0.0, 1.0), (0.3, 1.0, 1.0)])
    prof = PrivacyProfile.from_pair(p, Gaussian(0.0, 1.0))
    twice = prof.opposite().opposite()
    eps = np.linspace(-4, 4, 81)
    assert np.allclose(twice(eps), prof(eps), atol=1e-9, rtol=0)


def test_opposite_extrapolation():
    prof = PrivacyProfile.from_samples([0.0, 1.0, 2.0], [0.3, 0.2, 0.1])
    with pytest.raises(ExtrapolationError):
        opposite_profile(prof, 0.5)


def test_symmetric_dual_to_primal():
    assert symmetric_dual_to_primal(PrivacyProfile.identical(), 0.2) == pytest.approx(0.8)
    assert symmetric_dual_to_primal(PrivacyProfile.gaussian(1.0), 0.5) == pytest.approx(
        stats.norm.cdf(-1.0), abs=1e-6)
    a = np.linspace(0, 1, 50)
    rr = PrivacyProfile.from_pair(Discrete([(1, 0.75), (0, 0.25)]), Discrete([(1, 0.25), (0, 0.75)]))
    for prof in (PrivacyProfile.gaussian(1.0), rr):
        assert np.allclose(symmetric_dual_to_primal(prof, a), dual_to_primal(prof, a),
                           atol=1e-9, rtol=0)


def test_pointwise_min():
    assert pointwise_min([0.3]) == 0.3
    f1 = TradeoffCurve.identity()
    f2 = TradeoffCurve(np.array([0.0, 0.9, 1.0]), np.array([0.9, 0.0, 0.0]))
    assert curve_pointwise_min([f1]) is f1
    assert curve_pointwise_min([f1, f2])(0.5) == pytest.approx(0.4)
    with pytest.raises(DomainError):
        pointwise_min([])


def test_tradeoff_curve_validation():
    with pytest.raises(DomainError):
        TradeoffCurve(np.array([0.0, 0.5]), np.array([1.0, 0.5]))
    with pytest.raises(DomainError):
        TradeoffCurve(np.array([0.0, 0.5, 1.0]), np.array([1.0, 0.1, 0.2]))
    with pytest.raises(DomainError):
        TradeoffCurve(np.array([0.0, 0.5, 1.0]), np.array([0.9, 0.6, 0.0]))
    with pytest.raises(DomainError):
        TradeoffCurve(np.array([0.0, 0.5, 1.0]), np.array([0.5, 0.5, 0.0]))


def test_tradeoff_curve_json():
    curve = TradeoffCurve(np.array([0.0, 0.2, 1.0]), np.array([0.6, 0.2, 0.0]))
    assert json.loads(curve.to_json()) == {"knots": [[0.0, 0.6], [0.2, 0.2], [1.0, 0.0]]}
    back = TradeoffCurve.from_json(curve.to_json())
    assert back.knots == curve.knots


def test_default_grid():
    g = default_epsilon_grid()
    assert g.size == 4001 and g[0] == -20 and g[-1] == 20 and 0.0 in g
    with pytest.raises(DomainError):
        default_epsilon_grid(2)


def test_from_samples_upper_bound():
    prof = PrivacyProfile.gaussian(1.0)
    eps = np.linspace(-2, 4, 61)
    step = PrivacyProfile.from_samples(eps, prof(eps))
    probe = np.linspace(-2, 4, 600)
    assert np.all(step(probe) >= prof(probe) - 1e-15)


def test_delta_only_profile_ignores_rounding_noise():
    # Without a complement evaluator, 1 - delta at very negative eps is pure
    # rounding noise; scaled by e^{-eps} it must not inflate the curve.
    curve = TradeoffCurve(np.array([0.0, 1.0]), np.array([0.437, 0.0]))
    prof = PrivacyProfile(lambda e: primal_to_dual(curve, e),
                          breakpoints=PrivacyProfile.from_curve(curve).breakpoints)
    alphas = np.array([0.0, 0.3, 1.0])
    got = dual_to_primal(prof, alphas)
    assert np.all(got <= curve(alphas) + 1e-12)
    assert got == pytest.approx(curve(alphas), abs=1e-9)
