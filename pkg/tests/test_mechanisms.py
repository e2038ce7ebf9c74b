import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from dualcert.distributions import DiscretizationSpec, hs_divergence
from dualcert.duality import PrivacyProfile, TradeoffCurve, dual_to_primal, opposite_profile
from dualcert.exceptions import DomainError, NoDominatingPairError
from dualcert.mechanisms import (
    DPA,
    AddRemove,
    Composition,
    DatasetChanges,
    DPACompose,
    GaussianMechanism,
    Joint,
    L2Ball,
    PerturbKRecords,
    PreprocessAmplified,
    RandomizedResponse,
    SubsampledGaussian,
    decompose_relation,
    dominating_pair,
    dpa_compose_profile,
    dpa_compose_tradeoff,
    dpa_profile,
    dpa_tradeoff,
    max_profile,
    mechanism_profile,
    mechanism_to_dict,
    parse_mechanism,
    parse_relation,
    preprocess_amplified_profile,
    preprocess_weight,
    randomized_response_pair,
    relation_to_dict,
)

GAUSS_TV = 2 * stats.norm.cdf(0.5) - 1


def test_decompose_examples():
    assert decompose_relation(DatasetChanges(2)) == [AddRemove(0, 2), AddRemove(1, 1),
                                                      AddRemove(2, 0)]
    assert decompose_relation(DatasetChanges(0)) == [AddRemove(0, 0)]
    assert decompose_relation(Joint(DatasetChanges(1), L2Ball(0.2))) == [
        Joint(AddRemove(0, 1), L2Ball(0.2)), Joint(AddRemove(1, 0), L2Ball(0.2))]
    assert decompose_relation(L2Ball(1.0)) == [L2Ball(1.0)]


def test_dominating_pair_examples():
    g = 0.01
    p, q = dominating_pair(SubsampledGaussian(g, 2.0), AddRemove(0, 1))
    assert np.allclose(sorted(p.components, key=lambda c: c[1]),
                       [(1 - g, 0.0, 2.0), (g, 1.0, 2.0)], rtol=0, atol=1e-15)
    assert [c[1:] for c in q.components] == [(0.0, 2.0)]
    p3, _ = dominating_pair(SubsampledGaussian(g, 2.0), AddRemove(0, 3))
    assert len(p3.components) == 4
    # Binomial weights for the component at shift i.
    w = {c[1]: c[0] for c in p3.components}
    for i in range(4):
        assert w[float(i)] == pytest.approx(math.comb(3, i) * g**i * (1 - g)**(3 - i))
    p0, q0 = dominating_pair(GaussianMechanism(1.0), L2Ball(0.0))
    assert hs_divergence(p0, q0, 0.0) == 0.0


def test_dominating_pair_errors():
    with pytest.raises(NoDominatingPairError):
        dominating_pair(SubsampledGaussian(0.1, 1.0, 5), AddRemove(1, 0))
    with pytest.raises(NoDominatingPairError):
        dominating_pair(SubsampledGaussian(0.1, 1.0), DatasetChanges(2))
    with pytest.raises(NoDominatingPairError):
        dominating_pair(DPA(10), DatasetChanges(2))


def test_dpa_profile_examples():
    assert dpa_profile(100, 5, Fraction(1, 10)) == Fraction(1, 20)
    assert dpa_profile(100, 5, 0.1) == 0.05
    assert dpa_profile(100, 5, -0.1) == pytest.approx(1 - 0.95 * math.exp(-0.1), abs=1e-15)
    assert dpa_profile(100, 5, -0.1) == pytest.approx(0.140404, abs=1e-6)
    assert dpa_profile(37, 0, 2.0) == 0.0
    with pytest.raises(DomainError):
        dpa_profile(10, 11, 0.0)


def test_dpa_tradeoff_examples():
    assert dpa_tradeoff(100, 5, Fraction(3, 10)) == Fraction(13, 20)
    assert dpa_tradeoff(100, 5, 0.3) == pytest.approx(0.65, abs=1e-15)
    assert dpa_tradeoff(100, 5, 0.97) == 0.0
    assert dpa_tradeoff(100, 0, Fraction(1, 3)) == Fraction(2, 3)


def test_dpa_compose_profile_examples():
    assert dpa_compose_profile(10, 1, Fraction(1, 5)) == Fraction(7, 25)
    assert dpa_compose_profile(10, 1, 0.2) == pytest.approx(0.28, abs=1e-15)
    assert dpa_compose_profile(100, 7, 0.0) == pytest.approx(0.07)
    assert dpa_compose_profile(100, 7, 1.0) == pytest.approx(1.0)


def test_dpa_compose_tradeoff_examples():
    ident = TradeoffCurve.identity()
    assert dpa_compose_tradeoff(100, 5, ident, 0.5) == pytest.approx(0.45, abs=1e-15)
    assert dpa_compose_tradeoff(100, 5, ident, 0.5) == pytest.approx(dpa_tradeoff(100, 5, 0.5))
    assert dpa_compose_tradeoff(100, 5, ident, 0.96) == 0.0
    curve = TradeoffCurve(np.array([0.0, 0.3, 1.0]), np.array([0.6, 0.2, 0.0]))
    assert dpa_compose_tradeoff(100, 0, curve, 0.25) == pytest.approx(curve(0.25))
    assert dpa_compose_tradeoff(10, 10, curve, 0.1) == 0.0


def test_preprocess_examples():
    assert preprocess_weight(1.0, 1.0) == pytest.approx(GAUSS_TV, abs=1e-15)
    assert preprocess_amplified_profile(1.0, 1.0, 0.5, 0.0) == pytest.approx(0.191462, abs=1e-6)
    assert preprocess_amplified_profile(1.0, 0.0, 0.7, 0.3) == 0.0
    assert preprocess_amplified_profile(2.0, 1.0, 0.0, 0.5) == 0.0
    # Below zero the identical-pair floor keeps the profile valid.
    assert preprocess_amplified_profile(1.0, 0.0, 0.7, -1.0) == pytest.approx(1 - math.exp(-1))


def test_mechanism_profile_examples():
    (g,) = mechanism_profile(GaussianMechanism(1.0), L2Ball(1.0))
    assert g(0.0) == pytest.approx(GAUSS_TV, abs=1e-12)
    # A joint relation with R=5 decomposes; every piece has the same DPA bound.
    comps = mechanism_profile(DPACompose(100, GaussianMechanism(1.0)),
                              Joint(DatasetChanges(5), L2Ball(1.0)))
    assert len(comps) == 6
    for prof in comps:
        assert prof(0.0) == pytest.approx(0.05 + 0.95 * GAUSS_TV, abs=1e-12)
    assert 0.05 + 0.95 * GAUSS_TV == pytest.approx(0.413779, abs=1e-6)
    (z,) = mechanism_profile(SubsampledGaussian(0.1, 1.0), AddRemove(0, 0))
    assert np.all(z(np.linspace(0, 5, 11)) == 0.0)


def test_randomized_response():
    p, q = randomized_response_pair(0.75)
    assert sorted(p.atoms) == [(0.0, 0.25), (1.0, 0.75)]
    assert sorted(q.atoms) == [(0.0, 0.75), (1.0, 0.25)]
    assert hs_divergence(p, q, 0.0) == pytest.approx(0.5)
    assert dual_to_primal(PrivacyProfile.from_pair(p, q), 0.25) == pytest.approx(0.25, abs=1e-12)


@pytest.mark.parametrize("r_plus,r_minus", [(0, 1), (1, 0), (1, 2), (3, 0), (2, 1), (0, 3)])
def test_opposite_identity(r_plus, r_minus):
    spec = SubsampledGaussian(0.2, 1.0)
    (a,) = mechanism_profile(spec, AddRemove(r_plus, r_minus))
    (b,) = mechanism_profile(spec, AddRemove(r_minus, r_plus))
    eps = np.linspace(-3, 3, 20)
    assert np.max(np.abs(opposite_profile(a, eps) - b(eps))) <= 1e-6


def test_dpa_compose_theorem_consistency(rng):
    a = np.linspace(0, 1, 50)
    for _ in range(5):
        x = np.sort(rng.uniform(0, 1, 4))
        y = np.sort(rng.uniform(0, 1, 4))[::-1] * (1 - x)
        pts = np.array([[0, 1.0]] + list(zip(x, y)) + [[1, 0]])
        # Lower convex hull keeps a valid curve.
        hull = [pts[0]]
        for p in pts[1:]:
            hull.append(p)
            while len(hull) >= 3:
                (x1, y1), (x2, y2), (x3, y3) = hull[-3:]
                if (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1) <= 0:
                    del hull[-2]
                else:
                    break
        hull = np.array(hull)
        base = TradeoffCurve(hull[:, 0], hull[:, 1])
        base_prof = PrivacyProfile.from_curve(base)
        N, R = 50, int(rng.integers(0, 20))
        comp = PrivacyProfile(lambda e: dpa_compose_profile(N, R, base_prof(e)),
                              breakpoints=np.concatenate([base_prof.breakpoints, [0.0]]))
        lhs = dpa_compose_tradeoff(N, R, base, a)
        assert np.max(np.abs(lhs - dual_to_primal(comp, a))) <= 1e-6


def test_composition_matches_self_compose():
    w = 1e-3
    disc = DiscretizationSpec(w)
    k = 4
    step = SubsampledGaussian(0.3, 1.0)
    (a,) = mechanism_profile(Composition((step,) * k), AddRemove(0, 1), discretization=disc)
    (b,) = mechanism_profile(SubsampledGaussian(0.3, 1.0, k), AddRemove(0, 1), discretization=disc)
    eps = np.linspace(-1, 3, 41)
    assert np.max(np.abs(a(eps) - b(eps))) <= 2 * k * w


def test_composition_pld_dominates_exact():
    # Four Gaussian mechanisms compose to a Gaussian with sqrt(4) times the shift.
    w = 1e-4
    (a,) = mechanism_profile(Composition((GaussianMechanism(2.0),) * 4), L2Ball(1.0),
                             discretization=DiscretizationSpec(w))
    eps = np.linspace(-1, 3, 41)
    exact = PrivacyProfile.gaussian(1.0)(eps)
    assert np.all(a(eps) >= exact - 1e-12)
    assert np.all(a(eps) <= exact + 4 * w)


@given(st.integers(0, 3), st.integers(0, 3), st.floats(-2, 2))
def test_profile_monotone_in_radius(rp, rm, eps):
    spec = SubsampledGaussian(0.2, 1.0)
    (base,) = mechanism_profile(spec, AddRemove(rp, rm))
    (more_p,) = mechanism_profile(spec, AddRemove(rp + 1, rm))
    (more_m,) = mechanism_profile(spec, AddRemove(rp, rm + 1))
    assert more_p(eps) >= base(eps) - 1e-12
    assert more_m(eps) >= base(eps) - 1e-12


@given(st.floats(0.0, 2.0), st.floats(0.0, 1.0))
def test_gaussian_monotone_in_test_radius(d, extra):
    (a,) = mechanism_profile(GaussianMechanism(1.0), L2Ball(d))
    (b,) = mechanism_profile(GaussianMechanism(1.0), L2Ball(d + extra))
    eps = np.linspace(-3, 3, 13)
    assert np.all(b(eps) >= a(eps) - 1e-12)
    assert np.all(np.diff(a(eps)) <= 1e-15)
    assert np.all(a(eps) >= np.maximum(0, -np.expm1(eps)) - 1e-15)


def test_preprocess_mechanism_profile():
    base = SubsampledGaussian(0.1, 1.0)
    spec = PreprocessAmplified(2.0, base)
    (prof,) = mechanism_profile(spec, PerturbKRecords(1, 1.0))
    (inner,) = mechanism_profile(base, AddRemove(1, 1))
    w = preprocess_weight(2.0, 1.0)
    eps = np.linspace(-2, 2, 9)
    floor = np.maximum(0, -np.expm1(eps))
    assert np.allclose(prof(eps), np.minimum(1, w * inner(eps) + (1 - w) * floor), atol=1e-12)


def test_max_profile_dominates_pieces():
    spec = SubsampledGaussian(0.1, 0.5)
    pieces = mechanism_profile(spec, DatasetChanges(2))
    top = max_profile(spec, DatasetChanges(2))
    eps = np.linspace(-2, 2, 21)
    for prof in pieces:
        assert np.all(top(eps) >= prof(eps) - 1e-15)


def test_rr_under_relations():
    spec = RandomizedResponse(0.75)
    (flip,) = mechanism_profile(spec, AddRemove(1, 0))
    (none,) = mechanism_profile(spec, AddRemove(0, 0))
    assert flip(0.0) == pytest.approx(0.5)
    assert none(0.0) == 0.0


def test_json_round_trip():
    spec = {"type": "subsampled_gaussian", "gamma": 0.00256, "sigma": 3.0, "iterations": 3750}
    assert mechanism_to_dict(parse_mechanism(spec)) == spec
    nested = {"type": "composition", "components": [
        {"type": "dpa_compose", "N": 50, "base": {"type": "gaussian", "sigma": 0.5,
                                                  "sensitivity": 1.0}},
        {"type": "preprocess_amplified", "sigma_in": 1.0,
         "base": {"type": "randomized_response", "p": 0.8}}]}
    assert mechanism_to_dict(parse_mechanism(nested)) == nested
    rel = {"type": "joint", "train": {"type": "dataset_changes", "R": 3},
           "test": {"type": "l2_ball", "delta": 0.25}}
    assert relation_to_dict(parse_relation(rel)) == rel
    with pytest.raises(DomainError):
        parse_mechanism({"type": "nope"})
    with pytest.raises(DomainError):
        parse_relation({"type": "add_remove", "r_plus": 1})


def test_spec_validation():
    with pytest.raises(DomainError):
        SubsampledGaussian(0.0, 1.0)
    with pytest.raises(DomainError):
        RandomizedResponse(0.4)
    with pytest.raises(DomainError):
        Composition(())
    with pytest.raises(DomainError):
        AddRemove(-1, 0)
    with pytest.raises(DomainError):
        L2Ball(-0.1)
    with pytest.raises(DomainError):
        mechanism_profile(DPA(3), DatasetChanges(4))
