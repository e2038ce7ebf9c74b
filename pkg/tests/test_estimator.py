import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from dualcert import GaussianMechanism, L2Ball, ProbabilityBounds, clopper_pearson
from dualcert.estimator import ClopperPearsonBounds, RobustnessCertifier
from dualcert.exceptions import DomainError

GAUSS = {"type": "gaussian", "sigma": 1.0}


def test_bounds_transformer_matches_from_counts():
    counts = np.array([[900, 80, 20], [600, 400, 0]])
    out = ClopperPearsonBounds(confidence=0.99).fit_transform(counts)
    for row, (lo, hi) in zip(counts, out):
        b = ProbabilityBounds.from_counts(row, int(row.sum()), 0.99)
        assert (lo, hi) == (b.p1_lower, b.p2_upper)


def test_binary_mode_and_fixed_total():
    out = ClopperPearsonBounds(confidence=0.999, mode="binary", total=1000).fit_transform(
        [[900]])
    lo = clopper_pearson(900, 1000, 0.999)[0]
    assert out[0].tolist() == [lo, 1.0 - lo]


def test_certifier_matches_closed_form():
    est = RobustnessCertifier(mechanism=GAUSS, threat={"type": "l2_ball", "delta": 1.2},
                              eps_points=1001).fit()
    X = [[0.9, 0.1], [0.8, 0.2]]
    # Robust iff 1.2 < (Phi^-1(p1) - Phi^-1(p2)) / 2: 1.28 and 0.84.
    assert est.predict(X).tolist() == [True, False]
    margins = est.decision_function(X)
    assert margins[0] > 0 > margins[1]
    assert est.n_relations_ == 1


def test_certifier_accepts_spec_objects():
    est = RobustnessCertifier(mechanism=GaussianMechanism(1.0), threat=L2Ball(0.5),
                              eps_points=1001).fit()
    assert est.predict([[0.9, 0.1]]).tolist() == [True]


def test_pipeline_and_clone():
    pipe = make_pipeline(
        ClopperPearsonBounds(confidence=0.999),
        RobustnessCertifier(mechanism=GAUSS, threat={"type": "l2_ball", "delta": 0.5},
                            eps_points=1001),
    )
    counts = np.array([[990, 10], [550, 450]])
    assert pipe.fit(counts).predict(counts).tolist() == [True, False]
    twin = clone(pipe)
    assert twin.get_params()["robustnesscertifier__threat"] == {"type": "l2_ball", "delta": 0.5}


def test_unfitted_and_invalid():
    with pytest.raises(NotFittedError):
        RobustnessCertifier(mechanism=GAUSS, threat={"type": "l2_ball", "delta": 1}).predict(
            [[0.9, 0.1]])
    with pytest.raises(NotFittedError):
        ClopperPearsonBounds().transform([[1, 2]])
    with pytest.raises(DomainError):
        RobustnessCertifier().fit()
    est = RobustnessCertifier(mechanism=GAUSS, threat={"type": "l2_ball", "delta": 1},
                              eps_points=1001).fit()
    with pytest.raises(DomainError):
        est.predict([[0.9, 0.05, 0.05]])
