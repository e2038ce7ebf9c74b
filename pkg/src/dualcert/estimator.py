"""scikit-learn style wrappers around the certification pipeline.

Rows of ``X`` are either class counts (for :class:`ClopperPearsonBounds`)
or probability bounds ``[p1_lower, p2_upper]`` (for
:class:`RobustnessCertifier`), so the two compose in a ``Pipeline``::

    pipe = make_pipeline(
        ClopperPearsonBounds(confidence=0.999),
        RobustnessCertifier(mechanism={"type": "gaussian", "sigma": 1.0},
                            threat={"type": "l2_ball", "delta": 0.5}),
    )
    robust = pipe.fit(counts).predict(counts)
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .certification import ProbabilityBounds, certify
from .distributions import DiscretizationSpec
from .duality import default_epsilon_grid
from .exceptions import DomainError
from .mechanisms import mechanism_profile, parse_mechanism, parse_relation


def _as_spec(obj, parser):
    return parser(obj) if isinstance(obj, dict) else obj


class ClopperPearsonBounds(TransformerMixin, BaseEstimator):
    """Turn per-class Monte-Carlo counts into ``[p1_lower, p2_upper]`` rows.

    Args:
      confidence: overall confidence for each row.
      mode: ``"bonferroni"`` or ``"binary"``, see
        :meth:`ProbabilityBounds.from_counts`.
      total: number of samples per row; defaults to the row sum.
    """

    def __init__(self, confidence=0.999, mode="bonferroni", total=None):
        self.confidence = confidence
        self.mode = mode
        self.total = total

    def fit(self, X, y=None):
        X = np.asarray(X)
        if X.ndim != 2:
            raise DomainError("counts must be a 2-d array")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        if not hasattr(self, "n_features_in_"):
            raise NotFittedError("ClopperPearsonBounds is not fitted")
        X = np.asarray(X)
        out = np.empty((X.shape[0], 2))
        for i, row in enumerate(X):
            total = int(row.sum()) if self.total is None else int(self.total)
            b = ProbabilityBounds.from_counts(row, total, self.confidence, mode=self.mode)
            out[i] = b.p1_lower, b.p2_upper
        return out


class RobustnessCertifier(BaseEstimator):
    """Certify rows of probability bounds against a fixed threat model.

    Args:
      mechanism: mechanism spec or its JSON dict.
      threat: neighboring relation or its JSON dict.
      bucket_width: PLD bucket width for mechanisms without a closed form.
      eps_points: size of the epsilon grid used by the dual-to-primal step.
      threads: worker threads for building per-relation profiles.
    """

    def __init__(self, mechanism=None, threat=None, bucket_width=1e-4, eps_points=4001,
                 threads=1):
        self.mechanism = mechanism
        self.threat = threat
        self.bucket_width = bucket_width
        self.eps_points = eps_points
        self.threads = threads

    def fit(self, X=None, y=None):
        """Build the per-relation privacy profiles; ``X`` is ignored."""
        if self.mechanism is None or self.threat is None:
            raise DomainError("mechanism and threat must both be set")
        self.mechanism_ = _as_spec(self.mechanism, parse_mechanism)
        self.threat_ = _as_spec(self.threat, parse_relation)
        self.grid_ = default_epsilon_grid(self.eps_points)
        self.profiles_ = mechanism_profile(
            self.mechanism_, self.threat_, grid=self.grid_,
            discretization=DiscretizationSpec(bucket_width=self.bucket_width),
            threads=self.threads)
        self.n_relations_ = len(self.profiles_)
        return self

    def _check(self):
        if not hasattr(self, "profiles_"):
            raise NotFittedError("RobustnessCertifier is not fitted")

    def certificates(self, X):
        """:class:`CertificateResult` for every row ``[p1_lower, p2_upper]``."""
        self._check()
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != 2:
            raise DomainError("rows must be [p1_lower, p2_upper]")
        return [certify(ProbabilityBounds(p1, p2), self.profiles_, grid=self.grid_)
                for p1, p2 in X]

    def decision_function(self, X):
        """Certificate margins; positive means robust."""
        return np.array([c.margin for c in self.certificates(X)])

    def predict(self, X):
        return np.array([c.robust for c in self.certificates(X)])


__all__ = ["ClopperPearsonBounds", "RobustnessCertifier"]
