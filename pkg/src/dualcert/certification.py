"""Robustness certificates from privacy profiles.

A smoothed classifier whose top class has probability at least ``p1`` and
runner-up at most ``p2`` keeps its prediction under a threat model with
decomposed profiles ``delta_i`` when

    min_i [f_i(1 - p1) + f_i(p2)] > 1,

where ``f_i`` is the tradeoff curve dual to ``delta_i``. The margin reported
here is the left side minus one. Tradeoff values come from
:func:`dualcert.duality.dual_to_primal`, which under-estimates ``f``, so a
positive margin is never an over-claim.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.special import betainc

from .duality import dual_to_primal
from .exceptions import DomainError, MonotonicityError

_MONOTONE_TOL = 1e-9


def _bisect(pred, lo=0.0, hi=1.0, tol=1e-14):
    """Bracket ``(a, b)`` around the switch point of a predicate true at ``lo``."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def clopper_pearson(successes, trials, confidence):
    """One-sided exact binomial bounds, each holding with probability ``confidence``.

    ``lower`` is the largest ``q`` with ``P[Bin(trials, q) >= successes] <= 1 - confidence``
    and ``upper`` the smallest ``q`` with ``P[Bin(trials, q) <= successes] <= 1 - confidence``.
    Both are found by bisection on the regularized incomplete beta function and
    rounded outward.
    """
    k, n = successes, trials
    if int(k) != k or int(n) != n or n < 1 or not 0 <= k <= n:
        raise DomainError("need integers 0 <= successes <= trials, trials >= 1")
    if not 0.0 < confidence < 1.0:
        raise DomainError("confidence must lie in (0, 1)")
    k, n = int(k), int(n)
    fail = 1.0 - confidence
    if k == 0:
        lower = 0.0
    else:
        # P[Bin(n, q) >= k] = I_q(k, n - k + 1), increasing in q.
        lower = _bisect(lambda q: betainc(k, n - k + 1, q) <= fail)[0]
    if k == n:
        upper = 1.0
    else:
        # P[Bin(n, q) <= k] = 1 - I_q(k + 1, n - k), decreasing in q.
        upper = _bisect(lambda q: betainc(k + 1, n - k, q) < confidence)[1]
    return lower, upper


@dataclass(frozen=True)
class ProbabilityBounds:
    """Lower bound on the top-class probability and upper bound on the runner-up."""

    p1_lower: float
    p2_upper: float
    source: dict = field(default_factory=lambda: {"kind": "exact"}, compare=False)

    def __post_init__(self):
        for name in ("p1_lower", "p2_upper"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1]")
            object.__setattr__(self, name, v)

    @property
    def separated(self):
        return self.p1_lower > self.p2_upper

    @classmethod
    def binary(cls, p1):
        """Exact two-class bounds with ``p2 = 1 - p1``."""
        return cls(p1, 1.0 - p1)

    @classmethod
    def from_counts(cls, counts, total, confidence, predicted=None, mode="bonferroni"):
        """Clopper-Pearson bounds from Monte-Carlo class counts.

        Args:
          counts: per-class counts, summing to at most ``total``.
          total: number of samples.
          confidence: overall confidence for the pair of bounds.
          predicted: class index; defaults to the arg-max count.
          mode: ``"bonferroni"`` splits the failure probability evenly between
            the lower bound on ``p1`` and the upper bound on the runner-up;
            ``"binary"`` uses ``p2 = 1 - p1`` with a single bound.
        """
        counts = [int(c) for c in counts]
        if not counts or any(c < 0 for c in counts) or sum(counts) > total:
            raise DomainError("counts must be non-negative and sum to at most total")
        if predicted is None:
            predicted = int(np.argmax(counts))
        if mode == "binary":
            lo, _ = clopper_pearson(counts[predicted], total, confidence)
            return cls(lo, 1.0 - lo, {"kind": "clopper_pearson", "counts": counts,
                                      "total": int(total), "confidence": confidence,
                                      "mode": mode})
        if mode != "bonferroni":
            raise DomainError(f"unknown mode {mode!r}")
        each = 1.0 - (1.0 - confidence) / 2.0
        lo, _ = clopper_pearson(counts[predicted], total, each)
        others = [c for i, c in enumerate(counts) if i != predicted]
        hi = max((clopper_pearson(c, total, each)[1] for c in others), default=0.0)
        return cls(lo, hi, {"kind": "clopper_pearson", "counts": counts, "total": int(total),
                            "confidence": confidence, "mode": mode})


@dataclass(frozen=True)
class CertificateResult:
    robust: bool
    margin: float
    binding_relation: int
    per_relation_values: List[float]

    def to_dict(self):
        return {
            "robust": bool(self.robust),
            "margin": float(self.margin),
            "binding_relation": int(self.binding_relation),
            "per_relation_values": [float(v) for v in self.per_relation_values],
        }


def _relation_value(profile, p1, p2, grid):
    vals = dual_to_primal(profile, np.array([1.0 - p1, p2]), grid=grid)
    return float(vals[0] + vals[1])


def certify(bounds, profiles, grid=None, threads=1):
    """Check the certificate condition for every decomposed relation.

    Returns:
      :class:`CertificateResult` with ``margin = min_i [f_i(1-p1) + f_i(p2)] - 1``.
      Separation failures (``p1 <= p2``) give a non-robust result.
    """
    profiles = list(profiles)
    if not profiles:
        raise DomainError("certify needs at least one profile")
    p1, p2 = bounds.p1_lower, bounds.p2_upper

    def one(prof):
        return _relation_value(prof, p1, p2, grid)

    if threads > 1 and len(profiles) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(one, profiles))
    else:
        values = [one(p) for p in profiles]
    return _result(values, bounds)


def _result(values, bounds):
    binding = int(np.argmin(values))
    margin = float(values[binding]) - 1.0
    robust = bool(margin > 0.0 and bounds.separated)
    return CertificateResult(robust, margin, binding, [float(v) for v in values])


def certify_direct(bounds, profiles, grid=None):
    """Grid search on ``max_eps e^{-eps}(p1 - delta) + max_eps e^{-eps}(1 - p2 - delta)``.

    Independent of the duality module apart from the profile evaluators;
    meant as a cross-check of :func:`certify`.
    """
    p1, p2 = bounds.p1_lower, bounds.p2_upper
    values = []
    for prof in profiles:
        eps = prof.evaluation_grid(grid)
        d = prof(eps)
        w = np.exp(-eps)
        a = max(0.0, float(np.max(w * (p1 - d))))
        b = max(0.0, float(np.max(w * (1.0 - p2 - d))))
        values.append(a + b)
    return _result(values, bounds)


def certify_multiclass(class_bounds, predicted, profiles, grid=None):
    """Certificate from per-class ``(lower, upper)`` probability bounds."""
    class_bounds = [(float(lo), float(hi)) for lo, hi in class_bounds]
    if not 0 <= predicted < len(class_bounds):
        raise DomainError("predicted class index out of range")
    lowers = [b[0] for b in class_bounds]
    if lowers[predicted] < max(lowers):
        raise DomainError("the predicted class must have the largest lower bound")
    p1 = lowers[predicted]
    p2 = max((b[1] for i, b in enumerate(class_bounds) if i != predicted), default=0.0)
    return certify(ProbabilityBounds(p1, p2), profiles, grid=grid)


@dataclass
class RadiusSweep:
    """Margins along a list of radii together with the certified radius."""

    radii: List[float]
    results: List[Optional[CertificateResult]]
    radius: Optional[float]


def radius_sweep(bounds, family, radii, scan="linear", early_exit=True, grid=None):
    """Evaluate certificates along ``radii`` (ascending).

    Args:
      family: callable ``radius -> list of PrivacyProfile``.
      scan: ``"linear"`` walks up the radii, ``"binary"`` bisects on the
        index assuming margins do not increase with the radius.
      early_exit: stop a linear scan at the first non-robust radius.

    Raises:
      DomainError: on an empty radius list.
      MonotonicityError: if a margin increases along evaluated radii by
        more than 1e-9, which means the profiles are inconsistent.
    """
    radii = list(radii)
    if not radii:
        raise DomainError("radius list is empty")
    if any(b < a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be ascending")
    results = [None] * len(radii)

    def evaluate(i):
        if results[i] is None:
            results[i] = certify(bounds, family(radii[i]), grid=grid)
        return results[i]

    if scan == "linear":
        for i in range(len(radii)):
            if not evaluate(i).robust and early_exit:
                break
    elif scan == "binary":
        if evaluate(0).robust:
            lo, hi = 0, len(radii)
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if evaluate(mid).robust:
                    lo = mid
                else:
                    hi = mid
    else:
        raise DomainError(f"unknown scan {scan!r}")

    done = [(radii[i], r) for i, r in enumerate(results) if r is not None]
    for (ra, a), (rb, b) in zip(done, done[1:]):
        if b.margin > a.margin + _MONOTONE_TOL:
            raise MonotonicityError(
                f"margin rose from {a.margin:.6g} at radius {ra:g} to {b.margin:.6g} at {rb:g}")
    best = None
    for i, r in enumerate(results):
        if r is None:
            continue
        if r.robust:
            best = radii[i]
        else:
            break
    return RadiusSweep(radii, results, best)


def max_certified_radius(bounds, family, radii, scan="linear", grid=None):
    """Largest radius in ``radii`` that is certified, or ``None``."""
    return radius_sweep(bounds, family, radii, scan=scan, grid=grid).radius


def joint_certify(train_radius, test_radius, spec, bounds, grid=None, discretization=None,
                  threads=1):
    """Certificate against ``train_radius`` record changes plus an L2 test perturbation."""
    from .mechanisms import DatasetChanges, Joint, L2Ball, mechanism_profile

    rel = Joint(DatasetChanges(train_radius), L2Ball(test_radius))
    profiles = mechanism_profile(spec, rel, grid=grid, discretization=discretization,
                                 threads=threads)
    return certify(bounds, profiles, threads=threads)


def gaussian_radius(sigma, p1, p2=None):
    """Closed-form L2 radius for Gaussian smoothing, ``sigma/2 (Phi^-1(p1) - Phi^-1(p2))``."""
    from scipy.stats import norm

    if p2 is None:
        p2 = 1.0 - p1
    return 0.5 * sigma * (norm.ppf(p1) - norm.ppf(p2))


__all__ = [
    "CertificateResult",
    "ProbabilityBounds",
    "RadiusSweep",
    "certify",
    "certify_direct",
    "certify_multiclass",
    "clopper_pearson",
    "gaussian_radius",
    "joint_certify",
    "max_certified_radius",
    "radius_sweep",
]
