"""Mechanism catalog, neighboring relations and their privacy profiles.

Every mechanism here either has a closed-form profile or a dominating pair
of one-dimensional distributions. Profiles for stacked mechanisms are built
by composing discretized privacy loss distributions.

Each mechanism looks at one side of the threat model. Training-time
mechanisms (:class:`SubsampledGaussian`, :class:`DPA`,
:class:`PreprocessAmplified`) see the training-set relation, inference-time
noise (:class:`GaussianMechanism`) sees the test-input relation, and a
mechanism whose side is untouched behaves like a pair of identical
distributions.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

import numpy as np
from scipy.special import ndtr

from . import pld as pldlib
from .distributions import (
    Discrete,
    DiscretizationSpec,
    Gaussian,
    binomial_gaussian_mixture,
    pld_from_pair,
)
from .duality import PrivacyProfile
from .exceptions import DomainError, NoDominatingPairError

_COMPOSE_TRUNCATION = 1e-15


# ---------------------------------------------------------------------------
# Neighboring relations


def _nat(name, value):
    if isinstance(value, bool) or int(value) != value or value < 0:
        raise DomainError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


def _nonneg(name, value):
    value = float(value)
    if not (value >= 0.0 and math.isfinite(value)):
        raise DomainError(f"{name} must be finite and non-negative, got {value!r}")
    return value


@dataclass(frozen=True)
class AddRemove:
    """``r_plus`` insertions and ``r_minus`` deletions of training records."""

    r_plus: int
    r_minus: int

    def __post_init__(self):
        object.__setattr__(self, "r_plus", _nat("r_plus", self.r_plus))
        object.__setattr__(self, "r_minus", _nat("r_minus", self.r_minus))

    @property
    def size(self):
        return self.r_plus + self.r_minus

    def swapped(self):
        return AddRemove(self.r_minus, self.r_plus)


@dataclass(frozen=True)
class DatasetChanges:
    """Up to ``R`` insertions or deletions in total."""

    R: int

    def __post_init__(self):
        object.__setattr__(self, "R", _nat("R", self.R))

    @property
    def size(self):
        return self.R


@dataclass(frozen=True)
class L2Ball:
    """Test inputs within L2 distance ``delta``."""

    delta: float

    def __post_init__(self):
        object.__setattr__(self, "delta", _nonneg("delta", self.delta))


@dataclass(frozen=True)
class PerturbKRecords:
    """``K`` training records each moved by at most ``r`` in L2 norm."""

    K: int
    r: float

    def __post_init__(self):
        object.__setattr__(self, "K", _nat("K", self.K))
        object.__setattr__(self, "r", _nonneg("r", self.r))

    @property
    def size(self):
        return self.K


@dataclass(frozen=True)
class Joint:
    """Simultaneous training-set and test-input perturbation."""

    train: "NeighboringRelation"
    test: "NeighboringRelation"

    def __post_init__(self):
        if isinstance(self.train, (Joint, L2Ball)):
            raise DomainError("the train part of a joint relation must be a training relation")
        if not isinstance(self.test, L2Ball):
            raise DomainError("the test part of a joint relation must be an l2 ball")


NeighboringRelation = Union[AddRemove, DatasetChanges, L2Ball, PerturbKRecords, Joint]
_TRAIN_RELATIONS = (AddRemove, DatasetChanges, PerturbKRecords)


def decompose_relation(rel):
    """Split a relation into pieces whose worst case has a dominating pair.

    ``DatasetChanges(R)`` becomes ``AddRemove(r, R - r)`` for ``r = 0..R``;
    a joint relation decomposes its training part and keeps the test part.
    """
    if isinstance(rel, DatasetChanges):
        return [AddRemove(r, rel.R - r) for r in range(rel.R + 1)]
    if isinstance(rel, Joint):
        return [Joint(part, rel.test) for part in decompose_relation(rel.train)]
    return [rel]


def _train_part(rel):
    if isinstance(rel, Joint):
        return rel.train
    return rel if isinstance(rel, _TRAIN_RELATIONS) else None


def _test_part(rel):
    if isinstance(rel, Joint):
        return rel.test
    return rel if isinstance(rel, L2Ball) else None


def _changes(rel):
    """Number of modified records in a training relation."""
    if rel is None:
        return 0
    if isinstance(rel, (AddRemove, DatasetChanges, PerturbKRecords)):
        return rel.size
    raise DomainError(f"not a training relation: {rel!r}")


# ---------------------------------------------------------------------------
# Mechanisms


def _positive(name, value):
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive, got {value!r}")
    return value


@dataclass(frozen=True)
class GaussianMechanism:
    """Additive ``N(0, sigma^2)`` noise on the test input."""

    sigma: float
    sensitivity: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "sigma", _positive("sigma", self.sigma))
        object.__setattr__(self, "sensitivity", _positive("sensitivity", self.sensitivity))


@dataclass(frozen=True)
class SubsampledGaussian:
    """Poisson-subsampled Gaussian steps with unit clipped sensitivity."""

    gamma: float
    sigma: float
    iterations: int = 1

    def __post_init__(self):
        gamma = float(self.gamma)
        if not 0.0 < gamma <= 1.0:
            raise DomainError(f"gamma must lie in (0, 1], got {self.gamma!r}")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "sigma", _positive("sigma", self.sigma))
        its = _nat("iterations", self.iterations)
        if its < 1:
            raise DomainError("iterations must be at least 1")
        object.__setattr__(self, "iterations", its)


@dataclass(frozen=True)
class DPA:
    """Deep partition aggregation viewed as a uniform draw over ``N`` partitions."""

    N: int

    def __post_init__(self):
        n = _nat("N", self.N)
        if n < 1:
            raise DomainError("N must be at least 1")
        object.__setattr__(self, "N", n)


@dataclass(frozen=True)
class DPACompose:
    """Partition draw followed by an inference-time base mechanism."""

    N: int
    base: "MechanismSpec"

    def __post_init__(self):
        n = _nat("N", self.N)
        if n < 1:
            raise DomainError("N must be at least 1")
        object.__setattr__(self, "N", n)


@dataclass(frozen=True)
class PreprocessAmplified:
    """Gaussian input noise ``N(0, sigma_in^2)`` on records before ``base``."""

    sigma_in: float
    base: "MechanismSpec"

    def __post_init__(self):
        object.__setattr__(self, "sigma_in", _positive("sigma_in", self.sigma_in))


@dataclass(frozen=True)
class RandomizedResponse:
    """Reports a bit truthfully with probability ``p``."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not 0.5 < p < 1.0:
            raise DomainError(f"p must lie in (0.5, 1), got {self.p!r}")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class Composition:
    """Independent mechanisms applied side by side."""

    components: Tuple["MechanismSpec", ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise DomainError("a composition needs at least one component")
        object.__setattr__(self, "components", comps)


MechanismSpec = Union[GaussianMechanism, SubsampledGaussian, DPA, DPACompose,
                      PreprocessAmplified, RandomizedResponse, Composition]


# ---------------------------------------------------------------------------
# JSON


def parse_relation(obj):
    """Relation from its JSON object form."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise DomainError(f"relation must be an object with a 'type' field: {obj!r}")
    kind = obj["type"]
    try:
        if kind == "add_remove":
            return AddRemove(obj["r_plus"], obj["r_minus"])
        if kind == "dataset_changes":
            return DatasetChanges(obj["R"])
        if kind == "l2_ball":
            return L2Ball(obj["delta"])
        if kind == "perturb_k_records":
            return PerturbKRecords(obj["K"], obj["r"])
        if kind == "joint":
            return Joint(parse_relation(obj["train"]), parse_relation(obj["test"]))
    except KeyError as exc:
        raise DomainError(f"relation {kind!r} is missing field {exc}") from None
    raise DomainError(f"unknown relation type {kind!r}")


def relation_to_dict(rel):
    if isinstance(rel, AddRemove):
        return {"type": "add_remove", "r_plus": rel.r_plus, "r_minus": rel.r_minus}
    if isinstance(rel, DatasetChanges):
        return {"type": "dataset_changes", "R": rel.R}
    if isinstance(rel, L2Ball):
        return {"type": "l2_ball", "delta": rel.delta}
    if isinstance(rel, PerturbKRecords):
        return {"type": "perturb_k_records", "K": rel.K, "r": rel.r}
    if isinstance(rel, Joint):
        return {"type": "joint", "train": relation_to_dict(rel.train),
                "test": relation_to_dict(rel.test)}
    raise DomainError(f"not a relation: {rel!r}")


def parse_mechanism(obj):
    """Mechanism from its JSON object form."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise DomainError(f"mechanism must be an object with a 'type' field: {obj!r}")
    kind = obj["type"]
    try:
        if kind == "gaussian":
            return GaussianMechanism(obj["sigma"], obj.get("sensitivity", 1.0))
        if kind == "subsampled_gaussian":
            return SubsampledGaussian(obj["gamma"], obj["sigma"], obj.get("iterations", 1))
        if kind == "dpa":
            return DPA(obj["N"])
        if kind == "dpa_compose":
            return DPACompose(obj["N"], parse_mechanism(obj["base"]))
        if kind == "preprocess_amplified":
            return PreprocessAmplified(obj["sigma_in"], parse_mechanism(obj["base"]))
        if kind == "randomized_response":
            return RandomizedResponse(obj["p"])
        if kind == "composition":
            return Composition(tuple(parse_mechanism(c) for c in obj["components"]))
    except KeyError as exc:
        raise DomainError(f"mechanism {kind!r} is missing field {exc}") from None
    raise DomainError(f"unknown mechanism type {kind!r}")


def mechanism_to_dict(spec):
    if isinstance(spec, GaussianMechanism):
        return {"type": "gaussian", "sigma": spec.sigma, "sensitivity": spec.sensitivity}
    if isinstance(spec, SubsampledGaussian):
        return {"type": "subsampled_gaussian", "gamma": spec.gamma, "sigma": spec.sigma,
                "iterations": spec.iterations}
    if isinstance(spec, DPA):
        return {"type": "dpa", "N": spec.N}
    if isinstance(spec, DPACompose):
        return {"type": "dpa_compose", "N": spec.N, "base": mechanism_to_dict(spec.base)}
    if isinstance(spec, PreprocessAmplified):
        return {"type": "preprocess_amplified", "sigma_in": spec.sigma_in,
                "base": mechanism_to_dict(spec.base)}
    if isinstance(spec, RandomizedResponse):
        return {"type": "randomized_response", "p": spec.p}
    if isinstance(spec, Composition):
        return {"type": "composition", "components": [mechanism_to_dict(c) for c in spec.components]}
    raise DomainError(f"not a mechanism: {spec!r}")


# ---------------------------------------------------------------------------
# Closed forms


def _check_dpa(N, R):
    if N < 1:
        raise DomainError("N must be at least 1")
    if R < 0:
        raise DomainError("R must be non-negative")
    if R > N:
        raise DomainError(f"R={R} exceeds the number of partitions N={N}")


def _is_exact(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def dpa_profile(N, R, epsilon):
    """Profile of DPA with ``N`` partitions under ``R`` changed records.

    Returns ``R/N`` for ``eps >= 0`` and ``1 - (1 - R/N) e^eps`` otherwise.
    With an exact (int or Fraction) ``eps >= 0`` the result is a Fraction.
    """
    _check_dpa(N, R)
    if _is_exact(epsilon) and epsilon >= 0:
        return Fraction(R, N)
    eps = np.asarray(epsilon, dtype=float)
    ratio = R / N
    out = np.where(eps >= 0.0, ratio, 1.0 - (1.0 - ratio) * np.exp(np.minimum(eps, 0.0)))
    return float(out) if out.ndim == 0 else out


def dpa_tradeoff(N, R, alpha):
    """``max(1 - R/N - alpha, 0)``; exact when ``alpha`` is an int or Fraction."""
    _check_dpa(N, R)
    if _is_exact(alpha):
        if not 0 <= alpha <= 1:
            raise DomainError("alpha must lie in [0, 1]")
        return max(1 - Fraction(R, N) - alpha, Fraction(0))
    a = np.asarray(alpha, dtype=float)
    if np.any((a < 0.0) | (a > 1.0)):
        raise DomainError("alpha must lie in [0, 1]")
    out = np.maximum(1.0 - R / N - a, 0.0)
    return float(out) if out.ndim == 0 else out


def dpa_compose_profile(N, R, base_delta):
    """``R/N + (1 - R/N) * base_delta``."""
    _check_dpa(N, R)
    if _is_exact(base_delta):
        return Fraction(R, N) + (1 - Fraction(R, N)) * base_delta
    b = np.asarray(base_delta, dtype=float)
    out = R / N + (1.0 - R / N) * b
    return float(out) if out.ndim == 0 else out


def dpa_compose_tradeoff(N, R, base_curve, alpha):
    """``(1 - R/N) f_b(alpha / (1 - R/N))`` below ``1 - R/N``, zero above."""
    _check_dpa(N, R)
    a = np.asarray(alpha, dtype=float)
    keep = 1.0 - R / N
    if keep <= 0.0:
        out = np.zeros_like(a)
    else:
        inside = a <= keep
        scaled = np.where(inside, a / keep, 1.0)
        out = np.where(inside, keep * np.asarray(base_curve(np.minimum(scaled, 1.0))), 0.0)
    return float(out) if out.ndim == 0 else out


def preprocess_weight(sigma_in, r):
    """Total variation between ``N(0, sigma_in^2)`` and ``N(r, sigma_in^2)``."""
    sigma_in = _positive("sigma_in", sigma_in)
    r = _nonneg("r", r)
    return float(2.0 * ndtr(r / (2.0 * sigma_in)) - 1.0)


def preprocess_amplified_profile(sigma_in, r, base_delta_at_eps, epsilon):
    """``min(1, w * base + (1 - w) * max(0, 1 - e^eps))`` with ``w`` the TV distance."""
    w = preprocess_weight(sigma_in, r)
    eps = np.asarray(epsilon, dtype=float)
    floor = np.maximum(-np.expm1(np.minimum(eps, 700.0)), 0.0)
    out = np.minimum(1.0, w * np.asarray(base_delta_at_eps, dtype=float) + (1.0 - w) * floor)
    return float(out) if out.ndim == 0 else out


def randomized_response_pair(p):
    """Discrete pair of randomized response on one bit."""
    p = RandomizedResponse(p).p
    return Discrete([(1.0, p), (0.0, 1.0 - p)]), Discrete([(1.0, 1.0 - p), (0.0, p)])


# ---------------------------------------------------------------------------
# Dominating pairs


def _identical_pair(sigma=1.0):
    g = Gaussian(0.0, sigma)
    return g, g


def subsampled_gaussian_pair(gamma, sigma, r_plus, r_minus):
    """Mixture pair for one subsampled Gaussian step under ``AddRemove``."""
    p = binomial_gaussian_mixture(r_minus, gamma, sigma, sign=1.0)
    q = binomial_gaussian_mixture(r_plus, gamma, sigma, sign=-1.0)
    return p, q


def dominating_pair(spec, rel):
    """Dominating pair of one-dimensional distributions for ``(spec, rel)``.

    Supported: a single subsampled Gaussian step under ``AddRemove``, the
    Gaussian mechanism under an ``L2Ball``, randomized response under any
    relation, and any mechanism whose side of the threat model is
    untouched (identical pair).
    """
    if isinstance(spec, GaussianMechanism):
        test = _test_part(rel)
        if test is None:
            return _identical_pair(spec.sigma)
        return Gaussian(0.0, spec.sigma), Gaussian(test.delta * spec.sensitivity, spec.sigma)
    if isinstance(spec, SubsampledGaussian):
        train = _train_part(rel)
        if train is None:
            return _identical_pair(spec.sigma)
        if isinstance(train, AddRemove) and spec.iterations == 1:
            return subsampled_gaussian_pair(spec.gamma, spec.sigma, train.r_plus, train.r_minus)
        if isinstance(train, AddRemove):
            raise NoDominatingPairError(
                f"{spec.iterations} composed steps have no closed-form pair; "
                "use mechanism_profile")
        raise NoDominatingPairError(
            f"{type(train).__name__} must be decomposed first; use mechanism_profile")
    if isinstance(spec, RandomizedResponse):
        # Any non-trivial change may flip the reported bit.
        test = _test_part(rel)
        if _changes(_train_part(rel)) == 0 and (test is None or test.delta == 0.0):
            p, _ = randomized_response_pair(spec.p)
            return p, p
        return randomized_response_pair(spec.p)
    raise NoDominatingPairError(
        f"{type(spec).__name__} under {type(rel).__name__} has no dominating pair here; "
        "use mechanism_profile")


# ---------------------------------------------------------------------------
# Profiles


def _leaf_relations(spec, rel):
    for leaf in decompose_relation(rel):
        if isinstance(_train_part(leaf), DatasetChanges):
            raise DomainError("relation did not decompose")
        yield leaf


def _dpa_pld(N, R, w):
    _check_dpa(N, R)
    if R == N:
        return pldlib.DiscretePLD.from_indexed(w, 0, np.zeros(0), 1.0)
    return pldlib.DiscretePLD.from_indexed(w, 0, np.array([1.0 - R / N]), R / N)


def _mix_with_zero(pld, weight):
    """``weight * pld + (1 - weight) * (point mass at 0)``."""
    w = pld.bucket_width
    if weight >= 1.0:
        return pld
    lo = min(pld.offset, 0)
    hi = max(pld.offset + len(pld) - 1, 0)
    dense = np.zeros(hi - lo + 1)
    dense[pld.offset - lo: pld.offset - lo + len(pld)] += weight * np.asarray(pld.masses)
    dense[-lo] += 1.0 - weight
    return pldlib.DiscretePLD.from_indexed(w, lo, dense, weight * pld.infinity_mass)


def _perturb_base_relation(rel):
    """``PerturbKRecords(K, r)`` viewed as ``K`` insertions and ``K`` deletions."""
    train = _train_part(rel)
    base = AddRemove(train.K, train.K)
    if isinstance(rel, Joint):
        return Joint(base, rel.test)
    return base


@functools.lru_cache(maxsize=512)
def mechanism_pld(spec, rel, discretization=None):
    """Dominating PLD for a mechanism under a decomposed relation."""
    disc = discretization or DiscretizationSpec()
    w = disc.bucket_width
    if isinstance(spec, Composition):
        parts = [mechanism_pld(c, rel, disc) for c in spec.components]
        out = parts[0]
        for nxt in parts[1:]:
            out = pldlib.compose(out, nxt, _COMPOSE_TRUNCATION)
        return out
    if isinstance(spec, DPA):
        return _dpa_pld(spec.N, _changes(_train_part(rel)), w)
    if isinstance(spec, DPACompose):
        R = _changes(_train_part(rel))
        test = _test_part(rel)
        base = mechanism_pld(spec.base, test, disc) if test is not None else pldlib.DiscretePLD.identity(w)
        return pldlib.compose(_dpa_pld(spec.N, R, w), base)
    if isinstance(spec, PreprocessAmplified):
        train = _train_part(rel)
        if isinstance(train, PerturbKRecords):
            weight = preprocess_weight(spec.sigma_in, train.r)
            base = mechanism_pld(spec.base, _perturb_base_relation(rel), disc)
            return _mix_with_zero(base, weight)
        return mechanism_pld(spec.base, rel, disc)
    if isinstance(spec, SubsampledGaussian):
        train = _train_part(rel)
        if train is None or _changes(train) == 0:
            return pldlib.DiscretePLD.identity(w)
        if isinstance(train, PerturbKRecords):
            train = AddRemove(train.K, train.K)
        step_pair = subsampled_gaussian_pair(spec.gamma, spec.sigma, train.r_plus, train.r_minus)
        step = pld_from_pair(*step_pair, disc)
        if spec.iterations == 1:
            return step
        return pldlib.self_compose(step, spec.iterations, _COMPOSE_TRUNCATION)
    if isinstance(spec, GaussianMechanism):
        test = _test_part(rel)
        if test is None or test.delta == 0.0:
            return pldlib.DiscretePLD.identity(w)
        return pld_from_pair(*dominating_pair(spec, rel), disc)
    if isinstance(spec, RandomizedResponse):
        return pld_from_pair(*dominating_pair(spec, rel), disc)
    raise NoDominatingPairError(f"unsupported mechanism {spec!r}")


def _closed_dpa(N, R):
    _check_dpa(N, R)
    ratio = R / N
    return PrivacyProfile(
        lambda e: dpa_profile(N, R, e),
        lambda e: (1.0 - ratio) * np.minimum(1.0, np.exp(np.minimum(e, 700.0))),
        label=f"dpa(N={N}, R={R})", breakpoints=[0.0])


def _wrap_dpa_compose(N, R, base):
    ratio = R / N
    _check_dpa(N, R)
    return PrivacyProfile(
        lambda e: dpa_compose_profile(N, R, base(e)),
        lambda e: (1.0 - ratio) * base.complement(e),
        label=f"dpa_compose(N={N}, R={R}, {base.label})",
        breakpoints=np.concatenate([base.breakpoints, [0.0]]), domain=base.domain)


def _wrap_preprocess(sigma_in, r, base):
    w = preprocess_weight(sigma_in, r)
    return PrivacyProfile(
        lambda e: preprocess_amplified_profile(sigma_in, r, base(e), e),
        lambda e: w * base.complement(e) + (1.0 - w) * np.minimum(1.0, np.exp(np.minimum(e, 700.0))),
        label=f"preprocess(w={w:.6g}, {base.label})",
        breakpoints=np.concatenate([base.breakpoints, [0.0]]), domain=base.domain)


@functools.lru_cache(maxsize=512)
def _leaf_profile(spec, rel, discretization):
    disc = discretization
    if isinstance(spec, GaussianMechanism):
        test = _test_part(rel)
        mu = 0.0 if test is None else test.delta * spec.sensitivity / spec.sigma
        return PrivacyProfile.gaussian(mu)
    if isinstance(spec, DPA):
        return _closed_dpa(spec.N, _changes(_train_part(rel)))
    if isinstance(spec, DPACompose):
        test = _test_part(rel)
        base = _leaf_profile(spec.base, test, disc) if test is not None else PrivacyProfile.identical()
        return _wrap_dpa_compose(spec.N, _changes(_train_part(rel)), base)
    if isinstance(spec, PreprocessAmplified):
        train = _train_part(rel)
        if isinstance(train, PerturbKRecords):
            base = _leaf_profile(spec.base, _perturb_base_relation(rel), disc)
            return _wrap_preprocess(spec.sigma_in, train.r, base)
        return _leaf_profile(spec.base, rel, disc)
    if isinstance(spec, SubsampledGaussian):
        train = _train_part(rel)
        if train is None or _changes(train) == 0:
            return PrivacyProfile.identical()
        if spec.iterations == 1 and isinstance(train, AddRemove):
            p, q = dominating_pair(spec, rel)
            return PrivacyProfile.from_pair(
                p, q, label=f"subsampled_gaussian(r+={train.r_plus}, r-={train.r_minus})")
    if isinstance(spec, RandomizedResponse):
        return PrivacyProfile.from_pair(*dominating_pair(spec, rel), label="randomized_response")
    if isinstance(spec, Composition) and len(spec.components) == 1:
        return _leaf_profile(spec.components[0], rel, disc)
    pld = mechanism_pld(spec, rel, disc)
    return PrivacyProfile.from_pld(pld, label=f"pld[{type(spec).__name__}]")


def mechanism_profile(spec, rel, grid=None, discretization=None, threads=1):
    """One privacy profile per decomposed relation.

    Args:
      spec: mechanism description.
      rel: threat model; ``DatasetChanges`` is decomposed into add/remove
        pieces.
      grid: optional epsilon grid attached to the returned profiles.
      discretization: PLD settings for mechanisms without a closed form.
      threads: worker threads over decomposed relations.

    Returns:
      List of :class:`PrivacyProfile`, aligned with ``decompose_relation(rel)``.
    """
    disc = discretization or DiscretizationSpec()
    leaves = list(_leaf_relations(spec, rel))

    def build(leaf):
        prof = _leaf_profile(spec, leaf, disc)
        return prof.with_grid(grid) if grid is not None else prof

    if threads > 1 and len(leaves) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(build, leaves))
    return [build(leaf) for leaf in leaves]


def max_profile(spec, rel, grid=None, discretization=None):
    """Single profile bounding all decomposed relations at once."""
    profiles = mechanism_profile(spec, rel, grid, discretization)
    return PrivacyProfile.maximum(profiles)


__all__ = [
    "AddRemove", "DatasetChanges", "L2Ball", "PerturbKRecords", "Joint",
    "GaussianMechanism", "SubsampledGaussian", "DPA", "DPACompose",
    "PreprocessAmplified", "RandomizedResponse", "Composition",
    "decompose_relation", "dominating_pair", "dpa_profile", "dpa_tradeoff",
    "dpa_compose_profile", "dpa_compose_tradeoff", "preprocess_amplified_profile",
    "preprocess_weight", "randomized_response_pair", "subsampled_gaussian_pair",
    "mechanism_pld", "mechanism_profile", "max_profile",
    "parse_mechanism", "parse_relation", "mechanism_to_dict", "relation_to_dict",
]
