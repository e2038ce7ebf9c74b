"""Privacy profiles, tradeoff curves and the conversions between them.

A privacy profile ``delta(eps)`` and a tradeoff curve ``f(alpha)`` carry the
same information about a pair of distributions:

    f(alpha) = sup_eps e^{-eps} (1 - delta(eps) - alpha)
    delta(eps) = sup_alpha (1 - alpha - e^eps f(alpha))

The second line is ``1 + (f^{-1})^*(-e^eps)`` written out; for a
piecewise-linear curve the supremum is attained at a knot, so it is a finite
maximum. The first line is evaluated as a maximum over an epsilon grid,
which can only under-estimate ``f`` and therefore errs on the safe side for
certification.

Profiles also expose the complement ``1 - delta(eps)``. Several profiles
know it in closed form, and it keeps ``e^{-eps}(1 - delta)`` accurate for
very negative ``eps`` where ``1 - delta`` is tiny.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import log_ndtr, ndtr

from .exceptions import DomainError, ExtrapolationError

_EPS_LIMIT = 700.0
_CHUNK = 2_000_000
# Absolute error allowed for ``1 - delta`` when it is formed by subtraction.
_ROUNDING = 4.0 * 2.0 ** -53


def default_epsilon_grid(points=4001, span=20.0, smallest=1e-6):
    """Symmetric grid on ``[-span, span]``, geometric in ``|eps|``, through 0."""
    if points < 3:
        raise DomainError("an epsilon grid needs at least 3 points")
    half = (points - 1) // 2
    pos = np.geomspace(smallest, span, half)
    return np.concatenate([-pos[::-1], [0.0], pos])


def refine_grid(grid):
    """Insert midpoints, roughly doubling grid density."""
    grid = np.unique(np.asarray(grid, dtype=float))
    if grid.size < 2:
        return grid
    return np.unique(np.concatenate([grid, 0.5 * (grid[1:] + grid[:-1])]))


def _as_array(eps):
    arr = np.asarray(eps, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("epsilon must not be NaN")
    return arr


class PrivacyProfile:
    """Lazily evaluated map ``eps -> delta(eps)``.

    Args:
      delta: vectorized callable returning ``delta`` values.
      complement: optional vectorized callable returning ``1 - delta``;
        supplied when it can be computed without cancellation.
      label: human-readable provenance.
      breakpoints: epsilons where the profile is not smooth; conversions
        always include them in their grids.
      domain: closed-open interval outside which the profile is unknown.
      grid: default evaluation grid.
      symmetric: True when the underlying relation is symmetric, so the
        profile equals its own opposite.
    """

    def __init__(self, delta=None, complement=None, label="profile", breakpoints=(),
                 domain=(-math.inf, math.inf), grid=None, symmetric=False):
        if delta is None and complement is None:
            raise DomainError("a profile needs a delta or complement evaluator")
        self._delta = delta
        self._complement = complement
        # Subtracting from 1 loses everything below the rounding level, which
        # e^{-eps} would blow up for very negative eps.
        self.complement_error = 0.0 if complement is not None else _ROUNDING
        self.label = label
        self.breakpoints = np.unique(np.asarray(breakpoints, dtype=float))
        self.domain = (float(domain[0]), float(domain[1]))
        self.grid = default_epsilon_grid() if grid is None else np.unique(np.asarray(grid, dtype=float))
        self.symmetric = bool(symmetric)

    def __repr__(self):
        return f"PrivacyProfile({self.label!r})"

    def _check_domain(self, eps):
        lo, hi = self.domain
        if np.any(eps < lo - 1e-12) or np.any(eps > hi + 1e-12):
            raise ExtrapolationError(
                f"profile {self.label!r} is only known on [{lo:g}, {hi:g}]")

    def __call__(self, epsilon):
        eps = _as_array(epsilon)
        self._check_domain(eps)
        if self._delta is not None:
            out = np.asarray(self._delta(eps), dtype=float)
        else:
            out = 1.0 - np.asarray(self._complement(eps), dtype=float)
        floor = np.maximum(-np.expm1(np.minimum(eps, _EPS_LIMIT)), 0.0)
        out = np.clip(np.maximum(out, floor), 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    def complement(self, epsilon):
        """``1 - delta(eps)``, clipped to ``[0, min(1, e^eps)]``."""
        eps = _as_array(epsilon)
        self._check_domain(eps)
        if self._complement is not None:
            out = np.asarray(self._complement(eps), dtype=float)
        else:
            out = 1.0 - np.asarray(self._delta(eps), dtype=float)
        cap = np.exp(np.minimum(eps, 0.0))
        out = np.clip(np.minimum(out, cap), 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    def evaluation_grid(self, grid=None):
        base = self.grid if grid is None else np.asarray(grid, dtype=float)
        pts = np.concatenate([base, self.breakpoints])
        lo, hi = self.domain
        pts = pts[(pts >= lo) & (pts <= hi) & np.isfinite(pts)]
        return np.unique(pts)

    def sample(self, grid=None):
        """``(eps, delta)`` arrays on the evaluation grid."""
        eps = self.evaluation_grid(grid)
        return eps, self(eps)

    # -- constructors ------------------------------------------------------

    @classmethod
    def gaussian(cls, mu, label=None):
        """Profile of ``N(mu, 1)`` against ``N(0, 1)``."""
        from .distributions import gaussian_hs_divergence

        mu = abs(float(mu))

        def complement(eps):
            if mu == 0.0:
                return np.minimum(1.0, np.exp(np.minimum(eps, _EPS_LIMIT)))
            a = -mu / 2.0 + eps / mu
            b = -mu / 2.0 - eps / mu
            return ndtr(a) + np.exp(np.minimum(eps + log_ndtr(b), _EPS_LIMIT))

        return cls(lambda e: gaussian_hs_divergence(mu, e), complement,
                   label=label or f"gaussian(mu={mu:g})", symmetric=True)

    @classmethod
    def from_pair(cls, p, q, label=None, grid=None):
        """Exact profile of a distribution pair."""
        from . import distributions as dist

        kind = dist._check_pair(p, q)
        if kind == "discrete":
            pm, qm = dist._discrete_table(p, q)

            def complement(eps):
                scale = np.exp(np.minimum(eps, _EPS_LIMIT))[..., None]
                return np.sum(np.minimum(pm, scale * qm), axis=-1)

            with np.errstate(divide="ignore"):
                ratios = np.log(pm[(pm > 0) & (qm > 0)]) - np.log(qm[(pm > 0) & (qm > 0)])
            return cls(lambda e: dist.hs_divergence(p, q, e), complement,
                       label=label or "discrete pair", breakpoints=ratios, grid=grid)
        if dist._equal_sd_gaussians(p, q):
            return cls.gaussian((p.mean - q.mean) / p.stddev, label=label)
        pair = dist._continuous_pair(p, q)

        def complement(eps):
            flat = np.ravel(eps)
            pm_, qm_ = pair.region_masses(flat)
            out = (1.0 - pm_) + np.exp(np.minimum(flat, _EPS_LIMIT)) * qm_
            return out.reshape(np.shape(eps))

        def delta(eps):
            return dist.hs_divergence(p, q, eps, method="regions")

        return cls(delta, complement, label=label or "distribution pair", grid=grid)

    @classmethod
    def from_pld(cls, pld, label=None, grid=None):
        """Profile of a discretized privacy loss distribution."""
        from .pld import profile_from_pld

        m = np.asarray(pld.masses)
        losses = pld.losses
        head = np.concatenate([[0.0], np.cumsum(m)])
        with np.errstate(divide="ignore"):
            log_terms = np.log(m) - losses
        if m.size:
            tail_log = np.concatenate([np.logaddexp.accumulate(log_terms[::-1])[::-1], [-np.inf]])
        else:
            tail_log = np.array([-np.inf])

        def complement(eps):
            flat = np.ravel(eps)
            idx = np.searchsorted(losses, flat, side="right")
            out = head[idx] + np.exp(np.minimum(flat + tail_log[idx], _EPS_LIMIT))
            return out.reshape(np.shape(eps))

        return cls(lambda e: profile_from_pld(pld, e), complement,
                   label=label or repr(pld), grid=grid)

    @classmethod
    def from_curve(cls, curve, label=None, grid=None):
        """Profile dual to a piecewise-linear tradeoff curve (exact)."""
        a = np.asarray(curve.alphas)
        v = np.asarray(curve.values)

        def complement(eps):
            scale = np.exp(np.minimum(np.asarray(eps), _EPS_LIMIT))[..., None]
            # 1 - delta = min over knots of alpha_k + e^eps v_k, and e^eps from the (1, 0) knot.
            inner = np.min(a + scale * v, axis=-1)
            return np.minimum(inner, scale[..., 0])

        return cls(lambda e: primal_to_dual(curve, e), complement,
                   label=label or "tradeoff curve", breakpoints=curve.breakpoints(), grid=grid)

    @classmethod
    def from_samples(cls, epsilons, deltas, label=None):
        """Step-function upper bound from tabulated values of a valid profile.

        Between samples the value at the left sample is used, which bounds a
        non-increasing profile from above. Queries left of the first sample
        raise :class:`ExtrapolationError`.
        """
        eps = np.asarray(epsilons, dtype=float)
        dl = np.asarray(deltas, dtype=float)
        if eps.ndim != 1 or eps.size == 0 or eps.shape != dl.shape:
            raise DomainError("need matching non-empty 1-d sample arrays")
        order = np.argsort(eps)
        eps, dl = eps[order], dl[order]
        if np.any(np.diff(eps) <= 0):
            raise DomainError("sample epsilons must be distinct")
        if np.any(np.diff(dl) > 1e-12):
            raise DomainError("sampled deltas must be non-increasing")

        def delta(e):
            idx = np.searchsorted(eps, e, side="right") - 1
            return dl[np.clip(idx, 0, None)]

        return cls(delta, None, label=label or "sampled profile", breakpoints=eps,
                   domain=(eps[0], math.inf), grid=eps)

    @classmethod
    def identical(cls):
        """Profile of two identical distributions, ``max(0, 1 - e^eps)``."""
        return cls(lambda e: np.maximum(-np.expm1(np.minimum(e, _EPS_LIMIT)), 0.0),
                   lambda e: np.minimum(1.0, np.exp(np.minimum(e, _EPS_LIMIT))),
                   label="identical", symmetric=True)

    @classmethod
    def maximum(cls, profiles, label=None):
        """Pointwise maximum of several profiles."""
        profiles = list(profiles)
        if not profiles:
            raise DomainError("need at least one profile")
        if len(profiles) == 1:
            return profiles[0]
        lo = max(p.domain[0] for p in profiles)
        hi = min(p.domain[1] for p in profiles)
        return cls(lambda e: np.max([p(e) for p in profiles], axis=0),
                   lambda e: np.min([p.complement(e) for p in profiles], axis=0),
                   label=label or "max(" + ", ".join(p.label for p in profiles) + ")",
                   breakpoints=np.concatenate([p.breakpoints for p in profiles]),
                   domain=(lo, hi), grid=profiles[0].grid,
                   symmetric=all(p.symmetric for p in profiles))

    def opposite(self):
        """Profile of the relation with the two inputs swapped."""
        if self.symmetric:
            return self
        base = self

        def complement(eps):
            e = np.asarray(eps)
            return np.exp(np.minimum(e, _EPS_LIMIT)) * base.complement(-e)

        return PrivacyProfile(None, complement, label=f"opposite({self.label})",
                              breakpoints=-self.breakpoints,
                              domain=(-self.domain[1], -self.domain[0]),
                              grid=-self.grid[::-1])

    def symmetrized(self):
        """Pointwise maximum with the opposite profile."""
        if self.symmetric:
            return self
        out = PrivacyProfile.maximum([self, self.opposite()], label=f"sym({self.label})")
        out.symmetric = True
        return out

    def with_grid(self, grid):
        out = PrivacyProfile(self._delta, self._complement, self.label, self.breakpoints,
                             self.domain, grid, self.symmetric)
        return out


# ---------------------------------------------------------------------------
# Tradeoff curves


@dataclass(frozen=True, eq=False)
class TradeoffCurve:
    """Convex, non-increasing piecewise-linear tradeoff curve on ``[0, 1]``."""

    alphas: np.ndarray
    values: np.ndarray
    tolerance: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        a = np.array(self.alphas, dtype=float)
        v = np.array(self.values, dtype=float)
        tol = self.tolerance
        if a.ndim != 1 or a.shape != v.shape or a.size < 2:
            raise DomainError("a tradeoff curve needs at least two matching knots")
        if a[0] != 0.0 or a[-1] != 1.0:
            raise DomainError("knot alphas must start at 0 and end at 1")
        if np.any(np.diff(a) <= 0.0):
            raise DomainError("knot alphas must be strictly increasing")
        if np.any(v < -tol) or np.any(v > 1.0 + tol):
            raise DomainError("tradeoff values must lie in [0, 1]")
        if np.any(np.diff(v) > tol):
            raise DomainError("tradeoff values must be non-increasing")
        if np.any(v > 1.0 - a + tol):
            raise DomainError("tradeoff values must satisfy f(alpha) <= 1 - alpha")
        if a.size > 2:
            slopes = np.diff(v) / np.diff(a)
            if np.any(np.diff(slopes) * np.diff(a)[1:] < -tol):
                raise DomainError("tradeoff curve must be convex")
        v = np.clip(v, 0.0, 1.0 - a)
        a.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "values", v)

    @property
    def knots(self):
        return list(zip(self.alphas.tolist(), self.values.tolist()))

    def __call__(self, alpha):
        out = np.interp(alpha, self.alphas, self.values)
        return float(out) if np.ndim(out) == 0 else out

    def breakpoints(self):
        """Epsilons ``-log(-slope)`` at which the dual profile changes knot."""
        slopes = np.diff(self.values) / np.diff(self.alphas)
        neg = slopes[slopes < 0.0]
        return np.unique(-np.log(-neg))

    def to_json(self):
        return json.dumps({"knots": [[a, v] for a, v in self.knots]})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text) if isinstance(text, str) else text
        knots = np.asarray(data["knots"], dtype=float)
        return cls(knots[:, 0], knots[:, 1])

    @classmethod
    def identity(cls):
        """``f(alpha) = 1 - alpha``, perfect indistinguishability."""
        return cls(np.array([0.0, 1.0]), np.array([1.0, 0.0]))

    @classmethod
    def from_discrete_pair(cls, p, q):
        from .distributions import tradeoff_curve_knots

        knots = tradeoff_curve_knots(p, q)
        return cls(np.array([k[0] for k in knots]), np.array([k[1] for k in knots]))

    @classmethod
    def from_profile(cls, profile, alphas=None, grid=None):
        """Sample ``dual_to_primal`` on ``alphas``; the result is a valid curve."""
        if alphas is None:
            alphas = np.linspace(0.0, 1.0, 1001)
        alphas = np.unique(np.concatenate([[0.0, 1.0], np.asarray(alphas, dtype=float)]))
        values = dual_to_primal(profile, alphas, grid=grid)
        values = np.minimum.accumulate(values)
        return cls(alphas, values, tolerance=1e-9)


# ---------------------------------------------------------------------------
# Conversions


def _extend(grid, side):
    lo, hi = grid[0], grid[-1]
    if side < 0:
        new_lo = max(-_EPS_LIMIT, lo - max(20.0, abs(lo)))
        return np.linspace(new_lo, lo, 401)[:-1]
    new_hi = min(_EPS_LIMIT, hi + max(20.0, abs(hi)))
    return np.linspace(hi, new_hi, 401)[1:]


def dual_to_primal(profile, alpha, grid=None, refine=True):
    """Tradeoff value ``f(alpha)`` from a privacy profile.

    Computes ``max_eps e^{-eps} (1 - delta(eps) - alpha)`` over the profile's
    evaluation grid (plus its breakpoints), extending the grid outward while
    the maximum sits on an end point. Because a grid maximum never exceeds
    the supremum, the result is a lower bound on the true curve.

    Args:
      profile: a :class:`PrivacyProfile`.
      alpha: scalar or array in ``[0, 1]``.
      grid: optional epsilon grid overriding the profile's default.
      refine: zoom in around each grid maximizer; every extra point is a
        genuine evaluation, so the result stays a lower bound.

    Returns:
      Values clamped to ``[0, 1 - alpha]``.
    """
    alphas = np.asarray(alpha, dtype=float)
    if np.any((alphas < 0.0) | (alphas > 1.0)):
        raise DomainError("alpha must lie in [0, 1]")
    eps = profile.evaluation_grid(grid)
    if eps.size == 0:
        raise DomainError("empty epsilon grid")
    flat = alphas.ravel()
    slack = profile.complement_error
    comp = profile.complement(eps) - slack
    best = np.full(flat.shape, -np.inf)
    lo_dom, hi_dom = profile.domain
    while True:
        scale = np.exp(-eps)
        arg = _chunked_argmax(scale * comp, scale, flat)
        vals = scale[arg] * (comp[arg] - flat)
        best = np.maximum(best, vals)
        live = vals > 0.0
        if eps.size > 1:
            # Only extend where the objective still rises toward the end point.
            inner_l = scale[1] * (comp[1] - flat)
            inner_r = scale[-2] * (comp[-2] - flat)
        else:
            inner_l = inner_r = np.full(flat.shape, -np.inf)
        rising_l = live & (arg == 0) & (vals > inner_l)
        rising_r = live & (arg == eps.size - 1) & (vals > inner_r)
        grow_left = np.any(rising_l) and eps[0] > max(-_EPS_LIMIT, lo_dom)
        grow_right = np.any(rising_r) and eps[-1] < min(_EPS_LIMIT, hi_dom)
        if not (grow_left or grow_right):
            break
        parts = [eps]
        if grow_left:
            ext = _extend(eps, -1)
            parts.insert(0, ext[ext >= lo_dom])
        if grow_right:
            ext = _extend(eps, 1)
            parts.append(ext[ext <= hi_dom])
        eps = np.unique(np.concatenate(parts))
        comp = profile.complement(eps) - slack
    if refine and eps.size > 2:
        best = np.maximum(best, _zoom(profile, eps, arg, flat))
    out = np.clip(best, 0.0, 1.0 - flat)
    out = out.reshape(alphas.shape)
    return float(out) if out.ndim == 0 else out


def _dual_objective(profile, pts, alphas):
    comp = profile.complement(pts.ravel()).reshape(pts.shape) - profile.complement_error
    return np.exp(-pts) * (comp - alphas[:, None])


def _zoom(profile, eps, arg, alphas, points=17, rounds=2, objective=_dual_objective):
    """Maximize the dual objective on successively finer local grids."""
    lo = eps[np.maximum(arg - 1, 0)]
    hi = eps[np.minimum(arg + 1, eps.size - 1)]
    best = np.full(alphas.shape, -np.inf)
    for _ in range(rounds):
        t = np.linspace(0.0, 1.0, points)
        pts = lo[:, None] + (hi - lo)[:, None] * t[None, :]
        obj = objective(profile, pts, alphas)
        k = np.argmax(obj, axis=1)
        rows = np.arange(alphas.size)
        best = np.maximum(best, obj[rows, k])
        step = (hi - lo) / (points - 1)
        centre = pts[rows, k]
        lo = np.maximum(centre - step, eps[0])
        hi = np.minimum(centre + step, eps[-1])
    return best


def _hockey_objective(profile, pts, alphas):
    comp = profile.complement(pts.ravel()).reshape(pts.shape) - profile.complement_error
    return comp - np.exp(np.minimum(pts, _EPS_LIMIT)) * alphas[:, None]


def _chunked_argmax(a, b, alphas):
    """Index of ``max_j a_j - b_j * alpha`` for each alpha."""
    n = max(1, _CHUNK // max(1, a.size))
    out = np.empty(alphas.size, dtype=np.int64)
    for start in range(0, alphas.size, n):
        chunk = alphas[start:start + n]
        with np.errstate(invalid="ignore", over="ignore"):
            obj = a[None, :] - b[None, :] * chunk[:, None]
        obj = np.where(np.isnan(obj), -np.inf, obj)
        out[start:start + n] = np.argmax(obj, axis=1)
    return out


def left_continuous_inverse(curve):
    """Knots of ``f^{-1}(beta) = inf{alpha : f(alpha) <= beta}`` on ``[0, 1]``.

    Flat stretches of ``f`` collapse to their left end, and values above
    ``f(0)`` map to 0, which adds the knot ``(1, 0)`` when ``f(0) < 1``.
    """
    a = np.asarray(curve.alphas)
    v = np.asarray(curve.values)
    betas, inv = [], []
    for ak, vk in zip(a, v):
        if betas and vk == betas[-1]:
            continue  # keep the smallest alpha for each value
        betas.append(vk)
        inv.append(ak)
    betas = np.array(betas[::-1])
    inv = np.array(inv[::-1])
    if betas[-1] < 1.0:
        betas = np.append(betas, 1.0)
        inv = np.append(inv, 0.0)
    return betas, inv


def _pl_conjugate(betas, values, y):
    """Convex conjugate ``sup_beta (y beta - g(beta))`` of a piecewise-linear ``g``.

    For a piecewise-linear convex function the supremum is attained at a
    knot, so this is an exact finite maximum.
    """
    y = np.asarray(y, dtype=float)
    return np.max(y[..., None] * betas - values, axis=-1)


def primal_to_dual(curve, epsilon):
    """Privacy profile value ``delta(eps) = 1 + (f^{-1})^*(-e^eps)``."""
    eps = _as_array(epsilon)
    betas, inv = left_continuous_inverse(curve)
    with np.errstate(over="ignore"):
        y = -np.exp(np.minimum(eps, _EPS_LIMIT))
    out = 1.0 + _pl_conjugate(betas, inv, y)
    out = np.clip(out, np.maximum(-np.expm1(np.minimum(eps, _EPS_LIMIT)), 0.0), 1.0)
    return float(out) if out.ndim == 0 else out


def opposite_profile(profile, epsilon):
    """``1 - e^eps (1 - delta(-eps))``, the profile of the swapped relation."""
    eps = _as_array(epsilon)
    lo, hi = profile.domain
    if np.any(-eps < lo - 1e-12) or np.any(-eps > hi + 1e-12):
        raise ExtrapolationError("the profile does not cover -epsilon")
    comp = np.exp(np.minimum(eps, _EPS_LIMIT)) * profile.complement(-eps)
    out = np.clip(1.0 - comp, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def symmetric_dual_to_primal(profile, alpha, grid=None):
    """Tradeoff value for a symmetric relation using only ``eps >= 0``.

    Evaluates ``max_{eps >= 0} max(1 - delta - e^eps alpha,
    e^{-eps} (1 - delta - alpha))``.
    """
    alphas = np.asarray(alpha, dtype=float)
    if np.any((alphas < 0.0) | (alphas > 1.0)):
        raise DomainError("alpha must lie in [0, 1]")
    eps = profile.evaluation_grid(grid)
    eps = np.unique(np.concatenate([[0.0], eps[eps >= 0.0]]))
    while eps[-1] < _EPS_LIMIT and profile(eps[-1]) > 0.0:
        eps = np.unique(np.concatenate([eps, _extend(eps, 1)]))
        if eps[-1] >= 60.0:
            break
    comp = profile.complement(eps) - profile.complement_error
    flat = alphas.ravel()
    up = np.exp(np.minimum(eps, _EPS_LIMIT))
    down = np.exp(-eps)
    idx1 = _chunked_argmax(comp, up, flat)
    idx2 = _chunked_argmax(down * comp, down, flat)
    v1 = comp[idx1] - up[idx1] * flat
    v2 = down[idx2] * (comp[idx2] - flat)
    if eps.size > 2:
        v1 = np.maximum(v1, _zoom(profile, eps, idx1, flat, objective=_hockey_objective))
        v2 = np.maximum(v2, _zoom(profile, eps, idx2, flat))
    out = np.clip(np.maximum(v1, v2), 0.0, 1.0 - flat).reshape(alphas.shape)
    return float(out) if out.ndim == 0 else out


def pointwise_min(values):
    """Exact minimum of a non-empty list of numbers."""
    values = list(values)
    if not values:
        raise DomainError("pointwise_min of an empty list")
    return min(values)


class TradeoffMin:
    """Evaluator for the pointwise minimum of several tradeoff evaluators.

    No convex hull is taken; certification uses the minimum directly.
    """

    def __init__(self, curves: Sequence[Callable]):
        self.curves = list(curves)
        if not self.curves:
            raise DomainError("need at least one curve")

    def __call__(self, alpha):
        vals = np.array([np.asarray(c(alpha), dtype=float) for c in self.curves])
        out = np.min(vals, axis=0)
        return float(out) if out.ndim == 0 else out


def curve_pointwise_min(curves):
    if len(curves) == 1:
        return curves[0]
    return TradeoffMin(curves)


def profile_tradeoff(profile, grid=None):
    """Callable ``alpha -> dual_to_primal(profile, alpha)``."""
    return lambda alpha: dual_to_primal(profile, alpha, grid=grid)


__all__ = [
    "PrivacyProfile",
    "TradeoffCurve",
    "TradeoffMin",
    "curve_pointwise_min",
    "default_epsilon_grid",
    "dual_to_primal",
    "left_continuous_inverse",
    "opposite_profile",
    "pointwise_min",
    "primal_to_dual",
    "profile_tradeoff",
    "refine_grid",
    "symmetric_dual_to_primal",
]
