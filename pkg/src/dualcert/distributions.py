"""One-dimensional distributions used as dominating pairs.

Three descriptor types are supported: :class:`Discrete` point-mass lists,
:class:`Gaussian` and finite :class:`GaussianMixture`. For a pair ``(p, q)``
this module evaluates hockey-stick divergences, tradeoff values and the
pessimistically discretized privacy loss distribution of ``log(p/q)`` under
``p``.

Continuous pairs are handled through the log-likelihood ratio
``g(y) = log p(y) - log q(y)``. The real line is split into pieces on which
``g`` is monotone; super-level sets ``{g > t}`` are then unions of intervals
whose probabilities follow from the Gaussian CDFs. This gives divergences to
near machine precision without integrating a kinked integrand.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy import integrate, optimize
from scipy.special import log_ndtr, ndtr

from .exceptions import DomainError, NumericFailure, RangeTooSmallError, UnsupportedPairError

_MASS_TOL = 1e-12
# Gaussian mass beyond 40 standard deviations is below the smallest double.
_SUPPORT_SDS = 40.0
_MAX_GRID = 400_001
_MAX_BUCKETS = 5_000_000


@dataclass(frozen=True)
class Discrete:
    """Finite point-mass distribution."""

    locations: Tuple[float, ...]
    masses: Tuple[float, ...]

    def __init__(self, atoms):
        atoms = [(float(loc), float(m)) for loc, m in atoms]
        if not atoms:
            raise DomainError("a discrete distribution needs at least one atom")
        locs = [a[0] for a in atoms]
        masses = [a[1] for a in atoms]
        if len(set(locs)) != len(locs):
            raise DomainError("discrete atoms must have distinct locations")
        if any(not math.isfinite(x) for x in locs):
            raise DomainError("atom locations must be finite")
        if any(m < 0.0 or m > 1.0 for m in masses):
            raise DomainError("atom masses must lie in [0, 1]")
        if abs(math.fsum(masses) - 1.0) > _MASS_TOL:
            raise DomainError(f"atom masses sum to {math.fsum(masses)!r}, not 1")
        object.__setattr__(self, "locations", tuple(locs))
        object.__setattr__(self, "masses", tuple(masses))

    @property
    def atoms(self):
        return list(zip(self.locations, self.masses))

    def mass_at(self, location):
        try:
            return self.masses[self.locations.index(location)]
        except ValueError:
            return 0.0


@dataclass(frozen=True)
class GaussianMixture:
    """Finite mixture of univariate Gaussians."""

    weights: Tuple[float, ...]
    means: Tuple[float, ...]
    stddevs: Tuple[float, ...]

    def __init__(self, components):
        comps = [(float(w), float(m), float(s)) for w, m, s in components]
        if not comps:
            raise DomainError("a mixture needs at least one component")
        if any(not (0.0 <= w <= 1.0) for w, _, _ in comps):
            raise DomainError("mixture weights must lie in [0, 1]")
        if any(not (s > 0.0 and math.isfinite(s)) for _, _, s in comps):
            raise DomainError("mixture standard deviations must be positive")
        if any(not math.isfinite(m) for _, m, _ in comps):
            raise DomainError("mixture means must be finite")
        total = math.fsum(w for w, _, _ in comps)
        if abs(total - 1.0) > _MASS_TOL:
            raise DomainError(f"mixture weights sum to {total!r}, not 1")
        object.__setattr__(self, "weights", tuple(c[0] for c in comps))
        object.__setattr__(self, "means", tuple(c[1] for c in comps))
        object.__setattr__(self, "stddevs", tuple(c[2] for c in comps))

    @property
    def components(self):
        return list(zip(self.weights, self.means, self.stddevs))


@dataclass(frozen=True)
class Gaussian:
    """Univariate normal distribution."""

    mean: float
    stddev: float

    def __post_init__(self):
        if not (self.stddev > 0.0 and math.isfinite(self.stddev)):
            raise DomainError("stddev must be positive and finite")
        if not math.isfinite(self.mean):
            raise DomainError("mean must be finite")

    @property
    def components(self):
        return [(1.0, self.mean, self.stddev)]


DistributionDescriptor = Union[Discrete, Gaussian, GaussianMixture]


def binomial_gaussian_mixture(n, gamma, sigma, sign=1.0):
    """Mixture ``sum_i C(n,i) gamma^i (1-gamma)^(n-i) N(sign*i, sigma^2)``.

    A single-component result is returned as a :class:`Gaussian`.
    """
    if n == 0:
        return Gaussian(0.0, sigma)
    from scipy.stats import binom

    k = np.arange(n + 1)
    w = binom.pmf(k, n, gamma)
    keep = w > 0.0
    w = w[keep] / math.fsum(w[keep])
    return GaussianMixture(zip(w, sign * k[keep].astype(float), [sigma] * int(keep.sum())))


# ---------------------------------------------------------------------------
# Continuous machinery


def _logsumexp(terms):
    """Row-wise log-sum-exp over the last axis without scipy's dispatch overhead."""
    if terms.shape[-1] == 1:
        return terms[..., 0]
    top = np.max(terms, axis=-1)
    return top + np.log(np.sum(np.exp(terms - top[..., None]), axis=-1))


class _Mixture:
    """Array view of a Gaussian or mixture used for vectorized evaluation."""

    def __init__(self, dist):
        comps = [c for c in dist.components if c[0] > 0.0]
        self.w = np.array([c[0] for c in comps])
        self.mu = np.array([c[1] for c in comps])
        self.sd = np.array([c[2] for c in comps])
        self.logw = np.log(self.w)

    def _z(self, y):
        return (np.asarray(y, dtype=float)[..., None] - self.mu) / self.sd

    def logpdf(self, y):
        z = self._z(y)
        terms = self.logw - 0.5 * z * z - np.log(self.sd) - 0.5 * math.log(2 * math.pi)
        return _logsumexp(terms)

    def dlogpdf(self, y):
        z = self._z(y)
        terms = self.logw - 0.5 * z * z - np.log(self.sd)
        resp = np.exp(terms - _logsumexp(terms)[..., None])
        return np.sum(resp * (-z / self.sd), axis=-1)

    def interval_mass(self, a, b):
        """Probability of ``(a, b]``; either end may be infinite."""
        za = self._z(a)
        zb = self._z(b)
        # Differences of upper tails where the interval sits right of the mean.
        upper = za > 0.0
        m = np.where(upper, ndtr(-za) - ndtr(-zb), ndtr(zb) - ndtr(za))
        return np.sum(self.w * np.maximum(m, 0.0), axis=-1)

    def cdf(self, y):
        return np.sum(self.w * ndtr(self._z(y)), axis=-1)


def _vector_bisect(fun, lo, hi, target, increasing, iterations=60):
    """Solve ``fun(y) = target`` elementwise on brackets ``[lo, hi]``."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        above = fun(mid) > target
        if not increasing:
            above = ~above
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.all(hi - lo <= 4e-16 * np.maximum(1.0, np.abs(mid))):
            break
    return 0.5 * (lo + hi)


def _vector_newton(fun, dfun, lo, hi, f_lo, f_hi, target, increasing, iterations=12):
    """Safeguarded Newton solve of ``fun(y) = target`` on monotone brackets.

    Starts from linear interpolation of the bracket values, keeps the
    bracket updated and falls back to bisection whenever a Newton step
    leaves it. Elements that fail to settle are finished by bisection.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    f_lo = np.asarray(f_lo, dtype=float)
    f_hi = np.asarray(f_hi, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(f_hi != f_lo, (target - f_lo) / (f_hi - f_lo), 0.5)
    y = lo + np.clip(np.nan_to_num(frac, nan=0.5), 0.0, 1.0) * (hi - lo)
    target = np.broadcast_to(np.asarray(target, dtype=float), y.shape)
    tol = 2e-15 * np.maximum(1.0, np.abs(target))
    done = np.zeros(y.shape, dtype=bool)
    for _ in range(iterations):
        r = fun(y) - target
        done = np.abs(r) <= tol
        if np.all(done):
            return y
        above = r > 0.0 if increasing else r < 0.0
        hi = np.where(above, y, hi)
        lo = np.where(above, lo, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = y - r / dfun(y)
        bad = ~np.isfinite(nxt) | (nxt <= lo) | (nxt >= hi)
        nxt = np.where(bad, 0.5 * (lo + hi), nxt)
        done |= np.abs(nxt - y) <= 4e-16 * np.maximum(1.0, np.abs(y))
        y = np.where(done, y, nxt)
        if np.all(done):
            return y
    rest = ~done
    y = y.copy()
    y[rest] = _vector_bisect(fun, lo[rest], hi[rest], target[rest], increasing)
    return y


class _ContinuousPair:
    """Monotone-piece decomposition of ``log p - log q`` for continuous pairs."""

    def __init__(self, p, q):
        self.p = _Mixture(p)
        self.q = _Mixture(q)
        mus = np.concatenate([self.p.mu, self.q.mu])
        sds = np.concatenate([self.p.sd, self.q.sd])
        self.lo = float(np.min(mus - _SUPPORT_SDS * sds))
        self.hi = float(np.max(mus + _SUPPORT_SDS * sds))
        step = float(np.min(sds)) / 16.0
        n = int(min(_MAX_GRID, max(1001, math.ceil((self.hi - self.lo) / step) + 1)))
        self.grid = np.linspace(self.lo, self.hi, n)
        with np.errstate(all="ignore"):
            self.g_grid = self.g(self.grid)
            slope = self.dg(self.grid)
        if not (np.all(np.isfinite(self.g_grid)) and np.all(np.isfinite(slope))):
            raise NumericFailure("log density ratio is not representable in double precision")
        self._split_pieces()

    def g(self, y):
        return self.p.logpdf(y) - self.q.logpdf(y)

    def dg(self, y):
        return self.p.dlogpdf(y) - self.q.dlogpdf(y)

    def _split_pieces(self):
        y, g = self.grid, self.g_grid
        span = float(np.max(g) - np.min(g))
        if span <= 1e-13 * max(1.0, float(np.max(np.abs(g)))):
            # Identical (or numerically identical) densities.
            self.pieces = [(self.lo, self.hi, 0, float(np.mean(g)), 0, len(y) - 1)]
            return
        d = self.dg(y)
        sign = np.sign(d)
        # Zero derivative on grid points inherits the neighbouring sign.
        nz = np.nonzero(sign)[0]
        if nz.size:
            fill = np.maximum.accumulate(np.where(sign != 0, np.arange(len(sign)), -1))
            fill[fill < 0] = nz[0]
            sign = sign[fill]
        cuts = [0]
        crit = [self.lo]
        for i in np.nonzero(sign[1:] != sign[:-1])[0]:
            try:
                c = optimize.brentq(lambda t: float(self.dg(t)), y[i], y[i + 1], xtol=1e-14)
            except ValueError:
                c = 0.5 * (y[i] + y[i + 1])
            crit.append(c)
            cuts.append(i + 1)
        crit.append(self.hi)
        cuts.append(len(y) - 1)
        pieces = []
        for k in range(len(crit) - 1):
            i0, i1 = cuts[k], cuts[k + 1]
            direction = int(sign[min(i0, len(y) - 1)]) or 1
            pieces.append((crit[k], crit[k + 1], direction, None, i0, i1))
        self.pieces = pieces

    def _solve(self, piece, t):
        """Boundary of ``{g > t}`` inside a monotone piece, vectorized over ``t``."""
        a, b, direction, _, i0, i1 = piece
        ys = np.concatenate([[a], self.grid[i0 + 1:i1], [b]])
        gs = np.concatenate([[float(self.g(a))], self.g_grid[i0 + 1:i1], [float(self.g(b))]])
        if direction < 0:
            ys_s, gs_s = ys[::-1], gs[::-1]
        else:
            ys_s, gs_s = ys, gs
        gs_s = np.maximum.accumulate(gs_s)
        idx = np.clip(np.searchsorted(gs_s, t, side="right"), 1, len(gs_s) - 1)
        lo = ys_s[idx - 1]
        hi = ys_s[idx]
        if direction < 0:
            lo, hi = hi, lo
        f_lo = gs_s[idx - 1]
        f_hi = gs_s[idx]
        if direction < 0:
            f_lo, f_hi = f_hi, f_lo
        # Thresholds outside the range of g on this piece have no crossing;
        # the caller resolves them from the end values.
        inside = (t > gs_s[0]) & (t < gs_s[-1])
        y = np.array(lo, dtype=float)
        if np.any(inside):
            y[inside] = _vector_newton(self.g, self.dg, lo[inside], hi[inside], f_lo[inside],
                                       f_hi[inside], t[inside], increasing=direction > 0)
        return y, gs[0], gs[-1]

    def region_masses(self, t, tie_mass=False):
        """``(P(g > t), Q(g > t))`` for an array of thresholds ``t``.

        With ``tie_mass=True`` also returns ``P(g == t)`` coming from pieces on
        which ``g`` is constant (identical components).
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        pm = np.zeros_like(t)
        qm = np.zeros_like(t)
        ties = np.zeros_like(t)
        last = len(self.pieces) - 1
        for k, piece in enumerate(self.pieces):
            a, b, direction, const, _, _ = piece
            a_ext = -np.inf if k == 0 else a
            b_ext = np.inf if k == last else b
            if direction == 0:
                inside = const > t
                full_p = float(self.p.interval_mass(a_ext, b_ext))
                full_q = float(self.q.interval_mass(a_ext, b_ext))
                pm += np.where(inside, full_p, 0.0)
                qm += np.where(inside, full_q, 0.0)
                ties += np.where(np.abs(const - t) <= 1e-12, full_p, 0.0)
                continue
            y, ga, gb = self._solve(piece, t)
            if direction > 0:
                left = np.where(t < ga, a_ext, np.where(t >= gb, b_ext, y))
                right = np.full_like(t, b_ext)
            else:
                left = np.full_like(t, a_ext)
                right = np.where(t < gb, b_ext, np.where(t >= ga, a_ext, y))
            pm += self.p.interval_mass(left, right)
            qm += self.q.interval_mass(left, right)
        if tie_mass:
            return pm, qm, ties
        return pm, qm

    def loss_extent(self):
        lo = min(float(np.min(self.g_grid)), *(float(self.g(pc[0])) for pc in self.pieces))
        hi = max(float(np.max(self.g_grid)), *(float(self.g(pc[1])) for pc in self.pieces))
        return lo, hi


@functools.lru_cache(maxsize=256)
def _continuous_pair(p, q):
    return _ContinuousPair(p, q)


# ---------------------------------------------------------------------------
# Pair classification


def _kind(d):
    if isinstance(d, Discrete):
        return "discrete"
    if isinstance(d, (Gaussian, GaussianMixture)):
        return "continuous"
    raise UnsupportedPairError(f"not a distribution descriptor: {type(d).__name__}")


def _check_pair(p, q):
    kp, kq = _kind(p), _kind(q)
    if kp != kq:
        raise UnsupportedPairError(
            f"cannot compare {type(p).__name__} with {type(q).__name__}"
        )
    return kp


def _discrete_table(p, q):
    """Union support as arrays ``(p_masses, q_masses)``."""
    locs = sorted(set(p.locations) | set(q.locations))
    pm = np.array([p.mass_at(x) for x in locs])
    qm = np.array([q.mass_at(x) for x in locs])
    return pm, qm


def _equal_sd_gaussians(p, q):
    return isinstance(p, Gaussian) and isinstance(q, Gaussian) and p.stddev == q.stddev


def gaussian_hs_divergence(mu, epsilon):
    """Hockey-stick divergence of ``N(mu, 1)`` from ``N(0, 1)`` at ``e^epsilon``."""
    eps = np.asarray(epsilon, dtype=float)
    mu = abs(float(mu))
    if mu == 0.0:
        return np.maximum(-np.expm1(eps), 0.0)
    with np.errstate(over="ignore"):
        # A subnormal mu sends both arguments to +-inf, where ndtr is exact.
        a = mu / 2.0 - eps / mu
        b = -mu / 2.0 - eps / mu
    first = ndtr(a)
    second = np.exp(np.minimum(eps + log_ndtr(b), 700.0))
    return np.clip(first - second, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Public operations


def hs_divergence(p, q, epsilon, method="auto"):
    """Hockey-stick divergence ``int (p - e^epsilon q)_+``.

    Args:
      p, q: distribution descriptors of the same family (discrete or
        Gaussian/mixture).
      epsilon: scalar or array, natural-log scale.
      method: ``"auto"`` uses the closed form for equal-variance Gaussians and
        the interval decomposition otherwise; ``"regions"`` forces the
        decomposition; ``"quad"`` integrates numerically with an absolute
        error target of 1e-10.

    Returns:
      Values clamped to ``[0, 1]``, with the shape of ``epsilon``.
    """
    kind = _check_pair(p, q)
    eps = np.asarray(epsilon, dtype=float)
    if not np.all(np.isfinite(eps)):
        raise DomainError("epsilon must be finite")
    if kind == "discrete":
        pm, qm = _discrete_table(p, q)
        alpha = np.exp(np.minimum(eps, 700.0))[..., None]
        out = np.clip(np.sum(np.maximum(pm - alpha * qm, 0.0), axis=-1), 0.0, 1.0)
    elif method == "quad":
        out = np.asarray(_hs_quad(p, q, eps))
    elif method == "auto" and _equal_sd_gaussians(p, q):
        out = np.asarray(gaussian_hs_divergence((p.mean - q.mean) / p.stddev, eps))
    elif method in ("auto", "regions"):
        pair = _continuous_pair(p, q)
        pm, qm = pair.region_masses(eps.ravel())
        alpha = np.exp(np.minimum(eps.ravel(), 700.0))
        second = np.where(qm > 0.0, alpha * qm, 0.0)
        out = np.clip(pm - second, 0.0, 1.0).reshape(eps.shape)
    else:
        raise DomainError(f"unknown method {method!r}")
    return float(out) if out.ndim == 0 else out


def _hs_quad(p, q, eps):
    pp, qq = _Mixture(p), _Mixture(q)
    mus = np.concatenate([pp.mu, qq.mu])
    sds = np.concatenate([pp.sd, qq.sd])
    lo = float(np.min(mus - _SUPPORT_SDS * sds))
    hi = float(np.max(mus + _SUPPORT_SDS * sds))
    points = sorted(set(np.round(np.concatenate([mus, mus - sds, mus + sds]), 12)))
    points = [x for x in points if lo < x < hi][:90]
    out = np.empty(eps.size)
    for i, e in enumerate(eps.ravel()):
        log_alpha = float(e)

        def integrand(y, la=log_alpha):
            lp = float(pp.logpdf(y))
            lq = float(qq.logpdf(y)) + la
            if lp <= lq:
                return 0.0
            return math.exp(lp) * -math.expm1(lq - lp)

        val, err = integrate.quad(integrand, lo, hi, points=points, limit=2000,
                                  epsabs=1e-12, epsrel=1e-12)
        if err > 1e-10:
            raise NumericFailure(f"quadrature error bound {err:.3g} exceeds 1e-10", err)
        out[i] = val
    return np.clip(out, 0.0, 1.0).reshape(eps.shape)


def tradeoff_value(p, q, alpha):
    """Optimal type-II error when testing ``p`` against ``q`` at level ``alpha``.

    Follows the Neyman-Pearson construction: the test rejects where
    ``log p/q`` is smallest and randomizes on ties. With ``F`` the CDF of the
    privacy loss under ``p`` and ``t = F^{-1}(alpha)`` the value is
    ``Q[L > t] + e^{-t} (1 - alpha - P[L > t])``, where the second term only
    carries tie mass.
    """
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError("alpha must lie in [0, 1]")
    kind = _check_pair(p, q)
    if kind == "discrete":
        return _discrete_tradeoff(p, q, alpha)
    if alpha == 0.0:
        return 1.0
    if alpha == 1.0:
        return 0.0
    pair = _continuous_pair(p, q)
    t_lo, t_hi = pair.loss_extent()
    t_lo -= 1.0
    t_hi += 1.0

    def below(t):  # P[L <= t]
        return 1.0 - pair.region_masses(np.array([t]))[0][0]

    if below(t_lo) >= alpha:
        t = t_lo
    else:
        lo, hi = t_lo, t_hi
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if below(mid) >= alpha:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-13 * max(1.0, abs(mid)):
                break
        t = hi
    pm, qm, ties = pair.region_masses(np.array([t]), tie_mass=True)
    leftover = min(max(0.0, 1.0 - alpha - pm[0]), ties[0])
    value = qm[0] + (math.exp(-t) * leftover if leftover > 0.0 else 0.0)
    return float(min(max(value, 0.0), 1.0 - alpha))


def _discrete_tradeoff(p, q, alpha):
    pm, qm = _discrete_table(p, q)
    with np.errstate(divide="ignore"):
        loss = np.log(pm) - np.log(qm)
    loss = np.where((pm == 0.0) & (qm == 0.0), np.nan, loss)
    order = np.argsort(np.where(np.isnan(loss), np.inf, loss), kind="stable")
    remaining = alpha
    q_rejected = 0.0
    for i in order:
        if np.isnan(loss[i]):
            continue
        if pm[i] == 0.0:
            q_rejected += qm[i]
            continue
        if remaining <= 0.0:
            break
        take = min(pm[i], remaining)
        q_rejected += qm[i] * take / pm[i]
        remaining -= take
    value = 1.0 - q_rejected
    return float(min(max(value, 0.0), 1.0 - alpha))


def tradeoff_curve_knots(p, q):
    """Exact knots ``(alpha, value)`` of the tradeoff curve of a discrete pair."""
    if _check_pair(p, q) != "discrete":
        raise UnsupportedPairError("exact knots are only available for discrete pairs")
    pm, qm = _discrete_table(p, q)
    with np.errstate(divide="ignore"):
        loss = np.log(pm) - np.log(qm)
    alphas = [0.0]
    for value in sorted(set(loss[pm > 0.0])):
        alphas.append(float(np.sum(pm[(pm > 0.0) & (loss <= value)])))
    alphas = sorted(set(min(a, 1.0) for a in alphas) | {1.0})
    return [(a, tradeoff_value(p, q, a)) for a in alphas]


# ---------------------------------------------------------------------------
# Discretized privacy loss


@dataclass(frozen=True)
class DiscretizationSpec:
    """Loss grid for pessimistic discretization.

    ``loss_range=None`` derives the range from the loss quantiles so that at
    most ``tail_mass_bound`` probability falls outside it.
    """

    bucket_width: float = 1e-4
    loss_range: Tuple[float, float] | None = None
    tail_mass_bound: float = 1e-12

    def __post_init__(self):
        if not self.bucket_width > 0.0:
            raise DomainError("bucket_width must be positive")
        if not 0.0 < self.tail_mass_bound < 1.0:
            raise DomainError("tail_mass_bound must lie in (0, 1)")
        if self.loss_range is not None:
            lo, hi = self.loss_range
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise DomainError("loss_range must be finite with lo < hi")
            object.__setattr__(self, "loss_range", (float(lo), float(hi)))


def _range_edges(t_lo, t_hi):
    """Round a loss range outward to a width-independent unit."""
    width = max(t_hi - t_lo, 1e-12)
    unit = 10.0 ** (math.floor(math.log10(width)) - 1)
    return math.floor(t_lo / unit) * unit, math.ceil(t_hi / unit) * unit


def _bucket_index_range(lo, hi, w):
    k_lo = math.floor(lo / w + 1e-9)
    k_hi = math.ceil(hi / w - 1e-9)
    if k_hi - k_lo + 1 > _MAX_BUCKETS:
        raise DomainError(
            f"loss range [{lo:g}, {hi:g}] needs {k_hi - k_lo + 1} buckets of width {w:g}; "
            "use a larger bucket width"
        )
    return k_lo, k_hi


def pld_from_pair(p, q, spec=None):
    """Pessimistic discretized privacy loss distribution of ``(p, q)``.

    The loss ``log p/q`` under ``p`` is rounded up to the next multiple of the
    bucket width; mass where ``q`` vanishes goes to the infinity atom, and so
    does the upper tail beyond the loss range. Rounding losses up can only
    increase hockey-stick divergences, so the result dominates the pair.
    """
    from .pld import DiscretePLD

    spec = spec or DiscretizationSpec()
    kind = _check_pair(p, q)
    w = spec.bucket_width
    if kind == "discrete":
        pm, qm = _discrete_table(p, q)
        live = pm > 0.0
        inf_mass = float(np.sum(pm[live & (qm == 0.0)]))
        finite = live & (qm > 0.0)
        losses = np.log(pm[finite]) - np.log(qm[finite])
        masses = pm[finite]
        if masses.size == 0:
            return DiscretePLD.from_indexed(w, 0, np.zeros(0), 1.0)
        lo, hi = spec.loss_range or (float(losses.min()), float(losses.max()))
        over = losses > hi + 1e-12
        under = losses < lo - 1e-12
        truncated = float(np.sum(masses[over]) + np.sum(masses[under]))
        if spec.loss_range is not None and truncated > spec.tail_mass_bound:
            raise RangeTooSmallError(
                f"loss range {spec.loss_range} truncates mass {truncated:.3g}", truncated)
        k_lo = math.ceil(lo / w - 1e-9)
        idx = np.ceil(np.maximum(losses, lo) / w - 1e-9).astype(np.int64)
        idx = np.maximum(idx, k_lo)
        inf_mass += float(np.sum(masses[over]))
        idx, masses = idx[~over], masses[~over]
        if idx.size == 0:
            return DiscretePLD.from_indexed(w, 0, np.zeros(0), inf_mass)
        offset = int(idx.min())
        dense = np.zeros(int(idx.max()) - offset + 1)
        np.add.at(dense, idx - offset, masses)
        return DiscretePLD.from_indexed(w, offset, dense, inf_mass)

    pair = _continuous_pair(p, q)
    tail = spec.tail_mass_bound
    if spec.loss_range is None:
        with np.errstate(all="ignore"):
            lo, hi = _loss_quantile_range(pair, tail / 2.0)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise NumericFailure("privacy loss range is not representable in double precision")
        lo, hi = _range_edges(lo, hi)
    else:
        lo, hi = spec.loss_range
    k_lo, k_hi = _bucket_index_range(lo, hi, w)
    edges = np.arange(k_lo, k_hi + 1) * w
    above = pair.region_masses(edges)[0]  # P[L > edge]
    truncated = (1.0 - above[0]) + above[-1]
    if spec.loss_range is not None and truncated > tail:
        raise RangeTooSmallError(
            f"loss range {spec.loss_range} truncates mass {truncated:.3g}", truncated)
    masses = np.empty(len(edges))
    masses[0] = 1.0 - above[0]  # everything at or below the lowest edge
    masses[1:] = np.maximum(above[:-1] - above[1:], 0.0)
    return DiscretePLD.from_indexed(w, k_lo, masses, float(max(above[-1], 0.0)))


def _loss_quantile_range(pair, tail):
    """Loss interval holding all but ``tail`` mass at each end."""
    t_lo, t_hi = pair.loss_extent()
    pad = 1e-9 + 1e-9 * max(abs(t_lo), abs(t_hi))
    t_lo -= pad
    t_hi += pad
    lo_bracket = (t_lo, t_hi)
    hi_bracket = (t_lo, t_hi)
    for _ in range(3):
        # Scan a vector of thresholds, then zoom into the bracketing cell.
        ts = np.linspace(lo_bracket[0], lo_bracket[1], 257)
        below = 1.0 - pair.region_masses(ts)[0]
        k = int(np.searchsorted(below >= tail, True))
        lo_bracket = (ts[max(k - 1, 0)], ts[min(k, ts.size - 1)])
        ts = np.linspace(hi_bracket[0], hi_bracket[1], 257)
        above = pair.region_masses(ts)[0]
        k = int(np.searchsorted(above < tail, True))
        hi_bracket = (ts[max(k - 1, 0)], ts[min(k, ts.size - 1)])
    lo, hi = lo_bracket[0], hi_bracket[1]
    if hi <= lo:
        hi = lo + 1e-9
    return lo, hi
