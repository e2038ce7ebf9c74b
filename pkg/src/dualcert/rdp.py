"""Renyi-DP accounting for the subsampled Gaussian, used as a baseline.

The group version replaces a group of ``r`` records by a single record with
effective sampling rate ``1 - (1 - q)^r`` and noise ``sigma / r``. Renyi
curves compose additively over steps and are converted to a privacy profile
with the classic bound ``delta <= exp((a - 1)(rho(a) - eps))`` minimized over
orders ``a``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .duality import PrivacyProfile
from .exceptions import DomainError, NumericFailure

DEFAULT_ORDERS = tuple(1.0 + np.geomspace(1e-2, 511.0, 128))


@dataclass(frozen=True, eq=False)
class RdpCurve:
    """Renyi divergences ``values[i]`` at ``orders[i]``."""

    orders: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        o = np.array(self.orders, dtype=float)
        v = np.array(self.values, dtype=float)
        if o.ndim != 1 or o.shape != v.shape or o.size == 0:
            raise DomainError("orders and values must be matching non-empty 1-d arrays")
        if np.any(o <= 1.0):
            raise DomainError("Renyi orders must exceed 1")
        if not np.all(np.isfinite(v)) or np.any(v < 0.0):
            raise DomainError("Renyi values must be finite and non-negative")
        order = np.argsort(o)
        o, v = o[order], v[order]
        if np.any(np.diff(v) < -1e-9 * np.maximum(1.0, v[1:])):
            raise DomainError("Renyi divergences must be non-decreasing in the order")
        o.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "orders", o)
        object.__setattr__(self, "values", v)


def _log_normal(y, mean, sigma):
    z = (y - mean) / sigma
    return -0.5 * z * z - math.log(sigma) - 0.5 * math.log(2.0 * math.pi)


def _log_ratio(y, q, sigma):
    """``log(mix / base)`` for ``mix = (1 - q) N(0, s^2) + q N(1, s^2)``."""
    t = (2.0 * y - 1.0) / (2.0 * sigma * sigma)
    return np.logaddexp(math.log1p(-q), math.log(q) + t)


def _log_moment(k, q, sigma, lo, hi):
    """``log E_base[(mix/base)^k]`` for base ``N(0, s^2)``.

    Large moments are integrated in log space with the peak factored out.
    Moments close to 1 are integrated as ``E[(mix/base)^k - 1]`` so that
    divergences of order 1e-9 keep their relative accuracy.
    """

    def h(y):
        return _log_normal(y, 0.0, sigma) + k * _log_ratio(y, q, sigma)

    coarse = np.linspace(lo, hi, int(min(400_000, max(2001, (hi - lo) / (sigma / 8.0)))))
    # Mass sits near the component means and the exponentially tilted mean
    # ``k``, which a coarse grid can step over when sigma is small.
    local = np.linspace(-40.0 * sigma, 40.0 * sigma, 641)
    grid = np.unique(np.concatenate([coarse] + [c + local for c in (0.0, 1.0, k, 1.0 - k)]))
    grid = grid[(grid >= lo) & (grid <= hi)]
    with np.errstate(all="ignore"):
        hv = h(grid)
    hv = np.where(np.isnan(hv), -np.inf, hv)
    top = float(np.max(hv))
    # Beyond about 1e13 the spacing of doubles near ``top`` exceeds 1e-3, so
    # the integrand shape is lost to rounding.
    if not math.isfinite(top) or abs(top) > 1e13:
        raise NumericFailure("Renyi integrand is not representable in double precision")
    inner = hv[1:-1]
    peaks = grid[1:-1][(inner >= hv[:-2]) & (inner >= hv[2:]) & (inner > top - 60.0)]
    live = grid[hv >= top - 745.0]
    a, b = float(live.min()) - sigma, float(live.max()) + sigma
    # Peaks have width about sigma; cut the window into pieces around each one
    # so that every quad call sees a single well-resolved bump.
    centres = set(float(p) for p in peaks[:50]) | {0.0, 1.0}
    cuts = {c + m * sigma for c in centres for m in (-40, -15, -6, -2, 0, 2, 6, 15, 40)}
    edges = [a] + sorted(x for x in cuts if a < x < b) + [b]

    val, err = _segmented_quad(lambda y: math.exp(float(h(y)) - top), edges, 0.0, 1e-11)
    if not (val > 0.0 and math.isfinite(val)):
        raise NumericFailure(f"Renyi integral did not converge (value {val!r})", err)
    log_moment = top + math.log(val)
    # err / val is the absolute error of the log moment; judge it against the
    # log moment itself since rounding in large exponents is unavoidable.
    if err / val > 1e-9 * max(1.0, abs(log_moment)):
        raise NumericFailure(f"Renyi integral did not converge (value {val!r}, error {err!r})", err)
    if abs(log_moment) > 0.05:
        return log_moment

    def excess(y):
        lphi = _log_normal(y, 0.0, sigma)
        kl = k * float(_log_ratio(y, q, sigma))
        if abs(kl) < 1.0:
            return math.exp(lphi) * math.expm1(kl)
        return math.exp(lphi + kl) - math.exp(lphi)

    j, err = _segmented_quad(excess, edges, 1e-300, 1e-10)
    # The 1e-15 floor bounds the divergence error by 1e-15 / (order - 1).
    if not math.isfinite(j) or err > 1e-8 * abs(j) + 1e-15:
        raise NumericFailure(f"Renyi integral did not converge (error {err!r})", err)
    return math.log1p(j)


def _segmented_quad(f, edges, epsabs, epsrel):
    """Sum of adaptive quadratures over consecutive ``edges``; returns (value, error)."""
    total = 0.0
    error = 0.0
    with warnings.catch_warnings():
        # Callers check the accumulated error estimate themselves.
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for lo, hi in zip(edges, edges[1:]):
            v, e = integrate.quad(f, lo, hi, limit=200, epsabs=epsabs, epsrel=epsrel)
            total += v
            error += e
    return total, error


def rdp_subsampled_gaussian(order, q, sigma):
    """Renyi divergence of the subsampled Gaussian at ``order``.

    Maximum of ``D_a(mix || N(0, s^2))`` and ``D_a(N(0, s^2) || mix)`` with
    ``mix = (1 - q) N(0, s^2) + q N(1, s^2)``, by quadrature to relative error
    about 1e-8.

    Raises:
      NumericFailure: when the divergence is not representable (overflow)
        or the quadrature does not converge.
    """
    order = float(order)
    if not order > 1.0:
        raise DomainError("order must exceed 1")
    if not 0.0 <= q <= 1.0:
        raise DomainError("q must lie in [0, 1]")
    if not sigma > 0.0:
        raise DomainError("sigma must be positive")
    if q == 0.0:
        return 0.0
    with np.errstate(over="ignore", divide="ignore"):
        scale = order / (2.0 * np.float64(sigma) ** 2)
    if not math.isfinite(scale):
        raise NumericFailure(f"Renyi divergence overflows at order {order:g}, sigma {sigma:g}")
    if q == 1.0:
        return order / (2.0 * sigma * sigma)
    span = 40.0 * sigma
    lo = -span - order
    hi = 1.0 + span + order
    try:
        # D(mix || base) uses E_base[r^a]; D(base || mix) uses E_base[r^(1-a)].
        up = _log_moment(order, q, sigma, lo, hi) / (order - 1.0)
        down = _log_moment(1.0 - order, q, sigma, lo, hi) / (order - 1.0)
    except OverflowError as exc:
        raise NumericFailure(f"Renyi divergence overflowed at order {order:g}") from exc
    value = max(up, down, 0.0)
    if not math.isfinite(value):
        raise NumericFailure(f"Renyi divergence is infinite at order {order:g}")
    return value


def rdp_group_corrected(order, q, sigma, r):
    """Group-of-``r`` bound ``SG(order, 1 - (1 - q)^r, sigma / r)``."""
    if int(r) != r or r < 1:
        raise DomainError("group size r must be a positive integer")
    q_eff = -math.expm1(r * math.log1p(-q)) if q < 1.0 else 1.0
    return rdp_subsampled_gaussian(order, q_eff, sigma / r)


def rdp_curve(q, sigma, r=1, orders=DEFAULT_ORDERS):
    """Corrected group Renyi curve of one subsampled Gaussian step."""
    orders = np.asarray(orders, dtype=float)
    values = np.array([rdp_group_corrected(o, q, sigma, r) for o in orders])
    # Quadrature noise can break monotonicity in the last digits.
    values = np.maximum.accumulate(values)
    return RdpCurve(orders, values)


def rdp_compose(curve, steps):
    """Curve of ``steps`` independent repetitions."""
    if int(steps) != steps or steps < 1:
        raise DomainError("steps must be a positive integer")
    return RdpCurve(curve.orders, curve.values * int(steps))


def rdp_to_profile(curve, epsilon, conversion="classic"):
    """``delta(eps)`` implied by a Renyi curve.

    Args:
      conversion: ``"classic"`` uses ``exp((a - 1)(rho - eps))``; ``"cks"``
        uses the sharper ``exp((a - 1)(rho - eps + log(1 - 1/a))) / a``.
    """
    eps = np.asarray(epsilon, dtype=float)
    o = curve.orders
    rho = curve.values
    if conversion == "classic":
        logs = (o - 1.0) * (rho - eps[..., None])
    elif conversion == "cks":
        logs = (o - 1.0) * (rho - eps[..., None] + np.log1p(-1.0 / o)) - np.log(o)
    else:
        raise DomainError(f"unknown conversion {conversion!r}")
    out = np.exp(np.minimum(np.min(logs, axis=-1), 0.0))
    return float(out) if out.ndim == 0 else out


def rdp_privacy_profile(curve, conversion="classic", label=None):
    """Profile object for a symmetric Renyi bound.

    The curve bounds both directions of the relation, so for ``eps < 0`` the
    swapped-relation identity ``1 - e^eps (1 - delta(-eps))`` gives a valid
    value, far better than the trivial ``delta = 1``.
    """

    def complement(eps):
        e = np.asarray(eps, dtype=float)
        pos = 1.0 - rdp_to_profile(curve, np.abs(e), conversion)
        return np.where(e >= 0.0, pos, np.exp(np.minimum(e, 0.0)) * pos)

    return PrivacyProfile(None, complement, label=label or f"rdp[{conversion}]", symmetric=True)


__all__ = [
    "DEFAULT_ORDERS",
    "RdpCurve",
    "rdp_compose",
    "rdp_curve",
    "rdp_group_corrected",
    "rdp_privacy_profile",
    "rdp_subsampled_gaussian",
    "rdp_to_profile",
]
