"""Discretized privacy loss distributions and their composition.

A :class:`DiscretePLD` stores the loss distribution on the lattice
``bucket_width * k`` as a dense mass vector starting at index ``offset``,
plus an explicit atom at ``+inf``. Composition adds independent losses, so
the finite part is a convolution and the infinite parts combine as
``1 - (1 - a)(1 - b)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .exceptions import DomainError, IncompatibleGridError

_FFT_THRESHOLD = 4096
_SPARSE_PAIRS = 4_000_000
_DIRECT_OPS = 100_000_000
_MASS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DiscretePLD:
    """Privacy loss distribution on a uniform loss lattice.

    Attributes:
      bucket_width: lattice spacing ``w``.
      offset: integer index of ``masses[0]``; its loss is ``offset * w``.
      masses: read-only float array of finite-loss masses.
      infinity_mass: probability of infinite loss.
    """

    bucket_width: float
    offset: int
    masses: np.ndarray
    infinity_mass: float

    @classmethod
    def from_indexed(cls, bucket_width, offset, masses, infinity_mass=0.0):
        masses = np.clip(np.asarray(masses, dtype=float), 0.0, None)
        # Trim zero ends so the support stays compact after many compositions.
        nz = np.nonzero(masses)[0]
        if nz.size == 0:
            masses = np.zeros(0)
            offset = 0
        else:
            offset = int(offset) + int(nz[0])
            masses = masses[nz[0]:nz[-1] + 1].copy()
        masses.setflags(write=False)
        inf = float(min(max(infinity_mass, 0.0), 1.0))
        total = math.fsum(masses) + inf
        if abs(total - 1.0) > _MASS_TOL:
            raise DomainError(f"PLD mass sums to {total!r}, not 1")
        if not bucket_width > 0.0:
            raise DomainError("bucket_width must be positive")
        return cls(float(bucket_width), int(offset), masses, inf)

    @classmethod
    def from_atoms(cls, bucket_width, atoms, infinity_mass=0.0):
        """Build from ``(loss, mass)`` pairs; losses are rounded up onto the lattice."""
        atoms = list(atoms)
        if not atoms:
            return cls.from_indexed(bucket_width, 0, np.zeros(0), infinity_mass)
        losses = np.array([a[0] for a in atoms], dtype=float)
        mass = np.array([a[1] for a in atoms], dtype=float)
        idx = np.ceil(losses / bucket_width - 1e-9).astype(np.int64)
        lo = int(idx.min())
        dense = np.zeros(int(idx.max()) - lo + 1)
        np.add.at(dense, idx - lo, mass)
        return cls.from_indexed(bucket_width, lo, dense, infinity_mass)

    @classmethod
    def identity(cls, bucket_width):
        """Point mass at zero loss, the neutral element of composition."""
        return cls.from_indexed(bucket_width, 0, np.ones(1), 0.0)

    @property
    def losses(self):
        return (self.offset + np.arange(self.masses.size)) * self.bucket_width

    @property
    def atoms(self):
        return [(float(x), float(m)) for x, m in zip(self.losses, self.masses) if m > 0.0]

    def __len__(self):
        return int(self.masses.size)

    def __repr__(self):
        return (f"DiscretePLD(bucket_width={self.bucket_width:g}, atoms={len(self)}, "
                f"infinity_mass={self.infinity_mass:.3g})")

    def to_json(self):
        return json.dumps({
            "bucket_width": self.bucket_width,
            "atoms": [[loss, mass] for loss, mass in self.atoms],
            "infinity_mass": self.infinity_mass,
        })

    @classmethod
    def from_json(cls, text):
        data = json.loads(text) if isinstance(text, str) else text
        return cls.from_atoms(data["bucket_width"], data["atoms"], data.get("infinity_mass", 0.0))

    def profile(self, epsilon):
        return profile_from_pld(self, epsilon)


def _convolve(x, y):
    if min(x.size, y.size) == 0:
        return np.zeros(0)
    ix, iy = np.nonzero(x)[0], np.nonzero(y)[0]
    if ix.size * iy.size <= _SPARSE_PAIRS:
        # Few atoms on a long lattice: sum atom pairs exactly.
        idx = (ix[:, None] + iy[None, :]).ravel()
        vals = (x[ix][:, None] * y[iy][None, :]).ravel()
        return np.bincount(idx, weights=vals, minlength=x.size + y.size - 1)
    if max(ix.size, iy.size) < _FFT_THRESHOLD and x.size * y.size <= _DIRECT_OPS:
        return np.convolve(x, y)
    out = signal.fftconvolve(x, y)
    # Transform round-off shows up as tiny negative masses.
    return np.clip(out, 0.0, None)


def compose(a, b, truncation=0.0):
    """PLD of the sum of independent losses drawn from ``a`` and ``b``.

    Args:
      truncation: optional tail budget. Lower-tail mass up to this amount
        is moved up to the first kept bucket, upper-tail mass goes to
        ``+inf``; both moves can only increase the resulting profile.
    """
    if not math.isclose(a.bucket_width, b.bucket_width, rel_tol=1e-12, abs_tol=0.0):
        raise IncompatibleGridError(
            f"bucket widths differ: {a.bucket_width!r} vs {b.bucket_width!r}; rebucket first")
    masses = _convolve(a.masses, b.masses)
    inf = 1.0 - (1.0 - a.infinity_mass) * (1.0 - b.infinity_mass)
    finite = 1.0 - inf
    total = masses.sum()
    if total > 0.0:
        # Renormalize away convolution round-off so the invariant holds exactly.
        masses *= finite / total
    out = DiscretePLD.from_indexed(a.bucket_width, a.offset + b.offset, masses, inf)
    if truncation > 0.0:
        out = truncate(out, truncation)
    return out


def self_compose(a, k, truncation=0.0):
    """``k``-fold composition of ``a`` with itself by repeated squaring."""
    if int(k) != k or k < 1:
        raise DomainError("self_compose needs a positive integer k")
    k = int(k)
    result = None
    base = a
    while True:
        if k & 1:
            result = base if result is None else compose(result, base, truncation)
        k >>= 1
        if not k:
            break
        base = compose(base, base, truncation)
    return result


def truncate(a, tail):
    """Pessimistically drop up to ``tail`` mass from each end of the support."""
    m = np.asarray(a.masses)
    if m.size < 3 or tail <= 0.0:
        return a
    lower = np.cumsum(m)
    upper = np.cumsum(m[::-1])
    i0 = int(np.searchsorted(lower, tail, side="right"))
    j0 = int(np.searchsorted(upper, tail, side="right"))
    i0 = min(i0, m.size - 1)
    j1 = m.size - j0
    if j1 <= i0:
        return a
    kept = m[i0:j1].copy()
    kept[0] += lower[i0 - 1] if i0 > 0 else 0.0
    inf = a.infinity_mass + (upper[j0 - 1] if j0 > 0 else 0.0)
    return DiscretePLD.from_indexed(a.bucket_width, a.offset + i0, kept, inf)


def profile_from_pld(a, epsilon):
    """``delta(eps) = inf_mass + sum_k m_k (1 - e^{eps - l_k})_+``, vectorized over eps."""
    eps = np.asarray(epsilon, dtype=float)
    flat = eps.ravel()
    m = np.asarray(a.masses)
    if m.size == 0:
        out = np.full(flat.shape, a.infinity_mass)
        return out.reshape(eps.shape) if eps.ndim else float(out[0])
    losses = a.losses
    # Suffix sums over losses strictly above eps.
    tail_mass = np.concatenate([np.cumsum(m[::-1])[::-1], [0.0]])
    with np.errstate(divide="ignore"):
        log_terms = np.log(m) - losses
    tail_log = np.concatenate(
        [np.logaddexp.accumulate(log_terms[::-1])[::-1], [-np.inf]])
    idx = np.searchsorted(losses, flat, side="right")
    with np.errstate(over="ignore"):
        second = np.exp(np.minimum(flat + tail_log[idx], 700.0))
    out = a.infinity_mass + np.maximum(tail_mass[idx] - second, 0.0)
    out = np.clip(out, 0.0, 1.0)
    return out.reshape(eps.shape) if eps.ndim else float(out[0])


def rebucket(a, new_width):
    """Move ``a`` onto a lattice of width ``new_width``, rounding losses up."""
    if not new_width > 0.0:
        raise DomainError("new_width must be positive")
    if new_width == a.bucket_width:
        return a
    ratio = new_width / a.bucket_width
    idx = a.offset + np.arange(a.masses.size)
    if abs(ratio - round(ratio)) < 1e-9 and round(ratio) >= 1:
        r = int(round(ratio))
        new_idx = -((-idx) // r)  # exact integer ceiling
    else:
        new_idx = np.ceil(idx * a.bucket_width / new_width - 1e-12).astype(np.int64)
    if new_idx.size == 0:
        return DiscretePLD.from_indexed(new_width, 0, np.zeros(0), a.infinity_mass)
    lo = int(new_idx.min())
    dense = np.zeros(int(new_idx.max()) - lo + 1)
    np.add.at(dense, new_idx - lo, a.masses)
    return DiscretePLD.from_indexed(new_width, lo, dense, a.infinity_mass)


def total_variation(a):
    """Hockey-stick divergence at zero, the total-variation distance bound."""
    return profile_from_pld(a, 0.0)


__all__ = [
    "DiscretePLD",
    "compose",
    "self_compose",
    "truncate",
    "profile_from_pld",
    "rebucket",
    "total_variation",
]
