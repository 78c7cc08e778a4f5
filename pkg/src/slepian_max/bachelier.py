"""Non-crossing probabilities of Brownian motion below linear boundaries.

Conventions follow the functions rather than a single letter scheme:
``bl_finite(a, b, T)`` takes the boundary ``a + b*u`` (intercept first),
while the bridge and segment kernels take ``slope*u + intercept`` with the
slope first, matching the two-piece boundary they come from.

All functions broadcast over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_1d, graded_points
from .special import SQRT2PI, exp_mul_cdf, std_normal_cdf


def _out(a):
    return float(a) if np.ndim(a) == 0 else a


@dataclass(frozen=True)
class LinearBoundary:
    intercept: float
    slope: float

    def at(self, u):
        return self.intercept + self.slope * u


@dataclass(frozen=True)
class TwoPieceBoundary:
    """``first`` on ``[0, breakpoint]``, ``second`` on ``[breakpoint, horizon]``.

    The boundary may jump at the breakpoint.
    """

    first: LinearBoundary
    second: LinearBoundary
    breakpoint: float
    horizon: float

    def __post_init__(self):
        if not (0.0 < self.breakpoint <= self.horizon):
            raise ValueError("need 0 < breakpoint <= horizon")


def bl_finite(a, b, T):
    """P{B(u) <= a + b*u for all u in [0, T]}.

    Zero when the intercept ``a`` is not positive.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(T <= 0):
        raise ValueError("horizon T must be positive")
    a, b, T = np.broadcast_arrays(a, b, T)
    out = np.zeros(a.shape)
    pos = a > 0
    if pos.any():
        ap, bp, Tp = a[pos], b[pos], T[pos]
        rt = np.sqrt(Tp)
        val = std_normal_cdf(bp * rt + ap / rt) - exp_mul_cdf(-2.0 * ap * bp, bp * rt - ap / rt)
        # cancellation near a -> 0+ leaves tiny negative values
        out[pos] = np.clip(val, 0.0, 1.0)
    return _out(out)


def bl_infinite(a, b):
    """P{B(u) <= a + b*u for all u >= 0} = 1 - exp(-2ab), for slope b > 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(b <= 0):
        raise ValueError("slope b must be positive for an infinite horizon")
    with np.errstate(under="ignore"):
        val = np.where(a > 0, -np.expm1(-2.0 * np.maximum(a, 0.0) * b), 0.0)
    return _out(np.clip(val, 0.0, 1.0))


def bridge_noncross(a, b, sbar, y):
    """P{B(u) <= a*u + b on [0, sbar] | B(sbar) = y}  (slope ``a``, intercept ``b``).

    Equals ``1 - exp(-2 b (b + a*sbar - y) / sbar)``; zero when the path
    starts on or above the boundary (``b <= 0``).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    sbar = np.asarray(sbar, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(sbar <= 0):
        raise ValueError("sbar must be positive")
    gap = b + a * sbar - y
    if np.any(gap < 0):
        raise ValueError("bridge endpoint y lies above the boundary")
    with np.errstate(under="ignore"):
        val = -np.expm1(-2.0 * b * gap / sbar)
    return _out(np.where(b > 0, np.clip(val, 0.0, 1.0), 0.0))


def segment_noncross(c, d, sbar, T, y):
    """P{B(u) <= c*u + d on [sbar, T] | B(sbar) = y}.

    Restarting the motion at ``(sbar, y)`` turns this into
    ``bl_finite(d + c*sbar - y, c, T - sbar)``.
    """
    sbar = np.asarray(sbar, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(T <= sbar):
        raise ValueError("need T > sbar")
    c = np.asarray(c, dtype=float)
    d = np.asarray(d, dtype=float)
    y = np.asarray(y, dtype=float)
    return bl_finite(d + c * sbar - y, c, T - sbar)


def _twopiece_density(a, b, c, d, sbar, T, y):
    """Integrand over the bridge endpoint ``y``."""
    dens = np.exp(-0.5 * y * y / sbar) / (SQRT2PI * np.sqrt(sbar))
    first = bridge_noncross(a, b, sbar, y)
    if T > sbar:
        second = segment_noncross(c, d, sbar, T, y)
    else:
        second = 1.0
    return dens * first * second


def twopiece_noncross(boundary: TwoPieceBoundary, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """P{B stays below a two-piece linear boundary on [0, horizon]}.

    Conditions on ``B(breakpoint) = y``: the first factor is the bridge
    non-crossing probability, the second the restarted motion below the second
    segment.  The lower segment must end no higher than the upper one starts,
    so that the ``y`` range is cut by the first piece alone.
    """
    a, b = boundary.first.slope, boundary.first.intercept
    c, d = boundary.second.slope, boundary.second.intercept
    sbar, T = boundary.breakpoint, boundary.horizon
    end_first = a * sbar + b
    if end_first > c * sbar + d:
        raise ValueError("first segment must end at or below the start of the second")
    if b <= 0:
        return 0.0
    sig = np.sqrt(sbar)
    hi = min(end_first, spec.trunc_radius * sig)
    lo = min(hi, 0.0) - spec.trunc_radius * sig
    if hi <= lo:
        return 0.0
    res = integrate_1d(
        lambda y: _twopiece_density(a, b, c, d, sbar, T, y), lo, hi, spec, points=graded_points(lo, hi)
    )
    return min(max(res.value, 0.0), 1.0)
