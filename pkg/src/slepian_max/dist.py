"""Distribution of the running maximum of S(t) = B(t+1) - B(t).

``m_s = max_{0<=u<=s} S(u)``.  Conditioning on ``S(0) = x`` turns the event
``{m_s <= m}`` into a Brownian motion staying below the line
``(m-x)/2 + u (m+x)/2`` up to the warped time ``s/(2-s)``; the marginal CDF
is the Gaussian average of that probability over ``x <= m``.  The joint law
of ``(m_s, M_t)`` adds a second, higher line on ``[warp(s), warp(t)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bachelier import bl_finite
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_2d_nested, integrate_lower_tail
from .special import SQRT2PI, exp_mul_cdf, std_normal_cdf, std_normal_pdf
from .timewarp import theorem2_params, warp

DEGENERATE_GAP = 1e-9


@dataclass(frozen=True)
class MarginalQuery:
    m: float
    s: float

    def __post_init__(self):
        if not (0.0 <= self.s <= 1.0):
            raise ValueError(f"s must lie in [0, 1], got {self.s!r}")


@dataclass(frozen=True)
class JointQuery:
    m: float
    M: float
    s: float
    t: float

    def __post_init__(self):
        if not (0.0 <= self.s <= self.t <= 1.0):
            raise ValueError(f"need 0 <= s <= t <= 1, got s={self.s!r}, t={self.t!r}")


def _clamp(p: float) -> float:
    return min(max(p, 0.0), 1.0)


def _start_averaged(level: float, outer_hi: float, horizon: float, spec: QuadratureSpec) -> float:
    """Integral of phi(x) * P{B(u) <= (level-x)/2 + u (level+x)/2 on [0, horizon]} over x <= outer_hi."""

    def integrand(x):
        return std_normal_pdf(x) * bl_finite(0.5 * (level - x), 0.5 * (level + x), horizon)

    return integrate_lower_tail(integrand, outer_hi, spec).value


def running_max_cdf(m: float, s: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """P(m_s <= m)."""
    MarginalQuery(m, s)
    if s == 0.0:
        return std_normal_cdf(m)
    return _clamp(_start_averaged(m, m, warp(s), spec))


def global_max_cdf(M: float) -> float:
    """P(max over [0, 1] of S <= M), in closed form."""
    Phi = std_normal_cdf(M)
    phi = std_normal_pdf(M)
    return _clamp(Phi * Phi - M * phi * Phi - phi * phi)


def prob_nonpositive(s: float) -> float:
    """P(m_s <= 0) in closed form.

    The angle is taken from ``atan2`` so that it lies in (0, pi]; the
    one-argument arctangent of ``2 sqrt(sbar) / (sbar - 1)`` is negative for
    ``sbar < 1``.
    """
    if not (0.0 < s <= 1.0):
        raise ValueError(f"s must lie in (0, 1], got {s!r}")
    sbar = warp(s)
    r = math.sqrt(sbar)
    return math.atan2(2.0 * r, sbar - 1.0) / (2.0 * math.pi) - r / ((sbar + 1.0) * math.pi)


def running_max_pdf(m, s: float):
    """Density of m_s; vectorised over ``m``.

    At ``s = 0`` the maximum is S(0) itself; use :func:`std_normal_pdf`.
    """
    if not (0.0 < s <= 1.0):
        raise ValueError(f"s must lie in (0, 1], got {s!r}")
    sbar = warp(s)
    r = math.sqrt(sbar)
    m = np.asarray(m, dtype=float)
    base = std_normal_cdf(r * m) * std_normal_pdf(m)
    out = (2.0 + 2.0 * sbar * m * m) / (1.0 + sbar) * base
    out = out + m * (2.0 * r / (1.0 + sbar)) * std_normal_pdf(r * m) * std_normal_pdf(m)
    return float(out) if out.ndim == 0 else out


def _joint_from_start(m: float, M: float, t: float, spec: QuadratureSpec) -> float:
    if t == 0.0:
        return std_normal_cdf(min(m, M))
    return _clamp(_start_averaged(M, min(m, M), warp(t), spec))


def joint_cdf(m: float, M: float, s: float, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """P(m_s <= m, M_t <= M) for 0 <= s <= t <= 1.

    For ``m > M`` the first constraint is implied by the second, so the level
    ``m`` is clamped to ``M``.  When ``t - s`` is below 1e-9 the second
    segment collapses and the result is the marginal CDF of ``m_t``.
    """
    JointQuery(m, M, s, t)
    lvl = min(m, M)
    if s == 0.0:
        return _joint_from_start(lvl, M, t, spec)
    if t - s <= DEGENERATE_GAP:
        return running_max_cdf(lvl, t, spec)

    par = theorem2_params(lvl, M, s, t)
    p, q, eta, delta, sbar = par.p, par.q, par.eta, par.delta, par.sbar
    sig = math.sqrt(sbar)
    cap = spec.trunc_radius * sig
    norm = 1.0 / (2.0 * math.pi * sig)

    def integrand(x, y):
        end = q - p * x  # first boundary piece at the breakpoint
        gap = eta - p * x - y  # second piece above the breakpoint value y
        first = -np.expm1(-(lvl - x) * (end - y) / sbar)
        half = 0.5 * (M + x)
        second = std_normal_cdf(gap / delta + half * delta) - exp_mul_cdf(
            -(M + x) * gap, half * delta - gap / delta
        )
        return norm * np.exp(-0.5 * y * y / sbar - 0.5 * x * x) * first * second

    res = integrate_2d_nested(
        integrand,
        lvl,
        lambda x: min(q - p * x, cap),
        spec,
        outer_scale=1.0,
        inner_scale=sig,
    )
    return _clamp(res.value)
