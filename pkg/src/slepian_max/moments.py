"""Moment generating function and low-order moments of m_s.

The density is a mixture of ``Phi(sqrt(sbar) m) phi(m)``, its ``m**2``
multiple and ``m phi(sqrt(sbar) m) phi(m)`` with weights ``lambda_``, ``mu``
and ``gamma``.  Each term is even or odd in ``m`` up to the ``Phi`` factor,
which is what makes the first two moments available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dist import running_max_pdf
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_1d
from .special import std_normal_cdf, std_normal_pdf
from .timewarp import warp


@dataclass(frozen=True)
class MomentConstants:
    lambda_: float
    mu: float
    gamma: float
    sbar: float


def moment_constants(s: float) -> MomentConstants:
    sbar = warp(s)
    return MomentConstants(
        lambda_=2.0 / (1.0 + sbar),
        mu=2.0 * sbar / (1.0 + sbar),
        gamma=2.0 * math.sqrt(sbar) / (1.0 + sbar),
        sbar=sbar,
    )


def mgf(theta: float, s: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """E[exp(theta * m_s)] = exp(theta**2/2) * G(theta), for |theta| <= 20.

    ``G`` is integrated against the shifted density ``phi(m - theta)`` on
    ``theta +/- trunc_radius``.
    """
    if abs(theta) > 20:
        raise ValueError("|theta| must not exceed 20")
    c = moment_constants(s)
    r = math.sqrt(c.sbar)

    def g(m):
        mix = (c.lambda_ + c.mu * m * m) * std_normal_cdf(r * m) + c.gamma * m * std_normal_pdf(r * m)
        return mix * std_normal_pdf(m - theta)

    half_sq = 0.5 * theta * theta
    # G shrinks like exp(-theta**2/2) for theta << 0; keep the absolute
    # tolerance meaningful after rescaling
    local = QuadratureSpec(
        abs_tol=spec.abs_tol * min(1.0, math.exp(-half_sq)),
        rel_tol=spec.rel_tol,
        max_depth=spec.max_depth,
        trunc_radius=spec.trunc_radius,
    )
    R = spec.trunc_radius
    G = integrate_1d(g, theta - R, theta + R, local).value
    return math.exp(half_sq) * G


def mean(s: float) -> float:
    """E[m_s] = 4 sqrt(sbar) / (sqrt(2 pi) sqrt(1 + sbar))."""
    sbar = warp(s)
    return 4.0 * math.sqrt(sbar) / (math.sqrt(2.0 * math.pi) * math.sqrt(1.0 + sbar))


def second_moment(s: float) -> float:
    """E[m_s**2] = (1 + 3 sbar) / (1 + sbar).

    Follows from the mixture weights and the Gaussian integrals
    ``int m**2 Phi(r m) phi(m) dm = 1/2``, ``int m**4 Phi(r m) phi(m) dm = 3/2``.
    """
    sbar = warp(s)
    return (1.0 + 3.0 * sbar) / (1.0 + sbar)


def second_moment_printed(s: float) -> float:
    """The published constant (2 + 3 sbar) / (1 + sbar), kept for comparison only.

    It gives 2 at s = 0 although m_0 = S(0) is standard normal.
    """
    sbar = warp(s)
    return (2.0 + 3.0 * sbar) / (1.0 + sbar)


def variance(s: float) -> float:
    return max(second_moment(s) - mean(s) ** 2, 0.0)


def moment_k(k: int, s: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """E[m_s**k] by quadrature of ``m**k p(m)`` over the real line."""
    if k < 1 or int(k) != k:
        raise ValueError("k must be a positive integer")
    if not (0.0 <= s <= 1.0):
        raise ValueError(f"s must lie in [0, 1], got {s!r}")
    k = int(k)
    if s == 0.0:
        dens = std_normal_pdf
    else:
        def dens(m):
            return running_max_pdf(m, s)
    R = spec.trunc_radius + 2.0 * math.sqrt(k)
    return integrate_1d(lambda m: m**k * dens(m), -R, R, spec, points=[0.0]).value
