"""Time change s -> s/(2-s) and the constants of the nested-maximum formula.

Conditioned on S(0) = x, the Slepian path on [0, 1] has the law of
``(2-u) B(u/(2-u)) + (1-u) x``; this module holds the deterministic
bookkeeping of that change of clock.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def _check_unit(name: str, v: float) -> None:
    if not (0.0 <= v <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {v!r}")


def warp(s: float) -> float:
    """Map s in [0, 1] to s/(2-s), also in [0, 1]."""
    _check_unit("s", s)
    return s / (2.0 - s)


def unwarp(x: float) -> float:
    """Inverse of :func:`warp`."""
    _check_unit("x", x)
    return 2.0 * x / (1.0 + x)


@dataclass(frozen=True)
class WarpedTime:
    s: float
    sbar: float

    @classmethod
    def of(cls, s: float) -> "WarpedTime":
        return cls(s, warp(s))


@dataclass(frozen=True)
class Theorem2Params:
    """Derived constants for the joint law of (m_s, M_t).

    ``p``, ``q`` and ``eta`` parametrise the boundary values at the warped
    breakpoint: for a starting value ``x`` the first boundary segment ends at
    ``q - p*x`` and the second passes through ``eta - p*x`` there.
    """

    p: float
    q: float
    eta: float
    delta: float
    sbar: float
    T: float


def theorem2_params(m: float, M: float, s: float, t: float) -> Theorem2Params:
    if not (0.0 < s <= t <= 1.0):
        raise ValueError(f"need 0 < s <= t <= 1, got s={s!r}, t={t!r}")
    if m > M:
        raise ValueError(f"need m <= M, got m={m!r}, M={M!r}")
    sbar = warp(s)
    T = warp(t)
    half = 0.5 * (sbar + 1.0)
    return Theorem2Params(
        p=0.5 * (1.0 - sbar),
        q=half * m,
        eta=half * M,
        delta=math.sqrt(max(T - sbar, 0.0)),
        sbar=sbar,
        T=T,
    )
