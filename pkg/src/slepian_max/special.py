"""Standard-normal primitives.

Everything here is vectorised over numpy arrays and returns a Python float
for scalar input.  The lower tail of the CDF is computed through the scaled
complementary error function so that products such as ``exp(z) * Phi(w)``
keep full relative accuracy deep in the tail.
"""

from __future__ import annotations

import numpy as np
from scipy import special as _sp

SQRT2 = np.sqrt(2.0)
SQRT2PI = np.sqrt(2.0 * np.pi)
INV_SQRT2PI = 1.0 / SQRT2PI
LOG_HALF = np.log(0.5)


def _out(a):
    return float(a) if np.ndim(a) == 0 else a


def _half_square(x):
    """Split ``x**2 / 2`` into ``hi + lo`` with ``hi`` exact.

    Rounding ``x`` to a multiple of 1/16 makes its square exactly
    representable, so ``exp(-hi) * exp(-lo)`` carries no argument error.
    """
    xs = np.trunc(x * 16.0) / 16.0
    return 0.5 * xs * xs, 0.5 * (x - xs) * (x + xs)


def std_normal_pdf(x):
    """Density of N(0, 1)."""
    x = np.asarray(x, dtype=float)
    hi, lo = _half_square(x)
    with np.errstate(under="ignore"):
        return _out(INV_SQRT2PI * np.exp(-hi) * np.exp(-lo))


def std_normal_cdf(x):
    """Distribution function of N(0, 1), accurate in the lower tail.

    For ``x < -1`` the value is ``erfcx(-x/sqrt2) * exp(-x**2/2) / 2`` with
    the exponential evaluated from an exact split of ``x**2/2``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    tail = x < -1.0
    body = ~tail
    out[body] = 0.5 * _sp.erfc(-x[body] / SQRT2)
    if tail.any():
        xt = x[tail]
        finite = np.isfinite(xt)
        vals = np.zeros_like(xt)
        xf = xt[finite]
        hi, lo = _half_square(xf)
        with np.errstate(under="ignore"):
            vals[finite] = 0.5 * _sp.erfcx(-xf / SQRT2) * np.exp(-hi) * np.exp(-lo)
        out[tail] = vals
    return _out(out)


def log_std_normal_cdf(x):
    """``log(Phi(x))`` without underflow for very negative ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    tail = x < -1.0
    out[~tail] = np.log(0.5 * _sp.erfc(-x[~tail] / SQRT2))
    xt = x[tail]
    out[tail] = LOG_HALF + np.log(_sp.erfcx(-xt / SQRT2)) - 0.5 * xt * xt
    return _out(out)


def exp_mul_cdf(z, w):
    """Return ``exp(z) * Phi(w)`` without intermediate overflow or underflow.

    Every ``exp * Phi`` product in the package goes through this function.
    When ``w < 0`` the tail of Phi is folded into the exponent via the scaled
    complementary error function, so e.g. ``exp(700) * Phi(-37)`` is finite.

    Raises
    ------
    OverflowError
        If the true product exceeds the largest double.
    """
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    z, w = np.broadcast_arrays(z, w)
    out = np.empty(z.shape)
    neg = w < 0.0
    pos = ~neg
    with np.errstate(over="ignore", under="ignore"):
        if neg.any():
            zn, wn = z[neg], w[neg]
            hi, lo = _half_square(wn)
            scale = 0.5 * _sp.erfcx(-wn / SQRT2)
            # exp(z - hi) alone may overflow while the product does not
            direct = np.exp(zn - hi) * np.exp(-lo) * scale
            bad = ~np.isfinite(direct)
            if bad.any():
                direct[bad] = np.exp(zn[bad] - hi[bad] - lo[bad] + np.log(scale[bad]))
            out[neg] = direct
        if pos.any():
            zp, wp = z[pos], w[pos]
            direct = np.exp(zp) * (0.5 * _sp.erfc(-wp / SQRT2))
            bad = ~np.isfinite(direct)
            if bad.any():
                direct[bad] = np.exp(zp[bad] + log_std_normal_cdf(wp[bad]))
            out[pos] = direct
    if np.isinf(out).any():
        raise OverflowError("exp(z) * Phi(w) exceeds the floating-point range")
    return _out(out)
