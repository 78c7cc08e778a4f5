"""Exact law of the running maximum of the Slepian process S(t) = B(t+1) - B(t).

The analytic side (``dist``, ``moments``, ``bachelier``) is checked against an
independent path simulator (``montecarlo``) by ``validate``.
"""

from .bachelier import (
    LinearBoundary,
    TwoPieceBoundary,
    bl_finite,
    bl_infinite,
    bridge_noncross,
    segment_noncross,
    twopiece_noncross,
)
from .dist import (
    global_max_cdf,
    joint_cdf,
    prob_nonpositive,
    running_max_cdf,
    running_max_pdf,
)
from .moments import mean, mgf, moment_k, second_moment, second_moment_printed, variance
from .quadrature import QuadratureError, QuadratureSpec
from .special import exp_mul_cdf, std_normal_cdf, std_normal_pdf
from .timewarp import theorem2_params, unwarp, warp

__version__ = "0.1.0"

__all__ = [
    "LinearBoundary",
    "QuadratureError",
    "QuadratureSpec",
    "TwoPieceBoundary",
    "bl_finite",
    "bl_infinite",
    "bridge_noncross",
    "exp_mul_cdf",
    "global_max_cdf",
    "joint_cdf",
    "mean",
    "mgf",
    "moment_k",
    "prob_nonpositive",
    "running_max_cdf",
    "running_max_pdf",
    "second_moment",
    "second_moment_printed",
    "segment_noncross",
    "std_normal_cdf",
    "std_normal_pdf",
    "theorem2_params",
    "twopiece_noncross",
    "unwarp",
    "variance",
    "warp",
]
