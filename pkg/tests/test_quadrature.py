import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial.legendre import leggauss

from slepian_max.bachelier import bl_finite
from slepian_max.quadrature import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    QuadratureError,
    QuadratureSpec,
    graded_points,
    integrate_1d,
    integrate_2d_nested,
    integrate_lower_tail,
)
from slepian_max.special import std_normal_pdf


def test_rule_tables():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    x7, w7 = leggauss(7)
    gauss_nodes = NODES[GAUSS_WEIGHTS != 0]
    assert np.allclose(gauss_nodes, x7, atol=1e-15)
    assert np.allclose(GAUSS_WEIGHTS[GAUSS_WEIGHTS != 0], w7, atol=1e-15)


def test_gaussian_mass_within_8_sigma():
    r = integrate_1d(std_normal_pdf, -8.0, 8.0)
    assert r.value == pytest.approx(math.erf(8 / math.sqrt(2)), abs=1e-14)
    assert r.error_estimate >= 0 and r.evaluations >= 15


def test_constant_and_square():
    assert integrate_1d(lambda x: np.ones_like(x), 0.0, 3.0).value == pytest.approx(3.0, abs=1e-14)
    assert integrate_1d(lambda x: x * x, 0.0, 1.0).value == pytest.approx(1 / 3, abs=1e-15)


@pytest.mark.parametrize("k", range(0, 24))
def test_polynomial_exactness(k):
    # a single K15 panel integrates degree <= 22 exactly
    exact = (2.0 ** (k + 1) - (-1.0) ** (k + 1)) / (k + 1)
    got = integrate_1d(lambda x: x**k, -1.0, 2.0).value
    assert abs(got - exact) <= 1e-14 * max(1.0, abs(exact))


def test_lower_tail_examples():
    assert integrate_lower_tail(std_normal_pdf, 0.0).value == pytest.approx(0.5, abs=1e-15)
    assert integrate_lower_tail(std_normal_pdf, 12.0).value == pytest.approx(1.0, abs=1e-12)
    r = integrate_lower_tail(lambda x: x * std_normal_pdf(x), 0.0)
    assert r.value == pytest.approx(-std_normal_pdf(0.0), abs=1e-13)


def test_lower_tail_scale():
    sd = 0.05
    r = integrate_lower_tail(lambda y: std_normal_pdf(y / sd) / sd, 0.0, scale=sd)
    assert r.value == pytest.approx(0.5, abs=1e-13)


def test_nested_examples():
    def prod(x, y):
        return std_normal_pdf(x) * std_normal_pdf(y)

    assert integrate_2d_nested(prod, 0.0, lambda x: 0.0).value == pytest.approx(0.25, abs=1e-12)
    assert integrate_2d_nested(prod, 12.0, lambda x: x).value == pytest.approx(0.5, abs=1e-12)


def test_nested_box_calibration():
    # indicator of a dyadic box; its edges fall on panel boundaries of the
    # graded grid, so the rule integrates it exactly
    def box(x, y):
        inside = (-0.75 <= x <= 0.0) & (y >= -0.75)
        return np.where(inside, 1.0, 0.0) * np.ones_like(y)

    r = integrate_2d_nested(box, 0.0, lambda x: 0.0, outer_scale=0.0625, inner_scale=0.0625)
    assert r.value == pytest.approx(0.5625, abs=1e-12)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_nested_separable_is_product(a, b):
    def f(x, y):
        return std_normal_pdf(x) * std_normal_pdf(y) * (1 + 0.5 * np.cos(y))

    two = integrate_2d_nested(f, a, lambda x: b)
    px = integrate_lower_tail(std_normal_pdf, a).value
    py = integrate_lower_tail(lambda y: std_normal_pdf(y) * (1 + 0.5 * np.cos(y)), b).value
    assert two.value == pytest.approx(px * py, abs=2e-10)


def test_refinement_never_increases_error_estimate():
    def f(x):
        return std_normal_pdf(x) * bl_finite(0.5 * (1.0 - x), 0.5 * (1.0 + x), 0.4)

    prev = math.inf
    for k in range(14):
        r = integrate_lower_tail(f, 1.0, QuadratureSpec(abs_tol=1e-6 / 2**k))
        assert r.error_estimate <= prev
        prev = r.error_estimate


def test_deterministic():
    f = lambda x: np.exp(-x * x) * np.cos(3 * x)  # noqa: E731
    r1 = integrate_1d(f, -4, 4)
    r2 = integrate_1d(f, -4, 4)
    assert r1 == r2


def test_non_convergence_reports_interval():
    with pytest.raises(QuadratureError) as info:
        integrate_1d(lambda x: 1 / np.sqrt(np.abs(x - 0.3) + 1e-300), 0.0, 1.0, QuadratureSpec(max_depth=3))
    lo, hi = info.value.interval
    assert lo <= 0.3 <= hi
    assert "worst subinterval" in str(info.value)


def test_non_finite_integrand():
    with pytest.raises(QuadratureError):
        integrate_1d(lambda x: np.where(x > 0.5, np.nan, 1.0), 0.0, 1.0)


@pytest.mark.parametrize(
    "kw", [dict(abs_tol=0.0), dict(rel_tol=-1.0), dict(max_depth=0), dict(trunc_radius=7.0)]
)
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        QuadratureSpec(**kw)


def test_bad_limits():
    with pytest.raises(ValueError):
        integrate_1d(np.sin, 1.0, 1.0)
    with pytest.raises(ValueError):
        integrate_1d(np.sin, 0.0, math.inf)
    with pytest.raises(ValueError):
        integrate_lower_tail(std_normal_pdf, math.inf)


def test_graded_points():
    pts = graded_points(-1.0, 1.0, levels=4)
    assert pts == [0.5, 0.875, 0.96875, 0.9921875]
