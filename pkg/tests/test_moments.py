import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slepian_max.dist import running_max_pdf
from slepian_max.moments import (
    mean,
    mgf,
    moment_constants,
    moment_k,
    second_moment,
    second_moment_printed,
    variance,
)
from slepian_max.montecarlo import sample_moment
from slepian_max.quadrature import integrate_1d
from slepian_max.special import std_normal_cdf, std_normal_pdf
from slepian_max.timewarp import warp


@given(st.floats(0, 1))
def test_constants(s):
    c = moment_constants(s)
    assert c.lambda_ * (1 + c.sbar) == pytest.approx(2.0)
    assert c.mu * (1 + c.sbar) == pytest.approx(2 * c.sbar, abs=1e-15)
    assert c.gamma * (1 + c.sbar) == pytest.approx(2 * math.sqrt(c.sbar), abs=1e-15)


@pytest.mark.parametrize("s", [0.0, 1e-6, 0.1, 0.5, 1.0])
def test_mgf_at_zero(s):
    assert mgf(0.0, s) == pytest.approx(1.0, abs=1e-9)


def test_mgf_matches_definition():
    direct = integrate_1d(lambda m: np.exp(0.5 * m) * running_max_pdf(m, 1.0), -14, 14).value
    assert mgf(0.5, 1.0) == pytest.approx(direct, abs=1e-8)


def test_mgf_log_convex():
    vals = [math.log(mgf(th, 0.5)) for th in (0.5, 1.0, 1.5)]
    assert mgf(1.0, 0.5) > 0
    assert vals[1] <= 0.5 * (vals[0] + vals[2])


def test_mgf_domain():
    with pytest.raises(ValueError):
        mgf(21.0, 0.5)


def test_mgf_extreme_theta():
    # s -> 0 law is standard normal
    assert mgf(-20.0, 0.0) == pytest.approx(math.exp(200), rel=1e-8)
    assert mgf(20.0, 0.0) == pytest.approx(math.exp(200), rel=1e-8)


@pytest.mark.parametrize("s", [0.1, 0.5, 1.0])
def test_mgf_second_difference(s):
    h = 1e-3
    d2 = (mgf(h, s) - 2 * mgf(0.0, s) + mgf(-h, s)) / h**2
    assert d2 == pytest.approx(second_moment(s), abs=1e-4)


def test_mean_examples():
    assert mean(0.0) == 0.0
    assert mean(1.0) == pytest.approx(2 / math.sqrt(math.pi), abs=1e-15)
    assert mean(0.5) == pytest.approx(moment_k(1, 0.5), abs=1e-9)


def test_second_moment_examples():
    assert second_moment(0.0) == 1.0
    assert second_moment_printed(0.0) == 2.0
    assert second_moment(1.0) == 2.0
    assert second_moment(0.5) == pytest.approx(1.5, abs=1e-15)
    assert moment_k(2, 0.5) == pytest.approx(1.5, abs=1e-8)
    assert moment_k(2, 1.0) == pytest.approx(2.0, abs=1e-8)


@pytest.mark.parametrize("s", [0.1, 0.3, 0.7, 1.0])
def test_printed_second_moment_is_off_by_one_over_one_plus_sbar(s):
    gap = second_moment_printed(s) - moment_k(2, s)
    assert gap == pytest.approx(1 / (1 + warp(s)), abs=1e-8)
    assert gap >= 0.4


def test_variance_examples():
    assert variance(0.0) == 1.0
    assert variance(1.0) == pytest.approx(2 - 4 / math.pi, abs=1e-15)
    quad = moment_k(2, 0.3) - moment_k(1, 0.3) ** 2
    assert variance(0.3) == pytest.approx(quad, abs=1e-8)


def test_moment_k_examples():
    assert moment_k(4, 1e-8) == pytest.approx(3.0, abs=1e-6)
    assert moment_k(3, 0.0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        moment_k(0, 0.5)
    with pytest.raises(ValueError):
        moment_k(2, 1.5)


def test_mean_nondecreasing_and_variance_nonincreasing():
    s = np.linspace(0, 1, 50)
    mu = np.array([mean(x) for x in s])
    var = np.array([variance(x) for x in s])
    assert np.all(np.diff(mu) > 0)
    # the spread shrinks as the window grows: 1 at s = 0, 2 - 4/pi at s = 1
    assert np.all(np.diff(var) < 0)


@pytest.mark.parametrize("sbar", [0.2, 0.5, 1.0])
def test_intermediate_integrals(sbar):
    r = math.sqrt(sbar)

    def moment_against(k):
        return integrate_1d(lambda m: m**k * std_normal_cdf(r * m) * std_normal_pdf(m), -14, 14,
                            points=[0.0]).value

    assert moment_against(2) == pytest.approx(0.5, abs=1e-10)
    assert moment_against(4) == pytest.approx(1.5, abs=1e-10)
    a1 = r / (math.sqrt(2 * math.pi) * math.sqrt(1 + sbar))
    assert moment_against(1) == pytest.approx(a1, abs=1e-10)
    # the third-moment integral, with the horizon symbol read as sbar
    a2 = (2 * sbar**1.5 + 3 * r) / (math.sqrt(2 * math.pi) * (1 + sbar) ** 1.5)
    assert moment_against(3) == pytest.approx(a2, abs=1e-10)


@pytest.mark.parametrize("s", [0.25, 0.5, 1.0])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_moment_k_against_simulation(small_paths, s, k):
    est = sample_moment(small_paths.max_at(s, continuous=True), k)
    assert abs(moment_k(k, s) - est.estimate) <= 4 * est.std_error
