import math

import numpy as np
import pytest

from slepian_max.bachelier import LinearBoundary, TwoPieceBoundary, twopiece_noncross
from slepian_max.dist import global_max_cdf, running_max_cdf
from slepian_max.moments import mean
from slepian_max.montecarlo import (
    McEstimate,
    McSpec,
    ResourceLimitError,
    default_workers,
    empirical_cdf,
    empirical_joint_cdf,
    sample_moment,
    simulate_bridge_noncross,
    simulate_running_max,
    simulate_twopiece_noncross,
)


@pytest.mark.parametrize(
    "kw", [dict(paths=0), dict(grid_step=0.0), dict(grid_step=0.02), dict(grid_step=0.003), dict(workers=0),
           dict(master_seed=-1)]
)
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        McSpec(**kw)


def test_default_workers_cap(monkeypatch):
    monkeypatch.setenv("SLEPIAN_MAX_THREADS", "1")
    assert default_workers() == 1


def test_off_grid_horizon():
    with pytest.raises(ValueError):
        simulate_running_max(McSpec(paths=10, grid_step=1e-2), [0.005], 0.5)
    with pytest.raises(ValueError):
        simulate_running_max(McSpec(paths=10, grid_step=1e-2), [0.6], 0.5)


def test_work_budget():
    with pytest.raises(ResourceLimitError):
        simulate_running_max(McSpec(paths=1000, grid_step=1e-4, max_work=1e6), [1.0], 1.0)


def test_start_value_is_standard_normal():
    ps = simulate_running_max(McSpec(paths=100_000, master_seed=1), [0.0], 0.0)
    est = empirical_cdf(ps.max_at(0.0), 0.0)
    assert abs(est.estimate - 0.5) <= 3 * est.std_error


def test_global_max_at_zero(small_paths):
    est = empirical_cdf(small_paths.max_at(1.0), 0.0)
    assert abs(est.estimate - global_max_cdf(0.0)) <= max(3 * est.std_error, 5e-3)


def test_covariance(small_paths):
    a, b = small_paths.probe(0.2), small_paths.probe(0.7)
    prod = (a - a.mean()) * (b - b.mean())
    se = prod.std(ddof=1) / math.sqrt(prod.size)
    assert abs(prod.mean() - 0.5) <= 4 * se


@pytest.mark.parametrize("u", [0.0, 0.5, 1.0])
def test_stationarity(small_paths, u):
    x = small_paths.probe(u)
    n = x.size
    assert abs(x.mean()) <= 4 * x.std(ddof=1) / math.sqrt(n)
    sq = (x - x.mean()) ** 2
    assert abs(sq.mean() - 1.0) <= 4 * sq.std(ddof=1) / math.sqrt(n)


def test_nesting_and_continuous_dominates(small_paths):
    g = small_paths.grid_max
    c = small_paths.continuous_max
    assert np.all(np.diff(g, axis=1) >= 0)
    assert np.all(c >= g)
    m0, M1 = small_paths.pair(0.0, 1.0)
    assert np.all(m0 <= M1)
    with pytest.raises(ValueError):
        small_paths.pair(1.0, 0.5)
    with pytest.raises(KeyError):
        small_paths.max_at(0.3)


def test_start_max_has_no_bridge_excess(small_paths):
    assert np.array_equal(small_paths.max_at(0.0), small_paths.max_at(0.0, continuous=True))
    assert np.array_equal(small_paths.max_at(0.0), small_paths.probe(0.0))


def test_worker_count_does_not_change_results():
    base = dict(paths=3001, grid_step=1e-3, master_seed=2024)
    runs = [simulate_running_max(McSpec(workers=w, **base), [0.0, 0.3, 1.0], 1.0, continuous=True)
            for w in (1, 2, 5)]
    for r in runs[1:]:
        assert np.array_equal(r.grid_max, runs[0].grid_max)
        assert np.array_equal(r.continuous_max, runs[0].continuous_max)


def test_grid_values_do_not_depend_on_continuous_flag():
    spec = McSpec(paths=500, grid_step=1e-3, master_seed=9)
    a = simulate_running_max(spec, [0.5, 1.0], 1.0)
    b = simulate_running_max(spec, [0.5, 1.0], 1.0, continuous=True)
    assert np.array_equal(a.grid_max, b.grid_max)


def test_grid_refinement_bias_has_the_right_sign():
    level, s = 1.0, 1.0
    coarse = empirical_cdf(simulate_running_max(McSpec(paths=20_000, grid_step=1e-2, master_seed=4), [s], s)
                           .max_at(s), level)
    fine = empirical_cdf(simulate_running_max(McSpec(paths=20_000, grid_step=5e-3, master_seed=4), [s], s)
                         .max_at(s), level)
    combined = math.hypot(coarse.std_error, fine.std_error)
    assert coarse.estimate >= fine.estimate - 3 * combined


def test_continuous_max_is_exact_on_a_coarse_grid():
    ps = simulate_running_max(McSpec(paths=100_000, grid_step=1e-2, master_seed=8), [0.5, 1.0], 1.0,
                              continuous=True)
    for s in (0.5, 1.0):
        est = sample_moment(ps.max_at(s, continuous=True), 1)
        assert abs(est.estimate - mean(s)) <= 4 * est.std_error
        cdf = empirical_cdf(ps.max_at(s, continuous=True), 1.0)
        assert abs(cdf.estimate - running_max_cdf(1.0, s)) <= 4 * cdf.std_error


def test_empirical_cdf_examples():
    est = empirical_cdf([1, 2, 3], 2)
    assert est == McEstimate(2 / 3, math.sqrt((2 / 3) * (1 / 3) / 3), 3)
    assert empirical_cdf([1, 2, 3], -math.inf).estimate == 0.0
    assert empirical_cdf([1, 2, 3], math.inf).estimate == 1.0
    with pytest.raises(ValueError):
        empirical_cdf([], 0.0)


def test_empirical_joint_cdf_examples(small_paths):
    m_s, M_t = small_paths.pair(0.25, 1.0)
    assert empirical_joint_cdf(m_s, M_t, math.inf, math.inf).estimate == 1.0
    for c in (0.0, 1.0):
        assert empirical_joint_cdf(m_s, M_t, c, c) == empirical_cdf(M_t, c)
    with pytest.raises(ValueError):
        empirical_joint_cdf([], [], 0, 0)
    with pytest.raises(ValueError):
        empirical_joint_cdf([1.0], [1.0, 2.0], 0, 0)


def test_sample_moment_needs_two():
    with pytest.raises(ValueError):
        sample_moment([1.0], 1)


def test_bridge_simulation():
    spec = McSpec(paths=20_000, grid_step=1e-4, master_seed=5)
    est = simulate_bridge_noncross(0.0, 1.0, 1.0, 0.0, spec)
    assert abs(est.estimate - (1 - math.exp(-2))) <= max(3 * est.std_error, 1e-2)
    assert simulate_bridge_noncross(0.0, -0.1, 1.0, -1.0, spec).estimate == 0.0
    with pytest.raises(ValueError):
        simulate_bridge_noncross(0.0, 1.0, 1.0, 1.5, spec)


def test_bridge_touching_endpoint_vanishes_as_grid_refines():
    vals = []
    for h in (1e-2, 1e-3, 1e-4):
        est = simulate_bridge_noncross(0.0, 1.0, 1.0, 1.0, McSpec(paths=5_000, grid_step=h, master_seed=6))
        assert est.estimate <= 0.5 + 3 * est.std_error
        vals.append(est.estimate)
    assert vals[0] > vals[1] > vals[2]


def test_twopiece_simulation_is_grid_free():
    bd = TwoPieceBoundary(LinearBoundary(0.5, 1.0), LinearBoundary(1.2, -0.5), 0.4, 1.0)
    exact = twopiece_noncross(bd)
    for h in (1e-2, 2e-3):
        est = simulate_twopiece_noncross(bd, McSpec(paths=100_000, grid_step=h, master_seed=12))
        assert abs(est.estimate - exact) <= 4 * est.std_error


def test_bridge_monitoring_bias_shrinks_like_sqrt_step():
    # intercept 0.3 against slope 2: many crossings fall between grid nodes,
    # so the grid-checked estimate sits about 1.25 sqrt(h) above the exact value
    from slepian_max.bachelier import bridge_noncross

    exact = bridge_noncross(2.0, 0.3, 0.25, 0.4)
    bias = []
    for h in (1e-3, 1e-4):
        est = simulate_bridge_noncross(2.0, 0.3, 0.25, 0.4, McSpec(paths=100_000, grid_step=h, master_seed=20170101))
        bias.append(est.estimate - exact)
    assert bias[0] > bias[1] > 0
    assert 2.5 <= bias[0] / bias[1] <= 4.0
