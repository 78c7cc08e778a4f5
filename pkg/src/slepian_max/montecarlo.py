"""Path-simulation oracle for the running maximum of S(t) = B(t+1) - B(t).

Paths are built exactly as the process is defined: Brownian increments of
variance ``grid_step`` on ``[0, t_max]`` and on ``[1, 1 + t_max]`` (the stretch
``[t_max, 1]`` enters only through its total increment, one Gaussian draw),
and ``S`` is differenced at lag one on the grid.  No analytic result of this
package is used here.

Two maxima are recorded per horizon:

* the grid maximum, which under-counts the true maximum by O(sqrt(grid_step));
* optionally an exact continuous maximum.  Given the grid, ``S`` between two
  consecutive nodes is a Brownian bridge with variance rate 2, independent
  across intervals as long as ``t_max <= 1``, so its maximum can be sampled
  exactly from one exponential variate per interval.  The variate of interval
  ``j`` is addressed directly by its counter and only drawn when the bridge
  could exceed the running maximum.

Randomness is per path (see :mod:`slepian_max.rng`), so estimates are
bit-identical for any number of workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numba as nb
import numpy as np

from .bachelier import TwoPieceBoundary
from .rng import MAX_EXPONENTIAL, derive_key, exponential_at, next_normal, stream_start

PATH_SALT = 1
BRIDGE_MAX_SALT = 2
BRIDGE_SALT = 3
BOUNDARY_SALT = 4
BOUNDARY_CROSS_SALT = 5


class ResourceLimitError(RuntimeError):
    """Requested simulation exceeds the configured work budget."""


def default_workers() -> int:
    n = os.cpu_count() or 1
    cap = os.environ.get("SLEPIAN_MAX_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return n


@dataclass(frozen=True)
class McSpec:
    paths: int = 10**6
    grid_step: float = 1e-4
    master_seed: int = 20170101
    workers: int = field(default_factory=default_workers)
    # upper bound on paths * grid points
    max_work: float = 5e10

    def __post_init__(self):
        if self.paths < 1:
            raise ValueError("paths must be at least 1")
        if not (0.0 < self.grid_step <= 1e-2):
            raise ValueError("grid_step must lie in (0, 1e-2]")
        n = round(1.0 / self.grid_step)
        if abs(n * self.grid_step - 1.0) > 1e-12:
            raise ValueError("grid_step must divide 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if not (0 <= self.master_seed < 2**64):
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    @property
    def steps_per_unit(self) -> int:
        return round(1.0 / self.grid_step)

    def grid_index(self, u: float) -> int:
        k = round(u / self.grid_step)
        if abs(k * self.grid_step - u) > 1e-9:
            raise ValueError(f"time {u!r} is not on the grid of step {self.grid_step!r}")
        return k


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    std_error: float
    paths_used: int


@dataclass
class PathSamples:
    """Per-path running maxima at the requested horizons.

    ``grid_max[i, j]`` is the maximum of path ``i`` over the grid points of
    ``[0, horizons[j]]``; ``continuous_max`` holds the exactly sampled
    continuous maxima when requested.  ``probes[i, j]`` is ``S(probe_times[j])``.
    """

    horizons: tuple[float, ...]
    grid_max: np.ndarray
    continuous_max: np.ndarray | None = None
    probe_times: tuple[float, ...] = ()
    probes: np.ndarray | None = None

    def _col(self, s: float) -> int:
        for j, h in enumerate(self.horizons):
            if abs(h - s) <= 1e-12:
                return j
        raise KeyError(f"horizon {s!r} was not simulated")

    def max_at(self, s: float, continuous: bool = False) -> np.ndarray:
        if continuous:
            if self.continuous_max is None:
                raise ValueError("continuous maxima were not simulated")
            return self.continuous_max[:, self._col(s)]
        return self.grid_max[:, self._col(s)]

    def pair(self, s: float, t: float, continuous: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """Running maxima ``(m_s, M_t)`` path by path."""
        if s > t:
            raise ValueError("need s <= t")
        return self.max_at(s, continuous), self.max_at(t, continuous)

    def probe(self, u: float) -> np.ndarray:
        for j, h in enumerate(self.probe_times):
            if abs(h - u) <= 1e-12:
                return self.probes[:, j]
        raise KeyError(f"probe time {u!r} was not recorded")

    @property
    def paths(self) -> int:
        return self.grid_max.shape[0]


@nb.njit(nogil=True, cache=True)
def _slepian_paths(key, key_bridge, first, n, n_t, mid_sd, h, h_idx, p_idx, continuous,
                   out_grid, out_cont, out_probe):
    sqh = math.sqrt(h)
    lower = np.empty(n_t)
    k_h = h_idx.size
    k_p = p_idx.size
    for i in range(n):
        path = first + i
        st = stream_start(key, path)
        st2 = stream_start(key_bridge, path)
        total = 0.0
        for j in range(n_t):
            z, st = next_normal(st)
            lower[j] = sqh * z
            total += lower[j]
        z, st = next_normal(st)
        S = total + mid_sd * z  # B(1) - B(0)
        run = S
        cont = S
        hk = 0
        pk = 0
        while hk < k_h and h_idx[hk] == 0:
            out_grid[i, hk] = run
            if continuous:
                out_cont[i, hk] = cont
            hk += 1
        while pk < k_p and p_idx[pk] == 0:
            out_probe[i, pk] = S
            pk += 1
        for j in range(n_t):
            z, st = next_normal(st)
            S_next = S + sqh * z - lower[j]
            if continuous:
                if S_next > cont:
                    cont = S_next
                # the bridge tops cont iff E > (cont-S)(cont-S_next)/h, and a
                # 53-bit uniform never yields E above MAX_EXPONENTIAL
                if (cont - S) * (cont - S_next) < MAX_EXPONENTIAL * h:
                    e = exponential_at(st2, j)
                    d = S_next - S
                    top = 0.5 * (S + S_next + math.sqrt(d * d + 4.0 * h * e))
                    if top > cont:
                        cont = top
            if S_next > run:
                run = S_next
            S = S_next
            while hk < k_h and h_idx[hk] == j + 1:
                out_grid[i, hk] = run
                if continuous:
                    out_cont[i, hk] = cont
                hk += 1
            while pk < k_p and p_idx[pk] == j + 1:
                out_probe[i, pk] = S
                pk += 1


def _chunks(total: int, workers: int) -> list[tuple[int, int]]:
    size = -(-total // workers)
    return [(a, min(size, total - a)) for a in range(0, total, size)]


def _run_chunks(fn, spec: McSpec) -> None:
    parts = _chunks(spec.paths, spec.workers)
    if len(parts) == 1:
        fn(*parts[0])
        return
    with ThreadPoolExecutor(max_workers=len(parts)) as pool:
        for fut in [pool.submit(fn, a, n) for a, n in parts]:
            fut.result()


def simulate_running_max(
    spec: McSpec,
    s_list: Sequence[float],
    t_max: float,
    *,
    continuous: bool = False,
    probe_times: Sequence[float] = (),
) -> PathSamples:
    """Simulate ``spec.paths`` Slepian paths on ``[0, t_max]``.

    Every horizon in ``s_list`` and every probe time must lie on the grid
    and not exceed ``t_max <= 1``.
    """
    if not (0.0 <= t_max <= 1.0):
        raise ValueError("t_max must lie in [0, 1]")
    horizons = tuple(sorted(set(float(s) for s in s_list)))
    if not horizons:
        raise ValueError("s_list must not be empty")
    if horizons[0] < 0 or horizons[-1] > t_max + 1e-12:
        raise ValueError("horizons must lie in [0, t_max]")
    probe_times = tuple(sorted(set(float(u) for u in probe_times)))
    if probe_times and (probe_times[0] < 0 or probe_times[-1] > t_max + 1e-12):
        raise ValueError("probe times must lie in [0, t_max]")

    n_t = spec.grid_index(t_max)
    h_idx = np.array([spec.grid_index(s) for s in horizons], dtype=np.int64)
    p_idx = np.array([spec.grid_index(u) for u in probe_times], dtype=np.int64)
    work = float(spec.paths) * (2 * n_t + 1)
    if work > spec.max_work:
        raise ResourceLimitError(
            f"{spec.paths} paths x {2 * n_t + 1} draws exceeds the budget of {spec.max_work:.3g}"
        )

    grid = np.empty((spec.paths, len(horizons)))
    cont = np.empty((spec.paths if continuous else 0, len(horizons)))
    probes = np.empty((spec.paths, len(probe_times)))
    key = derive_key(spec.master_seed, PATH_SALT)
    key_b = derive_key(spec.master_seed, BRIDGE_MAX_SALT)
    mid_sd = math.sqrt(max(1.0 - n_t * spec.grid_step, 0.0))

    def work_on(first, n):
        _slepian_paths(key, key_b, first, n, n_t, mid_sd, spec.grid_step, h_idx, p_idx, continuous,
                       grid[first:first + n], cont[first:first + n] if continuous else cont, probes[first:first + n])

    _run_chunks(work_on, spec)
    # running maxima over nested windows must be ordered
    if np.any(np.diff(grid, axis=1) < 0) or (continuous and np.any(np.diff(cont, axis=1) < 0)):
        raise AssertionError("running maxima are not monotone across horizons")
    return PathSamples(
        horizons=horizons,
        grid_max=grid,
        continuous_max=cont if continuous else None,
        probe_times=probe_times,
        probes=probes if probe_times else None,
    )


def _binomial(hits: int, n: int) -> McEstimate:
    p = hits / n
    return McEstimate(p, math.sqrt(p * (1.0 - p) / n), n)


def empirical_cdf(samples, level: float) -> McEstimate:
    """Fraction of samples at or below ``level`` with its binomial standard error."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("no samples")
    return _binomial(int(np.count_nonzero(x <= level)), x.size)


def empirical_joint_cdf(m_s, M_t, m: float, M: float) -> McEstimate:
    """Fraction of paths with ``m_s <= m`` and ``M_t <= M``."""
    a = np.asarray(m_s, dtype=float)
    b = np.asarray(M_t, dtype=float)
    if a.size == 0:
        raise ValueError("no samples")
    if a.shape != b.shape:
        raise ValueError("m_s and M_t must come from the same paths")
    return _binomial(int(np.count_nonzero((a <= m) & (b <= M))), a.size)


def sample_moment(samples, k: int) -> McEstimate:
    """Sample mean of ``x**k`` with standard error ``std(x**k)/sqrt(n)``."""
    x = np.asarray(samples, dtype=float) ** k
    if x.size < 2:
        raise ValueError("need at least two samples")
    return McEstimate(float(np.mean(x)), float(np.std(x, ddof=1) / math.sqrt(x.size)), x.size)


@nb.njit(nogil=True, cache=True)
def _bridges(key, first, n, steps, sbar, slope, intercept, y, out):
    dt = sbar / steps
    for i in range(n):
        st = stream_start(key, first + i)
        w = 0.0
        ok = 1
        for k in range(steps):
            rem = sbar - k * dt
            if k == steps - 1:
                w = y
            else:
                z, st = next_normal(st)
                w = w + (y - w) * dt / rem + math.sqrt(dt * (rem - dt) / rem) * z
            if w > intercept + slope * (k + 1) * dt:
                ok = 0
                break
        out[i] = ok


def simulate_bridge_noncross(a: float, b: float, sbar: float, y: float, spec: McSpec) -> McEstimate:
    """Fraction of Brownian bridges 0 -> y on [0, sbar] staying below ``a*u + b``.

    Bridges are built step by step from their conditional Gaussian law and
    checked on the grid only, so crossings between nodes are missed and the
    estimate is biased upward by O(sqrt(grid_step)).
    """
    if sbar <= 0:
        raise ValueError("sbar must be positive")
    if y > a * sbar + b:
        raise ValueError("bridge endpoint y lies above the boundary")
    if b <= 0:
        return McEstimate(0.0, 0.0, spec.paths)
    steps = max(1, round(sbar / spec.grid_step))
    if float(spec.paths) * steps > spec.max_work:
        raise ResourceLimitError("bridge simulation exceeds the work budget")
    out = np.empty(spec.paths, dtype=np.int8)
    key = derive_key(spec.master_seed, BRIDGE_SALT)

    def work_on(first, n):
        _bridges(key, first, n, steps, float(sbar), float(a), float(b), float(y), out[first:first + n])

    _run_chunks(work_on, spec)
    return _binomial(int(out.sum(dtype=np.int64)), spec.paths)


@nb.njit(nogil=True, cache=True)
def _below_twopiece(key, key_cross, first, n, n_break, n_end, h, a, b, c, d, out):
    sqh = math.sqrt(h)
    for i in range(n):
        path = first + i
        st = stream_start(key, path)
        st2 = stream_start(key_cross, path)
        w = 0.0
        ok = 1
        for j in range(n_end):
            z, st = next_normal(st)
            w_next = w + sqh * z
            if j < n_break:
                slope, level = a, b
            else:
                slope, level = c, d
            # gaps to the line through this piece at both ends of the step
            g0 = level + slope * (j * h) - w
            g1 = level + slope * ((j + 1) * h) - w_next
            if g0 < 0.0 or g1 < 0.0:
                ok = 0
                break
            # a bridge with end gaps g0, g1 crosses with probability exp(-2 g0 g1 / h)
            if 2.0 * g0 * g1 < MAX_EXPONENTIAL * h:
                if exponential_at(st2, j) > 2.0 * g0 * g1 / h:
                    ok = 0
                    break
            w = w_next
        out[i] = ok


def simulate_twopiece_noncross(boundary: TwoPieceBoundary, spec: McSpec) -> McEstimate:
    """Fraction of Brownian paths staying below a two-piece linear boundary.

    Paths are sampled on the grid; inside each step the path is a Brownian
    bridge and the boundary a straight line, so the crossing between nodes is
    decided exactly from the reflection law of the bridge maximum.  The
    estimate carries no discretization bias.  Breakpoint and horizon must lie
    on the grid.
    """
    n_break = spec.grid_index(boundary.breakpoint)
    n_end = spec.grid_index(boundary.horizon)
    if float(spec.paths) * n_end > spec.max_work:
        raise ResourceLimitError("boundary simulation exceeds the work budget")
    out = np.empty(spec.paths, dtype=np.int8)
    key = derive_key(spec.master_seed, BOUNDARY_SALT)
    key_c = derive_key(spec.master_seed, BOUNDARY_CROSS_SALT)
    f, g = boundary.first, boundary.second

    def work_on(first, n):
        _below_twopiece(key, key_c, first, n, n_break, n_end, spec.grid_step,
                        float(f.slope), float(f.intercept), float(g.slope), float(g.intercept),
                        out[first:first + n])

    _run_chunks(work_on, spec)
    return _binomial(int(out.sum(dtype=np.int64)), spec.paths)
