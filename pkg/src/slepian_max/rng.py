"""Counter-based random streams for the path simulator.

Draw ``k`` of path ``p`` under key ``K`` is ``mix(K + (p * 2**32 + k + 1) * GOLDEN)``
where ``mix`` is the SplitMix64 finaliser.  Each path therefore owns a
disjoint block of 2**32 counters of a single SplitMix64 sequence, so the
numbers a path sees depend only on ``(seed, path_index)`` and never on how
paths are scheduled across threads.

Normals come from a 128-layer ziggurat (Marsaglia & Tsang); the tables are
built once at import time.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_S32 = np.uint64(32)
_LAYER_MASK = np.uint64(0x7F)
_TO_UNIT = 1.0 / 9007199254740992.0  # 2**-53

PATH_BLOCK = 2**32

ZIG_LAYERS = 128
ZIG_R = 3.442619855899
ZIG_V = 9.91256303526217e-3


def _ziggurat_tables():
    x = np.zeros(ZIG_LAYERS + 1)
    f = math.exp(-0.5 * ZIG_R * ZIG_R)
    x[0] = ZIG_V / f
    x[1] = ZIG_R
    for i in range(2, ZIG_LAYERS):
        x[i] = math.sqrt(-2.0 * math.log(ZIG_V / x[i - 1] + f))
        f = math.exp(-0.5 * x[i] * x[i])
    return x, x[1:] / x[:-1]


ZIG_X, ZIG_RATIO = _ziggurat_tables()


@nb.njit(inline="always", cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _C1
    z = (z ^ (z >> _S27)) * _C2
    return z ^ (z >> _S31)


@nb.njit(cache=True)
def _derive_key(seed, salt):
    return mix64(mix64(seed) ^ (salt * GOLDEN))


def derive_key(seed: int, salt: int) -> np.uint64:
    """Stream key for a 64-bit master seed; ``salt`` separates independent families."""
    if not (0 <= seed < 2**64 and 0 <= salt < 2**64):
        raise ValueError("seed and salt must be 64-bit unsigned integers")
    return np.uint64(_derive_key(np.uint64(seed), np.uint64(salt)))


@nb.njit(inline="always", cache=True)
def stream_start(key, path):
    return np.uint64(key) + (np.uint64(path) << _S32) * GOLDEN


@nb.njit(inline="always", cache=True)
def next_u64(state):
    state = np.uint64(state) + GOLDEN
    return mix64(state), state


@nb.njit(inline="always", cache=True)
def next_uniform(state):
    """Uniform on (0, 1]."""
    r, state = next_u64(state)
    return ((r >> _S11) + np.uint64(1)) * _TO_UNIT, state


# largest value -log(u) takes for u in the 53-bit grid of (0, 1]
MAX_EXPONENTIAL = 53.0 * math.log(2.0)


@nb.njit(inline="always", cache=True)
def next_exponential(state):
    u, state = next_uniform(state)
    return -math.log(u), state


@nb.njit(inline="always", cache=True)
def exponential_at(start, k):
    """The ``k``-th exponential of a stream, by random access."""
    u, _ = next_uniform(np.uint64(start) + np.uint64(k) * GOLDEN)
    return -math.log(u)


@nb.njit(inline="always", cache=True)
def next_normal(state):
    while True:
        r, state = next_u64(state)
        i = np.int64(r & _LAYER_MASK)
        u = 2.0 * ((r >> _S11) * _TO_UNIT) - 1.0
        if abs(u) < ZIG_RATIO[i]:
            return u * ZIG_X[i], state
        if i == 0:
            # tail beyond R
            while True:
                a, state = next_uniform(state)
                b, state = next_uniform(state)
                xt = math.log(a) / ZIG_R
                if -2.0 * math.log(b) >= xt * xt:
                    break
            if u < 0.0:
                return xt - ZIG_R, state
            return ZIG_R - xt, state
        x = u * ZIG_X[i]
        f0 = math.exp(-0.5 * (ZIG_X[i] * ZIG_X[i] - x * x))
        f1 = math.exp(-0.5 * (ZIG_X[i + 1] * ZIG_X[i + 1] - x * x))
        w, state = next_uniform(state)
        if f1 + w * (f0 - f1) < 1.0:
            return x, state


@nb.njit(cache=True)
def fill_normals(key, path, out):
    """Write the first ``out.size`` normals of a path's stream; used in tests."""
    state = stream_start(key, path)
    for k in range(out.size):
        out[k], state = next_normal(state)


@nb.njit(cache=True)
def fill_u64(key, path, out):
    state = stream_start(key, path)
    for k in range(out.size):
        out[k], state = next_u64(state)
