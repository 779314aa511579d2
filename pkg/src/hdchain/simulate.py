"""Monte Carlo sampling of the harmonic descent chain.

Each step of a path consumes exactly two draws from its stream, a uniform for
the jump and an exponential for the holding time, in both time modes. A
discrete and a continuous path on the same stream therefore share their
state sequence and differ only in the clock.

Estimators run replicate ``r`` on stream ``(seed, r)`` and reduce in
replicate order, so their output is bit-identical for any ``workers``.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DomainError
from .exact import CONTINUOUS, DISCRETE, check_mode
from .harmonic import SIX_OVER_PI2, ensure_table, gap_search
from .montecarlo import (
    check_reps,
    mean_estimate,
    proportion_estimate,
    run_replicates,
)
from .rng import Stream, as_seed, nb_exponential, nb_stream_key, nb_uniform


@dataclass(frozen=True, eq=False)
class PathSample:
    """One trajectory down to state 1.

    ``holds[k]`` is the time spent in ``states[k]`` (continuous mode only;
    empty in discrete mode). ``total_time`` is the step count in discrete
    mode and the elapsed time in continuous mode.
    """

    mode: str
    states: np.ndarray
    holds: np.ndarray
    total_time: float


@dataclass(frozen=True)
class OvershootSample:
    start_y: int
    level_x: int
    landing: int
    v: float


@njit(cache=True, nogil=True)
def _walk(n, key, gamma, counter, h, states, holds):
    # Writes states[0..len-1] and holds[0..len-2]; returns (len, elapsed, counter).
    j = n
    k = 0
    states[0] = n
    elapsed = 0.0
    while j > 1:
        u = nb_uniform(key, gamma, counter)
        e = nb_exponential(key, gamma, counter + 1)
        counter += 2
        hold = e / h[j - 1]
        holds[k] = hold
        elapsed += hold
        j -= gap_search(h, u * h[j - 1], j - 1)
        k += 1
        states[k] = j
    return k + 1, elapsed, counter


@njit(cache=True, nogil=True)
def _absorption_kernel(r0, r1, n, continuous, seed, h, out):
    for r in range(r0, r1):
        key, gamma = nb_stream_key(seed, r)
        j = n
        counter = 0
        steps = 0
        elapsed = 0.0
        while j > 1:
            u = nb_uniform(key, gamma, counter)
            e = nb_exponential(key, gamma, counter + 1)
            counter += 2
            elapsed += e / h[j - 1]
            j -= gap_search(h, u * h[j - 1], j - 1)
            steps += 1
        out[r - r0] = elapsed if continuous else steps


@njit(cache=True, nogil=True)
def _occupation_kernel(r0, r1, n, seed, h, column, out):
    # column[i] >= 0 marks target i and names its output column.
    for r in range(r0, r1):
        key, gamma = nb_stream_key(seed, r)
        j = n
        counter = 0
        if column[j] >= 0:
            out[r - r0, column[j]] = 1
        while j > 1:
            u = nb_uniform(key, gamma, counter)
            counter += 2
            j -= gap_search(h, u * h[j - 1], j - 1)
            if column[j] >= 0:
                out[r - r0, column[j]] = 1


@njit(cache=True, nogil=True)
def _overshoot_kernel(r0, r1, y, x, seed, h, landing):
    for r in range(r0, r1):
        key, gamma = nb_stream_key(seed, r)
        j = y
        counter = 0
        while j > x:
            u = nb_uniform(key, gamma, counter)
            counter += 2
            j -= gap_search(h, u * h[j - 1], j - 1)
        landing[r - r0] = j


@njit(cache=True, nogil=True)
def _survival_kernel(r0, r1, x, k, t, seed, h, hit):
    for r in range(r0, r1):
        key, gamma = nb_stream_key(seed, r)
        j = x
        counter = 0
        elapsed = 0.0
        while j > k:
            u = nb_uniform(key, gamma, counter)
            e = nb_exponential(key, gamma, counter + 1)
            counter += 2
            elapsed += e / h[j - 1]
            if elapsed > t:
                break
            j -= gap_search(h, u * h[j - 1], j - 1)
        hit[r - r0] = j <= k


def run_path(n, mode, stream, table=None):
    """Simulate one full trajectory from ``n`` to absorption.

    ``stream`` is a :class:`~hdchain.rng.Stream`; its counter advances by two
    per jump.
    """
    check_mode(mode)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    table = ensure_table(table, n - 1)
    states = np.empty(n, dtype=np.int64)
    holds = np.empty(max(n - 1, 1))
    length, elapsed, counter = _walk(
        int(n), np.uint64(stream.key), np.uint64(stream.gamma), stream.counter,
        table.h, states, holds,
    )
    stream.counter = int(counter)
    states = states[:length].copy()
    if mode == CONTINUOUS:
        return PathSample(mode, states, holds[: length - 1].copy(), float(elapsed))
    return PathSample(mode, states, np.empty(0), float(length - 1))


def absorption_times(n, mode, n_reps, seed, table=None, workers=1):
    """Per-replicate absorption times ``T_1`` as an array of length ``n_reps``."""
    check_mode(mode)
    check_reps(n_reps, workers)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    table = ensure_table(table, n - 1)
    out = np.empty(n_reps)
    run_replicates(
        _absorption_kernel, n_reps, workers,
        (int(n), mode == CONTINUOUS, as_seed(seed), table.h), (out,),
    )
    return out


def estimate_absorption_time(n, mode, n_reps, seed, table=None, workers=1):
    """Mean and standard error of ``T_1`` from ``n``."""
    return mean_estimate(absorption_times(n, mode, n_reps, seed, table, workers), seed)


def occupation_hits(n, targets, n_reps, seed, table=None, workers=1):
    """Boolean matrix ``(n_reps, len(targets))``: did replicate ``r`` visit target ``c``?"""
    check_reps(n_reps, workers)
    targets = [int(i) for i in targets]
    for i in targets:
        if not 1 <= i <= n:
            raise DomainError(f"target {i} is outside 1..{n}")
    table = ensure_table(table, n - 1)
    column = np.full(n + 1, -1, dtype=np.int64)
    for c, i in enumerate(targets):
        column[i] = c
    out = np.zeros((n_reps, len(targets)), dtype=np.uint8)
    run_replicates(
        _occupation_kernel, n_reps, workers,
        (int(n), as_seed(seed), table.h, column), (out,),
    )
    return out.astype(bool)


def estimate_occupation(n, targets, n_reps, seed, table=None, workers=1):
    """Empirical ``a(n, i)`` for each target ``i``, as ``{i: Estimate}``.

    Hitting probabilities do not depend on the clock, so there is no mode
    argument; the jump chain is the same in both modes.
    """
    targets = sorted({int(i) for i in targets})
    hits = occupation_hits(n, targets, n_reps, seed, table, workers)
    return {i: proportion_estimate(hits[:, c], seed) for c, i in enumerate(targets)}


def overshoot_landings(y, x, n_reps, seed, table=None, workers=1):
    """First state at or below ``x`` for ``n_reps`` chains started at ``y``."""
    if not 1 <= x < y:
        raise DomainError(f"need 1 <= x < y, got x={x}, y={y}")
    check_reps(n_reps, workers)
    table = ensure_table(table, y - 1)
    landing = np.empty(n_reps, dtype=np.int64)
    run_replicates(
        _overshoot_kernel, n_reps, workers,
        (int(y), int(x), as_seed(seed), table.h), (landing,),
    )
    return landing


def overshoot_sample(y, x, stream, table=None):
    """One :class:`OvershootSample` drawn on ``stream``."""
    if not 1 <= x < y:
        raise DomainError(f"need 1 <= x < y, got x={x}, y={y}")
    table = ensure_table(table, y - 1)
    j = y
    while j > x:
        u = stream.uniform()
        stream.exponential()
        j -= int(gap_search(table.h, u * table.h[j - 1], j - 1))
    return OvershootSample(y, x, j, math.log(x) - math.log(j))


def estimate_overshoot(y, x, n_reps, seed, table=None, workers=1):
    """``E_y[V_x]`` with ``V_x = log x - log(first state <= x)``."""
    landing = overshoot_landings(y, x, n_reps, seed, table, workers)
    return mean_estimate(math.log(x) - np.log(landing), seed)


def survival_bound(x, k, t):
    """``exp(2t) sqrt(k/x)``, an upper bound on ``P_x(T_k <= t)``."""
    return math.exp(2.0 * t) * math.sqrt(k / x)


def survival_bound_check(x, k, t, n_reps, seed, table=None, workers=1):
    """Empirical ``P_x(T_k <= t)`` in continuous time, paired with its bound.

    Returns ``(Estimate, bound)``; ``T_k`` is the first time at or below ``k``.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if x < k:
        raise DomainError(f"need x >= k, got x={x}, k={k}")
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    check_reps(n_reps, workers)
    table = ensure_table(table, x - 1)
    hit = np.zeros(n_reps, dtype=np.bool_)
    run_replicates(
        _survival_kernel, n_reps, workers,
        (int(x), int(k), float(t), as_seed(seed), table.h), (hit,),
    )
    return proportion_estimate(hit, seed), survival_bound(x, k, t)


def fit_log_slope(ns, means):
    """Least-squares line ``mean = slope * log n + intercept``; returns ``(slope, intercept)``."""
    ns = np.asarray(ns, dtype=float)
    if ns.size < 2:
        raise DomainError("need at least two design points")
    slope, intercept = np.polyfit(np.log(ns), np.asarray(means, dtype=float), 1)
    return float(slope), float(intercept)


def reference_mean(n):
    """``(6/pi^2) log n``, the leading term of ``E_n T_1`` in continuous time."""
    return SIX_OVER_PI2 * math.log(n)


__all__ = [
    "CONTINUOUS",
    "DISCRETE",
    "OvershootSample",
    "PathSample",
    "Stream",
    "absorption_times",
    "estimate_absorption_time",
    "estimate_occupation",
    "estimate_overshoot",
    "fit_log_slope",
    "occupation_hits",
    "overshoot_landings",
    "overshoot_sample",
    "reference_mean",
    "run_path",
    "survival_bound",
    "survival_bound_check",
]
