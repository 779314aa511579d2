r"""Couplings of two continuous-time harmonic descent chains.

Maximal coupling
    From ``(x, y)`` with ``x < y`` both components keep their marginal jump
    rates ``1/(j - i)``, and the rate of jumping together to a common ``i < x``
    is as large as possible, namely ``1/(y - i)``. The remaining rates are

    * ``x`` alone to ``i < x`` at ``1/(x - i) - 1/(y - i)``;
    * ``y`` alone to ``x <= i' < y`` at ``1/(y - i')`` (``i' = x`` is a
      collision and couples the pair).

    The total rate is ``h_{x-1} + h_{y-x}``. The simulator picks "larger moves
    alone" with probability ``h_{y-x} / total``; otherwise the smaller
    component draws its target ``i`` from its own kernel and the larger one
    follows with probability ``(x - i)/(y - i)``. This thinning reproduces the
    rate table above with ``O(log y)`` work per event.

Shift coupling
    The smaller start ``x0`` is frozen while ``Y`` runs alone from ``y0``
    until it first drops to ``<= x0``; the pair is then handed to the maximal
    coupling.

For either protocol ``|a(x0, i) - a(y0, i)| <= P(S_couple < i)``, where
``S_couple`` is the state at which the components meet.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit

from .errors import DomainError
from .harmonic import ensure_table, gap_search
from .montecarlo import check_reps, proportion_estimate, run_replicates
from .rng import as_seed, nb_exponential, nb_stream_key, nb_uniform

MAXIMAL = "maximal"
SHIFT = "shift"
PROTOCOLS = (MAXIMAL, SHIFT)


class JointState(NamedTuple):
    x: int
    y: int


@dataclass(frozen=True, eq=False)
class CouplingOutcome:
    """Summary of one joint run.

    ``phase1_landing`` is ``None`` unless a shift phase ran. ``trajectory``,
    when recorded, has one row ``(t, x, y)`` per event, starting with the
    initial state.
    """

    t_couple: float
    s_couple: int
    t_absorb: float
    phase1_landing: int | None = None
    t_phase1: float = 0.0
    trajectory: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class CouplingBatch:
    """Per-replicate outcomes of many joint runs from the same start.

    ``phase1_landing`` is -1 for replicates without a shift phase. ``x_hits``
    has one column per requested target and flags whether the ``X``
    component ever visited it.
    """

    x0: int
    y0: int
    protocol: str
    t_couple: np.ndarray
    s_couple: np.ndarray
    t_absorb: np.ndarray
    phase1_landing: np.ndarray
    x_hits: np.ndarray
    targets: tuple
    seed: int


def maximal_joint_rates(state):
    """Rate decomposition of the maximal coupling out of ``state = (x, y)``, ``x <= y``.

    Returns a list of ``(JointState, rate)``. Summed by ``x``-destination the
    rates give ``1/(x - i)``; summed by ``y``-destination they give
    ``1/(y - i)``.

    >>> maximal_joint_rates(JointState(2, 3))
    [(JointState(x=1, y=1), 0.5), (JointState(x=1, y=3), 0.5), (JointState(x=2, y=2), 1.0)]
    """
    x, y = int(state[0]), int(state[1])
    if x < 1 or y < 1:
        raise DomainError(f"states must be >= 1, got ({x}, {y})")
    if x > y:
        raise DomainError(f"order the pair so that x <= y, got ({x}, {y})")
    if x == y:
        return [(JointState(i, i), 1.0 / (x - i)) for i in range(1, x)]
    out = []
    for i in range(1, x):
        out.append((JointState(i, i), 1.0 / (y - i)))
    for i in range(1, x):
        out.append((JointState(i, y), 1.0 / (x - i) - 1.0 / (y - i)))
    for i in range(x, y):
        out.append((JointState(x, i), 1.0 / (y - i)))
    return out


@njit(cache=True, nogil=True)
def _mark(column, hits, state):
    if state < column.shape[0] and column[state] >= 0:
        hits[column[state]] = 1


@njit(cache=True, nogil=True)
def _record(traj, n, t, x, y):
    if traj.shape[0] > 0:
        traj[n, 0] = t
        traj[n, 1] = x
        traj[n, 2] = y
        return n + 1
    return n


@njit(cache=True, nogil=True)
def _coupling_run(x, y, shift, key, gamma, counter, h, column, hits, traj):
    # Returns (t_couple, s_couple, t_absorb, landing, t_phase1, counter, n_traj).
    t = 0.0
    n_traj = _record(traj, 0, t, x, y)
    _mark(column, hits, x)
    landing = -1
    t_phase1 = 0.0
    if shift and x < y:
        # X frozen at x; Y runs alone until it first reaches <= x.
        while y > x:
            u = nb_uniform(key, gamma, counter)
            e = nb_exponential(key, gamma, counter + 1)
            counter += 2
            t += e / h[y - 1]
            y -= gap_search(h, u * h[y - 1], y - 1)
            n_traj = _record(traj, n_traj, t, x, y)
        landing = y
        t_phase1 = t
    while x != y:
        x_low = x < y
        lo = x if x_low else y
        hi = y if x_low else x
        rate_lo = h[lo - 1]
        rate_hi = h[hi - lo]
        total = rate_lo + rate_hi
        e = nb_exponential(key, gamma, counter)
        u1 = nb_uniform(key, gamma, counter + 1)
        u2 = nb_uniform(key, gamma, counter + 2)
        u3 = nb_uniform(key, gamma, counter + 3)
        counter += 4
        t += e / total
        if u1 * total < rate_hi:
            hi -= gap_search(h, u2 * rate_hi, hi - lo)
        else:
            i = lo - gap_search(h, u2 * rate_lo, lo - 1)
            if u3 * (hi - i) < (lo - i):
                hi = i
            lo = i
        if x_low:
            x = lo
            y = hi
        else:
            x = hi
            y = lo
        _mark(column, hits, x)
        n_traj = _record(traj, n_traj, t, x, y)
    t_couple = t
    s_couple = x
    while x > 1:
        u = nb_uniform(key, gamma, counter)
        e = nb_exponential(key, gamma, counter + 1)
        counter += 2
        t += e / h[x - 1]
        x -= gap_search(h, u * h[x - 1], x - 1)
        _mark(column, hits, x)
        n_traj = _record(traj, n_traj, t, x, x)
    return t_couple, s_couple, t, landing, t_phase1, counter, n_traj


@njit(cache=True, nogil=True)
def _coupling_kernel(r0, r1, x0, y0, shift, seed, h, column,
                     t_couple, s_couple, t_absorb, landing, hits):
    traj = np.empty((0, 3))
    for r in range(r0, r1):
        key, gamma = nb_stream_key(seed, r)
        tc, sc, ta, land, _, _, _ = _coupling_run(
            x0, y0, shift, key, gamma, 0, h, column, hits[r - r0], traj
        )
        t_couple[r - r0] = tc
        s_couple[r - r0] = sc
        t_absorb[r - r0] = ta
        landing[r - r0] = land


def _check_protocol(protocol):
    if protocol not in PROTOCOLS:
        raise DomainError(f"protocol must be one of {PROTOCOLS}, got {protocol!r}")


def _check_start(x0, y0, shift):
    if x0 < 1 or y0 < 1:
        raise DomainError(f"start states must be >= 1, got ({x0}, {y0})")
    if shift and x0 > y0:
        raise DomainError(f"shift coupling needs x0 <= y0, got ({x0}, {y0})")


def _single_run(x0, y0, shift, stream, table, record):
    _check_start(x0, y0, shift)
    table = ensure_table(table, max(x0, y0) - 1)
    traj = np.empty((x0 + y0 + 1, 3) if record else (0, 3))
    column = np.full(1, -1, dtype=np.int64)
    hits = np.zeros(0, dtype=np.uint8)
    tc, sc, ta, land, t1, counter, n_traj = _coupling_run(
        int(x0), int(y0), shift, np.uint64(stream.key), np.uint64(stream.gamma),
        stream.counter, table.h, column, hits, traj,
    )
    stream.counter = int(counter)
    return CouplingOutcome(
        float(tc), int(sc), float(ta),
        None if land < 0 else int(land), float(t1),
        traj[:n_traj].copy() if record else None,
    )


def run_maximal_coupling(start, stream, table=None, record=False):
    """Run the maximal coupling from ``start = (x, y)`` until both reach 1.

    With ``record=True`` the outcome carries the full event trajectory.
    """
    return _single_run(int(start[0]), int(start[1]), False, stream, table, record)


def run_shift_coupling(x0, y0, stream, table=None, record=False):
    """Freeze ``X`` at ``x0``, run ``Y`` from ``y0`` down to ``<= x0``, then couple maximally."""
    return _single_run(int(x0), int(y0), True, stream, table, record)


def sample_couplings(x0, y0, n_reps, seed, protocol=SHIFT, targets=(), table=None, workers=1):
    """Run ``n_reps`` independent joint runs; replicate ``r`` uses stream ``(seed, r)``."""
    _check_protocol(protocol)
    shift = protocol == SHIFT
    _check_start(x0, y0, shift)
    check_reps(n_reps, workers)
    top = max(x0, y0)
    table = ensure_table(table, top - 1)
    targets = tuple(int(i) for i in targets)
    column = np.full(top + 1, -1, dtype=np.int64)
    for c, i in enumerate(targets):
        if not 1 <= i <= top:
            raise DomainError(f"target {i} is outside 1..{top}")
        column[i] = c
    t_couple = np.empty(n_reps)
    s_couple = np.empty(n_reps, dtype=np.int64)
    t_absorb = np.empty(n_reps)
    landing = np.empty(n_reps, dtype=np.int64)
    hits = np.zeros((n_reps, len(targets)), dtype=np.uint8)
    run_replicates(
        _coupling_kernel, n_reps, workers,
        (int(x0), int(y0), shift, as_seed(seed), table.h, column),
        (t_couple, s_couple, t_absorb, landing, hits),
    )
    return CouplingBatch(
        int(x0), int(y0), protocol, t_couple, s_couple, t_absorb, landing,
        hits.astype(bool), targets, seed,
    )


def coupling_state_cdf(x0, y0, level_i, n_reps, seed, protocol=SHIFT, table=None, workers=1):
    """Estimate ``P(S_couple < level_i)`` from ``(x0, y0)``."""
    if level_i < 2:
        raise DomainError(f"level_i must be >= 2, got {level_i}")
    batch = sample_couplings(x0, y0, n_reps, seed, protocol, (), table, workers)
    return proportion_estimate(batch.s_couple < level_i, seed)
