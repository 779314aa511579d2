import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdchain import DomainError, Stream
from hdchain.exact import CONTINUOUS, DISCRETE, mean_absorption, occupation_vector
from hdchain.montecarlo import chunk_bounds
from hdchain.simulate import (
    absorption_times,
    estimate_absorption_time,
    estimate_occupation,
    estimate_overshoot,
    fit_log_slope,
    occupation_hits,
    overshoot_landings,
    overshoot_sample,
    reference_mean,
    run_path,
    survival_bound,
    survival_bound_check,
)


def z_score(est, value):
    if est.std_error == 0:
        return 0.0 if est.mean == value else math.inf
    return (est.mean - value) / est.std_error


def test_path_trivial(table):
    p = run_path(1, DISCRETE, Stream(0), table)
    assert list(p.states) == [1] and p.total_time == 0
    for seed in range(20):
        p = run_path(2, DISCRETE, Stream(seed), table)
        assert list(p.states) == [2, 1] and p.total_time == 1


def test_path_deterministic(table):
    a = run_path(500, CONTINUOUS, Stream(11, 3), table)
    b = run_path(500, CONTINUOUS, Stream(11, 3), table)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.holds, b.holds)
    assert a.total_time == b.total_time


def test_modes_share_the_jump_chain(table):
    d = run_path(1000, DISCRETE, Stream(4, 2), table)
    c = run_path(1000, CONTINUOUS, Stream(4, 2), table)
    assert np.array_equal(d.states, c.states)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 50_000), st.integers(0, 2**64 - 1), st.sampled_from([DISCRETE, CONTINUOUS]))
def test_path_invariants(table, n, seed, mode):
    s = Stream(seed)
    p = run_path(n, mode, s, table)
    assert p.states[0] == n and p.states[-1] == 1
    assert np.all(np.diff(p.states) < 0)
    assert s.counter == 2 * (len(p.states) - 1)
    if mode == DISCRETE:
        assert p.total_time == len(p.states) - 1
    else:
        assert len(p.holds) == len(p.states) - 1
        assert np.all(p.holds > 0) or n == 1
        assert p.total_time == pytest.approx(math.fsum(p.holds), rel=1e-12)


def test_batch_matches_single_paths(table):
    times = absorption_times(300, CONTINUOUS, 40, 99, table)
    steps = absorption_times(300, DISCRETE, 40, 99, table)
    for r in range(40):
        c = run_path(300, CONTINUOUS, Stream(99, r), table)
        assert times[r] == pytest.approx(c.total_time, rel=1e-12)
        assert steps[r] == len(c.states) - 1


@pytest.mark.parametrize("workers", [2, 3, 8])
def test_worker_count_is_invisible(table, workers):
    base = estimate_absorption_time(2000, CONTINUOUS, 5000, 8, table, workers=1)
    other = estimate_absorption_time(2000, CONTINUOUS, 5000, 8, table, workers=workers)
    assert (base.mean, base.std_error) == (other.mean, other.std_error)
    h1 = occupation_hits(200, [2, 3, 50], 3000, 1, table, workers=1)
    h2 = occupation_hits(200, [2, 3, 50], 3000, 1, table, workers=workers)
    assert np.array_equal(h1, h2)


def test_chunk_bounds_cover():
    for n, w in [(1, 4), (10, 3), (100, 7)]:
        b = chunk_bounds(n, w)
        assert b[0][0] == 0 and b[-1][1] == n
        assert all(x[1] == y[0] for x, y in zip(b, b[1:]))


def test_occupation_trivial_targets(table):
    est = estimate_occupation(40, {1, 40}, 2000, 5, table)
    assert est[40].mean == 1.0 and est[40].std_error == 0.0
    assert est[1].mean == 1.0
    with pytest.raises(DomainError):
        estimate_occupation(40, {41}, 10, 5, table)


def test_occupation_n5_against_dp(table):
    est = estimate_occupation(5, {2, 3, 4}, 1_000_000, 2024, table, workers=4)
    a = occupation_vector(5, table)
    for i in (2, 3, 4):
        assert abs(z_score(est[i], a[i])) <= 3


@pytest.mark.slow
def test_occupation_all_small_n(table):
    # about 1300 comparisons; at 3 sigma a handful of exceedances are expected,
    # so the family is checked by the count beyond 3 sigma and the max |z|
    zs = []
    for n in range(2, 51):
        a = occupation_vector(n, table)
        est = estimate_occupation(n, range(2, n), 100_000, 1000 + n, table, workers=4)
        zs.extend(z_score(est[i], a[i]) for i in range(2, n))
    zs = np.array(zs)
    assert np.abs(zs).max() < 4.5
    assert (np.abs(zs) > 3).mean() < 0.01


def test_time_parameterization_does_not_change_hits(table):
    # continuous-mode paths on one seed against the discrete estimator on another
    targets = (2, 10, 100)
    reps = 20_000
    d = estimate_occupation(300, targets, 100_000, 1, table, workers=4)
    flags = np.zeros((reps, len(targets)), dtype=bool)
    for r in range(reps):
        states = set(run_path(300, CONTINUOUS, Stream(2, r), table).states.tolist())
        flags[r] = [t in states for t in targets]
    for c, i in enumerate(targets):
        p = flags[:, c].mean()
        se = math.hypot(d[i].std_error, math.sqrt(p * (1 - p) / reps))
        assert abs(d[i].mean - p) <= 3 * se


def test_absorption_n2(table):
    est = estimate_absorption_time(2, CONTINUOUS, 100_000, 17, table)
    assert abs(z_score(est, 1.0)) <= 3
    assert estimate_absorption_time(2, DISCRETE, 100, 17, table).mean == 1.0


def test_absorption_discrete_against_dp(table):
    est = estimate_absorption_time(1000, DISCRETE, 100_000, 31, table, workers=4)
    exact = mean_absorption(1000, DISCRETE, table)
    assert exact == pytest.approx(math.fsum(occupation_vector(1000, table).values[2:]), rel=1e-13)
    assert abs(z_score(est, exact)) <= 3


def test_reference_mean():
    assert reference_mean(10_000) == pytest.approx(5.599, abs=5e-4)
    with pytest.raises(DomainError):
        fit_log_slope([10], [1.0])


def test_overshoot_next_step(table):
    # from x + 1 the first jump always lands at or below x
    landing = overshoot_landings(101, 100, 20_000, 3, table)
    assert np.all(landing <= 100)
    est = estimate_overshoot(101, 100, 20_000, 3, table)
    assert 0 <= est.mean < 1.0
    s = overshoot_sample(101, 100, Stream(3, 0), table)
    assert s.landing == landing[0] and s.v >= 0
    with pytest.raises(DomainError):
        estimate_overshoot(10, 10, 10, 0, table)


@pytest.mark.parametrize("x", [10, 100, 1000])
def test_overshoot_bounded_without_trend(table, x):
    near = estimate_overshoot(10 * x, x, 100_000, 5, table, workers=4)
    far = estimate_overshoot(100 * x, x, 100_000, 6, table, workers=4)
    assert near.mean < 3.0 and far.mean < 3.0
    assert far.mean - near.mean <= 3 * math.hypot(near.std_error, far.std_error)


def test_survival_trivial_cases(table):
    est, bound = survival_bound_check(50, 50, 0.3, 100, 0, table)
    assert est.mean == 1.0 and bound == math.exp(0.6)
    est, bound = survival_bound_check(50, 3, 0.0, 1000, 0, table)
    assert est.mean == 0.0 and bound == math.sqrt(3 / 50)
    with pytest.raises(DomainError):
        survival_bound_check(5, 6, 1.0, 10, 0, table)


def test_survival_example(table):
    est, bound = survival_bound_check(10_000, 10, 1.0, 100_000, 42, table, workers=4)
    assert bound == pytest.approx(0.2337, abs=1e-4)
    assert bound == survival_bound(10_000, 10, 1.0)
    assert est.mean + 3 * est.std_error <= bound
    assert est.mean < 0.1 * bound
