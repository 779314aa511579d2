r"""Exact occupation probabilities, their limits, and the identities behind them.

``a(n, i)`` is the probability that the chain started at ``n`` ever visits
``i``. For fixed ``n`` it solves

.. math::
    a(n, n) = 1, \qquad a(n, i) = \sum_{j=i+1}^{n} a(n, j)\, p(j, i),

which is filled from ``i = n - 1`` down to ``1`` in ``O(n^2)``. As
``n -> infinity`` it converges to

.. math::
    b(1) = 1, \qquad b(i) = \frac{6 h_{i-1}}{\pi^2 (i - 1)}.

Every infinite series below is evaluated as a finite compensated sum plus a
telescoped closed-form tail, never as a bare truncation.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DomainError
from .harmonic import PI2_OVER_6, SIX_OVER_PI2, compensated_sum, ensure_table

try:
    from gmpy2 import mpq as _Rational
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as _Rational

DISCRETE = "discrete"
CONTINUOUS = "continuous"
MODES = (DISCRETE, CONTINUOUS)


def check_mode(mode):
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")


@dataclass(frozen=True, eq=False)
class OccupationVector:
    """``a(n, i)`` for one start state ``n``; ``values[i]`` holds ``a(n, i)``.

    ``values[0]`` is unused and set to 0 so that states index directly.
    """

    start_n: int
    values: np.ndarray

    def __getitem__(self, i):
        if not 1 <= i <= self.start_n:
            raise DomainError(f"state {i} is outside 1..{self.start_n}")
        return float(self.values[i])

    def __len__(self):
        return self.start_n


@dataclass(frozen=True, eq=False)
class LimitTable:
    """``b(i)`` for ``i = 1..max_i`` (index 0 unused) with fixed-point residuals."""

    max_i: int
    b: np.ndarray
    residuals: np.ndarray


@dataclass(frozen=True, eq=False)
class OvershootDistribution:
    """Law of the first state at or below ``k`` for the chain run from infinity.

    ``mass[j - 1]`` is the probability of landing on ``j``.
    """

    k: int
    mass: np.ndarray


@njit(cache=True, nogil=True)
def _occupation(n, h):
    a = np.zeros(n + 1)
    a[n] = 1.0
    # c[j] = a(n, j) / h[j - 1] turns the inner sum into sum_j c[j] / (j - i).
    c = np.zeros(n + 1)
    if n >= 2:
        c[n] = 1.0 / h[n - 1]
    for i in range(n - 1, 0, -1):
        s = 0.0
        comp = 0.0
        for j in range(i + 1, n + 1):
            x = c[j] / (j - i)
            t = s + x
            if abs(s) >= abs(x):
                comp += (s - t) + x
            else:
                comp += (x - t) + s
            s = t
        a[i] = s + comp
        if i >= 2:
            c[i] = a[i] / h[i - 1]
    return a


def occupation_vector(n, table=None):
    """Exact ``a(n, i)`` for ``i = 1..n`` by downward recursion."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    table = ensure_table(table, n - 1)
    values = _occupation(int(n), table.h)
    values.flags.writeable = False
    return OccupationVector(int(n), values)


def occupation_vector_rational(n):
    """The same recursion in exact rational arithmetic.

    Returns a list indexed like :attr:`OccupationVector.values`. Denominators
    grow quickly (tens of kilobits by ``n = 200``), so this is an oracle, not
    a production path.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    zero = _Rational(0)
    h = [zero]
    for k in range(1, n):
        h.append(h[-1] + _Rational(1, k))
    a = [zero] * (n + 1)
    c = [zero] * (n + 1)
    a[n] = _Rational(1)
    if n >= 2:
        c[n] = 1 / h[n - 1]
    for i in range(n - 1, 0, -1):
        s = zero
        for j in range(i + 1, n + 1):
            s += c[j] / (j - i)
        a[i] = s
        if i >= 2:
            c[i] = s / h[i - 1]
    return a


def limit_value(i, table=None):
    """``b(i)``, the ``n -> infinity`` limit of ``a(n, i)``."""
    if i < 1:
        raise DomainError(f"i must be >= 1, got {i}")
    if i == 1:
        return 1.0
    table = ensure_table(table, i - 1)
    return SIX_OVER_PI2 * table.h[i - 1] / (i - 1)


def limit_values(max_i, table):
    """Array ``b`` with ``b[i]`` for ``i = 1..max_i`` (``b[0]`` unused, 0)."""
    table.require(max_i - 1)
    b = np.zeros(max_i + 1)
    b[1] = 1.0
    if max_i >= 2:
        m = np.arange(2, max_i + 1)
        b[2:] = SIX_OVER_PI2 * table.h[1:max_i] / (m - 1)
    return b


def _fixed_point_tail(i, cutoff_m, table):
    # sum_{j > M} b(j) p(j, i), telescoped.
    h, q = table.h, table.q
    if i == 1:
        return SIX_OVER_PI2 * (PI2_OVER_6 - q[cutoff_m - 1])
    return SIX_OVER_PI2 / (i - 1) * (h[cutoff_m - 1] - h[cutoff_m - i])


def fixed_point_residual(i, cutoff_m, table=None, tail=True):
    """``b(i) - sum_{j > i} b(j) p(j, i)``, which is exactly zero in theory.

    Terms ``j = i+1..cutoff_m`` are summed directly; the rest of the series
    is added in closed form (``tail=False`` drops it, leaving the plain
    truncation error).
    """
    if i < 1:
        raise DomainError(f"i must be >= 1, got {i}")
    if cutoff_m <= i + 1:
        raise DomainError(f"cutoff_m must exceed i + 1, got {cutoff_m}")
    table = ensure_table(table, cutoff_m)
    h = table.h
    j = np.arange(i + 1, cutoff_m + 1)
    b_j = SIX_OVER_PI2 * h[j - 1] / (j - 1)
    p_ji = 1.0 / ((j - i) * h[j - 1])
    total = compensated_sum(b_j * p_ji)
    if tail:
        total += _fixed_point_tail(i, cutoff_m, table)
    return limit_value(i, table) - total


def limit_table(max_i, table=None, cutoff_m=10_000):
    """``b(1..max_i)`` together with their fixed-point residuals at ``cutoff_m``."""
    if max_i < 1:
        raise DomainError(f"max_i must be >= 1, got {max_i}")
    table = ensure_table(table, max(cutoff_m, max_i + 2))
    b = limit_values(max_i, table)
    res = np.zeros(max_i + 1)
    for i in range(1, max_i + 1):
        res[i] = fixed_point_residual(i, max(cutoff_m, i + 2), table)
    return LimitTable(max_i, b, res)


def overshoot_distribution(k, table=None):
    """Closed form of ``bhat_k(j) = sum_{m > k} b(m) p(m, j)``, ``j = 1..k``.

    ``b(m) p(m, j) = (6/pi^2) / ((m - j)(m - 1))`` telescopes to
    ``6 (h_{k-1} - h_{k-j}) / (pi^2 (j - 1))`` for ``j >= 2`` and to
    ``1 - 6 q_{k-1} / pi^2`` for ``j = 1``.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    table = ensure_table(table, k)
    h, q = table.h, table.q
    mass = np.empty(k)
    mass[0] = 1.0 - SIX_OVER_PI2 * q[k - 1]
    if k >= 2:
        j = np.arange(2, k + 1)
        mass[1:] = SIX_OVER_PI2 * (h[k - 1] - h[k - j]) / (j - 1)
    mass.flags.writeable = False
    return OvershootDistribution(int(k), mass)


def euler_partition_sum(k, cutoff_m, table=None, tail=True):
    """``sum_{j=1..k} sum_{m > k} 1 / ((m - j)(m - 1))``, equal to ``pi^2/6`` for every ``k``.

    The ``m`` range is cut at ``cutoff_m`` (inclusive) and the remainder is
    restored from the telescoped tail unless ``tail=False``.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if cutoff_m <= k:
        raise DomainError(f"cutoff_m must exceed k, got {cutoff_m}")
    table = ensure_table(table, cutoff_m)
    h, q = table.h, table.q
    m = np.arange(k + 1, cutoff_m + 1)
    # inner sum over j: sum_{j=1..k} 1/(m - j) = h[m-1] - h[m-1-k]
    inner = (h[m - 1] - h[m - 1 - k]) if k > 1 else 1.0 / (m - 1)
    total = compensated_sum(inner / (m - 1))
    if tail:
        rest = np.empty(k)
        rest[0] = PI2_OVER_6 - q[cutoff_m - 1]
        if k >= 2:
            j = np.arange(2, k + 1)
            rest[1:] = (h[cutoff_m - 1] - h[cutoff_m - j]) / (j - 1)
        total += compensated_sum(rest)
    return total


def mean_absorption(n, mode=DISCRETE, table=None, occupation=None):
    """Expected absorption time ``E_n T_1`` from the occupation vector.

    Discrete time counts one step per visited state ``i >= 2``; in continuous
    time each visit lasts ``1 / h_{i-1}`` on average.
    """
    check_mode(mode)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n == 1:
        return 0.0
    table = ensure_table(table, n - 1)
    if occupation is None:
        occupation = occupation_vector(n, table)
    elif occupation.start_n != n:
        raise DomainError("occupation vector was computed for a different start state")
    a = occupation.values[2 : n + 1]
    if mode == CONTINUOUS:
        a = a / table.h[1:n]
    return compensated_sum(np.ascontiguousarray(a))
