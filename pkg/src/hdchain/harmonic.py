r"""Harmonic numbers and the one-step kernel of the harmonic descent chain.

The chain lives on ``{1, 2, 3, ...}``. From ``j >= 2`` it jumps to ``i < j``
with probability

.. math::
    p(j, i) = \frac{1}{(j - i) h_{j-1}}, \qquad h_n = \sum_{k=1}^n \frac1k,

and state 1 is absorbing. In continuous time the same jumps happen at rate
``1/(j - i)``, so the holding time in ``j`` is Exponential(``h_{j-1}``).

Every formula in the package is built from the partial sums ``h_n`` and
``q_n = sum 1/k**2``, which are precomputed once into a :class:`HarmonicTable`.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import CapacityError, DomainError

#: pi**2 / 6, correctly rounded.
PI2_OVER_6 = 1.6449340668482264
#: 6 / pi**2, correctly rounded.
SIX_OVER_PI2 = 0.6079271018540267
EULER_GAMMA = 0.5772156649015329

_EPS = np.finfo(float).eps


@njit(cache=True)
def _harmonic_sums(max_n):
    h = np.empty(max_n + 1)
    q = np.empty(max_n + 1)
    h[0] = 0.0
    q[0] = 0.0
    s1 = 0.0
    c1 = 0.0
    s2 = 0.0
    c2 = 0.0
    for k in range(1, max_n + 1):
        x = 1.0 / k
        t = s1 + x
        if abs(s1) >= abs(x):
            c1 += (s1 - t) + x
        else:
            c1 += (x - t) + s1
        s1 = t
        h[k] = s1 + c1

        x = x / k
        t = s2 + x
        if abs(s2) >= abs(x):
            c2 += (s2 - t) + x
        else:
            c2 += (x - t) + s2
        s2 = t
        q[k] = s2 + c2
    return h, q


@njit(cache=True, nogil=True)
def compensated_sum(values):
    """Neumaier-compensated sum of a 1-d float array, in index order."""
    s = 0.0
    c = 0.0
    for k in range(values.shape[0]):
        x = values[k]
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c


@njit(cache=True, nogil=True)
def gap_search(h, target, gmax):
    """Smallest ``g`` in ``[1, gmax]`` with ``h[g] >= target``.

    ``h`` must be nondecreasing on ``[1, gmax]``; ``gmax`` is returned if no
    entry reaches ``target``.
    """
    lo = 1
    hi = gmax
    while lo < hi:
        mid = (lo + hi) >> 1
        if h[mid] >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


@dataclass(frozen=True, eq=False)
class HarmonicTable:
    """Read-only partial sums ``h[n] = sum_{k<=n} 1/k`` and ``q[n] = sum_{k<=n} 1/k**2``.

    Both arrays have length ``max_n + 1`` and are indexed by ``n`` directly,
    with ``h[0] = q[0] = 0``.
    """

    max_n: int
    h: np.ndarray
    q: np.ndarray

    def require(self, n):
        """Raise :class:`CapacityError` unless ``h[n]`` is available."""
        if n > self.max_n:
            raise CapacityError(
                f"harmonic table holds n <= {self.max_n}, but h[{n}] is needed"
            )


def build_harmonic_table(max_n):
    """Precompute ``h`` and ``q`` up to ``max_n`` with compensated summation."""
    max_n = int(max_n)
    if max_n < 1:
        raise DomainError(f"max_n must be >= 1, got {max_n}")
    h, q = _harmonic_sums(max_n)
    h.flags.writeable = False
    q.flags.writeable = False
    return HarmonicTable(max_n, h, q)


def ensure_table(table, max_n):
    """Return ``table`` if it reaches ``max_n``, or build one when ``table`` is None."""
    if table is None:
        return build_harmonic_table(max(int(max_n), 1))
    table.require(max_n)
    return table


def harmonic_asymptotic(n):
    """``log n + gamma + 1/(2n) - 1/(12 n**2)``.

    Diagnostics only; exact code paths always read the table.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return math.log(n) + EULER_GAMMA + 1.0 / (2 * n) - 1.0 / (12.0 * n * n)


def _check_state(name, value):
    if value < 1:
        raise DomainError(f"{name} must be a state >= 1, got {value}")


def transition_prob(j, i, table):
    """One-step probability ``p(j, i)`` of the discrete chain."""
    _check_state("j", j)
    _check_state("i", i)
    if j == 1:
        if i == 1:
            return 1.0
        raise DomainError("state 1 is absorbing")
    if i >= j:
        raise DomainError(f"paths are strictly decreasing: need i < j, got ({j}, {i})")
    table.require(j - 1)
    return 1.0 / ((j - i) * table.h[j - 1])


def transition_rate(j, i):
    """Jump rate ``1/(j - i)`` of the continuous chain."""
    _check_state("i", i)
    if i >= j:
        raise DomainError(f"paths are strictly decreasing: need i < j, got ({j}, {i})")
    return 1.0 / (j - i)


def sample_next_state(j, u, table):
    """Inverse-CDF draw of the successor of ``j`` from a uniform ``u`` in [0, 1).

    ``P(j - next <= g) = h_g / h_{j-1}``, so the gap is the smallest ``g``
    with ``h[g] >= u * h[j-1]``, found by bisection over the table.
    """
    if j < 2:
        raise DomainError("state 1 is absorbing; no successor to sample")
    if not 0.0 <= u < 1.0:
        raise DomainError(f"u must lie in [0, 1), got {u}")
    table.require(j - 1)
    return j - gap_search(table.h, u * table.h[j - 1], j - 1)


def sample_holding_time(j, e, table):
    """Holding time in ``j`` from a standard exponential variate ``e``."""
    if j < 2:
        raise DomainError("state 1 is absorbing; it has no holding time")
    table.require(j - 1)
    return e / table.h[j - 1]


def drop_count(y, a):
    """``floor(exp(-a) * y)``, the number of states at or below ``exp(-a) * y``.

    The product is nudged up by 4 ulps so that exact breakpoints such as
    ``a = log 2, y = 10`` are not lost to rounding in ``exp``.
    """
    return math.floor(math.exp(-a) * y * (1.0 + 4 * _EPS))


def log_drop_prob(y, a, table):
    """``P_y(log y - log Y_1 >= a)`` for one discrete step from ``y``."""
    if y < 2:
        raise DomainError(f"y must be >= 2, got {y}")
    if a < 0:
        raise DomainError(f"a must be >= 0, got {a}")
    table.require(y - 1)
    if a <= -math.log1p(-1.0 / y):
        return 1.0
    if a > math.log(y):
        return 0.0
    m = min(drop_count(y, a), y - 1)
    h = table.h
    return (h[y - 1] - h[y - m - 1]) / h[y - 1]


def theta_tail(a):
    """Tail mass ``-log(1 - exp(-a))`` of the limiting log-drop measure."""
    if a <= 0:
        raise DomainError(f"a must be > 0, got {a}")
    if a < 1.0:
        return -math.log(-math.expm1(-a))
    return -math.log1p(-math.exp(-a))
