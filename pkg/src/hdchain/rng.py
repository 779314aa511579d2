"""Counter-based, splittable random streams.

Every Monte Carlo replicate ``r`` under a run seed ``s`` gets its own stream,
identified by a 64-bit key and an odd 64-bit increment, both derived from
``(s, r)`` with the SplitMix64 finalizer. Draw number ``c`` of a stream is
``mix64(key + (c + 1) * gamma)``, a pure function of ``(s, r, c)``. Results
therefore do not depend on the order in which replicates are executed or on
how they are split across workers.

The same arithmetic exists twice: in plain Python (:class:`Stream`, used for
one-off draws and single trajectories) and as numba functions used inside the
batch kernels. ``tests/test_rng.py`` pins them to each other bit for bit.
"""

import math

import numpy as np
from numba import njit

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_SEED_SALT = 0x5851F42D4C957F2D
_GAMMA_SALT = 0xD1B54A32D192ED03

# numba sees module globals as compile-time constants; keep them uint64 so
# shifts and products never get promoted to float64.
_U_GOLDEN = np.uint64(_GOLDEN)
_U_M1 = np.uint64(_M1)
_U_M2 = np.uint64(_M2)
_U_SEED_SALT = np.uint64(_SEED_SALT)
_U_GAMMA_SALT = np.uint64(_GAMMA_SALT)
_U_ONE = np.uint64(1)
_U_S11 = np.uint64(11)
_U_S27 = np.uint64(27)
_U_S30 = np.uint64(30)
_U_S31 = np.uint64(31)
_TWO_M53 = 2.0 ** -53


def mix64(z):
    """SplitMix64 output finalizer on a Python int."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def as_seed(seed):
    """Reduce ``seed`` mod 2**64 to the ``np.uint64`` the kernels expect."""
    return np.uint64(int(seed) & _MASK)


def stream_key(seed, replicate):
    """``(key, gamma)`` of the stream for ``replicate`` under ``seed``."""
    base = mix64((seed & _MASK) ^ _SEED_SALT)
    key = mix64((base + (replicate + 1) * _GOLDEN) & _MASK)
    gamma = mix64(key ^ _GAMMA_SALT) | 1
    return key, gamma


class Stream:
    """A sequential view of one counter-based stream.

    >>> s = Stream(42)
    >>> u = s.uniform()
    >>> 0.0 <= u < 1.0
    True
    """

    __slots__ = ("seed", "replicate", "key", "gamma", "counter")

    def __init__(self, seed, replicate=0, counter=0):
        self.seed = int(seed) & _MASK
        self.replicate = int(replicate)
        self.key, self.gamma = stream_key(self.seed, self.replicate)
        self.counter = int(counter)

    def __repr__(self):
        return f"Stream(seed={self.seed}, replicate={self.replicate}, counter={self.counter})"

    def spawn(self, replicate):
        """Fresh stream for another replicate under the same seed."""
        return Stream(self.seed, replicate)

    def next_u64(self):
        z = mix64(self.key + (self.counter + 1) * self.gamma)
        self.counter += 1
        return z

    def uniform(self):
        """Uniform on [0, 1) with 53 random bits; 1.0 is never returned."""
        return (self.next_u64() >> 11) * _TWO_M53

    def exponential(self):
        """Standard exponential by inversion of ``uniform``."""
        return -math.log1p(-self.uniform())


@njit(cache=True, nogil=True)
def nb_mix64(z):
    z = (z ^ (z >> _U_S30)) * _U_M1
    z = (z ^ (z >> _U_S27)) * _U_M2
    return z ^ (z >> _U_S31)


@njit(cache=True, nogil=True)
def nb_stream_key(seed, replicate):
    base = nb_mix64(np.uint64(seed) ^ _U_SEED_SALT)
    key = nb_mix64(base + np.uint64(replicate + 1) * _U_GOLDEN)
    gamma = nb_mix64(key ^ _U_GAMMA_SALT) | _U_ONE
    return key, gamma


@njit(cache=True, nogil=True)
def nb_uniform(key, gamma, counter):
    z = nb_mix64(key + np.uint64(counter + 1) * gamma)
    return np.float64(z >> _U_S11) * _TWO_M53


@njit(cache=True, nogil=True)
def nb_exponential(key, gamma, counter):
    return -math.log1p(-nb_uniform(key, gamma, counter))
