"""Replicate scheduling and reproducible reductions shared by the simulators."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .harmonic import compensated_sum


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo mean with its standard error."""

    mean: float
    std_error: float
    n_reps: int
    seed: int

    def within(self, value, n_sigma=3.0):
        """True if ``value`` lies within ``n_sigma`` standard errors of the mean."""
        return abs(self.mean - value) <= n_sigma * self.std_error


def check_reps(n_reps, workers=1):
    if n_reps < 1:
        raise DomainError(f"n_reps must be >= 1, got {n_reps}")
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")


def chunk_bounds(n_reps, workers):
    """Contiguous ``[r0, r1)`` blocks, one per worker (fewer if ``n_reps`` is small)."""
    edges = np.linspace(0, n_reps, min(workers, n_reps) + 1).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


def run_replicates(kernel, n_reps, workers, args, outputs):
    """Fill ``outputs`` (arrays with leading axis ``n_reps``) by calling
    ``kernel(r0, r1, *args, *slices)`` on each chunk.

    Replicate ``r`` always writes row ``r``, so the filled arrays do not depend
    on ``workers``. Kernels are compiled with ``nogil`` and run on threads.
    """
    bounds = chunk_bounds(n_reps, workers)

    def call(b):
        r0, r1 = b
        kernel(r0, r1, *args, *[out[r0:r1] for out in outputs])

    if len(bounds) == 1:
        call(bounds[0])
        return
    with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
        list(pool.map(call, bounds))


def mean_estimate(samples, seed):
    """Sample mean and ``s / sqrt(N)``, summed in replicate order."""
    x = np.ascontiguousarray(samples, dtype=np.float64)
    n = x.shape[0]
    mean = compensated_sum(x) / n
    if n < 2:
        return Estimate(float(mean), 0.0, n, seed)
    var = compensated_sum((x - mean) ** 2) / (n - 1)
    return Estimate(float(mean), math.sqrt(var / n), n, seed)


def proportion_estimate(flags, seed):
    """Fraction of true flags with binomial standard error ``sqrt(p(1-p)/N)``."""
    flags = np.asarray(flags)
    n = flags.shape[0]
    p = int(np.count_nonzero(flags)) / n
    return Estimate(p, math.sqrt(p * (1.0 - p) / n), n, seed)
