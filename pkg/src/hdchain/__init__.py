"""Exact and Monte Carlo computations for the harmonic descent Markov chain.

The chain jumps from ``j`` to ``i < j`` with probability proportional to
``1/(j - i)`` and is absorbed at 1. The package computes its occupation
probabilities ``a(n, i)`` exactly, their limits ``b(i)``, the identities that
characterise those limits, and simulates the chain and two couplings of it.
"""

__version__ = "0.1.0"

from .coupling import (
    CouplingBatch,
    CouplingOutcome,
    JointState,
    coupling_state_cdf,
    maximal_joint_rates,
    run_maximal_coupling,
    run_shift_coupling,
    sample_couplings,
)
from .errors import CapacityError, DomainError
from .exact import (
    CONTINUOUS,
    DISCRETE,
    LimitTable,
    OccupationVector,
    OvershootDistribution,
    euler_partition_sum,
    fixed_point_residual,
    limit_table,
    limit_value,
    mean_absorption,
    occupation_vector,
    occupation_vector_rational,
    overshoot_distribution,
)
from .harmonic import (
    PI2_OVER_6,
    SIX_OVER_PI2,
    HarmonicTable,
    build_harmonic_table,
    log_drop_prob,
    sample_holding_time,
    sample_next_state,
    theta_tail,
    transition_prob,
    transition_rate,
)
from .montecarlo import Estimate
from .rng import Stream
from .simulate import (
    OvershootSample,
    PathSample,
    estimate_absorption_time,
    estimate_occupation,
    estimate_overshoot,
    fit_log_slope,
    run_path,
    survival_bound_check,
)
