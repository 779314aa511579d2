"""
Time to absorption
==================

In continuous time the chain holds at ``j`` for an ``Exp(h_{j-1})`` time,
so every jump ``j -> i`` happens at rate ``1/(j - i)``. The mean time to
reach state 1 from ``n`` grows like ``(6/pi^2) log n``. We estimate it by
simulation, compare with the exact value ``sum_i a(n,i)/h_{i-1}``, and fit
the slope.
"""

# %%
import numpy as np

from hdchain import Stream, build_harmonic_table, estimate_absorption_time, mean_absorption, run_path
from hdchain.harmonic import SIX_OVER_PI2
from hdchain.simulate import fit_log_slope, reference_mean

table = build_harmonic_table(100_000)

# %% [markdown]
# One path: strictly decreasing, few jumps, most of the time spent near the bottom.

# %%
path = run_path(10_000, "continuous", Stream(seed=1), table)
print("states:", path.states.tolist())
print("holds :", np.round(path.holds, 3).tolist())
print("T_1   :", path.total_time)

# %% [markdown]
# Replicate ``r`` always uses stream ``(seed, r)``, so estimates do not
# depend on how many workers share the load.

# %%
ns = [100, 1000, 10_000, 100_000]
means = []
for n in ns:
    est = estimate_absorption_time(n, "continuous", 50_000, seed=2024, table=table, workers=2)
    exact = mean_absorption(n, "continuous", table)
    means.append(est.mean)
    print(f"n = {n:>6}: MC {est.mean:.4f} +- {est.std_error:.4f}, exact {exact:.4f}, "
          f"(6/pi^2) log n = {reference_mean(n):.4f}")

slope, intercept = fit_log_slope(ns, means)
print(f"fitted slope {slope:.4f} vs 6/pi^2 = {SIX_OVER_PI2:.4f}; intercept {intercept:.3f}")

# %% [markdown]
# Counting jumps instead of time gives the discrete mean ``sum_(i>=2) a(n, i)``.

# %%
est = estimate_absorption_time(1000, "discrete", 50_000, seed=5, table=table)
print(f"discrete n = 1000: MC {est.mean:.4f} +- {est.std_error:.4f}, "
      f"exact {mean_absorption(1000, 'discrete', table):.4f}")
