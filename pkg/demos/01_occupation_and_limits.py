"""
Occupation probabilities and their limits
=========================================

The harmonic descent chain jumps from ``j`` to ``i < j`` with probability
proportional to ``1/(j - i)``. Started at ``n``, it visits ``i`` with
probability ``a(n, i)``, and ``a(n, i)`` settles to ``b(i) = 6 h_{i-1} / (pi^2 (i-1))``
as ``n`` grows. This script computes both and watches the gap close.
"""

# %%
import numpy as np

from hdchain import build_harmonic_table, limit_table, limit_value, occupation_vector

table = build_harmonic_table(100_000)

# %% [markdown]
# A small start first: from 4 the chain visits 2 with probability 7/11.

# %%
a4 = occupation_vector(4, table)
print("a(4, .) =", a4.values[1:])
print("7/11    =", 7 / 11)

# %% [markdown]
# For larger starts the vector looks like the limit profile ``b``.

# %%
print(f"{'i':>3} {'a(1e2,i)':>12} {'a(1e4,i)':>12} {'b(i)':>12}")
a_small, a_large = occupation_vector(100, table), occupation_vector(10_000, table)
for i in (1, 2, 3, 5, 10, 50):
    print(f"{i:>3} {a_small[i]:12.8f} {a_large[i]:12.8f} {limit_value(i, table):12.8f}")

# %% [markdown]
# The gap shrinks by more than an order of magnitude per decade of ``n``.

# %%
for n in (100, 1000, 10_000, 100_000):
    a = occupation_vector(n, table)
    gap = max(abs(a[i] - limit_value(i, table)) for i in range(2, 11))
    print(f"n = {n:>6}: max_(i<=10) |a(n,i) - b(i)| = {gap:.3e}")

# %% [markdown]
# ``b`` is a fixed point of the chain: ``b(i) = sum_(j>i) b(j) p(j, i)``.
# The residuals use a closed-form tail past the cutoff, so they sit at
# rounding level.

# %%
lt = limit_table(50, table, cutoff_m=10_000)
print("max fixed-point residual, i <= 50:", np.max(np.abs(lt.residuals[1:])))
