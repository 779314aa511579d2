"""
Closed-form identities
======================

Two exact identities follow from the limit profile ``b``. The Euler
partition sum ``s_k = sum_(j<=k) sum_(m>k) 1/((m-j)(m-1))`` equals
``pi^2/6`` for every ``k`` (``k = 1`` is Euler's formula), and the overshoot
law ``b_k(j) = sum_(m>k) b(m) p(m, j)`` is a probability distribution on
``1..k``.
"""

# %%
import math

import numpy as np

from hdchain import build_harmonic_table, euler_partition_sum, overshoot_distribution
from hdchain.harmonic import PI2_OVER_6

table = build_harmonic_table(20_000)

# %% [markdown]
# A plain truncation converges slowly; the closed tail gets the sum exactly.

# %%
for cutoff in (100, 10_000):
    plain = euler_partition_sum(1, cutoff, table, tail=False)
    tailed = euler_partition_sum(1, cutoff, table)
    print(f"cutoff {cutoff:>6}: truncated {plain:.15f}, with tail {tailed:.15f}")
print(f"pi^2/6            {PI2_OVER_6:.15f}")

# %%
s = np.array([euler_partition_sum(k, 10_000, table) for k in range(1, 1001)])
print("max |s_k - pi^2/6| over k <= 1000:", np.max(np.abs(s - PI2_OVER_6)))

# %% [markdown]
# The overshoot law puts mass ``1 - 6/pi^2`` on state 1 when ``k = 2``, and
# always sums to one.

# %%
print("b_2 =", overshoot_distribution(2, table).mass)
for k in (10, 100, 1000):
    mass = overshoot_distribution(k, table).mass
    top = np.argsort(mass)[::-1][:3] + 1
    print(f"k = {k:>4}: total {math.fsum(mass):.15f}, most likely landings {top.tolist()}")
