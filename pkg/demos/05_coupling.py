"""
Coupling two chains
===================

Two copies started at ``x < y`` can be run together so that each still
follows its own law while they jump to a common state as often as
possible: the maximal coupling. The shift coupling first freezes the lower
copy and lets the upper one fall past it. The state where they meet,
``S``, controls how different ``a(x, .)`` and ``a(y, .)`` can be:
``|a(x, i) - a(y, i)| <= P(S < i)``.
"""

# %%
import numpy as np

from hdchain import (
    JointState,
    Stream,
    build_harmonic_table,
    coupling_state_cdf,
    maximal_joint_rates,
    occupation_vector,
    run_shift_coupling,
    sample_couplings,
)

table = build_harmonic_table(200_000)

# %% [markdown]
# Out of ``(2, 3)`` the pair jumps together to ``(1, 1)`` at rate 1/2, the
# lower copy moves alone at rate 1/2, and the upper copy collides with the
# lower one at rate 1.

# %%
for state, rate in maximal_joint_rates(JointState(2, 3)):
    print(state, rate)

batch = sample_couplings(2, 3, 100_000, seed=1, protocol="maximal", table=table)
print("P(S = 2) ~", (batch.s_couple == 2).mean(), "(exactly 1/2)")

# %% [markdown]
# A recorded shift-coupling run from ``(100, 10000)``.

# %%
out = run_shift_coupling(100, 10_000, Stream(seed=4), table, record=True)
print("phase 1 landing:", out.phase1_landing, "at t =", round(out.t_phase1, 3))
print("coupled at", out.s_couple, "at t =", round(out.t_couple, 3), "; absorbed at t =", round(out.t_absorb, 3))
print(np.array2string(out.trajectory, precision=3, suppress_small=True))

# %% [markdown]
# The coupling inequality, with exact occupation vectors on the left.

# %%
a_x, a_y = occupation_vector(100, table), occupation_vector(1000, table)
for i in range(2, 6):
    est = coupling_state_cdf(100, 1000, i, 50_000, seed=10 + i, table=table)
    print(f"i={i}: |a(100,i) - a(1000,i)| = {abs(a_x[i] - a_y[i]):.2e} <= P(S < i) = {est.mean:.3f}")

# %% [markdown]
# Coupling happens at larger states as the starts grow.

# %%
for n in (100, 1000, 10_000):
    est = coupling_state_cdf(n, 10 * n, 5, 50_000, seed=n, table=table)
    print(f"start ({n}, {10 * n}): P(S < 5) = {est.mean:.4f} +- {est.std_error:.4f}")
