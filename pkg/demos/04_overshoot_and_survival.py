"""
Overshoot and fast-descent bounds
=================================

When the chain first drops to ``<= x`` it lands at some ``Y``; the overshoot
``V_x = log x - log Y`` stays bounded in mean no matter how far above ``x``
the chain started. Separately, reaching level ``k`` from ``x`` by time ``t`` is
unlikely: ``P_x(T_k <= t) <= e^(2t) sqrt(k/x)``.
"""

# %%
from hdchain import build_harmonic_table, estimate_overshoot, survival_bound_check

table = build_harmonic_table(100_000)

# %%
print(f"{'x':>5} {'y=10x':>16} {'y=100x':>16}")
for x in (10, 100, 1000):
    near = estimate_overshoot(10 * x, x, 50_000, seed=1, table=table)
    far = estimate_overshoot(100 * x, x, 50_000, seed=2, table=table)
    print(f"{x:>5} {near.mean:8.4f}+-{near.std_error:.4f} {far.mean:8.4f}+-{far.std_error:.4f}")

# %% [markdown]
# The empirical probability sits far below the bound.

# %%
for x, k, t in [(1000, 2, 0.5), (1000, 10, 1.0), (10_000, 10, 1.0)]:
    est, bound = survival_bound_check(x, k, t, 50_000, seed=3, table=table)
    print(f"x={x:>6} k={k:>2} t={t}: P = {est.mean:.4f} +- {est.std_error:.4f}, bound {bound:.4f}")
