"""Empirical approximation ratios against the exhaustive optimum."""
# %%
from smkedl import random_instance_sweep

report = random_instance_sweep("mixed", sizes=[6, 8, 10], seeds=range(5),
                               budget_rules=(("fraction", 0.3), ("max_cost_multiple", 1.0)),
                               cost_dists=("uniform", "correlated"))
print(report.summary())

# %%
# Worst rows per solver. The guaranteed factor is 5 + eps.
for solver in ("edl", "greedy_plus_singleton"):
    rows = [r for r in report.rows if r.solver == solver]
    worst = max(rows, key=lambda r: r.ratio)
    print(f"{solver:24s} worst {worst.ratio:.4f} on {worst.instance_label}")

# %%
print(report.to_csv(timing=False).splitlines()[:5])
