"""Query counts grow linearly in n for a fixed epsilon."""
# %%
from smkedl import (EdlConfig, FixedEstimator, GeneratorConfig, edl_solve, generate_instance,
                    greedy_plus_singleton, normalize_instance)

counts = {}
for n in (50, 100, 200, 400):
    inst = normalize_instance(generate_instance(GeneratorConfig("cut", n, seed=1)))
    M = greedy_plus_singleton(inst).value
    sol, _ = edl_solve(inst, config=EdlConfig(0.1, estimator=FixedEstimator(M, 19.0)))
    counts[n] = sol.queries_used
    print(n, sol.queries_used, f"{sol.queries_used / n:.1f} per element")

# %%
ns = sorted(counts)
print("doubling ratios", [round(counts[b] / counts[a], 3) for a, b in zip(ns, ns[1:])])
