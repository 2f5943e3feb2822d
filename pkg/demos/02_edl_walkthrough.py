"""One run of the threshold solver, traced step by step."""
# %%
from smkedl import (EdlConfig, GeneratorConfig, brute_force, edl_solve, generate_instance,
                    normalize_instance, replay_trace)

inst = normalize_instance(generate_instance(GeneratorConfig("cut", 12, seed=5)))
print(inst.label, "budget", inst.budget)
print("costs", inst.costs.tolist())

# %%
sol, trace = edl_solve(inst, config=EdlConfig(epsilon=0.1, trace="full"))
print("members", sol.members, "value", sol.value, "cost", sol.cost)
print("queries", sol.queries_used, "iterations", sol.metadata["iterations"])
print("won by", sol.metadata["source"])

# %%
# First few insertions: which threshold admitted which element into which set.
for ins in trace.insertions[:6]:
    print(ins)

# %%
# The trace replays against the instance, value for value.
rep = replay_trace(trace, inst)
print("replayed X", rep.X_ids, "Y", rep.Y_ids)

# %%
opt = brute_force(inst).opt
print(f"OPT {opt}, ratio {opt / sol.value:.3f}")
