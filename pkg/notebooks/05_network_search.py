# %% [markdown]
# # Random restarts over networks
#
# Build a fresh random network, train its output layer, and keep going until
# one reproduces at least 28 of the 31 target cells.

# %%
from allagmatic.ann import format_weights
from allagmatic.experiments import ann_search, multi_seed_study

report = ann_search(seed=2026)
print(report.to_json())
print(format_weights(report.network).splitlines()[:3])

# %% [markdown]
# Across seeds: how often does the search succeed, how long does it take, and
# does it ever hit the target exactly?  The leftmost target cells need the
# signal to travel one column per layer for all 15 layers, which random
# weights almost never allow.

# %%
study = multi_seed_study("ann", 10, master_seed=3, budget=100_000)
print("iterations:", study.iterations)
print("matches   :", [r.matches for r in study.reports])
print("pass rate :", study.pass_rate, " exact hits:", study.exact_matches)
