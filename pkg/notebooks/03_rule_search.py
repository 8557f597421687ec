# %% [markdown]
# # Searching for the rule behind a configuration
#
# Given only the start state and the state 15 steps later, draw random rule
# numbers until one reproduces at least 28 of the 31 cells.

# %%
from allagmatic.experiments import MatchCriterion, ca_rule_search, multi_seed_study, rule_census

crit = MatchCriterion(0.9, 31)
print("cells that must match:", crit.min_matches)

# %% [markdown]
# ## The census
#
# There are only 256 rules, so we can score them all.  Anything the random
# search finds has to be on this list.

# %%
census = rule_census()
best = sorted(range(256), key=lambda r: -census.matches[r])[:6]
for r in best:
    print(f"rule {r:3d}: {census.matches[r]}/31")
print("rules meeting the criterion:", census.passing(crit))

# %% [markdown]
# ## One search, then many

# %%
report = ca_rule_search(seed=1)
print(report.to_json())

study = multi_seed_study("ca", 20, master_seed=7)
print("iterations per seed:", study.iterations)
print("median:", study.median_iterations, " share under 1000:", study.fraction_below(1000))
