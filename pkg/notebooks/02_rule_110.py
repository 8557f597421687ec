# %% [markdown]
# # Rule 110 on a ring of 31 cells
#
# The cellular automaton is the generic engine with a three-cell milieu (left,
# self, right) and a rule-table update function.

# %%
import os
from pathlib import Path

from allagmatic.ca import (
    INITIAL_STATE,
    TARGET_STATE,
    CAConfig,
    build_ca,
    format_rule_table,
    format_state,
    rule_from_number,
)
from allagmatic.io import to_pgm

# %%
print(format_rule_table(rule_from_number(110)))

# %%
ms = build_ca(CAConfig(31), 110, INITIAL_STATE)
trace = ms.run(15)
for t, row in enumerate(trace):
    print(f"{t:2d} " + "".join("#" if x else "." for x in row))

print("matches target:", format_state(trace.final) == TARGET_STATE)

# %% [markdown]
# A longer run, saved as a graymap space-time diagram (black is 1).

# %%
long = build_ca(CAConfig(101), 110, "0" * 100 + "1").run(100)
out = Path(os.environ.get("NOTEBOOK_OUT", "."))
(out / "rule110.pgm").write_bytes(to_pgm(long, {"rule": 110, "width": 101, "steps": 100}))
print("wrote", out / "rule110.pgm")
