# %% [markdown]
# # A locally connected threshold network
#
# 16 layers of 31 neurons (an input layer and 15 computed ones).  Each neuron
# listens to the three nearest neurons of the layer above, with edges wrapping
# around.  The weights live in the milieu matrix, so the network runs on the
# same stepper as the automaton.

# %%
import numpy as np

from allagmatic.ann import (
    LayeredTopology,
    LearningParams,
    build_ann,
    forward,
    train_candidate,
)
from allagmatic.ca import INITIAL_STATE, TARGET_STATE, format_state, parse_state_string

x = parse_state_string(INITIAL_STATE)
y = parse_state_string(TARGET_STATE)

topo = LayeredTopology(31, 15)
ms = build_ann(topo, rng=np.random.default_rng(15))
print(ms.milieu, "non-zero weights:", np.count_nonzero(ms.milieu.to_dense()))

# %%
forward(ms, x)
for d, row in enumerate(ms.states.reshape(topo.shape)):
    print(f"{d:2d} " + "".join("#" if v else "." for v in row))

# %% [markdown]
# ## Training the last layer
#
# Only the output layer has a desired signal, so the perceptron rule adjusts
# the weights into it and leaves the rest alone.

# %%
before = ms.milieu.weight.copy()
train_candidate(ms, x, y, LearningParams(rate=0.1, epochs=10))
out = forward(ms, x)
print("output:", format_state(out))
print("target:", TARGET_STATE)
print("matches:", int((out == y).sum()), "/ 31")
changed = np.flatnonzero((ms.milieu.weight != before).any(axis=1))
print("rows whose weights changed lie in layer(s):", sorted({topo.position(i)[0] for i in changed}))

# %% [markdown]
# ## One layer can copy some automaton rules
#
# With a single computed layer and hand-picked weights, a threshold unit
# reproduces any linearly separable rule, e.g. rule 192 (left AND center).
# Rule 110 is not separable, so no single unit can compute it.

# %%
single = LayeredTopology(8, 1)
w = np.zeros((single.size, 3))
offs = single.offsets()
computed = (np.arange(single.size) >= single.width)[:, None]
w[(offs == -1) & computed] = 0.25
w[(offs == 0) & computed] = 0.25
net = build_ann(single, weights=w)
pattern = np.array([0, 0, 0, 1, 0, 1, 1, 1])
print("input :", format_state(pattern))
print("output:", format_state(forward(net, pattern)))
