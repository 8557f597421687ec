# %% [markdown]
# # Entities, milieus and update functions
#
# Any model here is made of three parts: a tuple of entities each holding a
# state, a milieu matrix saying which entities each one listens to, and an
# update function mapping an entity's state and its milieu to the next state.
# This walk-through builds a model that is neither a cellular automaton nor a
# neural network, to show the engine does not care.

# %%
import numpy as np

from allagmatic import REAL, MilieuMatrix, UpdateFunction, compose_system, milieu_of, parameterize

# %% [markdown]
# ## Structure
#
# Eight entities on a ring, each listening to both neighbours with a weight of
# one half.  Rows keep their order, which is the order the update function
# sees.

# %%
p = 8
milieu = MilieuMatrix.from_rows([[((i - 1) % p, 0.5), ((i + 1) % p, 0.5)] for i in range(p)])
print(milieu)
print(milieu.to_dense())

# %% [markdown]
# ## Operation
#
# Diffusion: the next state is the weighted sum of the milieu.  The local form
# is all the engine needs; the vectorized form is an optional fast path.


# %%
def diffuse(own, view, rules):
    return sum(n.weight * n.state for n in view)


def diffuse_all(states, milieu, rules):
    return (milieu.weight * states[milieu.index]).sum(axis=1)


DIFFUSION = UpdateFunction(diffuse, arity=2, vectorized=diffuse_all, name="diffusion")

# %% [markdown]
# ## System and metastable system
#
# Pairing structure and operation gives a `System`, which holds no values.
# Parameterizing it with initial states gives something that can run.

# %%
system = compose_system(p, milieu, DIFFUSION, REAL)
ms = parameterize(system, np.eye(p)[0] * 8.0)
print(milieu_of(ms, 0))

trace = ms.run(6)
np.set_printoptions(precision=3, suppress=True)
print(trace.snapshots)
print("total mass conserved:", np.allclose(trace.snapshots.sum(axis=1), 8.0))

# %% [markdown]
# The slow entity-by-entity path gives the same answer.

# %%
slow = parameterize(system, np.eye(p)[0] * 8.0).run(6, vectorized=False)
print("paths agree:", np.allclose(slow.snapshots, trace.snapshots))
