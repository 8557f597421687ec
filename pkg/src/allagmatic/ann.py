"""Locally connected multilayer feedforward network of threshold units.

Entities are laid out depth-major: the neuron at ``(depth, column)`` has
global index ``depth * width + column``.  Depth 0 is the input layer and has
no incoming connections; every neuron at depth ``d >= 1`` receives exactly
three weighted connections from depth ``d - 1`` at columns ``c - 1, c, c + 1``
(wrapping around the layer edges).  Milieu rows list those neighbours by
ascending global index.

A forward pass runs the network on the generic synchronous stepper: after
writing the input layer, ``layers`` steps leave every depth holding its
layer-by-layer value, because depth ``d`` is final from step ``d`` on.

Learning applies the perceptron rule to the connections into the output
layer, the only layer with a desired signal.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import (
    BINARY,
    MetastableSystem,
    MilieuMatrix,
    MilieuView,
    System,
    UpdateFunction,
    compose_system,
    parameterize,
    step,
)
from .errors import InvalidCharacter, LengthMismatch, OutOfRange

THRESHOLD = 0.5
WIDTH = 31
LAYERS = 15
FAN_IN = 3


@dataclass(frozen=True)
class LayeredTopology:
    width: int = WIDTH
    layers: int = LAYERS

    def __post_init__(self) -> None:
        if self.width < 3:
            raise OutOfRange(f"layer width must be at least 3, got {self.width}")
        if self.layers < 1:
            raise OutOfRange(f"need at least one computed layer, got {self.layers}")

    @property
    def depths(self) -> int:
        return self.layers + 1

    @property
    def size(self) -> int:
        return self.depths * self.width

    @property
    def shape(self) -> tuple[int, int]:
        return (self.depths, self.width)

    def index(self, depth: int, column: int) -> int:
        if not (0 <= depth < self.depths and 0 <= column < self.width):
            raise OutOfRange(f"(depth {depth}, column {column}) outside {self.shape}")
        return depth * self.width + column

    def position(self, i: int) -> tuple[int, int]:
        if not 0 <= i < self.size:
            raise OutOfRange(f"entity index {i} outside 0..{self.size - 1}")
        return divmod(int(i), self.width)

    def layer(self, depth: int) -> slice:
        return slice(depth * self.width, (depth + 1) * self.width)

    @property
    def output_layer(self) -> slice:
        return self.layer(self.layers)

    def milieu(self) -> MilieuMatrix:
        w = self.width
        rows: list[list[int]] = [[] for _ in range(w)]
        for d in range(1, self.depths):
            base = (d - 1) * w
            for c in range(w):
                rows.append(sorted(base + (c + k) % w for k in (-1, 0, 1)))
        return MilieuMatrix.from_rows(rows, self.size)

    def offsets(self) -> np.ndarray:
        """Column offset in {-1, 0, +1} of every milieu slot (0 for input rows)."""
        m = _topology_milieu(self)
        rows = np.arange(self.size)
        offs = (m.index % self.width) - (rows % self.width)[:, None]
        offs = (offs + 1) % self.width - 1
        return np.where(m.mask(), offs, 0)


@lru_cache(maxsize=None)
def _topology_milieu(topology: LayeredTopology) -> MilieuMatrix:
    return topology.milieu()


@dataclass(frozen=True)
class LearningParams:
    rate: float = 0.1
    epochs: int = 10

    def __post_init__(self) -> None:
        if not self.rate > 0:
            raise OutOfRange(f"learning rate must be > 0, got {self.rate}")
        if self.epochs < 0:
            raise OutOfRange(f"epochs must be >= 0, got {self.epochs}")


def input_sum(weights: Sequence[float], activations: Sequence[float]) -> float:
    if len(weights) != len(activations):
        raise LengthMismatch(f"{len(weights)} weights for {len(activations)} activations")
    total = 0.0
    for w, a in zip(weights, activations):
        total += float(w) * float(a)
    return total


def threshold_activation(in_j: float) -> int:
    return 1 if in_j >= THRESHOLD else 0


def perceptron_update(weight: float, rate: float, desired: int, actual: int, incoming: int) -> float:
    if not rate > 0:
        raise OutOfRange(f"learning rate must be > 0, got {rate}")
    return weight + rate * (desired - actual) * incoming


def _local(own: int, view: MilieuView, rules: object) -> int:
    if len(view) == 0:
        return own
    return threshold_activation(input_sum(view.weight, view.state))


def _vectorized(states: np.ndarray, milieu: MilieuMatrix, rules: object) -> np.ndarray:
    acts = states[milieu.index].astype(np.float64)
    total = np.zeros(milieu.size)
    for k in range(milieu.q):
        total += milieu.weight[:, k] * acts[:, k]
    fired = (total >= THRESHOLD).astype(states.dtype)
    return np.where(milieu.degrees > 0, fired, states)


THRESHOLD_UPDATE = UpdateFunction(_local, FAN_IN, _vectorized, name="weighted-threshold")


@lru_cache(maxsize=None)
def ann_system(topology: LayeredTopology = LayeredTopology()) -> System:
    return compose_system(topology.shape, _topology_milieu(topology), THRESHOLD_UPDATE, BINARY)


def topology_of(ms: MetastableSystem) -> LayeredTopology:
    depths, width = ms.system.shape
    return LayeredTopology(width, depths - 1)


def random_weights(topology: LayeredTopology, rng: np.random.Generator) -> np.ndarray:
    """Uniform [0, 1) weights on every permitted slot, drawn in global row order."""
    weights = np.zeros((topology.size, FAN_IN))
    weights[topology.width :] = rng.random((topology.size - topology.width, FAN_IN))
    return weights


def build_ann(
    topology: LayeredTopology = LayeredTopology(),
    rng: np.random.Generator | int | None = None,
    weights: np.ndarray | None = None,
) -> MetastableSystem:
    """Network with all states 0 and random (or given) weights."""
    if weights is None:
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        weights = random_weights(topology, rng)
    return parameterize(
        ann_system(topology), np.zeros(topology.size, dtype=np.uint8), weights=weights
    )


def forward(ms: MetastableSystem, inputs: Sequence[int] | np.ndarray) -> np.ndarray:
    """Propagate ``inputs`` through every layer and return the output layer."""
    topo = topology_of(ms)
    inputs = BINARY.coerce(np.asarray(inputs))
    if inputs.size != topo.width:
        raise LengthMismatch(f"input layer has {topo.width} neurons, got {inputs.size} values")
    ms.states[topo.layer(0)] = inputs
    for _ in range(topo.layers):
        step(ms)
    return ms.states[topo.output_layer].copy()


def train_candidate(
    ms: MetastableSystem,
    inputs: Sequence[int] | np.ndarray,
    target: Sequence[int] | np.ndarray,
    lp: LearningParams = LearningParams(),
) -> MetastableSystem:
    """Perceptron-train the connections into the output layer, in place."""
    topo = topology_of(ms)
    target = BINARY.coerce(np.asarray(target))
    if target.size != topo.width:
        raise LengthMismatch(f"output layer has {topo.width} neurons, target has {target.size}")
    rows = topo.output_layer
    weights = ms.milieu.weight
    for _ in range(lp.epochs):
        forward(ms, inputs)
        error = target.astype(np.float64) - ms.states[rows]
        incoming = ms.states[ms.milieu.index[rows]].astype(np.float64)
        weights[rows] = weights[rows] + lp.rate * error[:, None] * incoming
    return ms


def format_weights(ms: MetastableSystem) -> str:
    """One ``depth column offset weight`` line per connection."""
    topo = topology_of(ms)
    offs = topo.offsets()
    lines = []
    for i in range(topo.width, topo.size):
        depth, col = topo.position(i)
        for k in np.argsort(offs[i], kind="stable"):
            lines.append(f"{depth} {col} {int(offs[i, k]):+d} {float(ms.milieu.weight[i, k])!r}\n")
    return "".join(lines)


def parse_weights(text: str, topology: LayeredTopology = LayeredTopology()) -> np.ndarray:
    """Inverse of :func:`format_weights`; returns a ``p x 3`` weight array."""
    offs = topology.offsets()
    weights = np.full((topology.size, FAN_IN), np.nan)
    weights[: topology.width] = 0.0
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            d, c, o, w = line.split()
            i = topology.index(int(d), int(c))
            (k,) = np.flatnonzero(offs[i] == int(o))
            weights[i, k] = float(w)
        except (ValueError, OutOfRange) as exc:
            raise InvalidCharacter(f"line {n}: cannot read weight entry {line!r}") from exc
    return weights
