"""Model-agnostic building blocks: entity states, milieus and update functions.

A :class:`System` pairs a structure (entity shape plus milieu matrix) with an
operation (an :class:`UpdateFunction`) and holds no state values.  Feeding it
initial states and actual parameters through :func:`parameterize` gives a
:class:`MetastableSystem`, which :func:`step` advances synchronously.

Nothing in this module knows about cellular automata or neural networks; the
concrete models in :mod:`allagmatic.ca` and :mod:`allagmatic.ann` only supply
milieu matrices and update functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import (
    ArityMismatch,
    IncompleteParameters,
    IndexOutOfRange,
    LengthMismatch,
    MetamodelError,
    NonBinaryState,
    NonSquareMilieu,
    StateDomainError,
)

__all__ = [
    "StateDomain",
    "BINARY",
    "REAL",
    "MilieuMatrix",
    "Neighbor",
    "MilieuView",
    "UpdateFunction",
    "System",
    "MetastableSystem",
    "Trace",
    "compose_system",
    "parameterize",
    "step",
    "run",
    "milieu_of",
]


@dataclass(frozen=True)
class StateDomain:
    """The set of values an entity state may take.

    ``values`` is ``None`` for unrestricted numeric domains.
    """

    name: str
    dtype: np.dtype
    values: frozenset | None = None
    error: type[StateDomainError] = StateDomainError

    def coerce(self, states: Sequence[Any] | np.ndarray) -> np.ndarray:
        raw = np.asarray(states)
        if raw.ndim != 1:
            raise StateDomainError(f"entity states must be one-dimensional, got shape {raw.shape}")
        if self.values is not None:
            bad = ~np.isin(raw, list(self.values))
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                raise self.error(
                    f"state {raw[i]!r} at index {i} is not in the {self.name} domain"
                )
        return raw.astype(self.dtype, copy=True)


BINARY = StateDomain("binary", np.dtype(np.uint8), frozenset({0, 1}), NonBinaryState)
REAL = StateDomain("real", np.dtype(np.float64))


class MilieuMatrix:
    """Weighted adjacency structure stored as ordered rows.

    Row ``i`` lists the entities in the milieu of entity ``i`` together with
    connection weights, in the order update functions see them.  Rows are
    padded to the maximum degree ``q``; padding slots point at the row's own
    index with weight 0 and are excluded by ``degrees``.

    The dense ``p x p`` adjacency view is available through :meth:`to_dense`.
    """

    def __init__(self, index: np.ndarray, weight: np.ndarray, degrees: np.ndarray, *, check: bool = True):
        index = np.asarray(index, dtype=np.int64)
        weight = np.asarray(weight, dtype=np.float64)
        degrees = np.asarray(degrees, dtype=np.int64)
        if not check:
            self.index, self.weight, self.degrees = index, weight, degrees
            return
        p = degrees.shape[0]
        if index.ndim != 2 or index.shape[0] != p or weight.shape != index.shape:
            raise NonSquareMilieu(
                f"milieu rows do not match entity count {p}: "
                f"index {index.shape}, weight {weight.shape}"
            )
        if ((index < 0) | (index >= p)).any():
            raise NonSquareMilieu(f"milieu refers to entities outside 0..{p - 1}")
        if ((degrees < 0) | (degrees > index.shape[1])).any():
            raise MetamodelError("row degree outside 0..q")
        for i in range(p):
            row = index[i, : degrees[i]]
            if len(set(row.tolist())) != row.size:
                raise MetamodelError(f"row {i} lists a neighbour twice")
        self.index = index
        self.weight = weight
        self.degrees = degrees

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[int | tuple[int, float]]], p: int | None = None
    ) -> MilieuMatrix:
        """Build from ordered rows of neighbour indices or ``(index, weight)`` pairs."""
        p = len(rows) if p is None else p
        if len(rows) != p:
            raise NonSquareMilieu(f"{len(rows)} milieu rows for {p} entities")
        q = max((len(r) for r in rows), default=0)
        index = np.tile(np.arange(p, dtype=np.int64)[:, None], (1, q))
        weight = np.zeros((p, q))
        degrees = np.zeros(p, dtype=np.int64)
        for i, row in enumerate(rows):
            for k, entry in enumerate(row):
                j, w = entry if isinstance(entry, tuple) else (entry, 1.0)
                index[i, k] = j
                weight[i, k] = w
            degrees[i] = len(row)
        return cls(index, weight, degrees)

    @classmethod
    def from_dense(cls, dense: np.ndarray | Sequence[Sequence[float]]) -> MilieuMatrix:
        """Read a square adjacency matrix; neighbours are ordered by ascending index."""
        dense = np.asarray(dense, dtype=np.float64)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise NonSquareMilieu(f"milieu matrix must be square, got shape {dense.shape}")
        rows = [[(int(j), float(dense[i, j])) for j in np.flatnonzero(dense[i])] for i in range(len(dense))]
        return cls.from_rows(rows, len(dense))

    @classmethod
    def empty(cls, p: int) -> MilieuMatrix:
        return cls.from_rows([[] for _ in range(p)], p)

    @property
    def size(self) -> int:
        return self.degrees.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.size, self.size)

    @property
    def q(self) -> int:
        return self.index.shape[1]

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        d = self.degrees[i]
        return self.index[i, :d], self.weight[i, :d]

    def mask(self) -> np.ndarray:
        """Boolean ``p x q`` array marking real (non-padding) slots."""
        return np.arange(self.q)[None, :] < self.degrees[:, None]

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.shape)
        m = self.mask()
        rows = np.broadcast_to(np.arange(self.size)[:, None], self.index.shape)
        dense[rows[m], self.index[m]] = self.weight[m]
        return dense

    def with_weights(self, weights: np.ndarray) -> MilieuMatrix:
        """Copy of this topology carrying ``weights`` (a ``p x q`` array) on its slots."""
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != self.index.shape:
            raise IncompleteParameters(
                f"weight assignment has shape {weights.shape}, milieu needs {self.index.shape}"
            )
        if not np.isfinite(weights[self.mask()]).all():
            raise IncompleteParameters("weight assignment has missing (non-finite) entries")
        return MilieuMatrix(
            self.index.copy(), np.where(self.mask(), weights, 0.0), self.degrees.copy(), check=False
        )

    def copy(self) -> MilieuMatrix:
        return MilieuMatrix(self.index.copy(), self.weight.copy(), self.degrees.copy(), check=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MilieuMatrix):
            return NotImplemented
        return (
            np.array_equal(self.degrees, other.degrees)
            and np.array_equal(self.index, other.index)
            and np.array_equal(self.weight, other.weight)
        )

    def __repr__(self) -> str:
        return f"MilieuMatrix(p={self.size}, q={self.q})"


class Neighbor(NamedTuple):
    index: int
    weight: float
    state: Any


@dataclass(frozen=True)
class MilieuView:
    """The ordered milieu of one entity at one instant."""

    index: np.ndarray
    weight: np.ndarray
    state: np.ndarray

    def __len__(self) -> int:
        return len(self.index)

    def __iter__(self) -> Iterator[Neighbor]:
        for j, w, s in zip(self.index.tolist(), self.weight.tolist(), self.state.tolist()):
            yield Neighbor(j, w, s)


@dataclass(frozen=True)
class UpdateFunction:
    """Operation contract ``(own state, milieu view, rules) -> next state``.

    ``local`` must be pure.  ``vectorized``, when given, computes every next
    state at once from ``(states, milieu, rules)`` and must agree with
    ``local`` applied entity by entity.  ``check_rules`` validates the actual
    rule parameters and raises :class:`IncompleteParameters`.
    """

    local: Callable[[Any, MilieuView, Any], Any]
    arity: int
    vectorized: Callable[[np.ndarray, MilieuMatrix, Any], np.ndarray] | None = None
    check_rules: Callable[[Any], None] | None = None
    name: str = "update"

    def __call__(self, own: Any, view: MilieuView, rules: Any = None) -> Any:
        return self.local(own, view, rules)


@dataclass(frozen=True)
class System:
    """Structure and operation paired, with no state values."""

    shape: tuple[int, ...]
    milieu: MilieuMatrix
    operation: UpdateFunction
    domain: StateDomain = BINARY

    @property
    def size(self) -> int:
        return self.milieu.size

    @property
    def arity(self) -> int:
        return self.operation.arity


def compose_system(
    shape: int | tuple[int, ...],
    milieu: MilieuMatrix,
    operation: UpdateFunction,
    domain: StateDomain = BINARY,
) -> System:
    """Pair a structure with an operation.

    Every milieu row must have exactly ``operation.arity`` members, except
    rows with no members at all: those entities are sources that the update
    function sees with an empty milieu.
    """
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    if milieu.shape[0] != milieu.shape[1]:
        raise NonSquareMilieu(f"milieu matrix must be square, got {milieu.shape}")
    if math.prod(shape) != milieu.size:
        raise NonSquareMilieu(f"shape {shape} holds {math.prod(shape)} entities, milieu has {milieu.size}")
    bad = np.flatnonzero((milieu.degrees != operation.arity) & (milieu.degrees != 0))
    if bad.size:
        i = int(bad[0])
        raise ArityMismatch(
            f"row {i} has {milieu.degrees[i]} milieu members, "
            f"operation {operation.name!r} declares arity {operation.arity}"
        )
    return System(shape, milieu, operation, domain)


@dataclass(eq=False)
class MetastableSystem:
    """A system fed with initial states and actual parameters.

    ``milieu`` is the actual milieu (the system's topology with concrete
    weights) and ``rules`` the concrete rule parameters handed to the update
    function.  Mutated in place by :func:`step`.
    """

    system: System
    states: np.ndarray
    milieu: MilieuMatrix
    rules: Any = None
    boundary: str = "periodic"
    time: int = 0
    initial: np.ndarray = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.initial is None:
            self.initial = self.states.copy()

    @property
    def size(self) -> int:
        return self.system.size

    def copy(self) -> MetastableSystem:
        return MetastableSystem(
            self.system,
            self.states.copy(),
            self.milieu.copy(),
            self.rules,
            self.boundary,
            self.time,
            self.initial.copy(),
        )

    def step(self, **kwargs: Any) -> MetastableSystem:
        return step(self, **kwargs)

    def run(self, steps: int, **kwargs: Any) -> Trace:
        return run(self, steps, **kwargs)


def parameterize(
    system: System,
    initial: Sequence[Any] | np.ndarray,
    rules: Any = None,
    weights: np.ndarray | None = None,
    boundary: str = "periodic",
) -> MetastableSystem:
    """Feed a system with initial states and actual parameters (time 0).

    ``weights`` is a ``p x q`` array laid over the system's milieu slots;
    without it the topology weights are used as they are.
    """
    initial = np.asarray(initial)
    if initial.ndim != 1 or initial.shape[0] != system.size:
        raise LengthMismatch(f"system has {system.size} entities, initial state has {initial.size}")
    states = system.domain.coerce(initial)
    if system.operation.check_rules is not None:
        system.operation.check_rules(rules)
    milieu = system.milieu.copy() if weights is None else system.milieu.with_weights(weights)
    return MetastableSystem(system, states, milieu, rules, boundary)


def milieu_of(ms: MetastableSystem, i: int, states: np.ndarray | None = None) -> MilieuView:
    if not 0 <= i < ms.size:
        raise IndexOutOfRange(f"entity index {i} outside 0..{ms.size - 1}")
    snapshot = ms.states if states is None else states
    index, weight = ms.milieu.row(i)
    return MilieuView(index.copy(), weight.copy(), snapshot[index].copy())


def step(
    ms: MetastableSystem,
    *,
    vectorized: bool = True,
    order: Sequence[int] | None = None,
) -> MetastableSystem:
    """Advance every entity one time step from the same snapshot.

    ``vectorized=False`` forces entity-by-entity evaluation of the local
    update, visiting entities in ``order`` (default ascending).
    """
    op = ms.system.operation
    snapshot = ms.states
    if vectorized and op.vectorized is not None and order is None:
        nxt = np.asarray(op.vectorized(snapshot, ms.milieu, ms.rules), dtype=snapshot.dtype)
    else:
        nxt = np.empty_like(snapshot)
        visit = range(ms.size) if order is None else order
        for i in visit:
            nxt[i] = op.local(snapshot[i], milieu_of(ms, i, snapshot), ms.rules)
    ms.states = nxt
    ms.time += 1
    return ms


@dataclass(frozen=True)
class Trace:
    """Snapshots of the entity states at times ``0..T``."""

    snapshots: np.ndarray

    def __len__(self) -> int:
        return self.snapshots.shape[0]

    def __getitem__(self, t: int) -> np.ndarray:
        return self.snapshots[t]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.snapshots)

    @property
    def initial(self) -> np.ndarray:
        return self.snapshots[0]

    @property
    def final(self) -> np.ndarray:
        return self.snapshots[-1]

    @property
    def steps(self) -> int:
        return len(self) - 1


def run(
    ms: MetastableSystem,
    steps: int,
    sink: Callable[[int, np.ndarray], None] | None = None,
    **step_kwargs: Any,
) -> Trace:
    """Step ``ms`` ``steps`` times and record every snapshot.

    ``sink`` receives ``(time, snapshot)`` as each snapshot is produced, for
    streaming long runs to disk.
    """
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    out = np.empty((steps + 1, ms.size), dtype=ms.states.dtype)
    out[0] = ms.states
    if sink is not None:
        sink(ms.time, ms.states)
    for t in range(1, steps + 1):
        step(ms, **step_kwargs)
        out[t] = ms.states
        if sink is not None:
            sink(ms.time, ms.states)
    return Trace(out)
