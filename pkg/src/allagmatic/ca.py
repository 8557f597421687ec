"""Two-state one-dimensional cellular automaton on a periodic ring.

Rule tables use the Wolfram numbering: the neighbourhood ``(left, center,
right)`` is read as a 3-bit number ``b`` and the cell's next state is bit
``b`` of the rule number.

Every cell's milieu row holds its left neighbour, itself and its right
neighbour, in that order, each with weight 1.0.
"""
from __future__ import annotations

from dataclasses import dataclass
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
)
from .errors import (
    EmptyState,
    IncompleteParameters,
    InvalidCharacter,
    LengthMismatch,
    OutOfRange,
)

INITIAL_STATE = "0000000000000001000000000000000"
TARGET_STATE = "1101011001111101000000000000000"
TARGET_RULE = 110
WIDTH = 31
STEPS = 15

N_PATTERNS = 8
N_RULES = 256


@dataclass(frozen=True)
class RuleTable:
    """Next-state outputs indexed by neighbourhood value ``4*left + 2*center + right``."""

    outputs: tuple[int, ...]

    def __post_init__(self) -> None:
        outputs = tuple(int(b) for b in self.outputs)
        if len(outputs) != N_PATTERNS:
            raise IncompleteParameters(f"rule table needs {N_PATTERNS} entries, got {len(outputs)}")
        if any(b not in (0, 1) for b in outputs):
            raise IncompleteParameters(f"rule table entries must be 0 or 1, got {outputs}")
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "_lookup", np.array(outputs, dtype=np.uint8))

    def __call__(self, left: int, center: int, right: int) -> int:
        return self.outputs[4 * left + 2 * center + right]

    @property
    def lookup(self) -> np.ndarray:
        return self._lookup

    @property
    def number(self) -> int:
        return rule_to_number(self)


def rule_from_number(n: int) -> RuleTable:
    if not 0 <= n < N_RULES:
        raise OutOfRange(f"rule number must be in 0..255, got {n}")
    return RuleTable(tuple((n >> b) & 1 for b in range(N_PATTERNS)))


def rule_to_number(table: RuleTable) -> int:
    return sum(bit << b for b, bit in enumerate(table.outputs))


def ca_transition(left: int, center: int, right: int, table: RuleTable) -> int:
    return table(left, center, right)


def format_rule_table(table: RuleTable) -> str:
    """Eight ``"lcr -> out"`` lines, pattern 111 first."""
    return "".join(f"{b:03b} -> {table.outputs[b]}\n" for b in reversed(range(N_PATTERNS)))


def parse_rule_table(text: str) -> RuleTable:
    """Read a rule given either as an integer or as pattern lines."""
    text = text.strip()
    if text.isdigit():
        return rule_from_number(int(text))
    outputs: dict[int, int] = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        pattern, _, out = line.replace("->", " ").replace(":", " ").partition(" ")
        pattern, out = pattern.strip(), out.strip()
        if len(pattern) != 3 or set(pattern) - {"0", "1"} or out not in ("0", "1"):
            raise InvalidCharacter(f"bad rule table line {line!r}")
        outputs[int(pattern, 2)] = int(out)
    if len(outputs) != N_PATTERNS:
        raise IncompleteParameters(f"rule table lists {len(outputs)} of {N_PATTERNS} patterns")
    return RuleTable(tuple(outputs[b] for b in range(N_PATTERNS)))


def parse_state_string(s: str) -> np.ndarray:
    """Leftmost character is entity 0."""
    if not s:
        raise EmptyState("state string is empty")
    bad = set(s) - {"0", "1"}
    if bad:
        raise InvalidCharacter(f"state string may only hold '0'/'1', found {sorted(bad)}")
    return np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0")


def format_state(e: Sequence[int] | np.ndarray) -> str:
    return "".join("1" if x else "0" for x in np.asarray(e).tolist())


@dataclass(frozen=True)
class CAConfig:
    width: int = WIDTH
    boundary: str = "periodic"

    def __post_init__(self) -> None:
        if self.width < 3:
            raise OutOfRange(f"ring width must be at least 3, got {self.width}")
        if self.boundary != "periodic":
            raise ValueError(f"only periodic boundaries are supported, got {self.boundary!r}")


def ring_milieu(width: int) -> MilieuMatrix:
    return MilieuMatrix.from_rows(
        [[(i - 1) % width, i, (i + 1) % width] for i in range(width)], width
    )


def _local(own: int, view: MilieuView, table: RuleTable) -> int:
    left, center, right = view.state.tolist()
    return table(left, center, right)


def _vectorized(states: np.ndarray, milieu: MilieuMatrix, table: RuleTable) -> np.ndarray:
    nbh = states[milieu.index]
    return table.lookup[4 * nbh[:, 0] + 2 * nbh[:, 1] + nbh[:, 2]]


def _check_table(table: object) -> None:
    if not isinstance(table, RuleTable):
        raise IncompleteParameters(f"cellular automaton needs a RuleTable, got {type(table).__name__}")


RULE_TABLE_UPDATE = UpdateFunction(_local, 3, _vectorized, _check_table, name="rule-table")


def ca_system(cfg: CAConfig = CAConfig()) -> System:
    return compose_system(cfg.width, ring_milieu(cfg.width), RULE_TABLE_UPDATE, BINARY)


def build_ca(
    cfg: CAConfig,
    table: RuleTable | int,
    initial: str | Sequence[int] | np.ndarray,
) -> MetastableSystem:
    if isinstance(table, int):
        table = rule_from_number(table)
    if isinstance(initial, str):
        initial = parse_state_string(initial)
    if len(initial) != cfg.width:
        raise LengthMismatch(f"ring width {cfg.width}, initial state has {len(initial)} cells")
    return parameterize(ca_system(cfg), initial, rules=table, boundary=cfg.boundary)
