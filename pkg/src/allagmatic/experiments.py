"""Random-restart searches for a target configuration, and the rule census.

Randomness comes from counter-based sub-streams: iteration ``i`` of a search
with seed ``s`` draws from ``Philox(SeedSequence([s, i]))`` and nothing
else, so a report depends only on its seed and parameters, never on how
iterations or seeds are scheduled across workers.
"""
from __future__ import annotations

import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import partial
from typing import Any, Callable, Sequence

import numpy as np

from . import ann, ca
from .core import MetastableSystem
from .errors import LengthMismatch, OutOfRange

RNG_ALGORITHM = "numpy Philox4x64-10 keyed by SeedSequence([seed, iteration])"
DEFAULT_BUDGET = 100_000


def substream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def derive_seed(master_seed: int, k: int) -> int:
    """Seed of the ``k``-th run of a multi-seed study."""
    return int(np.random.SeedSequence([master_seed, k]).generate_state(1, np.uint32)[0])


def matching_positions(a: Sequence[int] | np.ndarray, b: Sequence[int] | np.ndarray) -> int:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise LengthMismatch(f"cannot compare states of length {a.size} and {b.size}")
    return int(np.count_nonzero(a == b))


def match_fraction(a: Sequence[int] | np.ndarray, b: Sequence[int] | np.ndarray) -> float:
    n = np.asarray(a).size
    return matching_positions(a, b) / n if n else 1.0


@dataclass(frozen=True)
class MatchCriterion:
    """Pass when at least ``ceil(threshold * width)`` positions agree."""

    threshold: float = 0.9
    width: int = 31

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise OutOfRange(f"threshold must lie in [0, 1], got {self.threshold}")

    @property
    def min_matches(self) -> int:
        # decimal reading of the threshold so 0.9 * 30 is 27, not 27.000000000000004
        return math.ceil(Fraction(repr(self.threshold)) * self.width)

    def passes(self, a: Sequence[int] | np.ndarray, b: Sequence[int] | np.ndarray) -> bool:
        return matching_positions(a, b) >= self.min_matches


@dataclass
class SearchReport:
    model: str
    seed: int
    budget: int
    iterations: int
    terminated: bool
    matches: int | None
    width: int
    match_fraction: float | None
    output: str | None
    rule: int | None = None
    candidate: int | None = None
    params: dict[str, Any] = field(default_factory=dict)
    rng: str = RNG_ALGORITHM
    duration: float = 0.0
    network: MetastableSystem | None = field(default=None, repr=False, compare=False)

    @property
    def exact(self) -> bool:
        return self.matches == self.width

    def to_dict(self, timing: bool = False) -> dict[str, Any]:
        d = asdict(self)
        d.pop("network")
        if not timing:
            d.pop("duration")
        return d

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True) + "\n"


def _check_target(target: np.ndarray, crit: MatchCriterion) -> np.ndarray:
    target = np.asarray(target)
    if target.size != crit.width:
        raise LengthMismatch(f"criterion width {crit.width}, target has {target.size} cells")
    return target


def ca_rule_search(
    target: Sequence[int] | np.ndarray | str = ca.TARGET_STATE,
    crit: MatchCriterion = MatchCriterion(),
    steps: int = ca.STEPS,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    initial: Sequence[int] | np.ndarray | str = ca.INITIAL_STATE,
) -> SearchReport:
    """Draw uniform rule numbers until one maps ``initial`` close enough to ``target``."""
    if isinstance(target, str):
        target = ca.parse_state_string(target)
    if isinstance(initial, str):
        initial = ca.parse_state_string(initial)
    target = _check_target(target, crit)
    cfg = ca.CAConfig(crit.width)
    params = {"steps": steps, "threshold": crit.threshold, "min_matches": crit.min_matches,
              "initial": ca.format_state(initial), "target": ca.format_state(target)}
    start = time.perf_counter()
    report = SearchReport("ca", seed, budget, 0, False, None, crit.width, None, None, params=params)
    for i in range(budget):
        rule = int(substream(seed, i).integers(ca.N_RULES))
        final = ca.build_ca(cfg, rule, initial).run(steps).final
        hits = matching_positions(final, target)
        report.iterations = i + 1
        if hits >= crit.min_matches:
            report.terminated = True
            report.rule = rule
            report.candidate = i
            report.matches = hits
            report.match_fraction = hits / crit.width
            report.output = ca.format_state(final)
            break
    report.duration = time.perf_counter() - start
    return report


@dataclass(frozen=True)
class RuleCensus:
    """Match count of every rule's output against a target."""

    matches: tuple[int, ...]
    width: int

    @property
    def fractions(self) -> tuple[float, ...]:
        return tuple(m / self.width for m in self.matches)

    def __getitem__(self, rule: int) -> float:
        return self.matches[rule] / self.width

    def __len__(self) -> int:
        return len(self.matches)

    def passing(self, crit: MatchCriterion) -> list[int]:
        return [r for r, m in enumerate(self.matches) if m >= crit.min_matches]

    def to_text(self) -> str:
        """256 lines of ``rule matches/width fraction``."""
        return "".join(
            f"{r} {m}/{self.width} {m / self.width:.6f}\n" for r, m in enumerate(self.matches)
        )

    @classmethod
    def from_text(cls, text: str) -> RuleCensus:
        matches, width = [], None
        for line in text.splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            _, ratio, _ = line.split()
            m, w = (int(x) for x in ratio.split("/"))
            matches.append(m)
            width = w
        return cls(tuple(matches), width or 0)


def rule_census(
    target: Sequence[int] | np.ndarray | str = ca.TARGET_STATE,
    steps: int = ca.STEPS,
    initial: Sequence[int] | np.ndarray | str = ca.INITIAL_STATE,
) -> RuleCensus:
    if isinstance(target, str):
        target = ca.parse_state_string(target)
    if isinstance(initial, str):
        initial = ca.parse_state_string(initial)
    cfg = ca.CAConfig(len(initial))
    matches = tuple(
        matching_positions(ca.build_ca(cfg, r, initial).run(steps).final, target)
        for r in range(ca.N_RULES)
    )
    return RuleCensus(matches, len(initial))


def ann_search(
    target: Sequence[int] | np.ndarray | str = ca.TARGET_STATE,
    crit: MatchCriterion = MatchCriterion(),
    lp: ann.LearningParams = ann.LearningParams(),
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    initial: Sequence[int] | np.ndarray | str = ca.INITIAL_STATE,
    layers: int = ann.LAYERS,
) -> SearchReport:
    """Build, train and run fresh random networks until one gets close enough."""
    if isinstance(target, str):
        target = ca.parse_state_string(target)
    if isinstance(initial, str):
        initial = ca.parse_state_string(initial)
    target = _check_target(target, crit)
    topo = ann.LayeredTopology(crit.width, layers)
    params = {"layers": layers, "learning_rate": lp.rate, "epochs": lp.epochs,
              "threshold": crit.threshold, "min_matches": crit.min_matches,
              "initial": ca.format_state(initial), "target": ca.format_state(target)}
    start = time.perf_counter()
    report = SearchReport("ann", seed, budget, 0, False, None, crit.width, None, None, params=params)
    for i in range(budget):
        ms = candidate_network(topo, seed, i, initial, target, lp)
        out = ann.forward(ms, initial)
        hits = matching_positions(out, target)
        report.iterations = i + 1
        if hits >= crit.min_matches:
            report.terminated = True
            report.candidate = i
            report.matches = hits
            report.match_fraction = hits / crit.width
            report.output = ca.format_state(out)
            report.network = ms
            break
    report.duration = time.perf_counter() - start
    return report


def candidate_network(
    topo: ann.LayeredTopology,
    seed: int,
    index: int,
    initial: np.ndarray,
    target: np.ndarray,
    lp: ann.LearningParams,
) -> MetastableSystem:
    """The trained network examined at iteration ``index`` of a network search."""
    ms = ann.build_ann(topo, substream(seed, index))
    return ann.train_candidate(ms, initial, target, lp)


SEARCHES: dict[str, Callable[..., SearchReport]] = {"ca": ca_rule_search, "ann": ann_search}


@dataclass
class StudyReport:
    model: str
    master_seed: int
    reports: list[SearchReport]

    @property
    def seeds(self) -> list[int]:
        return [r.seed for r in self.reports]

    @property
    def iterations(self) -> list[int]:
        return [r.iterations for r in self.reports]

    @property
    def median_iterations(self) -> float:
        return float(statistics.median(self.iterations))

    @property
    def pass_rate(self) -> float:
        return sum(r.terminated for r in self.reports) / len(self.reports)

    @property
    def exact_matches(self) -> int:
        return sum(r.exact for r in self.reports)

    def fraction_below(self, limit: int) -> float:
        """Share of runs that terminated after fewer than ``limit`` iterations."""
        return sum(r.terminated and r.iterations < limit for r in self.reports) / len(self.reports)

    def to_dict(self, timing: bool = False) -> dict[str, Any]:
        return {
            "model": self.model,
            "master_seed": self.master_seed,
            "n_seeds": len(self.reports),
            "median_iterations": self.median_iterations,
            "pass_rate": self.pass_rate,
            "exact_matches": self.exact_matches,
            "runs": [r.to_dict(timing) for r in self.reports],
        }

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True) + "\n"


def _run_seed(model: str, kwargs: dict[str, Any], seed: int) -> SearchReport:
    report = SEARCHES[model](seed=seed, **kwargs)
    report.network = None
    return report


def multi_seed_study(
    model: str,
    n_seeds: int,
    master_seed: int = 0,
    workers: int = 1,
    **search_kwargs: Any,
) -> StudyReport:
    """Run one search per derived seed; results are ordered by seed index."""
    if model not in SEARCHES:
        raise ValueError(f"unknown model {model!r}; expected one of {sorted(SEARCHES)}")
    if n_seeds < 1:
        raise OutOfRange(f"n_seeds must be >= 1, got {n_seeds}")
    seeds = [derive_seed(master_seed, k) for k in range(n_seeds)]
    job = partial(_run_seed, model, search_kwargs)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(job, seeds))
    else:
        reports = [job(s) for s in seeds]
    return StudyReport(model, master_seed, reports)
