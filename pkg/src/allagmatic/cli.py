"""Command-line front end.

Subcommands ``run``, ``search``, ``census`` and ``study`` write their results
into ``--output-dir``:

=========  ==========================================================
run        ``trace.txt`` (one 0/1 line per time step or layer),
           ``trace.pgm`` with ``--pgm``, ``weights.txt`` for networks
search     ``report.json``; ``weights.txt`` when a network is found
census     ``census.txt``: 256 lines ``rule matches/width fraction``
study      ``study.json``
=========  ==========================================================

Every file carries the effective configuration.  Exit codes: 0 success,
2 invalid configuration, 3 search budget exhausted (or, for ``study``, no
seed succeeded), 4 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Sequence

from . import ann, ca, experiments, io
from .errors import MetamodelError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_IO = 4


class ConfigError(Exception):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    model: str = "ca"
    width: int = ca.WIDTH
    steps: int = ca.STEPS
    rule: int = ca.TARGET_RULE
    seed: int = 0
    threshold: float = 0.9
    budget: int = experiments.DEFAULT_BUDGET
    seeds_count: int = 20
    learning_rate: float = 0.1
    epochs: int = 10
    workers: int = 1
    initial: str = ca.INITIAL_STATE
    target: str = ca.TARGET_STATE
    output_dir: str = "."
    pgm: bool = False

    def validate(self) -> ExperimentConfig:
        if self.model not in ("ca", "ann"):
            raise ConfigError("model", f"must be 'ca' or 'ann', got {self.model!r}")
        for name in ("width", "steps", "rule", "seed", "budget", "seeds_count", "epochs", "workers"):
            if not isinstance(getattr(self, name), int) or isinstance(getattr(self, name), bool):
                raise ConfigError(name, f"must be an integer, got {getattr(self, name)!r}")
        if self.width < 3:
            raise ConfigError("width", f"must be >= 3, got {self.width}")
        if self.steps < 0 or (self.model == "ann" and self.steps < 1):
            raise ConfigError("steps", f"out of range: {self.steps}")
        if not 0 <= self.rule <= 255:
            raise ConfigError("rule", f"must be in 0..255, got {self.rule}")
        if self.seed < 0:
            raise ConfigError("seed", f"must be >= 0, got {self.seed}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError("threshold", f"must be in [0, 1], got {self.threshold}")
        if self.budget < 0:
            raise ConfigError("budget", f"must be >= 0, got {self.budget}")
        if self.seeds_count < 1:
            raise ConfigError("seeds_count", f"must be >= 1, got {self.seeds_count}")
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate", f"must be > 0, got {self.learning_rate}")
        if self.epochs < 0:
            raise ConfigError("epochs", f"must be >= 0, got {self.epochs}")
        if self.workers < 1:
            raise ConfigError("workers", f"must be >= 1, got {self.workers}")
        for name in ("initial", "target"):
            value = getattr(self, name)
            if not value or set(value) - {"0", "1"}:
                raise ConfigError(name, f"must be a nonempty 0/1 string, got {value!r}")
            if len(value) != self.width:
                raise ConfigError(name, f"has {len(value)} cells but width is {self.width}")
        return self

    def effective(self) -> dict[str, Any]:
        """Resolved settings embedded in every output; the output location is left out."""
        d = asdict(self)
        d.pop("output_dir")
        return d


_FIELDS = {f.name: f for f in fields(ExperimentConfig)}


def load_config(path: str | None, overrides: dict[str, Any]) -> ExperimentConfig:
    """Defaults, then the JSON config file, then command-line flags."""
    values: dict[str, Any] = {}
    if path:
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"{path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config", "top level must be an object")
        for key, value in raw.items():
            name = key.replace("-", "_")
            if name not in _FIELDS:
                raise ConfigError(key, "unknown configuration field")
            values[name] = value
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values).validate()


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with configuration fields")
    common.add_argument("--model", choices=["ca", "ann"])
    common.add_argument("--width", type=int)
    common.add_argument("--steps", type=int, help="CA time steps, or computed layers of the network")
    common.add_argument("--rule", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--threshold", type=float)
    common.add_argument("--budget", type=int)
    common.add_argument("--seeds-count", dest="seeds_count", type=int)
    common.add_argument("--learning-rate", dest="learning_rate", type=float)
    common.add_argument("--epochs", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--initial")
    common.add_argument("--target")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--pgm", action="store_const", const=True, help="also write trace.pgm")

    parser = argparse.ArgumentParser(prog="allagmatic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="simulate one automaton or network")
    sub.add_parser("search", parents=[common], help="random-restart search for the target")
    sub.add_parser("census", parents=[common], help="score all 256 rules against the target")
    sub.add_parser("study", parents=[common], help="repeat a search over derived seeds")
    return parser


def _lp(cfg: ExperimentConfig) -> ann.LearningParams:
    return ann.LearningParams(cfg.learning_rate, cfg.epochs)


def cmd_run(cfg: ExperimentConfig) -> int:
    out = Path(cfg.output_dir)
    header = {"command": "run", "config": cfg.effective()}
    if cfg.model == "ca":
        ms = ca.build_ca(ca.CAConfig(cfg.width), cfg.rule, cfg.initial)
        trace = ms.run(cfg.steps)
        rows = trace.snapshots
    else:
        topo = ann.LayeredTopology(cfg.width, cfg.steps)
        initial = ca.parse_state_string(cfg.initial)
        ms = experiments.candidate_network(
            topo, cfg.seed, 0, initial, ca.parse_state_string(cfg.target), _lp(cfg)
        )
        ann.forward(ms, initial)
        rows = ms.states.reshape(topo.shape)
        io.write_text(out / "weights.txt", io.header_lines(header) + ann.format_weights(ms))
    io.write_text(out / "trace.txt", io.format_trace(rows, header))
    if cfg.pgm:
        io.write_bytes(out / "trace.pgm", io.to_pgm(rows, header))
    print(ca.format_state(rows[-1]))
    return EXIT_OK


def cmd_search(cfg: ExperimentConfig) -> int:
    out = Path(cfg.output_dir)
    crit = experiments.MatchCriterion(cfg.threshold, cfg.width)
    if cfg.model == "ca":
        report = experiments.ca_rule_search(
            cfg.target, crit, cfg.steps, cfg.budget, cfg.seed, cfg.initial
        )
    else:
        report = experiments.ann_search(
            cfg.target, crit, _lp(cfg), cfg.budget, cfg.seed, cfg.initial, cfg.steps
        )
    doc = report.to_dict()
    doc["config"] = cfg.effective()
    io.write_text(out / "report.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if report.network is not None:
        header = {"command": "search", "candidate": report.candidate, "config": cfg.effective()}
        io.write_text(out / "weights.txt", io.header_lines(header) + ann.format_weights(report.network))
    print(
        f"{cfg.model} search: terminated={report.terminated} iterations={report.iterations} "
        f"matches={report.matches} rule={report.rule}",
    )
    print(f"duration {report.duration:.3f}s", file=sys.stderr)
    return EXIT_OK if report.terminated else EXIT_BUDGET


def cmd_census(cfg: ExperimentConfig) -> int:
    census = experiments.rule_census(cfg.target, cfg.steps, cfg.initial)
    crit = experiments.MatchCriterion(cfg.threshold, cfg.width)
    header = {"command": "census", "config": cfg.effective(), "passing": census.passing(crit)}
    io.write_text(Path(cfg.output_dir) / "census.txt", io.header_lines(header) + census.to_text())
    print(f"rules passing >= {crit.min_matches}/{cfg.width}: {census.passing(crit)}")
    return EXIT_OK


def cmd_study(cfg: ExperimentConfig) -> int:
    crit = experiments.MatchCriterion(cfg.threshold, cfg.width)
    kwargs: dict[str, Any] = {"target": cfg.target, "crit": crit, "budget": cfg.budget, "initial": cfg.initial}
    if cfg.model == "ca":
        kwargs["steps"] = cfg.steps
    else:
        kwargs.update(lp=_lp(cfg), layers=cfg.steps)
    study = experiments.multi_seed_study(cfg.model, cfg.seeds_count, cfg.seed, cfg.workers, **kwargs)
    doc = study.to_dict()
    doc["config"] = cfg.effective()
    io.write_text(Path(cfg.output_dir) / "study.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(
        f"{cfg.model} study: seeds={cfg.seeds_count} pass_rate={study.pass_rate:.2f} "
        f"median_iterations={study.median_iterations} exact_matches={study.exact_matches}"
    )
    return EXIT_OK if study.pass_rate > 0 else EXIT_BUDGET


COMMANDS = {"run": cmd_run, "search": cmd_search, "census": cmd_census, "study": cmd_study}


def main(argv: Sequence[str] | None = None) -> int:
    args = vars(_parser().parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config")
    try:
        cfg = load_config(config_path, args)
    except (ConfigError, TypeError) as exc:
        print(f"allagmatic: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[command](cfg)
    except OSError as exc:
        print(f"allagmatic: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except MetamodelError as exc:
        print(f"allagmatic: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
