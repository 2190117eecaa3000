"""Experiment configuration and method-name parsing."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from ..partition import PartitionConfig, PartitionStrategy
from ..selector import ALL_PAIRS, PairConfig, SelectorConfig, TieBreak
from ..tasks import _STANDARD


class ConfigError(ValueError):
    """Raised for an invalid experiment before any run starts."""


TARGET_MODES = ("percentile", "optimum")
ABLATIONS = {
    "partition": [{"partition": "kmeans"}, {"partition": "random"}],
    "ratio": [{"ratio_divisor": d} for d in (2, 3, 4, 5)],
    "target": [{"target_mode": "percentile"}, {"target_mode": "optimum"}],
    "tiebreak": [{"tie_break": "priority"}, {"tie_break": "random"}],
}
_OVERRIDE_KEYS = ("partition", "ratio_divisor", "percentile", "tie_break", "target_mode", "t_max")


@dataclass
class ExperimentConfig:
    tasks: list[str] = field(default_factory=list)
    tables: list[str] = field(default_factory=list)
    methods: list[str] = field(default_factory=lambda: ["BOOST"] + [p.name for p in ALL_PAIRS])
    n_init: int = 10
    iterations: int = 90
    trials: int = 10
    dim: int = 4
    t_max: int = 20
    percentile: float = 5.0
    ratio_divisor: int = 3
    partition: str = "kmeans"
    tie_break: str = "priority"
    target_mode: str = "percentile"
    kmeans_seed: int = 42
    workers: int = 1
    pair_workers: int = 1
    candidate_cap: int | None = None
    out: str = "runs"

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> None:
        if not self.tasks and not self.tables:
            raise ConfigError("no tasks selected")
        for t in self.tasks:
            if t.lower() not in _STANDARD:
                raise ConfigError(f"unknown task {t!r}; choose from {sorted(_STANDARD)}")
        for p in self.tables:
            if not Path(p).is_file():
                raise ConfigError(f"table file not found: {p}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.iterations < 0:
            raise ConfigError("iterations must be >= 0")
        if self.n_init < 2:
            raise ConfigError("n_init must be >= 2")
        if self.workers < 1 or self.pair_workers < 1:
            raise ConfigError("worker counts must be >= 1")
        if not self.methods:
            raise ConfigError("no methods selected")
        for m in self.methods:
            parse_method(m, self)

    def task_specs(self) -> list[tuple[str, str]]:
        return [("synthetic", t.lower()) for t in self.tasks] + [("table", p) for p in self.tables]


_VARIANT = re.compile(r"^BOOST(?:\[(?P<opts>[^\]]*)\])?$", re.IGNORECASE)


def _coerce(key: str, value: str):
    if key in ("ratio_divisor", "t_max"):
        return int(value)
    if key == "percentile":
        return float(value)
    return value.lower()


def parse_method(name: str, cfg: ExperimentConfig):
    """``("fixed", PairConfig)`` or ``("boost", overrides)`` for a method name.

    BOOST variants carry overrides in brackets, e.g.
    ``BOOST[partition=random,ratio_divisor=5]``.
    """
    m = _VARIANT.match(name.strip())
    if m is None:
        try:
            return "fixed", PairConfig.from_name(name)
        except ValueError as exc:
            raise ConfigError(f"unknown method {name!r}: {exc}") from exc
    overrides = {}
    opts = m.group("opts")
    if opts:
        for part in opts.split(","):
            key, sep, value = part.partition("=")
            key = key.strip()
            if not sep or key not in _OVERRIDE_KEYS:
                raise ConfigError(f"bad BOOST option {part!r} in {name!r}")
            try:
                overrides[key] = _coerce(key, value.strip())
            except ValueError as exc:
                raise ConfigError(f"bad value in {name!r}: {exc}") from exc
    settings = {k: getattr(cfg, k) for k in _OVERRIDE_KEYS}
    settings.update(overrides)
    if settings["target_mode"] not in TARGET_MODES:
        raise ConfigError(f"target_mode must be one of {TARGET_MODES}")
    try:
        PartitionStrategy(settings["partition"])
        TieBreak(settings["tie_break"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return "boost", settings


def selector_config(settings: dict, cfg: ExperimentConfig, optimum: float | None) -> SelectorConfig:
    target = optimum if settings["target_mode"] == "optimum" else None
    part = PartitionConfig(
        ratio_divisor=settings["ratio_divisor"],
        percentile=settings["percentile"],
        strategy=settings["partition"],
        kmeans_seed=cfg.kmeans_seed,
        target_override=target,
    )
    return SelectorConfig(
        t_max=settings["t_max"], tie_break=settings["tie_break"], partition=part,
        workers=cfg.pair_workers,
    )


def ablation_methods(study: str) -> list[str]:
    try:
        variants = ABLATIONS[study]
    except KeyError:
        raise ConfigError(f"unknown ablation {study!r}; choose from {sorted(ABLATIONS)}") from None
    return ["BOOST[" + ",".join(f"{k}={v}" for k, v in v.items()) + "]" for v in variants]


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
