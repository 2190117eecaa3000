"""Pick a kernel/acquisition pair by replaying BO on data already observed.

Each pair starts from the reference set and repeatedly moves the query
point it likes best into the training set, counting steps until it
uncovers a value at or below the target. The pair needing the fewest
steps wins; ties fall back to a fixed priority order (acquisition first:
EI, PI, LCB, PM; then kernel: Matern 3/2, Matern 5/2, RBF, RQ) or to a
seeded random draw.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np

from .acquisition import AcquisitionFamily, AcquisitionSpec, select_next
from .gp import KernelFamily, KernelSpec, fit_surrogate
from .observations import ObservationSet
from .partition import PartitionConfig, PartitionSplit, make_partition


@dataclass(frozen=True)
class PairConfig:
    kernel: KernelSpec
    acquisition: AcquisitionSpec

    @property
    def acq_priority(self) -> int:
        return int(self.acquisition.family)

    @property
    def kernel_priority(self) -> int:
        return int(self.kernel.family)

    @property
    def priority(self) -> tuple[int, int]:
        return (self.acq_priority, self.kernel_priority)

    @property
    def name(self) -> str:
        return f"{self.kernel.name}_{self.acquisition.name}"

    @classmethod
    def from_name(cls, name: str) -> "PairConfig":
        try:
            k, a = name.split("_")
        except ValueError:
            raise ValueError(f"pair names look like 'Matern32_EI', got {name!r}") from None
        return cls(KernelSpec.from_name(k), AcquisitionSpec.from_name(a))


ALL_PAIRS: tuple[PairConfig, ...] = tuple(
    PairConfig(KernelSpec(k), AcquisitionSpec(a))
    for k, a in product(KernelFamily, AcquisitionFamily)
)
DEFAULT_PAIR = PairConfig(KernelSpec(KernelFamily.MATERN32), AcquisitionSpec(AcquisitionFamily.EI))


class TieBreak(str, enum.Enum):
    PRIORITY = "priority"
    RANDOM = "random"


@dataclass(frozen=True)
class PairScore:
    pair: PairConfig
    iterations: int
    reached_target: bool


@dataclass(frozen=True)
class SelectorConfig:
    t_max: int = 20
    pairs: tuple[PairConfig, ...] = ALL_PAIRS
    tie_break: TieBreak = TieBreak.PRIORITY
    partition: PartitionConfig = field(default_factory=PartitionConfig)
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        object.__setattr__(self, "tie_break", TieBreak(self.tie_break))
        if not self.pairs:
            raise ValueError("pairs must be nonempty")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")


def _derive_seed(*parts: int) -> int:
    return int(np.random.SeedSequence([int(p) & 0xFFFFFFFF for p in parts]).generate_state(1)[0])


def pair_seed(seed: int, pair: PairConfig) -> int:
    """Per-pair seed from the canonical pair index, independent of list order."""
    return _derive_seed(seed, pair.acq_priority * 4 + pair.kernel_priority)


def internal_bo_run(pair: PairConfig, split: PartitionSplit, t_max: int, seed: int = 0) -> PairScore:
    """Steps a pair needs to pull a target-hitting point out of the query set.

    A run that exhausts the query set without a hit scores ``t_max``.
    """
    if len(split.query) == 0:
        raise ValueError("query set is empty")
    rx = list(split.reference.inputs)
    ry = list(split.reference.values)
    qx = split.query.inputs.copy()
    qy = split.query.values.copy()
    t = 0
    while t < t_max:
        if qx.shape[0] == 0:
            break
        s = fit_surrogate(pair.kernel, np.asarray(rx), np.asarray(ry), seed=seed)
        j = select_next(pair.acquisition, s, qx, float(min(ry)))
        rx.append(qx[j])
        ry.append(qy[j])
        hit = qy[j] <= split.y_target
        qx = np.delete(qx, j, axis=0)
        qy = np.delete(qy, j)
        t += 1
        if hit:
            return PairScore(pair, t, True)
    return PairScore(pair, t_max, False)


def evaluate_pairs(split: PartitionSplit, cfg: SelectorConfig, seed: int = 0) -> list[PairScore]:
    """Score every configured pair; order matches ``cfg.pairs``."""

    def run(pair):
        return internal_bo_run(pair, split, cfg.t_max, pair_seed(seed, pair))

    if cfg.workers > 1 and len(cfg.pairs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(run, cfg.pairs))
    return [run(p) for p in cfg.pairs]


def choose(scores: list[PairScore], tie_break: TieBreak = TieBreak.PRIORITY,
           seed: int = 0) -> PairConfig:
    """Fewest iterations wins; ties resolved by priority or a seeded draw."""
    if not scores:
        raise ValueError("no scores to choose from")
    best = min(s.iterations for s in scores)
    tied = sorted((s.pair for s in scores if s.iterations == best), key=lambda p: p.priority)
    if TieBreak(tie_break) is TieBreak.PRIORITY or len(tied) == 1:
        return tied[0]
    rng = np.random.default_rng(_derive_seed(seed, 0x7E))
    return tied[int(rng.integers(len(tied)))]


@dataclass(frozen=True, eq=False)
class Recommendation:
    pair: PairConfig
    scores: tuple[PairScore, ...]
    split: PartitionSplit


def recommend_detailed(data: ObservationSet, cfg: SelectorConfig = SelectorConfig(),
                       seed: int = 0) -> Recommendation:
    pcfg = cfg.partition
    if pcfg.strategy.value == "random":
        pcfg = replace(pcfg, random_seed=_derive_seed(seed, len(data)))
    split = make_partition(data, pcfg)
    scores = evaluate_pairs(split, cfg, seed)
    return Recommendation(choose(scores, cfg.tie_break, _derive_seed(seed, len(data))),
                          tuple(scores), split)


def recommend(data: ObservationSet, cfg: SelectorConfig = SelectorConfig(), seed: int = 0) -> PairConfig:
    return recommend_detailed(data, cfg, seed).pair
