"""Split the data-in-hand into a reference set and a query set.

The target value is a low percentile of all observed objectives. Points
at or below it are kept out of the reference set so the internal runs
have something to find; the reference set is drawn from the rest either
by K-means representatives or uniformly at random.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .observations import ObservationSet


class PartitionStrategy(str, enum.Enum):
    KMEANS = "kmeans"
    RANDOM = "random"


@dataclass(frozen=True)
class PartitionConfig:
    ratio_divisor: int = 3
    min_size: int = 3
    max_size: int = 20
    percentile: float = 5.0
    strategy: PartitionStrategy = PartitionStrategy.KMEANS
    kmeans_seed: int = 42
    random_seed: int = 0
    target_override: float | None = None  # e.g. the known optimum

    def __post_init__(self):
        object.__setattr__(self, "strategy", PartitionStrategy(self.strategy))
        if self.ratio_divisor < 1:
            raise ValueError("ratio_divisor must be a positive integer")
        if not 1 <= self.min_size <= self.max_size:
            raise ValueError("need 1 <= min_size <= max_size")
        if not 0 < self.percentile <= 100:
            raise ValueError("percentile must lie in (0, 100]")

    def reference_size(self, n: int) -> int:
        return int(min(max(n // self.ratio_divisor, self.min_size), self.max_size))


@dataclass(frozen=True, eq=False)
class PartitionSplit:
    reference: ObservationSet
    query: ObservationSet
    y_target: float
    reference_indices: tuple[int, ...] = ()
    query_indices: tuple[int, ...] = ()


def compute_target(values, percentile: float) -> float:
    """Percentile by linear interpolation between sorted values (low = good)."""
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if v.size == 0:
        raise ValueError("values must be nonempty")
    if not 0 <= percentile <= 100:
        raise ValueError("percentile must lie in [0, 100]")
    rank = percentile / 100.0 * (v.size - 1)
    lo = int(np.floor(rank))
    hi = min(lo + 1, v.size - 1)
    frac = rank - lo
    return float(v[lo] + frac * (v[hi] - v[lo])) if frac > 0 else float(v[lo])


def _sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _kmeans_pp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    closest = _sqdist(x, x[chosen])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=closest / total))
        else:
            # every point coincides with a chosen center
            rest = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rng.choice(rest)) if rest.size else int(rng.integers(n))
        chosen.append(nxt)
        closest = np.minimum(closest, _sqdist(x, x[nxt : nxt + 1])[:, 0])
    return x[chosen].copy()


def kmeans_cluster(points, k: int, seed: int = 42, max_iter: int = 300
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd's algorithm with k-means++ seeding; returns (labels, centers)."""
    x = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got k={k}")
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp(x, k, rng)
    labels = None
    for _ in range(max_iter):
        d2 = _sqdist(x, centers)
        new = np.argmin(d2, axis=1)
        for c in range(k):
            if np.any(new == c):
                continue
            # reseed the empty cluster at the point farthest from its center
            own = d2[np.arange(n), new]
            counts = np.bincount(new, minlength=k)
            own = np.where(counts[new] > 1, own, -1.0)
            far = int(np.argmax(own))
            new[far] = c
            centers[c] = x[far]
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for c in range(k):
            centers[c] = x[labels == c].mean(axis=0)
    return labels, centers


def _nearest_unclaimed(pool_x: np.ndarray, centers: np.ndarray) -> list[int]:
    claimed = np.zeros(pool_x.shape[0], dtype=bool)
    picks = []
    d2 = _sqdist(centers, pool_x)
    for c in range(centers.shape[0]):
        row = np.where(claimed, np.inf, d2[c])
        j = int(np.argmin(row))
        claimed[j] = True
        picks.append(j)
    return picks


def make_partition(data: ObservationSet, cfg: PartitionConfig = PartitionConfig()) -> PartitionSplit:
    n = len(data)
    if n < 4:
        raise ValueError(f"need at least 4 observations to partition, got {n}")
    n_init = cfg.reference_size(n)
    if n_init >= n:
        raise ValueError(f"reference size {n_init} leaves no query points out of {n}")
    y = data.values
    if cfg.target_override is not None:
        y_target = float(cfg.target_override)
    else:
        y_target = compute_target(y, cfg.percentile)

    pool = np.flatnonzero(y > y_target)
    if pool.size <= n_init:
        # too few candidates: take them all, then the worst excluded points
        excluded = np.flatnonzero(y <= y_target)
        order = excluded[np.argsort(-y[excluded], kind="stable")]
        reference = np.concatenate([pool, order[: n_init - pool.size]])
    elif cfg.strategy is PartitionStrategy.KMEANS:
        _, centers = kmeans_cluster(data.inputs[pool], n_init, seed=cfg.kmeans_seed)
        reference = pool[_nearest_unclaimed(data.inputs[pool], centers)]
    else:
        rng = np.random.default_rng(cfg.random_seed)
        reference = np.sort(rng.choice(pool, size=n_init, replace=False))

    reference = np.asarray(reference, dtype=np.intp)
    mask = np.ones(n, dtype=bool)
    mask[reference] = False
    query = np.flatnonzero(mask)
    return PartitionSplit(
        reference=data.subset(reference),
        query=data.subset(query),
        y_target=y_target,
        reference_indices=tuple(int(i) for i in reference),
        query_indices=tuple(int(i) for i in query),
    )
