from __future__ import annotations

import numpy as np
import pytest

from boostbo.observations import ObservationSet
from boostbo.partition import (
    PartitionConfig,
    PartitionStrategy,
    compute_target,
    kmeans_cluster,
    make_partition,
)
from oracles import percentile_oracle


def data(n, d=2, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 1, (n, d))
    return ObservationSet(x, (x**2).sum(axis=1) + 0.01 * rng.normal(size=n))


@pytest.mark.parametrize("n, expected", [(4, 3), (10, 3), (12, 4), (30, 10), (60, 20), (100, 20)])
def test_reference_size_clamp(n, expected):
    assert PartitionConfig().reference_size(n) == expected
    assert len(make_partition(data(n)).reference) == expected


def test_percentile_matches_sorted_interpolation_oracle():
    rng = np.random.default_rng(1)
    for _ in range(50):
        v = rng.normal(size=int(rng.integers(1, 40)))
        p = float(rng.choice([0, 5, 12.5, 50, 95, 100, rng.uniform(0, 100)]))
        assert compute_target(v, p) == pytest.approx(percentile_oracle(v, p), rel=1e-14, abs=1e-15)
        assert compute_target(v, p) == pytest.approx(np.percentile(v, p), rel=1e-12, abs=1e-14)


def test_percentile_small_case_by_hand():
    # n = 21, p = 5 -> rank 1.0 -> second smallest value
    assert compute_target(np.arange(21.0)[::-1], 5.0) == 1.0
    # n = 11, p = 5 -> rank 0.5 -> halfway between the two smallest
    assert compute_target(np.arange(11.0), 5.0) == 0.5


def test_percentile_errors():
    with pytest.raises(ValueError):
        compute_target([], 5.0)
    with pytest.raises(ValueError):
        compute_target([1.0], 101.0)


def test_kmeans_deterministic_over_reruns():
    x = np.random.default_rng(4).uniform(size=(40, 3))
    first = kmeans_cluster(x, 6, seed=42)
    for _ in range(10):
        labels, centers = kmeans_cluster(x, 6, seed=42)
        assert np.array_equal(labels, first[0])
        assert np.array_equal(centers, first[1])


def test_kmeans_result_is_lloyd_fixed_point():
    x = np.random.default_rng(8).uniform(size=(50, 2))
    labels, centers = kmeans_cluster(x, 5)
    d2 = ((x[:, None, :] - centers[None]) ** 2).sum(-1)
    assert np.array_equal(labels, d2.argmin(axis=1))
    for c in range(5):
        np.testing.assert_allclose(centers[c], x[labels == c].mean(axis=0), rtol=1e-12)


def test_kmeans_separates_obvious_clusters():
    rng = np.random.default_rng(2)
    blobs = [rng.normal(c, 0.01, (10, 2)) for c in ((0, 0), (5, 5), (0, 5))]
    labels, _ = kmeans_cluster(np.vstack(blobs), 3)
    for b in range(3):
        assert len(set(labels[10 * b : 10 * b + 10])) == 1
    assert len(set(labels)) == 3


def test_kmeans_with_duplicates_keeps_all_clusters_nonempty():
    x = np.vstack([np.zeros((5, 2)), np.ones((1, 2))])
    labels, _ = kmeans_cluster(x, 3)
    assert set(labels) == {0, 1, 2}


def test_kmeans_rejects_bad_k():
    with pytest.raises(ValueError):
        kmeans_cluster(np.zeros((3, 2)), 4)


def test_partition_is_disjoint_cover_and_excludes_target_hitters():
    d = data(45)
    split = make_partition(d)
    ref, qry = set(split.reference_indices), set(split.query_indices)
    assert not ref & qry
    assert ref | qry == set(range(45))
    assert all(d.values[i] > split.y_target for i in ref)
    assert split.y_target == compute_target(d.values, 5.0)


def test_no_reference_point_selected_twice_when_centers_share_nearest():
    # four identical points collapse several centers onto one nearest point
    x = np.vstack([np.zeros((4, 1)), np.linspace(1, 2, 8)[:, None]])
    y = np.arange(12, dtype=float)
    split = make_partition(ObservationSet(x, y))
    assert len(set(split.reference_indices)) == len(split.reference_indices) == 4


def test_kmeans_reference_points_are_nearest_to_centers():
    d = data(30, seed=3)
    cfg = PartitionConfig()
    split = make_partition(d, cfg)
    pool = np.flatnonzero(d.values > split.y_target)
    _, centers = kmeans_cluster(d.inputs[pool], cfg.reference_size(30), seed=42)
    taken: set[int] = set()
    for c in centers:
        dist = ((d.inputs[pool] - c) ** 2).sum(-1)
        order = [int(pool[j]) for j in np.argsort(dist, kind="stable") if int(pool[j]) not in taken]
        taken.add(order[0])
    assert taken == set(split.reference_indices)


def test_random_strategy_depends_on_seed_and_is_reproducible():
    d = data(60)
    a = make_partition(d, PartitionConfig(strategy="random", random_seed=1))
    b = make_partition(d, PartitionConfig(strategy="random", random_seed=1))
    c = make_partition(d, PartitionConfig(strategy=PartitionStrategy.RANDOM, random_seed=2))
    assert a.reference_indices == b.reference_indices
    assert a.reference_indices != c.reference_indices


def test_small_pool_is_backfilled_with_worst_excluded():
    x = np.arange(10, dtype=float)[:, None]
    y = np.array([0, 0, 0, 0, 0, 0, 0, 0, 1, 2], dtype=float)
    split = make_partition(ObservationSet(x, y), PartitionConfig(target_override=0.5))
    assert len(split.reference) == 3
    assert {8, 9} <= set(split.reference_indices)


def test_target_override_is_used():
    split = make_partition(data(20), PartitionConfig(target_override=-1.0))
    assert split.y_target == -1.0


def test_too_small_data_rejected():
    with pytest.raises(ValueError):
        make_partition(data(3))


def test_config_validation():
    with pytest.raises(ValueError):
        PartitionConfig(ratio_divisor=0)
    with pytest.raises(ValueError):
        PartitionConfig(percentile=0)
    with pytest.raises(ValueError):
        PartitionConfig(strategy="spectral")
