import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from segclust.clusterdp import (
    FullPartition,
    cluster_means,
    fitted_values,
    reconstruct,
    second_pass,
)
from segclust.errors import ValidationError
from segclust.oracle import exhaustive_grouping_min
from segclust.segdp import Segmentation, first_pass
from segclust.stats import CostTables, WeightedLevels

from conftest import random_piecewise


def test_every_mean_its_own_cluster_costs_nothing():
    w = WeightedLevels.from_unsorted([3.0, -1.0, 0.5, 9.0], [2, 1, 5, 1])
    assert second_pass(w, 4).cost(4) == 0.0


def test_two_clusters_hand_example():
    w = WeightedLevels.from_unsorted([0.0, 0.1, 5.0], [10, 10, 10])
    table = second_pass(w, 2)
    assert table.blocks(2) == [(1, 2), (3, 3)]
    assert table.cost(2) == pytest.approx(0.05, rel=1e-12)
    # the other contiguous 2-split costs far more
    assert exhaustive_grouping_min(w, 2) == pytest.approx(0.05, rel=1e-12)


def test_matches_exhaustive_contiguous_partitions():
    rng = np.random.default_rng(2)
    for _ in range(25):
        t = int(rng.integers(1, 11))
        w = WeightedLevels.from_unsorted(rng.normal(0, 3, t), rng.integers(1, 20, t))
        table = second_pass(w, t)
        costs = [table.cost(k) for k in range(1, t + 1)]
        for k in range(1, t + 1):
            assert abs(costs[k - 1] - exhaustive_grouping_min(w, k)) <= 1e-9
        assert all(b <= a + 1e-12 for a, b in zip(costs, costs[1:]))
        assert costs[-1] == 0.0


def test_blocks_achieve_reported_cost():
    rng = np.random.default_rng(4)
    w = WeightedLevels.from_unsorted(rng.normal(0, 2, 9), rng.integers(1, 9, 9))
    table = second_pass(w, 9)
    m = w.cost_matrix()
    for k in range(1, 10):
        blocks = table.blocks(k)
        assert len(blocks) == k
        assert sum(m[lo - 1, hi] for lo, hi in blocks) == pytest.approx(table.cost(k), abs=1e-12)


def test_second_pass_range():
    w = WeightedLevels.from_unsorted([0.0, 1.0], [1, 1])
    for k in (0, 3):
        with pytest.raises(ValidationError):
            second_pass(w, k)
    with pytest.raises(ValidationError):
        second_pass(w, 2).blocks(3)


def test_reconstruct_identity_one_block():
    seg = Segmentation((0, 2, 5, 9))
    p = reconstruct(seg, [(1, 3)], [0, 1, 2])
    assert p.labels == (1, 1, 1)


def test_reconstruct_traces_permutation():
    seg = Segmentation((0, 2, 5, 9))
    # sorted order is segment 2, segment 1, segment 3 (0-based 1, 0, 2)
    p = reconstruct(seg, [(1, 2), (3, 3)], [1, 0, 2])
    assert p.labels == (1, 1, 2)


@pytest.mark.parametrize(
    "blocks, order",
    [
        ([(1, 3)], [0, 0, 2]),
        ([(1, 3)], [0, 1]),
        ([(1, 1), (3, 3)], [0, 1, 2]),
        ([(1, 2)], [0, 1, 2]),
        ([(2, 3)], [0, 1, 2]),
    ],
)
def test_reconstruct_rejects_bad_input(blocks, order):
    with pytest.raises(ValidationError):
        reconstruct(Segmentation((0, 1, 2, 3)), blocks, order)


def sorted_blocks(p: FullPartition, order) -> list[tuple[int, int]]:
    labs = [p.labels[o] for o in order]
    out, start = [], 0
    for r in range(1, len(labs) + 1):
        if r == len(labs) or labs[r] != labs[start]:
            out.append((start + 1, r))
            start = r
    return out


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_reconstruct_round_trip(seed):
    rng = np.random.default_rng(seed)
    s = int(rng.integers(1, 9))
    cps = sorted(rng.choice(np.arange(1, 20), size=s - 1, replace=False).tolist())
    seg = Segmentation.from_changepoints(cps, 20)
    order = rng.permutation(s)
    n_blocks = int(rng.integers(1, s + 1))
    cuts = sorted(rng.choice(np.arange(1, s), size=n_blocks - 1, replace=False).tolist()) if s > 1 else []
    edges = [0, *cuts, s]
    blocks = [(a + 1, b) for a, b in zip(edges, edges[1:])]
    p = reconstruct(seg, blocks, order)
    assert sorted_blocks(p, order) == blocks


def test_fitted_values_examples():
    y = np.array([2.0, 4.0, 9.0])
    one = FullPartition(Segmentation((0, 3)), (1,))
    np.testing.assert_allclose(fitted_values(y, one), [5.0, 5.0, 5.0])
    p = FullPartition(Segmentation((0, 2, 4)), (1, 2))
    np.testing.assert_allclose(fitted_values([0, 0, 10, 10], p), [0, 0, 10, 10])
    p = FullPartition(Segmentation((0, 1, 2, 3)), (1, 2, 1))
    np.testing.assert_allclose(fitted_values([1, 5, 3], p), [2, 5, 2])
    np.testing.assert_allclose(cluster_means([1, 5, 3], p), [2, 5])


def test_full_partition_views():
    p = FullPartition.from_index_labels([7, 7, 3, 7, 3, 3])
    assert p.labels == (1, 2, 1, 2)
    assert p.segmentation.breakpoints == (0, 2, 3, 4, 6)
    assert (p.d_prime, p.d_double_prime, p.n) == (1, 3, 6)
    assert list(p.index_labels()) == [1, 1, 2, 1, 2, 2]
    q = FullPartition(Segmentation((0, 1, 3, 4, 6)), (1, 1, 2, 2))
    m = q.merged()
    assert m.segmentation.breakpoints == (0, 3, 6)
    assert m.labels == (1, 2)
    with pytest.raises(ValidationError):
        FullPartition(Segmentation((0, 2, 4)), (1, 3))
    with pytest.raises(ValidationError):
        FullPartition(Segmentation((0, 2, 4)), (1,))


def test_pythagorean_decomposition_every_cell():
    rng = np.random.default_rng(12)
    for _ in range(5):
        y = random_piecewise(rng, 40)
        d_max = 8
        tables = CostTables.from_signal(y)
        first = first_pass(y, d_max, tables)
        for d in range(1, d_max + 1):
            seg = first.segmentation(d)
            w = WeightedLevels.from_breakpoints(tables, seg.breakpoints)
            table = second_pass(w, d)
            for delta in range(1, d + 1):
                p = reconstruct(seg, table.blocks(delta), w.order)
                r = y - fitted_values(y, p)
                assert abs(float(r @ r) - (first.cost(d) + table.cost(delta))) <= 1e-9 * (
                    1 + float(y @ y)
                )
