import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from segclust.clusterdp import FullPartition, fitted_values
from segclust.errors import ValidationError
from segclust.oracle import exact_min_crit, exhaustive_grouping_min, exhaustive_segmentation_min
from segclust.penalty import PenaltySpec, pen
from segclust.segdp import Segmentation
from segclust.selector import crit_of_partition, estimate_sigma_mad, select
from segclust.stats import CostTables, WeightedLevels, segment_cost

from conftest import random_piecewise


def three_segment_truth(n=60, a=20, b=40, jump=10.0):
    f = np.zeros(n)
    f[a:b] = jump
    return f


def test_constant_signal_gives_minimal_model():
    y = np.full(25, 3.5)
    res = select(y, PenaltySpec(25, 1.0, 10))
    assert (res.n_segments, res.n_clusters) == (1, 1)
    np.testing.assert_allclose(res.fitted, 3.5)
    assert res.residual == 0.0
    assert res.changepoints == []


def test_noiseless_three_segments_two_clusters():
    rng = np.random.default_rng(0)
    f = three_segment_truth()
    sigma = 1e-6
    y = f + sigma * rng.standard_normal(60)
    spec = PenaltySpec(60, sigma**2, 10, 6.0)
    res = select(y, spec)
    assert res.changepoints == [20, 40]
    assert list(res.reported.labels) == [1, 2, 1]
    truth = FullPartition.from_index_labels((f > 0).astype(int))
    assert res.crit_value == pytest.approx(crit_of_partition(y, truth, spec), rel=1e-9)
    # any model coarser than the truth pays a residual that dwarfs the penalty gap
    pen_gap = sigma**2 * 6 * (pen(1, 2, 60) - pen(0, 0, 60))
    assert segment_cost(CostTables.from_signal(y), 1, 60) > 1e6 * pen_gap


def test_small_signal_against_full_enumeration():
    rng = np.random.default_rng(9)
    y = random_piecewise(rng, 9, noise=0.3)
    spec = PenaltySpec(9, 0.09, 4, 6.0)
    res = select(y, spec)
    best, _ = exact_min_crit(y, spec)
    assert best <= res.crit_value + 1e-9
    for d in range(1, 6):
        assert abs(res.first.cost(d) - exhaustive_segmentation_min(y, d)) <= 1e-9
        w = WeightedLevels.from_breakpoints(
            CostTables.from_signal(y), res.first.segmentation(d).breakpoints
        )
        for delta in range(1, d + 1):
            assert abs(res.second[d].cost(delta) - exhaustive_grouping_min(w, delta)) <= 1e-9


def test_result_invariants():
    rng = np.random.default_rng(21)
    for _ in range(10):
        n = int(rng.integers(5, 60))
        y = random_piecewise(rng, n)
        spec = PenaltySpec(n, 0.25, min(8, n - 1), 6.0)
        res = select(y, spec)
        assert 1 <= res.n_clusters <= res.n_segments <= spec.max_changes + 1
        assert res.crit_value == res.b_table[res.n_segments, res.n_clusters]
        expected = res.seg_cost + res.cluster_cost + spec.sigma2 * spec.k * pen(
            res.n_clusters - 1, res.n_segments - 1, n
        )
        assert abs(res.crit_value - expected) <= 1e-9 * (1 + abs(expected))
        r = y - res.fitted
        assert abs(float(r @ r) - res.residual) <= 1e-9 * (1 + float(y @ y))
        labels = res.partition.index_labels()
        for c in range(1, res.n_clusters + 1):
            assert np.ptp(res.fitted[labels == c]) == 0.0
        # first minimum of the table in row-major order, i.e. smallest d then delta
        flat = int(np.argmin(res.b_table))
        assert np.unravel_index(flat, res.b_table.shape) == (res.n_segments, res.n_clusters)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.5, 3.0, 40.0]))
def test_sigma_scaling_equivariance(seed, c):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(6, 40))
    y = random_piecewise(rng, n)
    sigma = 0.5
    a = select(y, PenaltySpec(n, sigma**2, min(6, n - 1)))
    b = select(c * y, PenaltySpec(n, (c * sigma) ** 2, min(6, n - 1)))
    assert (a.n_segments, a.n_clusters) == (b.n_segments, b.n_clusters)
    assert b.residual == pytest.approx(c * c * a.residual, rel=1e-6, abs=1e-9 * c * c)


def test_crit_of_partition_examples():
    y = np.array([1.0, 4.0, -2.0, 7.0, 0.5])
    spec = PenaltySpec(5, 2.0, 4, 6.0)
    finest = FullPartition(Segmentation((0, 1, 2, 3, 4, 5)), (1, 2, 3, 4, 5))
    assert crit_of_partition(y, finest, spec) == pytest.approx(2.0 * 6.0 * pen(4, 4, 5))
    single = FullPartition(Segmentation((0, 5)), (1,))
    want = segment_cost(CostTables.from_signal(y), 1, 5) + 2.0 * 6.0 * pen(0, 0, 5)
    assert crit_of_partition(y, single, spec) == pytest.approx(want)
    # an unmerged single cluster split in two has no admissible class
    split = FullPartition(Segmentation((0, 2, 5)), (1, 1))
    assert crit_of_partition(y, split, spec) == math.inf


def test_crit_of_true_partition_is_reproducible():
    rng = np.random.default_rng(4)
    f = three_segment_truth(30, 10, 20, 2.0)
    y = f + rng.standard_normal(30)
    truth = FullPartition.from_index_labels((f > 0).astype(int))
    spec = PenaltySpec(30, 1.0, 5)
    a = crit_of_partition(y, truth, spec)
    assert math.isfinite(a)
    assert a == crit_of_partition(y.copy(), truth, spec)
    r = y - fitted_values(y, truth)
    assert a == pytest.approx(float(r @ r) + 6.0 * pen(1, 2, 30))


def test_select_errors():
    with pytest.raises(ValidationError):
        select([1.0], PenaltySpec(2, 1.0, 1))
    with pytest.raises(ValidationError):
        select([1.0, 2.0, 3.0], PenaltySpec(4, 1.0, 2))


def test_reported_partition_fuses_same_cluster_neighbours():
    rng = np.random.default_rng(1)
    for _ in range(30):
        y = random_piecewise(rng, 30, noise=1.0)
        res = select(y, PenaltySpec(30, 1.0, 10))
        labs = res.reported.labels
        assert all(a != b for a, b in zip(labs, labs[1:]))
        assert np.array_equal(res.reported.index_labels(), res.partition.index_labels())


def test_estimate_sigma_mad():
    rng = np.random.default_rng(6)
    f = np.repeat([0.0, 5.0, 1.0, 3.0], 500)
    y = f + 0.7 * rng.standard_normal(f.size)
    assert estimate_sigma_mad(y) == pytest.approx(0.7, rel=0.08)
    with pytest.raises(ValidationError):
        estimate_sigma_mad([1.0, 1.0, 1.0, 1.0])
    with pytest.raises(ValidationError):
        estimate_sigma_mad([1.0, 2.0])
