"""Grouping sorted segment means into clusters, and the resulting partitions.

Clusters are restricted to contiguous blocks of the sorted means, so the
optimal grouping into ``delta`` clusters solves the same kind of recurrence
as the segmentation pass, now with weighted costs:

    G[1, t] = Rw(1, t)
    G[delta, t] = min over i in delta..t of G[delta-1, i-1] + Rw(i, t)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from segclust.errors import ValidationError
from segclust.segdp import Segmentation
from segclust.signal import as_values
from segclust.stats import WeightedLevels


@dataclass(frozen=True)
class ClusterTable:
    """Cost and back-pointer tables of the grouping recurrence.

    Rows are cluster counts (row 0 unused), columns prefix lengths ``t = 0..T``
    of the sorted means.
    """

    cost_table: np.ndarray
    argmin_table: np.ndarray

    @property
    def t(self) -> int:
        return self.cost_table.shape[1] - 1

    @property
    def max_clusters(self) -> int:
        return self.cost_table.shape[0] - 1

    def cost(self, delta: int) -> float:
        return float(self.cost_table[delta, -1])

    def blocks(self, delta: int) -> list[tuple[int, int]]:
        """Optimal blocks ``(first, last)`` over sorted positions, 1-indexed inclusive."""
        if not 1 <= delta <= self.max_clusters:
            raise ValidationError(f"delta must lie in 1..{self.max_clusters}")
        out = []
        end = self.t
        for row in range(delta, 1, -1):
            start = int(self.argmin_table[row, end])
            out.append((start + 1, end))
            end = start
        out.append((1, end))
        return out[::-1]


def second_pass(w: WeightedLevels, max_clusters: int) -> ClusterTable:
    """Optimal contiguous groupings of the sorted means for ``1..max_clusters`` clusters."""
    t = w.t
    if not 1 <= max_clusters <= t:
        raise ValidationError(f"max_clusters must lie in 1..{t}, got {max_clusters}")
    runs = w.cost_matrix()
    cost = np.full((max_clusters + 1, t + 1), np.inf)
    arg = np.zeros((max_clusters + 1, t + 1), dtype=np.int64)
    cost[1, 1:] = runs[0, 1:]
    cols = np.arange(t + 1)
    for delta in range(2, max_clusters + 1):
        total = cost[delta - 1][:, None] + runs
        j = np.argmin(total, axis=0)
        cost[delta] = total[j, cols]
        arg[delta] = j
    return ClusterTable(cost, arg)


@dataclass(frozen=True)
class FullPartition:
    """Segments of ``1..n`` with one cluster label (1..k) per segment.

    Adjacent segments may share a label; see :meth:`merged` for the
    maximal-segment form.
    """

    segmentation: Segmentation
    labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(c) for c in self.labels)
        if len(labels) != self.segmentation.n_segments:
            raise ValidationError("need exactly one label per segment")
        if sorted(set(labels)) != list(range(1, max(labels) + 1)):
            raise ValidationError("labels must be 1..k with every cluster nonempty")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_index_labels(cls, labels: Sequence[int]) -> "FullPartition":
        """Build from one label per signal index; labels are renumbered by first appearance."""
        labels = list(labels)
        if not labels:
            raise ValidationError("empty labelling")
        rename: dict = {}
        cps = []
        seg_labels = []
        for i, lab in enumerate(labels):
            if i == 0 or lab != labels[i - 1]:
                if i:
                    cps.append(i)
                seg_labels.append(rename.setdefault(lab, len(rename) + 1))
        return cls(Segmentation.from_changepoints(cps, len(labels)), tuple(seg_labels))

    @property
    def n(self) -> int:
        return self.segmentation.n

    @property
    def n_clusters(self) -> int:
        return max(self.labels)

    @property
    def d_prime(self) -> int:
        return self.n_clusters - 1

    @property
    def d_double_prime(self) -> int:
        return self.segmentation.n_segments - 1

    def index_labels(self) -> np.ndarray:
        """Cluster label of every index ``1..n`` (array position ``i-1``)."""
        return np.repeat(self.labels, np.diff(self.segmentation.breakpoints))

    def merged(self) -> "FullPartition":
        """Same clustering with index-adjacent same-cluster segments fused."""
        b = self.segmentation.breakpoints
        keep_b = [0]
        keep_l = [self.labels[0]]
        for j in range(1, len(self.labels)):
            if self.labels[j] != keep_l[-1]:
                keep_b.append(b[j])
                keep_l.append(self.labels[j])
        keep_b.append(b[-1])
        return FullPartition(Segmentation(tuple(keep_b)), tuple(keep_l))


def reconstruct(
    seg: Segmentation, blocks: Sequence[tuple[int, int]], order: Sequence[int]
) -> FullPartition:
    """Map blocks of sorted positions back to the original segments.

    ``order[r]`` is the original (0-based) segment at sorted position ``r``.
    Block ``c`` (1-indexed, in the given order) becomes cluster ``c``.
    """
    s = seg.n_segments
    order = np.asarray(order, dtype=int)
    if order.size != s or not np.array_equal(np.sort(order), np.arange(s)):
        raise ValidationError("order must be a permutation of the segment indices")
    expected = 1
    for lo, hi in blocks:
        if lo != expected or hi < lo:
            raise ValidationError("blocks must tile the sorted positions contiguously")
        expected = hi + 1
    if expected != s + 1:
        raise ValidationError("blocks do not cover every sorted position")
    labels = [0] * s
    for c, (lo, hi) in enumerate(blocks, start=1):
        for r in range(lo - 1, hi):
            labels[order[r]] = c
    return FullPartition(seg, tuple(labels))


def cluster_means(y, p: FullPartition) -> np.ndarray:
    """Mean of ``y`` over each cluster, indexed by ``label - 1``."""
    v = as_values(y)
    if v.size != p.n:
        raise ValidationError(f"partition covers {p.n} indices but signal has {v.size}")
    lab = p.index_labels() - 1
    sums = np.bincount(lab, weights=v, minlength=p.n_clusters)
    counts = np.bincount(lab, minlength=p.n_clusters)
    return sums / counts


def fitted_values(y, p: FullPartition) -> np.ndarray:
    """Projection of ``y`` onto signals constant on each cluster."""
    return cluster_means(y, p)[p.index_labels() - 1]
