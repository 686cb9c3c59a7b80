"""Two-pass model selection: segment, cluster the segment levels, penalise, pick.

For every segment count ``d`` the optimal segmentation is found first. Its
segment means are sorted and grouped into ``delta`` contiguous blocks for
every ``delta <= d``. Each pair is scored

    B[d, delta] = C_d + G[d, delta] + sigma2 * K * pen(delta - 1, d - 1)

and the smallest score wins, ties going to the smallest ``d`` then ``delta``.
The score is an upper bound on the exact criterion minimum over all
partitions.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from segclust.clusterdp import (
    ClusterTable,
    FullPartition,
    cluster_means,
    fitted_values,
    reconstruct,
    second_pass,
)
from segclust.errors import ValidationError
from segclust.penalty import PenaltySpec, pen, pen_grid
from segclust.segdp import SegDPResult, first_pass
from segclust.signal import as_values
from segclust.stats import CostTables, WeightedLevels


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of :func:`select`.

    ``partition`` is the model as scored, with ``n_segments`` segments
    (adjacent segments may share a cluster). ``reported`` fuses such
    neighbours and is what change points and dimensions are reported from.
    """

    partition: FullPartition
    reported: FullPartition
    fitted: np.ndarray
    levels: np.ndarray
    crit_value: float
    b_table: np.ndarray
    n_segments: int
    n_clusters: int
    seg_cost: float
    cluster_cost: float
    runtime_ms: float = field(default=0.0, compare=False)
    first: SegDPResult | None = field(default=None, repr=False, compare=False)
    second: dict[int, ClusterTable] = field(default_factory=dict, repr=False, compare=False)

    @property
    def changepoints(self) -> list[int]:
        return self.reported.segmentation.changepoints

    @property
    def d_prime(self) -> int:
        return self.reported.d_prime

    @property
    def d_double_prime(self) -> int:
        return self.reported.d_double_prime

    @property
    def residual(self) -> float:
        return self.seg_cost + self.cluster_cost


def select(y, spec: PenaltySpec) -> SelectionResult:
    """Minimise the relaxed criterion over ``1 <= delta <= d <= max_changes + 1``."""
    start = time.perf_counter()
    v = as_values(y)
    n = v.size
    if n < 2:
        raise ValidationError("need at least 2 samples")
    if spec.n != n:
        raise ValidationError(f"penalty spec is for n={spec.n} but signal has {n} values")
    d_max = spec.max_changes + 1
    tables = CostTables.from_signal(v)
    first = first_pass(v, d_max, tables)
    seg_costs = first.cost_table[1:, -1]

    g = np.full((d_max + 1, d_max + 1), np.inf)
    second: dict[int, ClusterTable] = {}
    orders: dict[int, np.ndarray] = {}
    for d in range(1, d_max + 1):
        w = WeightedLevels.from_breakpoints(tables, first.segmentation(d).breakpoints)
        table = second_pass(w, d)
        second[d] = table
        orders[d] = w.order
        g[d, 1 : d + 1] = table.cost_table[1:, -1]

    b = np.full((d_max + 1, d_max + 1), np.inf)
    b[1:, :] = seg_costs[:, None]
    b += g + spec.sigma2 * spec.k * pen_grid(n, d_max)
    d_hat, delta_hat = np.unravel_index(int(np.argmin(b)), b.shape)
    d_hat, delta_hat = int(d_hat), int(delta_hat)

    seg = first.segmentation(d_hat)
    part = reconstruct(seg, second[d_hat].blocks(delta_hat), orders[d_hat])
    levels = cluster_means(v, part)
    return SelectionResult(
        partition=part,
        reported=part.merged(),
        fitted=levels[part.index_labels() - 1],
        levels=levels,
        crit_value=float(b[d_hat, delta_hat]),
        b_table=b,
        n_segments=d_hat,
        n_clusters=delta_hat,
        seg_cost=first.cost(d_hat),
        cluster_cost=second[d_hat].cost(delta_hat),
        runtime_ms=(time.perf_counter() - start) * 1e3,
        first=first,
        second=second,
    )


def crit_of_partition(y, p: FullPartition, spec: PenaltySpec) -> float:
    """Residual sum of squares of the cluster-mean fit plus the scaled penalty.

    The penalty uses the partition's own dimensions, so fuse adjacent
    same-cluster segments first (:meth:`FullPartition.merged`) to score the
    maximal-segment model.
    """
    v = as_values(y)
    r = v - fitted_values(v, p)
    return float(r @ r) + spec.sigma2 * spec.k * pen(p.d_prime, p.d_double_prime, spec.n)


def estimate_sigma_mad(y) -> float:
    """Robust noise scale from first differences: ``MAD(diff(y)) / (0.6745 * sqrt(2))``.

    A convenience for data without a known noise level; it is not part of
    the selection rule, which assumes the variance is known.
    """
    v = as_values(y)
    if v.size < 3:
        raise ValidationError("need at least 3 samples to estimate sigma")
    dy = np.diff(v)
    mad = float(np.median(np.abs(dy - np.median(dy))))
    sigma = mad / (0.6744897501960817 * math.sqrt(2.0))
    if sigma <= 0:
        raise ValidationError("MAD estimate is zero; supply sigma explicitly")
    return sigma
