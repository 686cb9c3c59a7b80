"""Optimal least-squares segmentation for every segment count up to a maximum.

``C[d, m]`` is the smallest residual sum of squares of ``y_1..y_m`` split into
``d`` contiguous segments:

    C[1, m] = R(1, m)
    C[d, m] = min over i in d..m of C[d-1, i-1] + R(i, m)

where ``R(i, m)`` is the within-run squared error. A segment count ``d``
corresponds to ``d - 1`` change points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from segclust.errors import ValidationError
from segclust.signal import as_values
from segclust.stats import CostTables, segment_cost


@dataclass(frozen=True)
class Segmentation:
    """Breakpoints ``0 = b_0 < b_1 < ... < b_s = n``; segment ``j`` is ``b_j+1..b_{j+1}``."""

    breakpoints: tuple[int, ...]

    def __post_init__(self):
        b = tuple(int(v) for v in self.breakpoints)
        if len(b) < 2 or b[0] != 0:
            raise ValidationError("breakpoints must start at 0 and contain the end index")
        if any(v1 <= v0 for v0, v1 in zip(b, b[1:])):
            raise ValidationError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", b)

    @classmethod
    def from_changepoints(cls, changepoints, n: int) -> "Segmentation":
        return cls((0, *sorted(int(c) for c in changepoints), int(n)))

    @property
    def n(self) -> int:
        return self.breakpoints[-1]

    @property
    def n_segments(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def changepoints(self) -> list[int]:
        return list(self.breakpoints[1:-1])

    @property
    def segments(self) -> list[tuple[int, int]]:
        """Closed 1-indexed intervals ``(start, end)``."""
        b = self.breakpoints
        return [(b[j] + 1, b[j + 1]) for j in range(len(b) - 1)]


@dataclass(frozen=True)
class SegDPResult:
    """Cost and back-pointer tables of the segmentation recurrence.

    Rows are indexed by segment count (row 0 unused), columns by prefix
    length ``m = 0..n``. Unreachable cells hold ``inf``.
    """

    cost_table: np.ndarray
    argmin_table: np.ndarray
    segmentations: dict = field(repr=False)

    @property
    def max_segments(self) -> int:
        return self.cost_table.shape[0] - 1

    @property
    def n(self) -> int:
        return self.cost_table.shape[1] - 1

    def cost(self, d: int) -> float:
        """Optimal cost of the whole signal with ``d`` segments."""
        return float(self.cost_table[d, -1])

    def segmentation(self, d: int) -> Segmentation:
        return self.segmentations[d]


def _backtrack(argmin: np.ndarray, d: int, n: int) -> Segmentation:
    b = [n]
    m = n
    for row in range(d, 1, -1):
        m = int(argmin[row, m])
        b.append(m)
    b.append(0)
    return Segmentation(tuple(reversed(b)))


#: Columns per block in the vectorised recurrence; bounds working memory at
#: ``n * BLOCK`` floats.
BLOCK = 128


def first_pass(y, max_segments: int, tables: CostTables | None = None) -> SegDPResult:
    """Run the segmentation recurrence for ``d = 1..max_segments``.

    Ties are broken by the smallest split index. Run costs come from the
    prefix sums as needed, so the work is quadratic in the signal length per
    segment count and memory stays linear apart from the tables themselves.
    """
    v = as_values(y)
    n = v.size
    if not 1 <= max_segments <= n:
        raise ValidationError(f"max_segments must lie in 1..{n}, got {max_segments}")
    t = tables if tables is not None else CostTables.from_signal(v)
    cum, cumsq = t.cum, t.cumsq
    cost = np.full((max_segments + 1, n + 1), np.inf)
    arg = np.zeros((max_segments + 1, n + 1), dtype=np.int64)
    ends = np.arange(1, n + 1)
    s1 = cum[ends]
    cost[1, 1:] = np.maximum(cumsq[ends] - s1 * s1 / ends, 0.0)
    cost[1, 1] = 0.0
    for d in range(2, max_segments + 1):
        prev = cost[d - 1]
        for m0 in range(d, n + 1, BLOCK):
            m1 = min(m0 + BLOCK, n + 1)
            j = np.arange(d - 1, m1 - 1)[:, None]
            m = np.arange(m0, m1)[None, :]
            length = m - j
            sm = cum[m] - cum[j]
            with np.errstate(divide="ignore", invalid="ignore"):
                run = cumsq[m] - cumsq[j] - sm * sm / length
            np.maximum(run, 0.0, out=run)
            run[length == 1] = 0.0
            run[length <= 0] = np.inf
            total = prev[j] + run
            k = np.argmin(total, axis=0)
            cost[d, m0:m1] = total[k, np.arange(m1 - m0)]
            arg[d, m0:m1] = k + d - 1
    segs = {d: _backtrack(arg, d, n) for d in range(1, max_segments + 1)}
    return SegDPResult(cost, arg, segs)


def segmentation_cost(y, seg: Segmentation) -> float:
    """Residual sum of squares when each segment of ``seg`` is fit by its mean."""
    v = as_values(y)
    if seg.n != v.size:
        raise ValidationError(f"segmentation covers 1..{seg.n} but signal has {v.size} values")
    t = CostTables.from_signal(v)
    return sum(segment_cost(t, a, b) for a, b in seg.segments)
