"""Prefix-sum tables for constant-time segment means and squared-error costs.

Two flavours are provided: plain costs over contiguous runs of the signal,
and weighted costs over a sorted sequence of segment means where each mean
carries the length of its segment as weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from segclust.errors import ValidationError
from segclust.signal import as_values


def _clamp(cost: float) -> float:
    # closed forms can dip below zero through cancellation
    return cost if cost > 0.0 else 0.0


@dataclass(frozen=True)
class CostTables:
    """Prefix sums ``cum[l] = y_1 + ... + y_l`` and ``cumsq[l]`` of squares, ``cum[0] = 0``."""

    cum: np.ndarray
    cumsq: np.ndarray
    n: int

    @classmethod
    def from_signal(cls, y) -> "CostTables":
        v = as_values(y)
        cum = np.concatenate(([0.0], np.cumsum(v)))
        cumsq = np.concatenate(([0.0], np.cumsum(v * v)))
        return cls(cum, cumsq, int(v.size))

    def _check(self, k: int, l: int) -> None:
        if not 1 <= k <= l <= self.n:
            raise ValidationError(f"need 1 <= k <= l <= {self.n}, got k={k}, l={l}")


def segment_mean(t: CostTables, k: int, l: int) -> float:
    """Mean of ``y_k..y_l``."""
    t._check(k, l)
    return float((t.cum[l] - t.cum[k - 1]) / (l - k + 1))


def segment_cost(t: CostTables, k: int, l: int) -> float:
    """Sum of squared deviations of ``y_k..y_l`` from their mean."""
    t._check(k, l)
    if k == l:
        return 0.0
    s = t.cum[l] - t.cum[k - 1]
    return _clamp(float(t.cumsq[l] - t.cumsq[k - 1] - s * s / (l - k + 1)))


@dataclass(frozen=True)
class WeightedLevels:
    """Segment means sorted ascending, with their lengths as weights.

    ``order[r]`` is the 0-based original index of the segment holding the
    ``r``-th smallest mean. Equal means keep their original order.
    """

    means: np.ndarray
    weights: np.ndarray
    order: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        order = np.asarray(self.order, dtype=int)
        if not (means.ndim == weights.ndim == order.ndim == 1):
            raise ValidationError("means, weights and order must be 1-D")
        if not (means.size == weights.size == order.size >= 1):
            raise ValidationError("means, weights and order must share a nonzero length")
        if np.any(np.diff(means) < 0):
            raise ValidationError("means must be sorted ascending")
        if np.any(weights <= 0):
            raise ValidationError("weights must be positive")
        if not np.array_equal(np.sort(order), np.arange(order.size)):
            raise ValidationError("order must be a permutation of 0..t-1")
        for name, arr in (("means", means), ("weights", weights), ("order", order)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        wcum = np.concatenate(([0.0], np.cumsum(weights)))
        mcum = np.concatenate(([0.0], np.cumsum(weights * means)))
        qcum = np.concatenate(([0.0], np.cumsum(weights * means * means)))
        object.__setattr__(self, "_cums", (wcum, mcum, qcum))

    @property
    def t(self) -> int:
        return int(self.means.size)

    @classmethod
    def from_unsorted(cls, means, weights) -> "WeightedLevels":
        means = np.asarray(means, dtype=float)
        order = np.argsort(means, kind="stable")
        return cls(means[order], np.asarray(weights, dtype=float)[order], order)

    @classmethod
    def from_breakpoints(cls, tables: CostTables, breakpoints) -> "WeightedLevels":
        """Levels of the segments ``b[i]+1..b[i+1]`` for consecutive breakpoints."""
        b = np.asarray(breakpoints, dtype=int)
        lengths = np.diff(b)
        means = (tables.cum[b[1:]] - tables.cum[b[:-1]]) / lengths
        return cls.from_unsorted(means, lengths)

    def block_mean(self, k: int, l: int) -> float:
        """Weighted mean of sorted means ``k..l`` (1-indexed, inclusive)."""
        self._check(k, l)
        wcum, mcum, _ = self._cums
        return float((mcum[l] - mcum[k - 1]) / (wcum[l] - wcum[k - 1]))

    def _check(self, k: int, l: int) -> None:
        if not 1 <= k <= l <= self.t:
            raise ValidationError(f"need 1 <= k <= l <= {self.t}, got k={k}, l={l}")

    def cost_matrix(self) -> np.ndarray:
        """``M[j, m]`` = weighted cost of sorted block ``j+1..m``; ``inf`` when ``j >= m``."""
        wcum, mcum, qcum = self._cums
        w = wcum[None, :] - wcum[:, None]
        s = mcum[None, :] - mcum[:, None]
        q = qcum[None, :] - qcum[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            m = q - s * s / w
        m[w <= 0] = np.inf
        np.maximum(m, 0.0, out=m)
        idx = np.arange(self.t)
        m[idx, idx + 1] = 0.0
        return m


def weighted_cost(w: WeightedLevels, k: int, l: int) -> float:
    """Weighted squared deviation of sorted means ``k..l`` about their weighted mean."""
    w._check(k, l)
    if k == l:
        return 0.0
    wcum, mcum, qcum = w._cums
    s = mcum[l] - mcum[k - 1]
    return _clamp(float(qcum[l] - qcum[k - 1] - s * s / (wcum[l] - wcum[k - 1])))
