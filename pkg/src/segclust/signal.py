"""Observed signals, ground-truth piecewise-constant models and a simulator.

Positions are 1-indexed and segments are closed intervals ``(a, b)`` with
``a <= b``, so a signal of length ``n`` covers ``1..n``.

Noise is drawn from numpy's ``PCG64`` bit generator (``numpy.random.default_rng``)
seeded with the caller's integer seed, which makes every draw bit-reproducible
for a given numpy version.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from segclust.errors import ValidationError

#: Cluster levels used when the caller does not supply any for the
#: 2000-sample benchmark geometry. Equally spaced with unit gap; the
#: assignment leaves a single unit-size jump between adjacent segments.
EXAMPLE1_DEFAULT_LEVELS: tuple[float, ...] = (0.0, 2.0, 4.0, 1.0, 3.0)

# Cluster -> segments of the benchmark partition of 1..2000. The source
# listing has 926 in two clusters; the earlier-listed segment keeps it.
_EXAMPLE1_SEGMENTS: tuple[tuple[tuple[int, int], ...], ...] = (
    ((615, 678), (821, 926), (1019, 1211), (1753, 2000)),
    ((1, 100), (679, 820), (1212, 1280)),
    ((101, 214), (505, 614), (927, 1018), (1281, 1600)),
    ((215, 504),),
    ((1601, 1752),),
)


@dataclass(frozen=True)
class Signal:
    """A finite real-valued sequence ``y_1..y_n``."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).ravel()
        if arr.size < 1:
            raise ValidationError("signal must contain at least one value")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("signal values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n


def as_values(y) -> np.ndarray:
    """Return the validated float array behind ``y`` (a Signal or array-like)."""
    if isinstance(y, Signal):
        return y.values
    return Signal(y).values


@dataclass(frozen=True)
class Cluster:
    level: float
    segments: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class PiecewiseSpec:
    """Ground truth: clusters of segments sharing one level, covering ``1..n``.

    Segments must be disjoint, cover every index exactly once, and two
    index-adjacent segments may not belong to the same cluster. Levels are
    pairwise distinct.
    """

    clusters: tuple[Cluster, ...]
    n: int
    _ordered: tuple[tuple[int, int, int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        clusters = tuple(
            Cluster(float(c.level), tuple(sorted((int(a), int(b)) for a, b in c.segments)))
            for c in self.clusters
        )
        object.__setattr__(self, "clusters", clusters)
        n = int(self.n)
        if n < 1:
            raise ValidationError("n must be >= 1")
        if not clusters:
            raise ValidationError("spec needs at least one cluster")
        levels = [c.level for c in clusters]
        if not all(math.isfinite(v) for v in levels):
            raise ValidationError("cluster levels must be finite")
        if len(set(levels)) != len(levels):
            raise ValidationError("cluster levels must be pairwise distinct")
        rows = []
        for idx, c in enumerate(clusters):
            if not c.segments:
                raise ValidationError(f"cluster {idx + 1} has no segments")
            for a, b in c.segments:
                if a > b:
                    raise ValidationError(f"segment [{a},{b}] is empty")
                rows.append((a, b, idx))
        rows.sort()
        expected = 1
        for a, b, _ in rows:
            if a < expected:
                raise ValidationError(f"segment [{a},{b}] overlaps a previous segment")
            if a > expected:
                raise ValidationError(f"indices {expected}..{a - 1} are not covered")
            expected = b + 1
        if expected != n + 1:
            raise ValidationError(f"segments cover 1..{expected - 1}, expected 1..{n}")
        for (_, _, c0), (a1, _, c1) in zip(rows, rows[1:]):
            if c0 == c1:
                raise ValidationError(
                    f"segments meeting at {a1 - 1}/{a1} share cluster {c0 + 1}; merge them"
                )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "_ordered", tuple(rows))

    @property
    def segments(self) -> list[tuple[int, int, int]]:
        """``(start, end, cluster_index)`` in index order, cluster_index 0-based."""
        return list(self._ordered)

    @property
    def d_prime(self) -> int:
        return len(self.clusters) - 1

    @property
    def d_double_prime(self) -> int:
        return len(self._ordered) - 1

    @property
    def changepoints(self) -> list[int]:
        """Last index of every segment but the final one."""
        return [b for _, b, _ in self._ordered[:-1]]

    @property
    def levels(self) -> list[float]:
        return [c.level for c in self.clusters]

    def truth(self) -> np.ndarray:
        """The noiseless signal ``f*``."""
        f = np.empty(self.n)
        for a, b, idx in self._ordered:
            f[a - 1 : b] = self.clusters[idx].level
        return f

    def smallest_jump(self) -> float:
        if len(self._ordered) < 2:
            raise ValidationError("spec has a single segment; there is no jump")
        lv = [self.clusters[idx].level for _, _, idx in self._ordered]
        return min(abs(u - v) for u, v in zip(lv, lv[1:]))

    def to_rows(self) -> list[tuple[int, float, int, int]]:
        """Table rows ``(cluster_index, level, seg_start, seg_end)``, cluster_index 1-based."""
        return [(idx + 1, self.clusters[idx].level, a, b) for a, b, idx in self._ordered]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "PiecewiseSpec":
        by_cluster: dict[int, list] = {}
        levels: dict[int, float] = {}
        n = 0
        for cid, level, a, b in rows:
            cid = int(cid)
            level = float(level)
            if cid in levels and levels[cid] != level:
                raise ValidationError(f"cluster {cid} listed with two levels")
            levels[cid] = level
            by_cluster.setdefault(cid, []).append((int(a), int(b)))
            n = max(n, int(b))
        ids = sorted(by_cluster)
        if ids != list(range(1, len(ids) + 1)):
            raise ValidationError("cluster indices must be 1..k without gaps")
        return cls(tuple(Cluster(levels[i], tuple(by_cluster[i])) for i in ids), n)

    @classmethod
    def from_labels(cls, labels: Sequence[int], levels: Sequence[float]) -> "PiecewiseSpec":
        """Build from a per-index cluster label (0-based) and one level per label."""
        labels = list(labels)
        segs: dict[int, list] = {}
        start = 0
        for i in range(1, len(labels) + 1):
            if i == len(labels) or labels[i] != labels[start]:
                segs.setdefault(labels[start], []).append((start + 1, i))
                start = i
        k = len(levels)
        if sorted(segs) != list(range(k)):
            raise ValidationError("labels must use every level index exactly")
        return cls(tuple(Cluster(levels[j], tuple(segs[j])) for j in range(k)), len(labels))


def example1_spec(levels: Sequence[float] = EXAMPLE1_DEFAULT_LEVELS) -> PiecewiseSpec:
    """The 2000-sample benchmark partition with 5 clusters and 13 segments."""
    levels = [float(v) for v in levels]
    if len(levels) != 5:
        raise ValidationError("example1 needs exactly 5 levels")
    return PiecewiseSpec(
        tuple(Cluster(v, segs) for v, segs in zip(levels, _EXAMPLE1_SEGMENTS)), 2000
    )


def snr_to_sigma(spec: PiecewiseSpec, snr: float) -> float:
    """Noise standard deviation giving ``smallest_jump / sigma**2 == snr``.

    Signal-to-noise here divides the jump by the variance, not by sigma.
    """
    if not snr > 0:
        raise ValidationError("snr must be positive")
    if len(spec.clusters) < 2:
        raise ValidationError("snr is undefined for a single-cluster spec")
    return math.sqrt(spec.smallest_jump() / snr)


def generate(spec: PiecewiseSpec, sigma: float, seed: int) -> Signal:
    """Draw ``y = f* + eps`` with i.i.d. ``N(0, sigma**2)`` noise."""
    if not sigma > 0:
        raise ValidationError("sigma must be positive")
    rng = np.random.default_rng(seed)
    return Signal(spec.truth() + sigma * rng.standard_normal(spec.n))


def rescale_spec(spec: PiecewiseSpec, n: int) -> PiecewiseSpec:
    """Stretch or shrink the segment boundaries of ``spec`` onto ``1..n``.

    Each segment end ``b`` moves to ``round(b * n / spec.n)``; fails if a
    segment would vanish.
    """
    if n == spec.n:
        return spec
    if n < 1:
        raise ValidationError("n must be >= 1")
    rows = spec.segments
    out: dict[int, list] = {}
    start = 1
    for a, b, idx in rows:
        end = int(round(b * n / spec.n))
        if end < start:
            raise ValidationError(f"n={n} is too small to keep segment [{a},{b}]")
        out.setdefault(idx, []).append((start, end))
        start = end + 1
    return PiecewiseSpec(
        tuple(Cluster(c.level, tuple(out[i])) for i, c in enumerate(spec.clusters)), n
    )
