"""Brute-force references for small problems, and the adaptive risk bound.

Everything here enumerates explicitly and is meant for checking the dynamic
programmes, not for production fits.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from typing import Iterator

import numpy as np

from segclust.clusterdp import FullPartition
from segclust.errors import ValidationError
from segclust.penalty import PenaltySpec, log_binomial, log_stirling_restricted
from segclust.selector import crit_of_partition
from segclust.signal import as_values
from segclust.stats import WeightedLevels

MAX_ENUM_N = 12
MAX_CRIT_N = 9


def restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    """Every set partition of ``n`` items as a restricted growth string, in lexicographic order.

    Item ``i`` takes a label in ``0..1 + max(labels before i)``, the first item label 0.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    a = [0] * n
    if n == 1:
        yield (0,)
        return
    yield from _rgs_tail(a, 1, n, 1)


def _rgs_tail(a: list, i: int, n: int, bound: int) -> Iterator[tuple[int, ...]]:
    for v in range(bound + 1):
        a[i] = v
        if i + 1 == n:
            yield tuple(a)
        else:
            yield from _rgs_tail(a, i + 1, n, max(bound, v + 1))


def enumerate_partitions(n: int) -> Iterator[FullPartition]:
    """All set partitions of ``1..n``; each part is a cluster, its maximal runs are segments."""
    if not 1 <= n <= MAX_ENUM_N:
        raise ValidationError(f"enumeration is limited to 1 <= n <= {MAX_ENUM_N}")
    for rgs in restricted_growth_strings(n):
        yield FullPartition.from_index_labels(rgs)


def class_counts(n: int) -> dict[tuple[int, int], tuple[int, int]]:
    """Per ``(d', d'')``: enumerated partition count and the prior's counting formula.

    The formula places change points with ``C(n, d'')`` while partitions of
    ``1..n`` only have ``n - 1`` interior positions, so the two disagree
    whenever ``d'' > 0``.
    """
    if not 1 <= n <= 8:
        raise ValidationError("class counting is limited to n <= 8")
    seen = Counter((p.d_prime, p.d_double_prime) for p in enumerate_partitions(n))
    out = {}
    for (a, b), count in sorted(seen.items()):
        log_formula = log_stirling_restricted(b + 1, a + 1) + log_binomial(n, b)
        formula = 0 if log_formula == -math.inf else round(math.exp(log_formula))
        out[(a, b)] = (count, formula)
    return out


def exact_min_crit(y, spec: PenaltySpec) -> tuple[float, FullPartition]:
    """Smallest criterion over every partition of ``1..n``; first one wins ties."""
    v = as_values(y)
    if v.size > MAX_CRIT_N:
        raise ValidationError(f"exhaustive criterion search is limited to n <= {MAX_CRIT_N}")
    best = None
    for p in enumerate_partitions(v.size):
        c = crit_of_partition(v, p, spec)
        if best is None or c < best[0]:
            best = (c, p)
    return best


def exhaustive_segmentation_min(y, n_segments: int) -> float:
    """Smallest residual over all ways to cut ``y`` into ``n_segments`` runs."""
    v = as_values(y)
    n = v.size
    best = math.inf
    for cuts in itertools.combinations(range(1, n), n_segments - 1):
        b = (0, *cuts, n)
        total = 0.0
        for lo, hi in zip(b, b[1:]):
            seg = v[lo:hi]
            total += float(np.sum((seg - seg.mean()) ** 2))
        best = min(best, total)
    return best


def exhaustive_grouping_min(w: WeightedLevels, n_clusters: int) -> float:
    """Smallest weighted cost over all splits of the sorted means into contiguous blocks."""
    t = w.t
    best = math.inf
    for cuts in itertools.combinations(range(1, t), n_clusters - 1):
        b = (0, *cuts, t)
        total = 0.0
        for lo, hi in zip(b, b[1:]):
            m = w.means[lo:hi]
            a = w.weights[lo:hi]
            mu = np.sum(a * m) / np.sum(a)
            total += float(np.sum(a * (m - mu) ** 2))
        best = min(best, total)
    return best


def risk_bound(dprime: int, dpp: int, n: int, sigma: float) -> float:
    """Adaptive upper bound on the expected squared risk for a true model of these dimensions.

    ``4 sigma^2 (7 + 3 (d'+1) ln(n/d') + 6 (d' ln(d'' e^{13/6}) + d'' ln(d' e^2)
    + d'' ln(n/d'')))``, with ``0 ln 0 = 0`` and ``ln n`` for the
    ``(d'+1) ln(n/d')`` term when ``d' = 0``.
    """
    if not 0 <= dprime <= dpp <= n:
        raise ValidationError(f"need 0 <= d' <= d'' <= n, got ({dprime}, {dpp}, {n})")
    if dprime == 0 and dpp > 0:
        raise ValidationError("a single cluster cannot have change points")
    if not sigma > 0:
        raise ValidationError("sigma must be positive")
    if dprime == 0:
        cluster_term = math.log(n)
        inner = 0.0
    else:
        cluster_term = (dprime + 1) * math.log(n / dprime)
        inner = dprime * (math.log(dpp) + 13.0 / 6.0) + dpp * (math.log(dprime) + 2.0)
    if dpp > 0:
        inner += dpp * math.log(n / dpp)
    return 4.0 * sigma**2 * (7.0 + 3.0 * cluster_term + 6.0 * inner)


def risk_bound_per_sample(dprime: int, dpp: int, n: int, sigma: float) -> float:
    return risk_bound(dprime, dpp, n, sigma) / n


def consistency_ratio(dpp: int, n: int) -> float:
    """``d'' ln n / n``; the bound is only informative while this stays small."""
    if n < 2:
        raise ValidationError("n must be >= 2")
    return dpp * math.log(n) / n
