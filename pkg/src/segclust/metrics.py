"""Evaluation of a fitted model against the ground truth."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from segclust.errors import ValidationError
from segclust.oracle import risk_bound_per_sample
from segclust.signal import PiecewiseSpec

log = logging.getLogger(__name__)


def mse(fhat, fstar) -> float:
    """Mean squared difference ``||fhat - fstar||^2 / n``."""
    a = np.asarray(fhat, dtype=float)
    b = np.asarray(fstar, dtype=float)
    if a.shape != b.shape:
        raise ValidationError(f"length mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(d @ d) / d.size


def _greedy_pairs(est: Sequence[float], truth: Sequence[float], tol: float):
    """One-to-one matches taken nearest first; ties broken by value."""
    cand = sorted(
        (abs(e - t), e, t, i, j)
        for i, e in enumerate(est)
        for j, t in enumerate(truth)
        if abs(e - t) <= tol
    )
    used_e, used_t, pairs = set(), set(), []
    for dist, _, _, i, j in cand:
        if i in used_e or j in used_t:
            continue
        used_e.add(i)
        used_t.add(j)
        pairs.append((i, j, dist))
    return pairs


def cp_accuracy(est: Iterable[int], truth: Iterable[int], tol: int = 5) -> float:
    """Fraction of detected change points that match a distinct true one within ``tol``.

    No detections and no true change points scores 1.0. No detections with
    true change points present is undefined as a ratio; it scores 0.0 and
    logs a warning.
    """
    if tol < 0:
        raise ValidationError("tol must be >= 0")
    est = sorted(set(int(e) for e in est))
    truth = sorted(set(int(t) for t in truth))
    if not est:
        if truth:
            log.warning("no change points detected against %d true ones; accuracy set to 0", len(truth))
            return 0.0
        return 1.0
    return len(_greedy_pairs(est, truth, tol)) / len(est)


def level_errors(est_levels: Iterable[float], true_levels: Iterable[float]) -> list[float]:
    """Absolute errors of nearest-first one-to-one level matches.

    Matched errors come first, ordered by true level; every unmatched level
    on either side adds an ``inf`` entry.
    """
    est = [float(v) for v in est_levels]
    truth = [float(v) for v in true_levels]
    if not est or not truth:
        raise ValidationError("need at least one level on each side")
    pairs = _greedy_pairs(est, truth, math.inf)
    errs = sorted(((truth[j], dist) for _, j, dist in pairs))
    out = [dist for _, dist in errs]
    out += [math.inf] * (len(est) + len(truth) - 2 * len(pairs))
    return out


@dataclass(frozen=True)
class EvalReport:
    mse_per_sample: float
    bound_per_sample: float
    cp_accuracy: float
    n_detected: int
    n_true: int
    level_errors: tuple[float, ...]

    @property
    def below_bound(self) -> bool:
        return self.mse_per_sample < self.bound_per_sample


def evaluate(
    fitted, changepoints: Iterable[int], levels: Iterable[float], spec: PiecewiseSpec,
    sigma: float, tol: int = 5,
) -> EvalReport:
    """Score a fit of a signal simulated from ``spec`` with noise level ``sigma``."""
    cps = list(changepoints)
    truth_cps = spec.changepoints
    return EvalReport(
        mse_per_sample=mse(fitted, spec.truth()),
        bound_per_sample=risk_bound_per_sample(spec.d_prime, spec.d_double_prime, spec.n, sigma),
        cp_accuracy=cp_accuracy(cps, truth_cps, tol),
        n_detected=len(cps),
        n_true=len(truth_cps),
        level_errors=tuple(level_errors(levels, spec.levels)),
    )
