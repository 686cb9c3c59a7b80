"""Model prior and penalty, all evaluated in the log domain.

A model with ``dprime + 1`` clusters and ``dpp`` change points on ``n``
samples receives prior mass

    p = exp(-dprime - dpp) / (B_n * S2(dpp + 1, dprime + 1) * C(n, dpp))

where ``S2(a, b) = S(a - 1, b - 1)`` counts partitions of ``1..a`` into ``b``
classes with no two consecutive elements together, and ``B_n`` normalises the
prior. The penalty is

    pen = 2 * ln(1/p) + (dprime + 1) * ln(n / dprime)

with ``ln n`` substituted for the last term when ``dprime == 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from segclust.errors import ValidationError

#: ``e**3 / ((e - 1)**2 * (e + 1))``, the limit of ``B_n``.
B_LIMIT = math.e**3 / ((math.e - 1.0) ** 2 * (math.e + 1.0))


@dataclass(frozen=True)
class PenaltySpec:
    """Settings of ``Crit(m) = ||y - f_m||^2 + sigma2 * K * pen(m)``.

    ``max_changes`` bounds the number of change points explored, so at most
    ``max_changes + 1`` segments are fit.
    """

    n: int
    sigma2: float
    max_changes: int
    k: float = 6.0

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("need at least 2 samples")
        if not self.k > 0:
            raise ValidationError("penalty multiplier K must be positive")
        if not self.sigma2 > 0:
            raise ValidationError("sigma2 must be positive")
        if not 1 <= self.max_changes <= self.n - 1:
            raise ValidationError(f"max_changes must lie in 1..{self.n - 1}")


def log_binomial(n: int, k: int) -> float:
    """``ln C(n, k)`` via log-gamma."""
    if n < 0 or k < 0 or k > n:
        raise ValidationError(f"binomial needs 0 <= k <= n, got n={n}, k={k}")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


class _StirlingRows:
    """Rows ``ln S(n, 0..n)`` grown on demand with the triangular recurrence."""

    def __init__(self):
        self.rows = [np.array([0.0])]

    def row(self, n: int) -> np.ndarray:
        while len(self.rows) <= n:
            prev = self.rows[-1]
            m = prev.size
            ks = np.arange(1, m)
            cur = np.full(m + 1, -np.inf)
            # S(m, k) = S(m-1, k-1) + k S(m-1, k)
            cur[1:m] = np.logaddexp(prev[:-1], np.log(ks) + prev[1:])
            cur[m] = 0.0
            self.rows.append(cur)
        return self.rows[n]


_STIRLING = _StirlingRows()


def log_stirling2nd(n: int, k: int) -> float:
    """``ln S(n, k)``, Stirling numbers of the second kind, for ``1 <= k <= n``."""
    if not 1 <= k <= n:
        raise ValidationError(f"Stirling number needs 1 <= k <= n, got n={n}, k={k}")
    return float(_STIRLING.row(n)[k])


def log_stirling_restricted(n: int, k: int) -> float:
    """``ln S2(n, k)``: partitions of ``1..n`` into ``k`` classes without neighbours together.

    ``S2(1, 1) = 1``. For ``n >= 2`` a single class always holds neighbours,
    so ``S2(n, 1) = 0`` and ``-inf`` is returned.
    """
    if not 1 <= k <= n:
        raise ValidationError(f"restricted Stirling number needs 1 <= k <= n, got n={n}, k={k}")
    if n == 1:
        return 0.0
    if k == 1:
        return -math.inf
    return log_stirling2nd(n - 1, k - 1)


def log_b_n(n: int) -> float:
    """``ln B_n`` from its closed form."""
    if n < 1:
        raise ValidationError("B_n needs n >= 1")
    a = math.exp(-n)
    e = math.e
    inner = -a * a - a / e + a * a / e - a / (e * e) + a * a / (e * e)
    return math.log(B_LIMIT) + math.log1p(inner)


def _check_dims(dprime: int, dpp: int, n: int) -> None:
    if not 0 <= dprime <= dpp <= n - 1:
        raise ValidationError(
            f"need 0 <= d' <= d'' <= n-1, got d'={dprime}, d''={dpp}, n={n}"
        )


def log_inv_prior(dprime: int, dpp: int, n: int) -> float:
    """``ln(1/p)`` for a model with ``dprime + 1`` clusters and ``dpp`` change points.

    ``+inf`` when the class is empty (one cluster but several segments).
    """
    _check_dims(dprime, dpp, n)
    return _log_inv_prior(dprime, dpp, n)


def _log_inv_prior(dprime: int, dpp: int, n: int) -> float:
    log_s2 = log_stirling_restricted(dpp + 1, dprime + 1)
    if log_s2 == -math.inf:
        # no partition has these dimensions
        return math.inf
    return (
        log_b_n(n)
        + log_s2
        + log_binomial(n, dpp)
        + dprime
        + dpp
    )


def _xlog_ratio(n: int, dprime: int) -> float:
    # (d'+1) ln(n/d') with ln n standing in at d' = 0
    if dprime == 0:
        return math.log(n)
    return (dprime + 1) * math.log(n / dprime)


def pen(dprime: int, dpp: int, n: int) -> float:
    """Penalty of a model on ``n`` samples; ``+inf`` for empty classes."""
    return 2.0 * log_inv_prior(dprime, dpp, n) + _xlog_ratio(n, dprime)


def pen_grid(n: int, max_segments: int) -> np.ndarray:
    """``P[d, delta] = pen(delta - 1, d - 1, n)`` for ``1 <= delta <= d <= max_segments``.

    Cells outside the triangle, and row/column 0, are ``inf``.
    """
    if not 1 <= max_segments <= n:
        raise ValidationError(f"max_segments must lie in 1..{n}")
    out = np.full((max_segments + 1, max_segments + 1), np.inf)
    for d in range(1, max_segments + 1):
        for delta in range(1, d + 1):
            out[d, delta] = pen(delta - 1, d - 1, n)
    return out


def class_mass(dprime: int, dpp: int, n: int) -> float:
    """Total prior mass ``|A| * p`` of the class with the given dimensions.

    ``|A| = S2(dpp + 1, dprime + 1) * C(n, dpp)`` cancels the prior's
    denominator, leaving ``exp(-dprime - dpp) / B_n``. Empty classes
    (``dprime = 0 < dpp``) are included through that cancellation, as the
    normalising constant assumes; ``admissible_mass`` drops them.
    """
    if not (0 <= dprime <= dpp <= n and dprime <= n - 1):
        raise ValidationError(f"class ({dprime}, {dpp}) outside the prior's range for n={n}")
    log_count = log_stirling_restricted(dpp + 1, dprime + 1) + log_binomial(n, dpp)
    if log_count == -math.inf:
        return math.exp(-dprime - dpp - log_b_n(n))
    return math.exp(log_count - _log_inv_prior(dprime, dpp, n))


def total_mass(n: int) -> float:
    """Sum of class masses over ``0 <= d' <= n-1``, ``d' <= d'' <= n``."""
    return math.fsum(
        class_mass(a, b, n) for a in range(n) for b in range(a, n + 1)
    )


def admissible_mass(n: int) -> float:
    """As :func:`total_mass` but skipping classes that contain no partition."""
    return math.fsum(
        class_mass(a, b, n)
        for a in range(n)
        for b in range(a, n + 1)
        if not (a == 0 and b > 0)
    )
