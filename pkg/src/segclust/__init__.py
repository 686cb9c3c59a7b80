"""Joint change point detection and level clustering for piecewise-constant signals."""

from segclust.clusterdp import FullPartition, fitted_values, reconstruct, second_pass
from segclust.errors import ValidationError
from segclust.penalty import PenaltySpec, pen
from segclust.segdp import Segmentation, first_pass
from segclust.selector import SelectionResult, crit_of_partition, select
from segclust.signal import PiecewiseSpec, Signal, example1_spec, generate, snr_to_sigma

__all__ = [
    "FullPartition",
    "PenaltySpec",
    "PiecewiseSpec",
    "Segmentation",
    "SelectionResult",
    "Signal",
    "ValidationError",
    "crit_of_partition",
    "example1_spec",
    "first_pass",
    "fitted_values",
    "generate",
    "pen",
    "reconstruct",
    "second_pass",
    "select",
    "snr_to_sigma",
]
