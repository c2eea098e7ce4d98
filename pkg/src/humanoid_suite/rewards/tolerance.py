"""Public tolerance primitive and its parameter types."""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

DEFAULT_VALUE_AT_MARGIN = 0.1


@dataclass(frozen=True)
class Bounds:
    """Closed interval; either side may be infinite."""

    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("invalid bounds: lower > upper")


@dataclass(frozen=True)
class ToleranceSpec:
    """Full parameterization of the shaped-reward primitive."""

    bounds: Bounds
    margin: float = 0.0
    value_at_margin: float = DEFAULT_VALUE_AT_MARGIN
    sigmoid_shape: str = "gaussian"

    def __post_init__(self):
        if self.margin < 0:
            raise ValueError("margin must be >= 0")
        if not (0.0 < self.value_at_margin < 1.0):
            raise ValueError("value_at_margin must lie in (0, 1)")
        if self.sigmoid_shape not in kernels.SIGMOID_IDS:
            raise ValueError(f"unknown sigmoid shape {self.sigmoid_shape!r}")

    @property
    def sigmoid_id(self) -> int:
        return kernels.SIGMOID_IDS[self.sigmoid_shape]


def tolerance(x: float, spec: ToleranceSpec) -> float:
    """Evaluate the tolerance at a scalar input.

    Returns exactly 1.0 for x within the bounds and decays monotonically
    with distance outside; equals spec.value_at_margin at distance
    spec.margin from the nearer bound.
    """
    if not math.isfinite(x):
        raise ValueError("non-finite input")
    return float(kernels.tolerance_scalar(
        x, spec.bounds.lower, spec.bounds.upper, spec.margin,
        spec.value_at_margin, spec.sigmoid_id))


def tolerance_many(x: np.ndarray, spec: ToleranceSpec) -> np.ndarray:
    """Vectorized tolerance over a 1-D array of inputs."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite input")
    return kernels.tolerance_array(
        x, spec.bounds.lower, spec.bounds.upper, spec.margin,
        spec.value_at_margin, spec.sigmoid_id)


def tol(x: float, bounds: tuple = (0.0, 0.0), margin: float = 0.0,
        value_at_margin: float = DEFAULT_VALUE_AT_MARGIN,
        sigmoid_shape: str = "gaussian") -> float:
    """Convenience form mirroring how task formulas are written."""
    return tolerance(x, ToleranceSpec(Bounds(bounds[0], bounds[1]), margin,
                                      value_at_margin, sigmoid_shape))
