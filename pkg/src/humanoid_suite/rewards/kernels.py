"""Hot numeric kernels for the shaped-reward primitive.

The tolerance sigmoid and the control-effort mean are evaluated many times
per control step across every environment in a pool, so they are compiled
with numba when available. Set HUMANOID_SUITE_NUMBA=0 to force the pure
numpy/python fallback (the benchmark in ``humanoid_suite.bench`` compares
both paths).
"""

import math
import os

import numpy as np

# sigmoid shape ids shared by both paths and by the config layer
SIG_GAUSSIAN = 0
SIG_LINEAR = 1
SIG_QUADRATIC = 2

SIGMOID_IDS = {"gaussian": SIG_GAUSSIAN, "linear": SIG_LINEAR, "quadratic": SIG_QUADRATIC}


def _numba_enabled() -> bool:
    flag = os.environ.get("HUMANOID_SUITE_NUMBA", "1").strip().lower()
    return flag not in ("0", "off", "false", "no")


def tolerance_scalar_py(x: float, lower: float, upper: float, margin: float,
                        value_at_margin: float, sigmoid_id: int) -> float:
    """Shaped reward: 1.0 inside [lower, upper], sigmoid decay outside.

    The decay reaches value_at_margin at distance == margin from the nearer
    bound. margin == 0 degenerates to the interval indicator.
    """
    if lower <= x <= upper:
        return 1.0
    if margin == 0.0:
        return 0.0
    d = (lower - x) if x < lower else (x - upper)
    d = d / margin
    if sigmoid_id == SIG_GAUSSIAN:
        scale = math.sqrt(-2.0 * math.log(value_at_margin))
        z = d * scale  # kept as a product: huge z must overflow to inf, not raise
        return math.exp(-0.5 * z * z)
    if sigmoid_id == SIG_LINEAR:
        scaled = d * (1.0 - value_at_margin)
        return 1.0 - scaled if abs(scaled) < 1.0 else 0.0
    # quadratic
    scaled = d * math.sqrt(1.0 - value_at_margin)
    return 1.0 - scaled * scaled if abs(scaled) < 1.0 else 0.0


def tolerance_array_numpy(x: np.ndarray, lower: float, upper: float, margin: float,
                          value_at_margin: float, sigmoid_id: int) -> np.ndarray:
    """Vectorized tolerance over an array of inputs (numpy path)."""
    x = np.asarray(x, dtype=np.float64)
    in_bounds = (x >= lower) & (x <= upper)
    if margin == 0.0:
        return in_bounds.astype(np.float64)
    d = np.where(x < lower, lower - x, x - upper) / margin
    if sigmoid_id == SIG_GAUSSIAN:
        scale = math.sqrt(-2.0 * math.log(value_at_margin))
        z = d * scale
        out = np.exp(-0.5 * z * z)
    elif sigmoid_id == SIG_LINEAR:
        scaled = d * (1.0 - value_at_margin)
        out = np.where(np.abs(scaled) < 1.0, 1.0 - scaled, 0.0)
    else:
        scaled = d * math.sqrt(1.0 - value_at_margin)
        out = np.where(np.abs(scaled) < 1.0, 1.0 - scaled * scaled, 0.0)
    return np.where(in_bounds, 1.0, out)


def effort_mean_numpy(u: np.ndarray, margin: float, value_at_margin: float) -> float:
    """mean_i tol(u_i, (0, 0), margin) with the gaussian sigmoid."""
    vals = tolerance_array_numpy(u, 0.0, 0.0, margin, value_at_margin, SIG_GAUSSIAN)
    return float(np.mean(vals))


NUMBA_COMPILED = False

if _numba_enabled():
    try:
        from numba import njit

        tolerance_scalar = njit(cache=True)(tolerance_scalar_py)

        @njit(cache=True)
        def tolerance_array(x, lower, upper, margin, value_at_margin, sigmoid_id):
            out = np.empty(x.shape[0], dtype=np.float64)
            for i in range(x.shape[0]):
                out[i] = tolerance_scalar(x[i], lower, upper, margin, value_at_margin, sigmoid_id)
            return out

        @njit(cache=True)
        def effort_mean(u, margin, value_at_margin):
            acc = 0.0
            for i in range(u.shape[0]):
                acc += tolerance_scalar(u[i], 0.0, 0.0, margin, value_at_margin, SIG_GAUSSIAN)
            return acc / u.shape[0]

        NUMBA_COMPILED = True
    except ImportError:
        tolerance_scalar = tolerance_scalar_py
        tolerance_array = tolerance_array_numpy
        effort_mean = effort_mean_numpy
else:
    tolerance_scalar = tolerance_scalar_py
    tolerance_array = tolerance_array_numpy
    effort_mean = effort_mean_numpy


def warmup() -> None:
    """Trigger JIT compilation so timed code paths do not pay for it."""
    u = np.zeros(4, dtype=np.float64)
    tolerance_scalar(0.5, 0.0, 1.0, 0.3, 0.1, SIG_GAUSSIAN)
    tolerance_array(u, 0.0, 0.0, 1.0, 0.1, SIG_GAUSSIAN)
    effort_mean(u, 10.0, 0.1)
