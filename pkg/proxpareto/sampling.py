"""
Shrinking schedules and growth fits shared by the numeric estimators.

"""
import math
from typing import Sequence, Tuple

import numpy as np

__all__ = ["geometric_levels", "step_band", "loglog_fit", "is_blow_up"]

BLOW_UP_SLOPE = -0.2
BLOW_UP_R2 = 0.9


def geometric_levels(count: int = 6) -> Tuple[float, ...]:
    """t_j = 10**-j for j = 1..count."""
    return tuple(10.0 ** -j for j in range(1, count + 1))


def step_band(t: float, count: int = 4) -> np.ndarray:
    """Steps t * 10**(-k/4), k = 0..count-1, all inside (0, t]."""
    return t * 10.0 ** (-np.arange(count) / 4.0)


def loglog_fit(steps: Sequence[float], values: Sequence[float]) -> Tuple[float, float]:
    """
    Least-squares slope of log(value) against log(step) and its R^2.
    Nonpositive values are dropped; fewer than two points give (0, 0).

    """
    t = np.asarray(steps, dtype=float)
    q = np.asarray(values, dtype=float)
    keep = (q > 0) & np.isfinite(q) & (t > 0)
    if keep.sum() < 2:
        return 0.0, 0.0
    x, y = np.log(t[keep]), np.log(q[keep])
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    total = y - y.mean()
    ss_tot = float(total @ total)
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(residual @ residual) / ss_tot
    return float(slope), r2


def is_blow_up(steps: Sequence[float], values: Sequence[float]) -> bool:
    slope, r2 = loglog_fit(steps, values)
    return slope <= BLOW_UP_SLOPE and r2 >= BLOW_UP_R2 and not math.isclose(r2, 0.0)
