"""Small statistics helpers for Monte-Carlo checks and scaling fits."""

from __future__ import annotations

import math

import numpy as np

# Two-sided 99% normal quantile, used for Wilson score intervals.
Z_99 = 2.5758293035489004


def wilson_interval(successes: int, trials: int, z: float = Z_99) -> tuple[float, float]:
    """Wilson score confidence interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("need at least one trial")
    p = successes / trials
    denom = 1.0 + z**2 / trials
    center = (p + z**2 / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z**2 / (4 * trials**2))
    return max(0.0, center - half), min(1.0, center + half)


def wilson_lower(successes: int, trials: int, z: float = Z_99) -> float:
    return wilson_interval(successes, trials, z)[0]


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    if lx.size < 2:
        raise ValueError("need at least two points for a slope")
    return float(np.polyfit(lx, ly, 1)[0])
