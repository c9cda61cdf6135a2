"""Distances between grid functions and empirical convergence orders."""
from __future__ import annotations

import numpy as np

from .errors import DegenerateFit
from .grid import l1_distance, sup_distance

__all__ = ["l1_distance", "sup_distance", "estimate_order"]


def estimate_order(pairs) -> float:
    """Least-squares slope of ``log err`` against ``log h``.

    >>> round(estimate_order([(0.1, 0.3), (0.05, 0.15), (0.025, 0.075)]), 12)
    1.0
    """
    pairs = list(pairs)
    if len(pairs) < 3:
        raise DegenerateFit("need at least three (h, err) pairs")
    h = np.array([p[0] for p in pairs], dtype=float)
    err = np.array([p[1] for p in pairs], dtype=float)
    if np.any(h <= 0) or np.any(err <= 0) or not np.all(np.isfinite(err)):
        raise DegenerateFit("spacings and errors must be positive and finite")
    if np.ptp(np.log(h)) == 0:
        raise DegenerateFit("all spacings are equal")
    slope, _ = np.polyfit(np.log(h), np.log(err), 1)
    return float(slope)
