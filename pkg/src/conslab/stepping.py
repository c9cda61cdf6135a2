"""Fixed-step time marching that lands exactly on requested output times."""
from __future__ import annotations

import numpy as np


def record_times(times, t_final=None) -> np.ndarray:
    """Sorted, de-duplicated output times (``t_final`` appended when given)."""
    ts = [float(t) for t in np.atleast_1d(times if times is not None else [])]
    if t_final is not None:
        ts.append(float(t_final))
    ts = np.unique(np.asarray(ts, dtype=float))
    if ts.size and ts[0] < 0:
        raise ValueError("output times must be non-negative")
    return ts


def march(state, step, dt: float, times, on_record):
    """Advance ``state`` with ``step(state, dt)`` and call ``on_record(state, t)``.

    The nominal step ``dt`` is shortened only to hit each output time
    exactly, so runs with the same inputs take identical step sequences.
    """
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    t = 0.0
    for target in times:
        while target - t > 1e-14 * max(1.0, target):
            h = min(dt, target - t)
            state = step(state, h)
            t = target if h == target - t else t + h
        on_record(state, float(target))
    return state
