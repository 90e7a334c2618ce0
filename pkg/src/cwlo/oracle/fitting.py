"""Least-squares power laws on log-log axes."""

from __future__ import annotations

import numpy as np

__all__ = ["fit_power_law"]


def fit_power_law(samples):
    """(slope, intercept) of log|residual| against log n."""
    if len(samples) < 4:
        raise ValueError("need at least 4 samples")
    n = np.array([s[0] for s in samples], dtype=float)
    r = np.array([s[1] for s in samples], dtype=float)
    if np.any(r <= 0) or np.any(n <= 0):
        raise ValueError("residuals and n must be positive")
    slope, intercept = np.polyfit(np.log(n), np.log(r), 1)
    return float(slope), float(intercept)
