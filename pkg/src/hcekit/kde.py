"""Gaussian kernel density estimation and box statistics for violin/box
glyphs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import AnalysisError


def silverman_bandwidth(values: np.ndarray) -> float:
    """Silverman's rule of thumb: 0.9 * min(sd, IQR / 1.34) * n^(-1/5)."""
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n < 2:
        raise AnalysisError("bandwidth needs at least 2 values")
    sd = float(np.std(x, ddof=1))
    q1, q3 = np.percentile(x, [25.0, 75.0])
    iqr = float(q3 - q1)
    spread = min(sd, iqr / 1.34) if iqr > 0.0 else sd
    bw = 0.9 * spread * n ** (-0.2)
    if bw <= 0.0:
        raise AnalysisError("zero bandwidth: values are constant")
    return bw


def gaussian_kde(
    values: np.ndarray, n_points: int = 256, cut: float = 3.0
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate a Gaussian KDE with Silverman bandwidth on a regular grid
    spanning the data extended by ``cut`` bandwidths on both sides."""
    x = np.asarray(values, dtype=float)
    if len(x) < 5:
        raise AnalysisError(
            "need at least 5 values for a density estimate; "
            "plot the raw points instead"
        )
    if not np.all(np.isfinite(x)):
        raise AnalysisError("values must be finite")
    bw = silverman_bandwidth(x)
    grid = np.linspace(x.min() - cut * bw, x.max() + cut * bw, n_points)
    z = (grid[:, None] - x[None, :]) / bw
    density = np.exp(-0.5 * z**2).sum(axis=1) / (len(x) * bw * math.sqrt(2 * math.pi))
    return grid, density


@dataclass(frozen=True, slots=True)
class BoxStats:
    median: float
    q1: float
    q3: float
    whisker_lo: float
    whisker_hi: float


def box_stats(values: np.ndarray) -> BoxStats:
    """Median, quartiles, and whiskers at the most extreme observations
    within 1.5 IQR of the box."""
    x = np.asarray(values, dtype=float)
    if len(x) == 0:
        raise AnalysisError("box statistics need at least 1 value")
    q1, med, q3 = (float(v) for v in np.percentile(x, [25.0, 50.0, 75.0]))
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = x[(x >= lo_fence) & (x <= hi_fence)]
    if len(inside) == 0:
        inside = x
    return BoxStats(med, q1, q3, float(inside.min()), float(inside.max()))
