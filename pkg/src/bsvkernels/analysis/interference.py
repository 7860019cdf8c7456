"""Fringe analysis for two crystals separated by an air gap."""

from __future__ import annotations

import numpy as np
from scipy.signal import find_peaks

from .intensity import IntensityProfile


def visibility(distances, values, period: float) -> float:
    """Fringe visibility ``(max - min) / (max + min)`` over one period.

    Uses the samples with ``distances[0] <= d <= distances[0] + period``.

    Raises:
        ValueError: if the samples cover less than one period.
    """
    d = np.asarray(distances, dtype=float)
    v = np.asarray(values, dtype=float)
    if d.shape != v.shape or d.ndim != 1:
        raise ValueError("distances and values must be 1-D arrays of equal length")
    if not period > 0:
        raise ValueError("period must be positive")
    order = np.argsort(d)
    d, v = d[order], v[order]
    if d[-1] - d[0] < period * (1 - 1e-9):
        raise ValueError(f"scan spans {d[-1] - d[0]:.4g}, less than one fringe period {period:.4g}")
    sel = d <= d[0] + period * (1 + 1e-9)
    hi, lo = v[sel].max(), v[sel].min()
    return float((hi - lo) / (hi + lo))


def fringe_period(air_mismatch: float) -> float:
    """Distance period of the collinear fringe, ``2 pi / |k_p - 2 k_s|`` in air."""
    if air_mismatch == 0:
        raise ValueError("no collinear fringe without air dispersion")
    return 2.0 * np.pi / abs(air_mismatch)


def fringe_frequency(profile: IntensityProfile, rel_height: float = 0.05) -> float:
    """Mean number of fringes per unit q near the centre of a profile.

    Local maxima above ``rel_height`` of the peak are located, and the
    frequency is the inverse of the median spacing between neighbours.
    Returns 0 if fewer than two maxima are found.
    """
    y = profile.values / np.max(profile.values)
    peaks, _ = find_peaks(y, height=rel_height)
    if peaks.size < 2:
        return 0.0
    spacing = np.diff(profile.q[peaks])
    return float(1.0 / np.median(spacing))
