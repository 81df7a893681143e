"""Exact occupation measure of piecewise-linear paths.

On each affine piece the set of times at which the path lies in a band is a
single interval, so the measure is a sum of closed-form interval lengths.
Bands are closed; a flat piece counts entirely when its height is inside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidEpsilon, InvalidInterval, OutOfDomain
from .path_model import PiecewiseLinearPath


@dataclass(frozen=True)
class OccupationQuery:
    t: float
    x: float
    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise OutOfDomain(f"horizon t={self.t} outside [0, 1]")
        if not self.epsilon > 0.0:
            raise InvalidEpsilon(f"epsilon must be > 0, got {self.epsilon}")


def segment_band_measures(t0, t1, a, b, lo, hi):
    """Measure of ``{s in [t0, t1]: lo <= path(s) <= hi}`` for affine pieces.

    Array arguments broadcast, so a batch of grid paths can be handled at once.
    """
    mn = np.minimum(a, b)
    mx = np.maximum(a, b)
    rise = mx - mn
    overlap = np.maximum(np.minimum(mx, hi) - np.maximum(mn, lo), 0.0)
    flat = rise == 0.0
    frac = np.where(flat, (a >= lo) & (a <= hi), overlap / np.where(flat, 1.0, rise))
    return frac * (t1 - t0)


def band_measure_at(times, values, lo, hi, horizons):
    """Occupation of the band [lo, hi] up to each horizon in ``horizons``."""
    times = np.asarray(times)
    values = np.asarray(values)
    full = segment_band_measures(times[:-1], times[1:], values[:-1], values[1:], lo, hi)
    cum = np.concatenate(([0.0], np.cumsum(full)))
    h = np.atleast_1d(np.asarray(horizons, dtype=np.float64))
    idx = np.searchsorted(times, h, side="right") - 1
    idx = np.minimum(idx, times.size - 2)
    t0 = times[idx]
    a = values[idx]
    seg_dt = times[idx + 1] - t0
    b_at = a + (values[idx + 1] - a) * ((h - t0) / seg_dt)
    partial = segment_band_measures(t0, h, a, b_at, lo, hi)
    return cum[idx] + partial


def _check_t(t):
    if not 0.0 <= t <= 1.0:
        raise OutOfDomain(f"horizon t={t} outside [0, 1]")


def occupation_measure(path: PiecewiseLinearPath, t: float, a: float, b: float,
                       start: float = 0.0) -> float:
    """Lebesgue measure of ``{s in [start, t]: a <= path(s) <= b}``."""
    if a > b:
        raise InvalidInterval(f"need a <= b, got [{a}, {b}]")
    _check_t(t)
    _check_t(start)
    upto = band_measure_at(path.times, path.values, a, b, [start, t])
    return float(upto[1] - upto[0]) if start > 0.0 else float(upto[1])


def occupation_time(path: PiecewiseLinearPath, q: OccupationQuery) -> float:
    """Time spent in ``[x - eps, x + eps]`` before ``q.t``."""
    shifted = path.values - q.x
    return float(band_measure_at(path.times, shifted, -q.epsilon, q.epsilon, q.t)[0])


def occupation_density_estimate(path: PiecewiseLinearPath, t: float, x: float, n: int) -> float:
    """``(2 eps_n)^-1 * occupation_time`` with ``eps_n = 2**-n``."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    eps = math.ldexp(1.0, -n)
    return occupation_time(path, OccupationQuery(t, x, eps)) / (2.0 * eps)
