"""Local time at a level: occupation density, Tanaka, and dyadic sign changes.

All three estimators read the path through its heights on dyadic grids
(plus, for Tanaka at non-dyadic ``t``, the height at ``t`` itself).  The
sign-change sum at level ``m`` and the level-``m`` Tanaka expression are the
same number at dyadic ``t``; see :func:`discrete_tanaka_identity`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfDomain, TooShort
from .integration import (
    IND_MINUS,
    IND_PLUS,
    SIGN,
    IntegralResult,
    pathwise_integral,
    riemann_integral,
    sign,
)
from .occupation import band_measure_at, occupation_density_estimate
from .path_model import MAX_LEVEL, PiecewiseLinearPath, check_level, dyadic_times, evaluate, floor_index

METHODS = ("occupation", "tanaka", "signchange")


@dataclass(frozen=True, eq=False)
class SignChangeSet:
    indices: np.ndarray
    ell: int
    m: int | None = None

    def __len__(self):
        return int(self.indices.size)

    def __iter__(self):
        return iter(self.indices.tolist())


def sign_change_set(samples, ell: int, m: int | None = None) -> SignChangeSet:
    """Indices ``1 <= k <= ell`` with ``sign(samples[k]) != sign(samples[k-1])``."""
    s = np.asarray(samples, dtype=np.float64)
    if not 0 <= ell <= s.size - 1:
        raise OutOfDomain(f"ell={ell} outside [0, {s.size - 1}]")
    sg = sign(s[: ell + 1])
    idx = np.flatnonzero(sg[1:] != sg[:-1]) + 1
    return SignChangeSet(idx, int(ell), m)


def _check_t(t):
    if not 0.0 <= t <= 1.0:
        raise OutOfDomain(f"t={t} outside [0, 1]")


def local_time_sign_change(path: PiecewiseLinearPath, t: float, m: int) -> float:
    """``2 * sum_{k in S_m} |w(k / 2**m)|`` over sign flips up to ``floor(t 2^m)``."""
    _check_t(t)
    m = check_level(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    g = path.grid_values(m)
    s = sign_change_set(g, floor_index(t, m), m)
    return 2.0 * float(np.abs(g[s.indices]).sum())


def tanaka_grid(path: PiecewiseLinearPath, t: float, m: int) -> float:
    """Level-m Tanaka expression ``|w(t)| - |w(0)| - I_m(sign, t)``."""
    _check_t(t)
    return abs(evaluate(path, t)) - abs(path.values[0]) - riemann_integral(SIGN, path, t, m)


@dataclass(frozen=True)
class TanakaResult:
    value: float
    integral: IntegralResult

    @property
    def converged(self) -> bool:
        return self.integral.converged

    @property
    def cauchy_gap(self) -> float:
        return self.integral.cauchy_gap

    @property
    def grid_level(self) -> int:
        return self.integral.grid_level

    def __float__(self):
        return self.value


def local_time_tanaka(path: PiecewiseLinearPath, t: float, tol: float, max_level: int) -> TanakaResult:
    """``|w(t)| - int_0^t sign(w) dw`` with the integral refined up to ``max_level``.

    For a level-shifted path ``|w(0)|`` is subtracted as well, so the value
    is the local time at the shifted level.  Finite-level values can dip
    slightly below zero; the integral's diagnostics are carried along.
    """
    _check_t(t)
    res = pathwise_integral(SIGN, path, t, tol, max_level)
    return TanakaResult(float(abs(evaluate(path, t)) - abs(path.values[0]) - res.value), res)


def local_time_occupation(path: PiecewiseLinearPath, t: float, n: int, x: float = 0.0) -> float:
    return occupation_density_estimate(path, t, x, n)


@dataclass(frozen=True)
class OneSided:
    plus: float
    minus: float
    plus_integral: IntegralResult
    minus_integral: IntegralResult


def one_sided_formulas(path: PiecewiseLinearPath, t: float, tol: float, max_level: int) -> OneSided:
    """``2[w+(t) - int 1[w >= 0] dw]`` and ``2[w-(t) + int 1[w <= 0] dw]``."""
    _check_t(t)
    w = evaluate(path, t)
    ip = pathwise_integral(IND_PLUS, path, t, tol, max_level)
    im = pathwise_integral(IND_MINUS, path, t, tol, max_level)
    return OneSided(2.0 * (max(w, 0.0) - ip.value), 2.0 * (max(-w, 0.0) + im.value), ip, im)


def discrete_tanaka_identity(seq) -> tuple[float, float]:
    """Both sides of the exact discrete Tanaka identity for ``t_0..t_N``.

    lhs = ``|t_N| - sum_k sign(t_{k-1}) (t_k - t_{k-1})``,
    rhs = ``|t_0| + 2 sum_{k in S} |t_k|`` with S the sign-flip indices and
    ``sign(0) = +1``.
    """
    vals = [float(v) for v in seq]
    if len(vals) < 2:
        raise TooShort("need at least two terms")
    prev = vals[0]
    sp = 1.0 if prev >= 0.0 else -1.0
    acc = 0.0
    flips = 0.0
    for v in vals[1:]:
        sv = 1.0 if v >= 0.0 else -1.0
        acc += sp * (v - prev)
        if sv != sp:
            flips += abs(v)
        prev, sp = v, sv
    return abs(vals[-1]) - acc, abs(vals[0]) + 2.0 * flips


@dataclass(frozen=True, eq=False)
class LocalTimeCurve:
    """Estimator values at ``t = k / 2**grid_level`` for ``k = 0..2**grid_level``."""

    grid_level: int
    values: np.ndarray
    method: str
    level: int
    x: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        v = np.array(self.values, dtype=np.float64)
        if v.shape != ((1 << self.grid_level) + 1,):
            raise ValueError("curve length does not match grid level")
        if v[0] != 0.0:
            raise ValueError("local time curve must start at 0")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def times(self) -> np.ndarray:
        return dyadic_times(self.grid_level)


def _tanaka_curve(path, hz, level):
    times, vals = path.times, path.values
    g = path.grid_values(level)
    phi = sign(g)
    cs = np.concatenate(([0.0], np.cumsum(phi[:-1] * np.diff(g))))
    ell = np.floor(np.ldexp(hz, level)).astype(np.int64)
    w = np.interp(hz, times, vals)
    integral = cs[ell] + phi[ell] * (w - g[ell])
    return np.abs(w) - abs(vals[0]) - integral


def local_time_curve(path: PiecewiseLinearPath, method: str, level: int,
                     grid_level: int, x: float = 0.0) -> LocalTimeCurve:
    """Evaluate one estimator at every ``k / 2**grid_level``.

    ``level`` is ``n`` for ``occupation`` (eps = 2**-n) and the dyadic grid
    level for ``tanaka`` and ``signchange``.  Level ``x`` is handled by
    shifting the path by ``-x``.
    """
    grid_level = check_level(grid_level, MAX_LEVEL, "grid_level")
    hz = dyadic_times(grid_level)
    shifted = path.shifted(x)
    if method == "occupation":
        eps = math.ldexp(1.0, -level)
        vals = band_measure_at(shifted.times, shifted.values, -eps, eps, hz) / (2.0 * eps)
    elif method == "signchange":
        level = check_level(level)
        g = shifted.grid_values(level)
        sg = sign(g)
        contrib = np.where(sg[1:] != sg[:-1], 2.0 * np.abs(g[1:]), 0.0)
        cum = np.concatenate(([0.0], np.cumsum(contrib)))
        ell = (np.arange(hz.size, dtype=np.int64) << level) >> grid_level
        vals = cum[ell]
    elif method == "tanaka":
        level = check_level(level)
        vals = _tanaka_curve(shifted, hz, level)
    else:
        raise ValueError(f"unknown method {method!r}")
    return LocalTimeCurve(grid_level, vals, method, int(level), float(x))


def cross_validate(path: PiecewiseLinearPath, t: float, m: int, n: int, tol: float) -> dict:
    """Occupation (eps = 2**-n), Tanaka (grid up to m) and sign-change (level m) at ``t``.

    Agreement is only expected for Brownian-like paths; a smooth path has
    zero Tanaka and sign-change local time but a positive occupation density
    wherever it starts on the level.
    """
    occ = local_time_occupation(path, t, n)
    tan = local_time_tanaka(path, t, tol, m)
    sc = local_time_sign_change(path, t, m)
    return {
        "t": t,
        "occupation": occ,
        "tanaka": tan.value,
        "signChange": sc,
        "pairwiseAbsDeviations": {
            "occupation_tanaka": abs(occ - tan.value),
            "occupation_signChange": abs(occ - sc),
            "tanaka_signChange": abs(tan.value - sc),
        },
        "gridLevels": {"occupation": n, "tanaka": tan.grid_level, "signChange": m},
        "convergenceFlags": {"tanaka": tan.converged},
        "tanakaCauchyGap": tan.cauchy_gap,
    }
