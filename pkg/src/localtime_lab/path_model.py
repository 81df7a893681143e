"""Piecewise-linear paths, binary codes and the Schauder system.

Grid times are anchored by exact ``(numerator, level)`` pairs; path heights
are ordinary doubles.  A path whose breakpoints are exactly ``k / 2**L`` for
``k = 0..2**L`` remembers ``L`` as its ``grid_level`` so that lookups on any
coarser dyadic grid are pure index arithmetic.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    IncompleteSamples,
    InvalidCode,
    InvalidIndex,
    InvalidPath,
    LevelOverflow,
    NotInClass,
    OutOfDomain,
)

MAX_LEVEL = 26


def _readonly(a, dtype=np.float64):
    a = np.array(a, dtype=dtype)
    a.flags.writeable = False
    return a


def check_level(level, cap=MAX_LEVEL, name="level"):
    if not isinstance(level, (int, np.integer)) or isinstance(level, bool):
        raise LevelOverflow(f"{name} must be an integer, got {level!r}")
    if level < 0 or level > cap:
        raise LevelOverflow(f"{name}={level} outside [0, {cap}]")
    return int(level)


@functools.total_ordering
@dataclass(frozen=True, eq=False)
class DyadicRational:
    """The number ``numerator / 2**level`` in [0, 1], compared exactly."""

    numerator: int
    level: int

    def __post_init__(self):
        if self.level < 0 or self.numerator < 0:
            raise ValueError("numerator and level must be nonnegative")
        if self.numerator > (1 << self.level):
            raise ValueError(f"{self.numerator}/2^{self.level} exceeds 1")

    @classmethod
    def floor(cls, t: float, level: int) -> "DyadicRational":
        """Largest ``k / 2**level`` not exceeding ``t``."""
        return cls(floor_index(t, level), level)

    def reduced(self) -> "DyadicRational":
        k, m = self.numerator, self.level
        while m > 0 and k % 2 == 0:
            k //= 2
            m -= 1
        return DyadicRational(k, m)

    def __eq__(self, other):
        if not isinstance(other, DyadicRational):
            return NotImplemented
        return (self.numerator << other.level) == (other.numerator << self.level)

    def __lt__(self, other):
        if not isinstance(other, DyadicRational):
            return NotImplemented
        return (self.numerator << other.level) < (other.numerator << self.level)

    def __hash__(self):
        r = self.reduced()
        return hash((r.numerator, r.level))

    def __float__(self):
        return math.ldexp(self.numerator, -self.level)

    def __repr__(self):
        return f"DyadicRational({self.numerator}/2^{self.level})"


def floor_index(t: float, level: int) -> int:
    """``floor(t * 2**level)``; exact because scaling by 2**level is exact."""
    return math.floor(math.ldexp(float(t), level))


def dyadic_times(level: int) -> np.ndarray:
    return np.arange((1 << level) + 1, dtype=np.float64) / float(1 << level)


@dataclass(frozen=True, eq=False)
class BinaryCode:
    """Finite word over {0, 1}, the code of a path in the class C_n."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.ndim != 1 or b.size == 0:
            raise InvalidCode("a code must be a nonempty 1-d bit sequence")
        if not np.all((b == 0) | (b == 1)):
            raise InvalidCode("code entries must be 0 or 1")
        object.__setattr__(self, "bits", _readonly(b, dtype=np.uint8))

    @classmethod
    def from_string(cls, s: str) -> "BinaryCode":
        s = s.strip()
        if not s:
            raise InvalidCode("empty code")
        if set(s) - {"0", "1"}:
            raise InvalidCode(f"code contains characters other than 0/1: {s[:20]!r}")
        return cls(np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0"))

    def __len__(self):
        return int(self.bits.size)

    def __str__(self):
        return (self.bits + ord("0")).astype(np.uint8).tobytes().decode("ascii")

    def __eq__(self, other):
        if isinstance(other, str):
            other = BinaryCode.from_string(other)
        if not isinstance(other, BinaryCode):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    def __repr__(self):
        s = str(self)
        return f"BinaryCode({s if len(s) <= 40 else s[:37] + '...'!r}, n={len(self)})"


Time = Union[float, DyadicRational]


@dataclass(frozen=True, eq=False)
class PiecewiseLinearPath:
    """Continuous path given by its breakpoints and heights.

    ``anchored=False`` lifts the ``values[0] == 0`` requirement; it is only
    used for level-shifted copies (see :meth:`shifted`).
    """

    times: np.ndarray
    values: np.ndarray
    anchored: bool = True
    grid_level: int | None = field(default=None, compare=False)

    def __post_init__(self):
        t = np.array([float(x) for x in self.times] if _has_dyadics(self.times)
                     else self.times, dtype=np.float64)
        v = np.array(self.values, dtype=np.float64)
        if t.ndim != 1 or v.ndim != 1 or t.size != v.size or t.size < 2:
            raise InvalidPath("times and values must be 1-d of equal length >= 2")
        if t[0] != 0.0 or t[-1] != 1.0:
            raise InvalidPath("breakpoints must start at 0 and end at 1")
        if not np.all(np.diff(t) > 0):
            raise InvalidPath("breakpoints must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise InvalidPath("path values must be finite")
        if self.anchored and v[0] != 0.0:
            raise InvalidPath("path must vanish at the origin")
        level = self.grid_level
        if level is None:
            level = _detect_grid_level(t)
        elif not np.array_equal(t, dyadic_times(level)):
            raise InvalidPath(f"breakpoints are not the level-{level} dyadic grid")
        object.__setattr__(self, "times", _readonly(t))
        object.__setattr__(self, "values", _readonly(v))
        object.__setattr__(self, "grid_level", level)

    @classmethod
    def on_dyadic_grid(cls, values, anchored=True) -> "PiecewiseLinearPath":
        """Path with breakpoints ``k / 2**L`` where ``len(values) == 2**L + 1``."""
        v = np.asarray(values, dtype=np.float64)
        level = int(v.size - 1).bit_length() - 1
        if v.size < 2 or (1 << level) + 1 != v.size:
            raise InvalidPath(f"{v.size} values do not fill a dyadic grid")
        return cls(dyadic_times(level), v, anchored=anchored, grid_level=level)

    @property
    def segments(self) -> int:
        return int(self.times.size - 1)

    def breakpoint(self, i: int) -> Time:
        if self.grid_level is not None:
            return DyadicRational(int(i), self.grid_level)
        return float(self.times[i])

    def __call__(self, t):
        return evaluate(self, t)

    def grid_values(self, level: int) -> np.ndarray:
        """Heights at ``k / 2**level``, ``k = 0..2**level``."""
        level = check_level(level)
        if self.grid_level is not None and self.grid_level >= level:
            return self.values[:: 1 << (self.grid_level - level)]
        return np.interp(dyadic_times(level), self.times, self.values)

    def shifted(self, x: float) -> "PiecewiseLinearPath":
        """The path ``s -> omega(s) - x`` (not anchored at 0 unless x == 0)."""
        return PiecewiseLinearPath(self.times, self.values - x,
                                   anchored=False, grid_level=self.grid_level)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


def _has_dyadics(times):
    return isinstance(times, (list, tuple)) and any(
        isinstance(x, DyadicRational) for x in times)


def _detect_grid_level(t):
    n = t.size - 1
    if n & (n - 1):
        return None
    level = n.bit_length() - 1
    if level <= 52 and np.array_equal(t, dyadic_times(level)):
        return level
    return None


def evaluate(path: PiecewiseLinearPath, t):
    """Linear interpolation of ``path`` at ``t`` (scalar or array in [0, 1])."""
    ta = np.asarray(t, dtype=np.float64)
    if np.any(~(ta >= 0.0)) or np.any(ta > 1.0):
        raise OutOfDomain(f"t must lie in [0, 1], got {t!r}")
    out = np.interp(ta, path.times, path.values)
    return float(out) if out.ndim == 0 else out


def decode_code(code: BinaryCode | str) -> PiecewiseLinearPath:
    """The path psi(a) in C_n: slope +n^-1/2 on I_j if a_j = 1, else -n^-1/2.

    Heights are the running count of up-steps minus down-steps times the
    per-interval increment n^-3/2, so every breakpoint is one rounding away
    from its exact value.
    """
    if isinstance(code, str):
        code = BinaryCode.from_string(code)
    n = len(code)
    steps = np.where(code.bits == 1, 1, -1).astype(np.int64)
    heights = np.concatenate(([0], np.cumsum(steps))) * (1.0 / (n * math.sqrt(n)))
    times = np.arange(n + 1, dtype=np.float64) / n
    return PiecewiseLinearPath(times, heights)


def encode_path(path: PiecewiseLinearPath, n: int) -> BinaryCode:
    """Inverse of :func:`decode_code`; exact, no tolerance."""
    if n < 1:
        raise NotInClass("n must be >= 1")
    grid = np.arange(n + 1, dtype=np.float64) / n
    if path.times.size != n + 1 or not np.array_equal(path.times, grid):
        raise NotInClass(f"breakpoints are not j/{n}")
    bits = (np.diff(path.values) > 0).astype(np.uint8)
    code = BinaryCode(bits)
    if not np.array_equal(decode_code(code).values, path.values):
        raise NotInClass(f"slopes are not exactly +-{n}^(-1/2)")
    return code


# --- Schauder system -------------------------------------------------------

SchauderIndex = Union[int, tuple]


def _check_index(h):
    if isinstance(h, (int, np.integer)) and not isinstance(h, bool):
        if h in (0, 1):
            return None
        raise InvalidIndex(f"scalar Schauder index must be 0 or 1, got {h}")
    try:
        j, n = h
    except (TypeError, ValueError):
        raise InvalidIndex(f"bad Schauder index {h!r}") from None
    if j < 1 or not 0 <= n < (1 << j):
        raise InvalidIndex(f"need j >= 1 and 0 <= n < 2^j, got {(j, n)}")
    return int(j), int(n)


def schauder_basis(h: SchauderIndex, t):
    """Schauder function Delta_h(t), the integral of the Haar function e_h."""
    jn = _check_index(h)
    ta = np.asarray(t, dtype=np.float64)
    if np.any(~(ta >= 0.0)) or np.any(ta > 1.0):
        raise OutOfDomain(f"t must lie in [0, 1], got {t!r}")
    if jn is None and h == 0:
        out = ta.copy()
    else:
        j, n = (0, 0) if jn is None else jn
        half = math.ldexp(1.0, -(j + 1))
        peak = (2 * n + 1) * half
        out = 2.0 ** (j / 2) * np.maximum(0.0, half - np.abs(ta - peak))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class SchauderCoeffs:
    """Coefficients xi_0, xi_1 and xi_{jn} for 1 <= j <= max_level.

    ``levels[j - 1]`` holds the ``2**j`` coefficients of level ``j``.
    """

    xi0: float
    xi1: float
    levels: tuple = ()

    def __post_init__(self):
        levels = tuple(_readonly(a) for a in self.levels)
        for j, a in enumerate(levels, start=1):
            if a.shape != (1 << j,):
                raise IncompleteSamples(f"level {j} has shape {a.shape}, need ({1 << j},)")
        check_level(len(levels), name="max_level")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "xi0", float(self.xi0))
        object.__setattr__(self, "xi1", float(self.xi1))

    @property
    def max_level(self) -> int:
        return len(self.levels)

    def __getitem__(self, h):
        jn = _check_index(h)
        if jn is None:
            return self.xi0 if h == 0 else self.xi1
        j, n = jn
        if j > self.max_level:
            raise InvalidIndex(f"level {j} exceeds max_level {self.max_level}")
        return float(self.levels[j - 1][n])

    def truncated(self, m: int) -> "SchauderCoeffs":
        if m > self.max_level:
            raise LevelOverflow(f"m={m} exceeds max_level {self.max_level}")
        return SchauderCoeffs(self.xi0, self.xi1, self.levels[:m])


def schauder_coefficients(samples, m: int) -> SchauderCoeffs:
    """Coefficients up to level ``m`` from samples at ``k / 2**(m+1)``."""
    m = check_level(m)
    s = np.asarray(samples, dtype=np.float64)
    need = (1 << (m + 1)) + 1
    if s.ndim != 1 or s.size != need:
        raise IncompleteSamples(f"need {need} samples on the level-{m + 1} grid, got {s.size}")
    if s[0] != 0.0:
        raise IncompleteSamples("sample at t=0 must be 0")
    top = s[-1]
    xi1 = 2.0 * s[s.size // 2] - top
    levels = []
    for j in range(1, m + 1):
        sub = s[:: 1 << (m - j)]
        levels.append(2.0 ** (j / 2) * (2.0 * sub[1::2] - sub[0:-1:2] - sub[2::2]))
    return SchauderCoeffs(top, xi1, tuple(levels))


def _synthesize(xi0, xi1, levels):
    """Heights of omega_m on the level-(m+1) grid; leading axes broadcast."""
    xi0 = np.asarray(xi0, dtype=np.float64)
    xi1 = np.asarray(xi1, dtype=np.float64)
    cur = np.stack([np.zeros_like(xi0), 0.5 * (xi0 + xi1), xi0], axis=-1)
    for j, xi in enumerate(levels, start=1):
        new = np.empty(cur.shape[:-1] + (2 * cur.shape[-1] - 1,))
        new[..., ::2] = cur
        new[..., 1::2] = 0.5 * (cur[..., :-1] + cur[..., 1:]) + xi * 2.0 ** (-j / 2 - 1)
        cur = new
    return cur


def schauder_partial_sum(coeffs: SchauderCoeffs, m: int) -> PiecewiseLinearPath:
    """omega_m, with breakpoints ``k / 2**(m+1)``."""
    m = check_level(m)
    if m > coeffs.max_level:
        raise LevelOverflow(f"m={m} exceeds max_level {coeffs.max_level}")
    values = _synthesize(coeffs.xi0, coeffs.xi1, coeffs.levels[:m])
    return PiecewiseLinearPath(dyadic_times(m + 1), values, grid_level=m + 1)


def approximation_gaps(path: PiecewiseLinearPath, levels) -> dict:
    """Sup-norm gaps ``||w - w_m||`` for ``m`` in ``levels`` and the smallest
    ``C`` with ``gap_m <= C sqrt(m) 2**(-m/2)`` over the levels with ``m >= 1``.

    ``path`` must sit on a dyadic grid of level ``L`` and every ``m < L``.
    The difference is linear between level-L points, so the max over that
    grid is the sup.
    """
    top = path.grid_level
    if top is None or top < 1:
        raise InvalidPath("path must lie on a dyadic grid of level >= 1")
    ms = [check_level(m) for m in levels]
    if any(m >= top for m in ms):
        raise LevelOverflow(f"levels must be < the path's grid level {top}")
    coeffs = schauder_coefficients(path.values, top - 1)
    fine = dyadic_times(top)
    gaps = []
    for m in ms:
        approx = schauder_partial_sum(coeffs, m)
        gaps.append(float(np.max(np.abs(path.values - np.interp(fine, approx.times, approx.values)))))
    scaled = [g * 2.0 ** (m / 2) / math.sqrt(m) for m, g in zip(ms, gaps) if m >= 1]
    return {"levels": ms, "gaps": gaps, "fittedC": max(scaled) if scaled else None}
