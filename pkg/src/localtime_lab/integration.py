"""Pathwise stochastic integrals on dyadic grids and the mollifier family.

Integrands are functions of the current height only, ``f(t, w) = phi(w(t))``.
The level-n integral freezes ``phi`` at the left grid point of each dyadic
interval; ``sign(0) = +1`` everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidEpsilon, OutOfDomain, TooFewSamples
from .path_model import MAX_LEVEL, PiecewiseLinearPath, check_level, evaluate, floor_index
from .sampler import brownian_grid_batch, split_seed

START_LEVEL = 4

KINDS = ("sign", "indplus", "indminus", "mollified", "const")


def sign(x):
    """Sign with ``sign(0) = +1``."""
    return np.where(np.asarray(x) >= 0.0, 1.0, -1.0)


@dataclass(frozen=True)
class IntegrandSpec:
    """The function ``phi`` in ``f(t, w) = phi(w(t))``.

    ``kind`` is one of ``sign``, ``indplus`` (indicator of [0, inf)),
    ``indminus`` (indicator of (-inf, 0]), ``mollified`` (f'_eps, needs
    ``param = eps``) or ``const`` (``param = c``).
    """

    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown integrand kind {self.kind!r}")
        if self.kind == "mollified" and not (self.param is not None and self.param > 0):
            raise InvalidEpsilon(f"mollified integrand needs epsilon > 0, got {self.param}")
        if self.kind == "const" and self.param is None:
            raise ValueError("const integrand needs a value")

    @classmethod
    def parse(cls, text: str) -> "IntegrandSpec":
        """Parse ``sign``, ``indplus``, ``indminus``, ``mollified:EPS`` or ``const:C``."""
        kind, _, arg = text.partition(":")
        if kind in ("mollified", "const"):
            if not arg:
                raise ValueError(f"{kind} needs a parameter, e.g. {kind}:0.1")
            return cls(kind, float(arg))
        if arg:
            raise ValueError(f"{kind} takes no parameter")
        return cls(kind)

    def __str__(self):
        return self.kind if self.param is None else f"{self.kind}:{self.param!r}"

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "sign":
            return sign(x)
        if self.kind == "indplus":
            return (x >= 0.0).astype(np.float64)
        if self.kind == "indminus":
            return (x <= 0.0).astype(np.float64)
        if self.kind == "mollified":
            return mollifier_eval("fprime", self.param, x)
        return np.full(x.shape, float(self.param))


SIGN = IntegrandSpec("sign")
IND_PLUS = IntegrandSpec("indplus")
IND_MINUS = IntegrandSpec("indminus")


def mollifier_eval(which: str, epsilon: float, x):
    """Closed forms of f_eps, f'_eps, f''_eps and h_eps.

    f_eps smooths ``max(x, 0)``: zero left of -eps, ``(x+eps)^2 / 4eps`` on
    (-eps, eps), identity beyond.  h_eps is its mirror image smoothing
    ``max(-x, 0)``.  ``f''_eps(+-eps)`` is taken to be 0.
    """
    if not epsilon > 0:
        raise InvalidEpsilon(f"epsilon must be > 0, got {epsilon}")
    xa = np.asarray(x, dtype=np.float64)
    inner = np.abs(xa) < epsilon
    if which == "f":
        out = np.where(xa <= -epsilon, 0.0, np.where(inner, (xa + epsilon) ** 2 / (4 * epsilon), xa))
    elif which == "fprime":
        out = np.where(xa <= -epsilon, 0.0, np.where(inner, (xa + epsilon) / (2 * epsilon), 1.0))
    elif which == "fsecond":
        out = np.where(inner, 1.0 / (2 * epsilon), 0.0)
    elif which == "h":
        out = np.where(xa <= -epsilon, -xa, np.where(inner, (epsilon - xa) ** 2 / (4 * epsilon), 0.0))
    else:
        raise ValueError(f"unknown mollifier component {which!r}")
    return float(out) if out.ndim == 0 else out


def simple_integrand(spec: IntegrandSpec, path: PiecewiseLinearPath, n: int) -> np.ndarray:
    """Values ``phi(w(k / 2**n))`` for ``k = 0..2**n - 1``."""
    n = check_level(n)
    return spec(path.grid_values(n)[:-1])


def riemann_sum(phi_left, increments, boundary_phi=0.0, boundary_increment=0.0):
    return float(np.dot(phi_left, increments) + boundary_phi * boundary_increment)


def riemann_integral(spec: IntegrandSpec, path: PiecewiseLinearPath, t: float, n: int) -> float:
    """Level-n pathwise integral of ``spec`` up to ``t``.

    ``sum_{k<=l} phi(w((k-1)/2^n)) (w(k/2^n) - w((k-1)/2^n))
    + phi(w(l/2^n)) (w(t) - w(l/2^n))`` with ``l = floor(2^n t)``.
    """
    n = check_level(n)
    if not 0.0 <= t <= 1.0:
        raise OutOfDomain(f"t={t} outside [0, 1]")
    ell = floor_index(t, n)
    g = path.grid_values(n)[: ell + 1]
    phi = spec(g)
    tail = evaluate(path, t) - g[-1]
    return riemann_sum(phi[:-1], np.diff(g), phi[-1], tail)


@dataclass(frozen=True)
class IntegralResult:
    value: float
    grid_level: int
    cauchy_gap: float
    converged: bool
    gaps: tuple = field(default=(), repr=False)


def pathwise_integral(spec: IntegrandSpec, path: PiecewiseLinearPath, t: float,
                      tol: float, max_level: int, start_level: int = START_LEVEL) -> IntegralResult:
    """Refine the dyadic grid until successive integrals differ by <= tol.

    Non-convergence by ``max_level`` is reported through ``converged``; it is
    never an error.  ``gaps[i]`` is ``|I_{start+i+1} - I_{start+i}|``.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    max_level = check_level(max_level, MAX_LEVEL, "max_level")
    start = min(start_level, max_level)
    prev = riemann_integral(spec, path, t, start)
    gaps = []
    for n in range(start + 1, max_level + 1):
        cur = riemann_integral(spec, path, t, n)
        gaps.append(abs(cur - prev))
        prev = cur
        if gaps[-1] <= tol:
            return IntegralResult(cur, n, gaps[-1], True, tuple(gaps))
    gap = gaps[-1] if gaps else math.inf
    return IntegralResult(prev, max_level, gap, False, tuple(gaps))


def mollifier_bound(n: int) -> float:
    """``eps_n / (3 sqrt(2 pi))`` with ``eps_n = 2**-n``."""
    return math.ldexp(1.0, -n) / (3.0 * math.sqrt(2.0 * math.pi))


def _gap_square_antiderivative(x, epsilon):
    """``int_{-inf}^x (f'_eps(u) - 1[u >= 0])^2 du`` in closed form."""
    x = np.clip(x, -epsilon, epsilon)
    e2 = 12.0 * epsilon * epsilon
    below = (x + epsilon) ** 3 / e2
    above = epsilon / 12.0 + (epsilon ** 3 - (epsilon - x) ** 3) / e2
    return np.where(x < 0.0, below, above)


def mollifier_gap_integrals(grid_values: np.ndarray, epsilon: float,
                            quadrature: str = "exact") -> np.ndarray:
    """``int_0^1 (f'_eps(w) - 1[w >= 0])^2 dt`` per row of grid heights.

    ``exact`` integrates along the piecewise-linear path, one segment at a
    time.  ``trapezoid`` samples the grid only; it overweights t = 0, where
    the integrand is 1/4 although the path leaves the band within ~eps^2.
    """
    w = np.asarray(grid_values, dtype=np.float64)
    h = 1.0 / (w.shape[-1] - 1)
    if quadrature == "trapezoid":
        sq = (mollifier_eval("fprime", epsilon, w) - (w >= 0.0)) ** 2
        return h * (sq.sum(axis=-1) - 0.5 * (sq[..., 0] + sq[..., -1]))
    if quadrature != "exact":
        raise ValueError(f"unknown quadrature {quadrature!r}")
    rows = w.reshape(-1, w.shape[-1])
    a, b = rows[:, :-1], rows[:, 1:]
    # only segments meeting (-eps, eps) contribute
    hit = np.nonzero((np.minimum(a, b) < epsilon) & (np.maximum(a, b) > -epsilon))
    a, b = a[hit], b[hit]
    rise = b - a
    flat = rise == 0.0
    sq_a = (mollifier_eval("fprime", epsilon, a) - (a >= 0.0)) ** 2
    span = _gap_square_antiderivative(b, epsilon) - _gap_square_antiderivative(a, epsilon)
    per_segment = np.where(flat, sq_a, span / np.where(flat, 1.0, rise))
    out = np.bincount(hit[0], weights=per_segment, minlength=rows.shape[0])
    return h * out.reshape(w.shape[:-1])


def mollifier_expectation_bound(n_range, paths: int, level: int, seed: int,
                                batch: int = 256, quadrature: str = "exact") -> list[dict]:
    """Monte Carlo check of the mean-square mollifier error against its bound.

    Path ``i`` is ``brownian_path(level, split_seed(seed, i))``.  Each row of
    the returned table has ``n, epsilon, estimate, stderr, bound, ok`` where
    ``ok`` means ``estimate <= bound + 3 * stderr``.
    """
    if paths < 1000:
        raise TooFewSamples(f"need at least 1000 paths, got {paths}")
    ns = list(n_range)
    sums = np.zeros(len(ns))
    sqs = np.zeros(len(ns))
    for lo in range(0, paths, batch):
        seeds = [split_seed(seed, i) for i in range(lo, min(lo + batch, paths))]
        w = brownian_grid_batch(level, seeds)
        for i, n in enumerate(ns):
            vals = mollifier_gap_integrals(w, math.ldexp(1.0, -n), quadrature)
            sums[i] += vals.sum()
            sqs[i] += (vals * vals).sum()
    rows = []
    for i, n in enumerate(ns):
        mean = float(sums[i] / paths)
        var = max(sqs[i] / paths - mean * mean, 0.0) * paths / (paths - 1)
        se = math.sqrt(var / paths)
        bound = mollifier_bound(n)
        rows.append({"n": n, "epsilon": math.ldexp(1.0, -n), "estimate": mean,
                     "stderr": se, "bound": bound, "ok": bool(mean <= bound + 3 * se)})
    return rows
