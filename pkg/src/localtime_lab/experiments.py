"""Seeded experiments: estimator convergence, L(1) statistics, the mollifier
bound, and a fuzz of the discrete Tanaka identity.

Path ``i`` of an experiment uses seed ``split_seed(seed_base, i)``.  Work is
fanned out over seeds and reduced in seed order, so reports do not depend on
the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np
from scipy import integrate, special

from . import __version__
from .errors import ConfigError, TooFewSamples
from .integration import mollifier_expectation_bound
from .local_time import (
    discrete_tanaka_identity,
    local_time_occupation,
    local_time_sign_change,
    local_time_tanaka,
)
from .occupation import segment_band_measures
from .path_model import MAX_LEVEL
from .sampler import GENERATOR, brownian_grid_batch, brownian_path, split_seed, uniforms

KINDS = ("converge", "dist", "bound", "identity")
IDENTITY_TOL = 1e-10
NOT_APPLICABLE = "n/a"


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seeds: int = 50
    seed_base: int = 0
    levels: tuple = (10, 18)
    t: float = 1.0
    tol: float = 1e-12
    output_path: str = ""
    output_format: str = "json"
    n: int | None = None
    path_level: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError("kind", f"kind must be one of {KINDS}, got {self.kind!r}")
        if not isinstance(self.seeds, int) or self.seeds < 1:
            raise ConfigError("seeds", f"seeds must be >= 1, got {self.seeds!r}")
        if not 0 <= self.seed_base < 1 << 64:
            raise ConfigError("seed_base", "seed_base must be a 64-bit unsigned integer")
        lo, hi = self.levels
        if not 0 <= lo <= hi <= MAX_LEVEL:
            raise ConfigError("levels", f"levels must satisfy 0 <= lo <= hi <= {MAX_LEVEL}")
        if not 0.0 <= self.t <= 1.0:
            raise ConfigError("t", f"t must lie in [0, 1], got {self.t}")
        if not self.tol > 0:
            raise ConfigError("tol", "tol must be > 0")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("output_format", "format must be csv or json")
        if self.n is not None and not 0 <= self.n <= 60:
            raise ConfigError("n", "n must lie in [0, 60]")
        if self.path_level is not None and not 1 <= self.path_level <= MAX_LEVEL:
            raise ConfigError("path_level", f"path_level must lie in [1, {MAX_LEVEL}]")
        if self.workers < 1:
            raise ConfigError("workers", "workers must be >= 1")

    @property
    def level_range(self):
        return range(self.levels[0], self.levels[1] + 1)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["levels"] = list(self.levels)
        return d


_CONFIG_KEYS = {f.name: f for f in fields(ExperimentConfig)}
_ALIASES = {"seed": "seed_base", "output": "output_path", "format": "output_format",
            "path-level": "path_level", "seed-base": "seed_base"}


def parse_levels(text: str) -> tuple:
    lo, sep, hi = str(text).partition("..")
    try:
        return (int(lo), int(hi if sep else lo))
    except ValueError:
        raise ConfigError("levels", f"levels must look like 10..18, got {text!r}") from None


def _coerce(key, value):
    if key == "levels":
        return value if isinstance(value, tuple) else parse_levels(value)
    if key in ("kind", "output_path", "output_format"):
        return str(value)
    try:
        if key in ("seeds", "seed_base", "workers", "n", "path_level"):
            if value is None or value == "":
                return None
            return int(value)
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(key, f"bad value for {key}: {value!r}") from None


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}", f"{path}:{lineno}: expected key = value")
        out[key.strip()] = value.strip()
    return out


def build_config(kind: str, file_values: dict | None = None, **overrides) -> ExperimentConfig:
    """Merge file values and overrides (overrides win) into a config."""
    merged = {}
    for source in (file_values or {}, overrides):
        for key, value in source.items():
            if value is None:
                continue
            key = _ALIASES.get(key.replace("-", "_"), key.replace("-", "_"))
            key = _ALIASES.get(key, key)
            if key not in _CONFIG_KEYS:
                raise ConfigError(key, f"unknown config key {key!r}")
            merged[key] = _coerce(key, value)
    merged["kind"] = kind
    try:
        return ExperimentConfig(**merged)
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from None


def metadata(cfg: ExperimentConfig, **extra) -> dict:
    return {"seed_base": cfg.seed_base, "generator": GENERATOR,
            "seed_split": "seed_i = (seed_base + i) mod 2^64", **extra}


def _map(fn, items, workers):
    if workers == 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


# --- convergence -----------------------------------------------------------

def occupation_level_for(m: int) -> int:
    """Occupation window matched to a time grid 2**-m: eps_n^2 ~ 2**-m."""
    return (m + 1) // 2


def _converge_one(args):
    cfg, i = args
    path = brownian_path(_converge_path_level(cfg), split_seed(cfg.seed_base, i))
    rows = []
    for m in cfg.level_range:
        occ = local_time_occupation(path, cfg.t, cfg.n if cfg.n is not None else occupation_level_for(m))
        tan = local_time_tanaka(path, cfg.t, cfg.tol, m).value
        sc = local_time_sign_change(path, cfg.t, m)
        rows.append((occ, tan, sc, max(abs(occ - tan), abs(occ - sc), abs(tan - sc))))
    return rows


def _converge_path_level(cfg):
    return cfg.path_level if cfg.path_level is not None else min(cfg.levels[1] + 2, MAX_LEVEL)


def fit_log2_slope(ms, devs):
    """Least-squares slope of ``log2(devs)`` against ``ms``; None if degenerate."""
    ms = np.asarray(ms, dtype=np.float64)
    devs = np.asarray(devs, dtype=np.float64)
    if ms.size < 2 or np.any(devs <= 0):
        return None
    return float(np.polyfit(ms, np.log2(devs), 1)[0])


def run_convergence(cfg: ExperimentConfig) -> dict:
    """Per level m: mean estimators over seeds and the max pairwise deviation.

    Tanaka is refined up to grid level m (stopping early only if successive
    gaps fall below ``tol``), the sign-change sum uses level m, and the
    occupation window is ``eps = 2**-ceil(m/2)`` unless ``n`` is fixed.
    """
    if cfg.kind != "converge":
        raise ConfigError("kind", "run_convergence needs kind=converge")
    if cfg.levels[0] < 1:
        raise ConfigError("levels", "sign-change level must be >= 1")
    per_seed = np.array(_map(_converge_one, [(cfg, i) for i in range(cfg.seeds)], cfg.workers))
    # per_seed: (seeds, levels, 4)
    ms = list(cfg.level_range)
    rows = []
    for j, m in enumerate(ms):
        block = per_seed[:, j, :]
        rows.append({
            "m": m,
            "n": cfg.n if cfg.n is not None else occupation_level_for(m),
            "occupation": float(block[:, 0].mean()),
            "tanaka": float(block[:, 1].mean()),
            "signChange": float(block[:, 2].mean()),
            "maxPairwiseDev": float(block[:, 3].mean()),
            "medianMaxPairwiseDev": float(np.median(block[:, 3])),
        })
    slope = fit_log2_slope(ms, [r["maxPairwiseDev"] for r in rows])
    return {
        "kind": "converge",
        "rows": rows,
        "summary": {"fittedRateExponent": NOT_APPLICABLE if slope is None else slope,
                    "pathLevel": _converge_path_level(cfg)},
        "metadata": metadata(cfg),
    }


# --- distribution of L(1) ---------------------------------------------------

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def expected_occupation_estimate(n: int, path_level: int | None = None) -> float:
    """E of the occupation estimator at eps = 2**-n, t = 1, under Wiener measure.

    With ``path_level`` the path is the linear interpolation of Brownian motion
    on the grid ``k / 2**path_level``; its height at ``t_k + theta h`` is
    centred normal with variance ``t_k + theta**2 h``.  Computed by
    Gauss-Legendre quadrature in theta; independent of any simulation.
    """
    eps = math.ldexp(1.0, -n)

    def inside(var):
        return special.erf(eps / np.sqrt(2.0 * var))

    if path_level is None:
        val, _ = integrate.quad(lambda s: inside(s) if s > 0 else 1.0, 0.0, 1.0,
                                points=[eps * eps], limit=200, epsabs=1e-13)
        return val / (2.0 * eps)
    h = math.ldexp(1.0, -path_level)
    tk = np.arange(1 << path_level) * h
    nodes, weights = np.polynomial.legendre.leggauss(24)
    theta = 0.5 * (nodes + 1.0)
    var = tk[:, None] + theta[None, :] ** 2 * h
    total = h * (0.5 * weights[None, :] * inside(var)).sum()
    return float(total) / (2.0 * eps)


def _dist_batch(args):
    cfg, lo, hi, level, n = args
    w = brownian_grid_batch(level, [split_seed(cfg.seed_base, i) for i in range(lo, hi)])
    sg = np.where(w >= 0.0, 1.0, -1.0)
    sc = 2.0 * np.where(sg[:, 1:] != sg[:, :-1], np.abs(w[:, 1:]), 0.0).sum(axis=1)
    eps = math.ldexp(1.0, -n)
    h = math.ldexp(1.0, -level)
    occ = segment_band_measures(0.0, h, w[:, :-1], w[:, 1:], -eps, eps).sum(axis=1) / (2.0 * eps)
    return sc, occ


def _stats(x):
    mean = float(x.mean())
    var = float(x.var(ddof=1))
    return {"mean": mean, "variance": var, "stderr": math.sqrt(var / x.size),
            "deciles": [float(q) for q in np.quantile(x, np.linspace(0.1, 0.9, 9))]}


def run_distribution(cfg: ExperimentConfig, batch: int = 256) -> dict:
    """Mean, variance and deciles of L(1) from the sign-change and occupation
    estimators over ``seeds`` paths on the grid ``2**-levels[1]``.

    The sign-change sum is unbiased for every m (its mean is E|w(1)| =
    sqrt(2/pi)); the occupation mean is compared with its quadrature value.
    """
    if cfg.kind != "dist":
        raise ConfigError("kind", "run_distribution needs kind=dist")
    if cfg.seeds < 5000:
        raise TooFewSamples(f"dist needs >= 5000 seeds, got {cfg.seeds}")
    level = cfg.levels[1]
    if level < 1:
        raise ConfigError("levels", "path level must be >= 1")
    n = cfg.n if cfg.n is not None else occupation_level_for(level)
    jobs = [(cfg, lo, min(lo + batch, cfg.seeds), level, n) for lo in range(0, cfg.seeds, batch)]
    parts = _map(_dist_batch, jobs, cfg.workers)
    sc = np.concatenate([p[0] for p in parts])
    occ = np.concatenate([p[1] for p in parts])
    s_sc, s_occ = _stats(sc), _stats(occ)
    combined = math.hypot(s_sc["stderr"], s_occ["stderr"])
    diff = s_sc["mean"] - s_occ["mean"]
    occ_expected = expected_occupation_estimate(n, level)
    summary = {
        "meanDifference": diff,
        "combinedStderr": combined,
        "agree": bool(abs(diff) <= 3.0 * combined),
        "signChangeExpectedMean": SQRT_2_OVER_PI,
        "signChangeZ": (s_sc["mean"] - SQRT_2_OVER_PI) / s_sc["stderr"],
        "occupationExpectedMean": occ_expected,
        "occupationZ": (s_occ["mean"] - occ_expected) / s_occ["stderr"],
    }
    summary["sanityOk"] = bool(abs(summary["signChangeZ"]) <= 3 and abs(summary["occupationZ"]) <= 3)
    return {
        "kind": "dist",
        "rows": [{"estimator": "signChange", "level": level, **s_sc},
                 {"estimator": "occupation", "level": n, **s_occ}],
        "summary": summary,
        "metadata": metadata(cfg, pathLevel=level),
    }


# --- mollifier bound --------------------------------------------------------

def run_bound_check(cfg: ExperimentConfig) -> dict:
    """Mollifier mean-square bound for eps = 2**-n, n over ``levels``."""
    if cfg.kind != "bound":
        raise ConfigError("kind", "run_bound_check needs kind=bound")
    level = cfg.path_level if cfg.path_level is not None else 12
    rows = mollifier_expectation_bound(cfg.level_range, cfg.seeds, level, cfg.seed_base)
    return {
        "kind": "bound",
        "rows": rows,
        "summary": {"allOk": all(r["ok"] for r in rows), "pathLevel": level},
        "metadata": metadata(cfg, pathLevel=level),
    }


# --- identity fuzz ----------------------------------------------------------

ZERO_FRACTION = 0.1


def fuzz_sequence(seed: int) -> np.ndarray:
    """Random sequence: length in 2..64, entries uniform in [-1, 1], about
    10% of entries (the first included) forced to exactly 0."""
    u = uniforms(seed, 129)
    length = 2 + int(u[0] * 63)
    vals = 2.0 * u[1: 1 + length] - 1.0
    vals[u[65: 65 + length] < ZERO_FRACTION] = 0.0
    return vals


def run_identity_fuzz(cfg: ExperimentConfig) -> dict:
    if cfg.kind != "identity":
        raise ConfigError("kind", "run_identity_fuzz needs kind=identity")
    worst, worst_i, zeros, neg_starts = 0.0, -1, 0, 0
    for i in range(cfg.seeds):
        seq = fuzz_sequence(split_seed(cfg.seed_base, i))
        lhs, rhs = discrete_tanaka_identity(seq)
        dev = abs(lhs - rhs)
        zeros += int(np.any(seq == 0.0))
        neg_starts += int(seq[0] < 0.0)
        if dev > worst:
            worst, worst_i = dev, i
    summary = {"sequences": cfg.seeds, "maxDeviation": worst, "worstIndex": worst_i,
               "withZeros": zeros, "negativeStarts": neg_starts,
               "tolerance": IDENTITY_TOL, "ok": worst <= IDENTITY_TOL}
    if worst > IDENTITY_TOL:
        summary["offendingSequence"] = fuzz_sequence(split_seed(cfg.seed_base, worst_i)).tolist()
    return {"kind": "identity", "rows": [summary], "summary": summary, "metadata": metadata(cfg)}


RUNNERS = {"converge": run_convergence, "dist": run_distribution,
           "bound": run_bound_check, "identity": run_identity_fuzz}


def run(cfg: ExperimentConfig) -> dict:
    return RUNNERS[cfg.kind](cfg)


def contract_ok(report: dict) -> bool:
    """False when a numeric contract failed (CLI exit code 3)."""
    s = report["summary"]
    if report["kind"] == "identity":
        return s["ok"]
    if report["kind"] == "bound":
        return s["allOk"]
    if report["kind"] == "dist":
        return s["agree"]
    return True


# --- report emission --------------------------------------------------------

def format_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if x is None:
        return NOT_APPLICABLE
    return str(x)


def report_to_json(report: dict, cfg: ExperimentConfig) -> str:
    doc = {"version": __version__, "config": cfg.to_dict(), **report}
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0].keys()) if rows else []
    writer.writerow(header)
    for r in rows:
        writer.writerow([";".join(format_number(v) for v in r[h]) if isinstance(r[h], list)
                         else format_number(r[h]) for h in header])
    return buf.getvalue()


def render(report: dict, cfg: ExperimentConfig) -> str:
    if cfg.output_format == "json":
        return report_to_json(report, cfg)
    return rows_to_csv(report["rows"])


def write_report(report: dict, cfg: ExperimentConfig, path=None) -> str:
    text = render(report, cfg)
    target = path or cfg.output_path
    if target:
        Path(target).write_text(text)
    return text
