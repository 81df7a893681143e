"""Seeded generators for codes and Brownian-like paths.

Every draw comes from a Philox-4x64-10 counter-based stream keyed by the
64-bit seed (numpy's ``Philox(key=seed)``), so outputs are a pure function of
``(arguments, seed)``.  Conventions, frozen:

* uniform variate from raw word ``w``: ``((w >> 11) + 0.5) * 2**-53``, which
  lies strictly inside (0, 1);
* normal variate: inverse normal CDF (``scipy.special.ndtri``) of that
  uniform, one word per variate, no rejection;
* code bits: raw words unpacked most-significant bit first;
* Schauder coefficients are drawn in the order xi_0, xi_1, then level
  j = 1, 2, ... with n ascending, so a lower-level draw is a prefix of a
  higher-level one;
* item ``i`` of a multi-path experiment uses seed ``(seed_base + i) mod 2**64``.
"""

from __future__ import annotations

import bz2
import lzma
import zlib
from typing import Callable, Iterable

import numpy as np
from scipy.special import ndtri

from .errors import InvalidLength, LevelOverflow, TooShort
from .path_model import (
    MAX_LEVEL,
    BinaryCode,
    PiecewiseLinearPath,
    SchauderCoeffs,
    _synthesize,
    dyadic_times,
)

GENERATOR = "philox4x64-10"
SEED_MASK = (1 << 64) - 1

CODECS: dict[str, Callable[[bytes], bytes]] = {
    "zlib": lambda b: zlib.compress(b, 9),
    "bz2": lambda b: bz2.compress(b, 9),
    "lzma": lambda b: lzma.compress(b, preset=9),
}


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {seed!r}")
    if not 0 <= seed <= SEED_MASK:
        raise ValueError(f"seed {seed} is not a 64-bit unsigned integer")
    return int(seed)


def split_seed(seed_base: int, index: int) -> int:
    return (check_seed(seed_base) + index) & SEED_MASK


def _raw(seed, count):
    return np.random.Philox(key=check_seed(seed)).random_raw(count)


def uniforms(seed: int, count: int) -> np.ndarray:
    return ((_raw(seed, count) >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normals(seed: int, count: int) -> np.ndarray:
    return ndtri(uniforms(seed, count))


def random_code(n: int, seed: int) -> BinaryCode:
    """Length-``n`` code with i.i.d. fair bits."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or not 1 <= n <= 1 << MAX_LEVEL:
        raise InvalidLength(f"code length must be in [1, 2^{MAX_LEVEL}], got {n!r}")
    words = _raw(seed, (int(n) + 63) // 64)
    bits = np.unpackbits(words.astype(">u8").view(np.uint8))[:n]
    return BinaryCode(bits)


def random_brownian(max_level: int, seed: int) -> SchauderCoeffs:
    """I.i.d. standard normal Schauder coefficients through ``max_level``."""
    if isinstance(max_level, bool) or not isinstance(max_level, (int, np.integer)) \
            or not 0 <= max_level <= MAX_LEVEL:
        raise LevelOverflow(f"max_level must be in [0, {MAX_LEVEL}], got {max_level!r}")
    z = normals(seed, 1 << (max_level + 1))
    levels = tuple(z[1 << j: 1 << (j + 1)] for j in range(1, max_level + 1))
    return SchauderCoeffs(z[0], z[1], levels)


def _check_path_level(level):
    if isinstance(level, bool) or not isinstance(level, (int, np.integer)) \
            or not 1 <= level <= MAX_LEVEL + 1:
        raise LevelOverflow(f"path level must be in [1, {MAX_LEVEL + 1}], got {level!r}")
    return int(level)


def brownian_path(level: int, seed: int) -> PiecewiseLinearPath:
    """Gaussian path with breakpoints ``k / 2**level``.

    This is the Schauder partial sum through coefficient level ``level - 1``;
    its heights at the breakpoints have exactly the Wiener law.
    """
    level = _check_path_level(level)
    coeffs = random_brownian(level - 1, seed)
    values = _synthesize(coeffs.xi0, coeffs.xi1, coeffs.levels)
    return PiecewiseLinearPath(dyadic_times(level), values, grid_level=level)


def brownian_grid_batch(level: int, seeds: Iterable[int]) -> np.ndarray:
    """Heights of :func:`brownian_path` for many seeds, one row per seed.

    Row ``i`` is bitwise equal to ``brownian_path(level, seeds[i]).values``.
    """
    level = _check_path_level(level)
    seeds = list(seeds)
    size = 1 << level
    z = np.empty((len(seeds), size))
    for i, s in enumerate(seeds):
        z[i] = normals(s, size)
    levels = [z[:, 1 << j: 1 << (j + 1)] for j in range(1, level)]
    return _synthesize(z[:, 0], z[:, 1], levels)


def complexity_proxy(code: BinaryCode, codec: str | Callable[[bytes], bytes] = "zlib") -> float:
    """Compressed size over raw size of the packed bits.

    A heuristic stand-in for incompressibility: values near or above 1 mean
    the codec found no structure.  It certifies nothing about Kolmogorov
    complexity.
    """
    if len(code) < 64:
        raise TooShort(f"complexity proxy needs >= 64 bits, got {len(code)}")
    compress = CODECS[codec] if isinstance(codec, str) else codec
    raw = np.packbits(code.bits).tobytes()
    return len(compress(raw)) / len(raw)
