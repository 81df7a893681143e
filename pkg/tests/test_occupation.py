import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from localtime_lab.errors import InvalidEpsilon, InvalidInterval, OutOfDomain
from localtime_lab.occupation import (
    OccupationQuery,
    band_measure_at,
    occupation_density_estimate,
    occupation_measure,
    occupation_time,
)
from localtime_lab.path_model import PiecewiseLinearPath, decode_code
from localtime_lab.sampler import brownian_path

IDENTITY = PiecewiseLinearPath([0.0, 1.0], [0.0, 1.0])
TENT = decode_code("10")


def brute_force(path, t, lo, hi, level=18):
    s = (np.arange(2**level) + 0.5) / 2**level
    s = s[s <= t]
    w = np.interp(s, path.times, path.values)
    return np.count_nonzero((w >= lo) & (w <= hi)) / 2**level


def random_path(rng, segments):
    times = np.sort(rng.uniform(0, 1, segments - 1))
    times = np.concatenate(([0.0], times, [1.0]))
    values = np.concatenate(([0.0], rng.normal(0, 0.5, segments)))
    return PiecewiseLinearPath(times, values)


@st.composite
def paths(draw):
    seed = draw(st.integers(0, 2**32))
    return random_path(np.random.default_rng(seed), draw(st.integers(1, 40)))


def test_query_validation():
    with pytest.raises(OutOfDomain):
        OccupationQuery(1.5, 0.0, 0.1)
    with pytest.raises(InvalidEpsilon):
        OccupationQuery(1.0, 0.0, 0.0)


def test_occupation_time_examples():
    assert occupation_time(IDENTITY, OccupationQuery(1.0, 0.0, 0.1)) == pytest.approx(0.1, abs=1e-15)
    assert occupation_time(TENT, OccupationQuery(1.0, 0.0, 0.1)) == pytest.approx(0.2 * math.sqrt(2), abs=1e-12)
    assert occupation_time(TENT, OccupationQuery(1.0, 5.0, 0.1)) == 0.0


def test_occupation_measure_examples():
    p = brownian_path(6, 3)
    assert occupation_measure(p, 0.75, -1e9, 1e9) == pytest.approx(0.75, abs=1e-15)
    assert occupation_measure(IDENTITY, 1.0, 0.2, 0.5) == pytest.approx(0.3, abs=1e-15)
    assert occupation_measure(TENT, 1.0, 0.0, 2**-1.5) == pytest.approx(1.0, abs=1e-15)


def test_occupation_measure_bad_interval():
    with pytest.raises(InvalidInterval):
        occupation_measure(IDENTITY, 1.0, 0.5, 0.2)


def test_density_examples():
    assert occupation_density_estimate(IDENTITY, 1.0, 0.5, 4) == pytest.approx(1.0, abs=1e-12)
    assert occupation_density_estimate(IDENTITY, 1.0, 0.0, 4) == pytest.approx(0.5, abs=1e-12)
    assert occupation_density_estimate(IDENTITY, 1.0, 2.0, 4) == 0.0
    assert occupation_density_estimate(IDENTITY, 1.0, -1.0, 4) == 0.0


def test_horizon_inside_a_segment():
    # band [0, 0.1] is left at s = 0.1 on the identity path
    assert occupation_time(IDENTITY, OccupationQuery(0.05, 0.0, 0.1)) == pytest.approx(0.05, abs=1e-15)
    assert occupation_time(TENT, OccupationQuery(0.75, 0.0, 0.1)) == pytest.approx(0.1 * math.sqrt(2), abs=1e-12)


def test_flat_segments_count_when_inside_closed_band():
    p = PiecewiseLinearPath([0.0, 0.25, 0.75, 1.0], [0.0, 0.5, 0.5, 0.0])
    # flat piece sits on the band edge: counted
    assert occupation_measure(p, 1.0, 0.5, 0.6) == pytest.approx(0.5, abs=1e-15)
    assert occupation_measure(p, 1.0, 0.51, 0.6) == 0.0


@settings(max_examples=60, deadline=None)
@given(paths(), st.floats(0, 1), st.floats(-1, 1), st.floats(1e-3, 0.5))
def test_matches_brute_force(path, t, x, eps):
    exact = occupation_time(path, OccupationQuery(t, x, eps))
    oracle = brute_force(path, t, x - eps, x + eps)
    assert abs(exact - oracle) <= 2 * 2**-18 * (path.segments + 2)


@settings(max_examples=60, deadline=None)
@given(paths(), st.floats(0, 1), st.floats(0, 1), st.floats(-1, 1), st.floats(1e-3, 0.5))
def test_monotone_in_time_and_window(path, t1, t2, x, eps):
    lo, hi = sorted((t1, t2))
    a = occupation_time(path, OccupationQuery(lo, x, eps))
    b = occupation_time(path, OccupationQuery(hi, x, eps))
    c = occupation_time(path, OccupationQuery(hi, x, 2 * eps))
    assert a <= b + 1e-15
    assert b <= c + 1e-15


@settings(max_examples=40, deadline=None)
@given(paths(), st.floats(1e-3, 0.5))
def test_band_moving_away_loses_mass(path, eps):
    top = path.values.max()
    levels = top + np.array([0.0, 0.1, 0.5, 1.0])
    occ = [occupation_time(path, OccupationQuery(1.0, x, eps)) for x in levels]
    assert all(a >= b for a, b in zip(occ, occ[1:]))


@settings(max_examples=60, deadline=None)
@given(paths(), st.floats(0, 1), st.floats(0, 1), st.floats(-1, 1), st.floats(0, 1))
def test_additive_in_time(path, t1, t2, a, width):
    lo, hi = sorted((t1, t2))
    b = a + width
    whole = occupation_measure(path, hi, a, b)
    first = occupation_measure(path, lo, a, b)
    rest = occupation_measure(path, hi, a, b, start=lo)
    assert first + rest == pytest.approx(whole, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(paths(), st.floats(-1, 1), st.floats(0, 1), st.floats(0, 1))
def test_additive_in_level(path, a, w1, w2):
    b, c = a + w1, a + w1 + w2
    assume(not np.any(np.diff(path.values) == 0))
    total = occupation_measure(path, 1.0, a, c)
    assert occupation_measure(path, 1.0, a, b) + occupation_measure(path, 1.0, b, c) == pytest.approx(total, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(paths(), st.floats(-2, 2))
def test_level_sets_are_null(path, a):
    assume(not np.any(np.diff(path.values) == 0))
    assert occupation_measure(path, 1.0, a, a) == 0.0


def test_level_shift_is_exact():
    p = brownian_path(10, 4)
    for x in (-0.3, 0.0, 0.7):
        direct = occupation_density_estimate(p, 0.9, x, 6)
        shifted = occupation_density_estimate(p.shifted(x), 0.9, 0.0, 6)
        assert direct == shifted


def test_band_measure_vectorized_over_horizons():
    p = brownian_path(8, 12)
    hz = np.linspace(0, 1, 33)
    many = band_measure_at(p.times, p.values, -0.1, 0.1, hz)
    one = [occupation_time(p, OccupationQuery(h, 0.0, 0.1)) for h in hz]
    assert np.array_equal(many, one)
    assert many[0] == 0.0
