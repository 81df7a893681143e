import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from localtime_lab.errors import InvalidEpsilon, LevelOverflow, OutOfDomain, TooFewSamples
from localtime_lab.experiments import fit_log2_slope
from localtime_lab.integration import (
    IND_MINUS,
    IND_PLUS,
    SIGN,
    IntegrandSpec,
    mollifier_bound,
    mollifier_eval,
    mollifier_expectation_bound,
    mollifier_gap_integrals,
    pathwise_integral,
    riemann_integral,
    riemann_sum,
    sign,
    simple_integrand,
)
from localtime_lab.path_model import PiecewiseLinearPath, decode_code, evaluate
from localtime_lab.sampler import brownian_path

IDENTITY = PiecewiseLinearPath([0.0, 1.0], [0.0, 1.0])
ONE = IntegrandSpec("const", 1.0)
eps_st = st.floats(1e-3, 10.0)


def test_sign_convention():
    assert np.array_equal(sign([-2.0, -0.0, 0.0, 3.0]), [-1.0, 1.0, 1.0, 1.0])


def test_spec_parsing():
    assert IntegrandSpec.parse("sign") == SIGN
    assert IntegrandSpec.parse("mollified:0.25") == IntegrandSpec("mollified", 0.25)
    assert IntegrandSpec.parse("const:-2") == IntegrandSpec("const", -2.0)
    assert str(IntegrandSpec.parse("mollified:0.25")) == "mollified:0.25"
    for bad in ("mollified", "sign:1", "cosine", "const:x"):
        with pytest.raises(ValueError):
            IntegrandSpec.parse(bad)
    with pytest.raises(InvalidEpsilon):
        IntegrandSpec.parse("mollified:-1")


# --- mollifiers ---

def test_mollifier_knots():
    e = 0.3
    assert mollifier_eval("f", e, -e) == 0.0
    assert mollifier_eval("f", e, 2.0) == 2.0
    assert mollifier_eval("f", e, e) == pytest.approx(e, abs=1e-16)
    assert mollifier_eval("f", e, 0.0) == pytest.approx(e / 4)
    assert mollifier_eval("fprime", e, 0.0) == 0.5
    assert mollifier_eval("fsecond", e, 0.0) == pytest.approx(1 / (2 * e))
    assert mollifier_eval("fsecond", e, e) == 0.0
    assert mollifier_eval("fsecond", e, -e) == 0.0
    assert mollifier_eval("h", e, -1.0) == 1.0
    assert mollifier_eval("h", e, e) == 0.0


def test_mollifier_rejects_bad_input():
    with pytest.raises(InvalidEpsilon):
        mollifier_eval("f", 0.0, 1.0)
    with pytest.raises(ValueError):
        mollifier_eval("g", 1.0, 1.0)


def _piece(x, e):
    return -1 if x <= -e else (0 if abs(x) < e else 1)


@settings(max_examples=1000)
@given(eps_st, st.floats(-20, 20), st.floats(1e-6, 1e-2))
def test_mollifier_finite_differences(e, x, h):
    assume(_piece(x, e) == _piece(x + h, e) and abs(x) != e)
    for f, df in (("f", "fprime"), ("fprime", "fsecond")):
        fd = (mollifier_eval(f, e, x + h) - mollifier_eval(f, e, x)) / h
        rounding = 4e-16 * (1 + abs(x)) / h
        assert abs(fd - mollifier_eval(df, e, x)) <= h / (4 * e) * 2 + rounding


@given(eps_st, st.floats(-50, 50))
def test_f_plus_h_close_to_abs(e, x):
    assert abs(mollifier_eval("f", e, x) + mollifier_eval("h", e, x) - abs(x)) <= e / 2 + 1e-12


@given(eps_st, st.floats(-50, 50))
def test_h_mirrors_f(e, x):
    assert mollifier_eval("h", e, x) == pytest.approx(mollifier_eval("f", e, -x), abs=1e-12)


# --- simple integrands and Riemann sums ---

def test_simple_integrand_examples():
    p = brownian_path(6, 1)
    assert np.all(simple_integrand(IntegrandSpec("const", 2.5), p, 3) == 2.5)
    assert simple_integrand(SIGN, IDENTITY, 2).tolist() == [1.0, 1.0, 1.0, 1.0]
    assert simple_integrand(IND_PLUS, decode_code("01"), 1).tolist() == [1.0, 0.0]


def test_simple_integrand_level_cap():
    with pytest.raises(LevelOverflow):
        simple_integrand(SIGN, IDENTITY, 27)


def test_riemann_examples():
    p = brownian_path(10, 2)
    for n in (0, 3, 9, 12):
        assert riemann_integral(ONE, p, 1.0, n) == pytest.approx(p.values[-1], abs=1e-12)
        assert riemann_integral(SIGN, IDENTITY, 1.0, n) == 1.0
    assert riemann_integral(SIGN, decode_code("10"), 1.0, 6) == pytest.approx(0.0, abs=1e-15)


def test_riemann_domain():
    with pytest.raises(OutOfDomain):
        riemann_integral(SIGN, IDENTITY, 1.1, 3)


def test_riemann_against_loop():
    p = brownian_path(9, 8)
    t, n = 0.613, 5
    ell = math.floor(t * 2**n)
    acc = 0.0
    for k in range(1, ell + 1):
        a, b = evaluate(p, (k - 1) / 2**n), evaluate(p, k / 2**n)
        acc += (1.0 if a >= 0 else -1.0) * (b - a)
    w_l = evaluate(p, ell / 2**n)
    acc += (1.0 if w_l >= 0 else -1.0) * (evaluate(p, t) - w_l)
    assert riemann_integral(SIGN, p, t, n) == pytest.approx(acc, abs=1e-13)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.floats(0, 1), st.integers(0, 14))
def test_constant_telescopes(seed, t, n):
    p = brownian_path(10, seed)
    assert riemann_integral(ONE, p, t, n) == pytest.approx(evaluate(p, t), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.floats(0, 1), st.integers(1, 12), st.floats(-3, 3), st.floats(-3, 3))
def test_linear_in_integrand(seed, t, n, a, b):
    p = brownian_path(10, seed)
    g = p.grid_values(n)
    ell = min(int(math.floor(t * 2**n)), 2**n)
    g = g[: ell + 1]
    tail = evaluate(p, t) - g[-1]
    phi = a * SIGN(g) + b * IND_PLUS(g)
    combined = riemann_sum(phi[:-1], np.diff(g), phi[-1], tail)
    split = a * riemann_integral(SIGN, p, t, n) + b * riemann_integral(IND_PLUS, p, t, n)
    assert combined == pytest.approx(split, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 14))
def test_zero_indicator_only_fires_at_origin(seed, n):
    p = brownian_path(14, seed)
    zero_part = riemann_integral(IND_PLUS, p, 1.0, n) + riemann_integral(IND_MINUS, p, 1.0, n) \
        - riemann_integral(ONE, p, 1.0, n)
    # the only grid zero is w(0) = 0, so only the first increment survives
    assert zero_part == pytest.approx(p.grid_values(n)[1], abs=1e-12)


# --- refinement ---

def test_constant_converges_immediately():
    p = brownian_path(12, 4)
    r = pathwise_integral(IntegrandSpec("const", 3.0), p, 0.7, 1e-9, 20)
    assert r.converged and r.cauchy_gap <= 1e-15
    assert r.grid_level == 5
    assert r.value == pytest.approx(3.0 * evaluate(p, 0.7), abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_sign_integral_converges_on_gaussian_path(seed):
    p = brownian_path(10, seed)
    r = pathwise_integral(SIGN, p, 1.0, 1e-3, 26)
    assert r.converged and r.cauchy_gap <= 1e-3
    g = np.array(r.gaps)
    levels = np.arange(5, 5 + g.size)
    slope = fit_log2_slope(levels[g > 0], g[g > 0])
    assert slope is None or slope <= -0.3


@pytest.mark.parametrize("seed", range(5))
def test_flag_contract_on_fine_paths(seed):
    p = brownian_path(18, seed)
    r = pathwise_integral(SIGN, p, 1.0, 1e-3, 18)
    assert r.grid_level <= 18
    assert r.cauchy_gap >= 0
    if r.converged:
        assert r.cauchy_gap <= 1e-3
    else:
        assert r.grid_level == 18 and r.cauchy_gap > 1e-3


def test_sawtooth_reports_instead_of_raising():
    p = decode_code("01" * 32)
    r = pathwise_integral(SIGN, p, 1.0, 1e-12, 6)
    assert isinstance(r.converged, bool)
    assert r.converged == (r.cauchy_gap <= 1e-12)
    assert r.grid_level <= 6


def test_refinement_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        pathwise_integral(SIGN, IDENTITY, 1.0, 0.0, 10)
    with pytest.raises(LevelOverflow):
        pathwise_integral(SIGN, IDENTITY, 1.0, 1e-3, 27)


# --- mollifier expectation bound ---

def test_gap_integral_hand_value():
    w = np.array([0, 0.1, -0.3, 0.3, 0.3, 0.0])
    assert mollifier_gap_integrals(w, 0.2) == pytest.approx(0.0670138888888889, abs=1e-15)


def test_gap_integral_against_fine_sampling():
    p = brownian_path(6, 21)
    s = np.linspace(0, 1, 2**20 + 1)
    w = np.interp(s, p.times, p.values)
    for e in (0.5, 0.1, 0.02):
        sq = (mollifier_eval("fprime", e, w) - (w >= 0)) ** 2
        fine = np.trapezoid(sq, s) if hasattr(np, "trapezoid") else np.trapz(sq, s)
        assert mollifier_gap_integrals(p.values, e) == pytest.approx(fine, abs=1e-6)
        assert mollifier_gap_integrals(p.values[None, :], e)[0] == mollifier_gap_integrals(p.values, e)


def test_gap_integral_trapezoid_option():
    w = np.array([0, 0.1, -0.3, 0.3, 0.3, 0.0])
    assert mollifier_gap_integrals(w, 0.2, "trapezoid") == pytest.approx(0.0625, abs=1e-15)
    with pytest.raises(ValueError):
        mollifier_gap_integrals(w, 0.2, "simpson")


def test_bound_values():
    assert mollifier_bound(2) == pytest.approx(0.033244, abs=2e-6)


def test_bound_table_small_run():
    rows = mollifier_expectation_bound(range(2, 6), 1000, 8, 0)
    assert [r["n"] for r in rows] == [2, 3, 4, 5]
    assert all(r["ok"] for r in rows)
    est = [r["estimate"] for r in rows]
    assert all(a > b for a, b in zip(est, est[1:]))
    assert rows[0]["bound"] == pytest.approx(0.25 / (3 * math.sqrt(2 * math.pi)))


def test_bound_needs_paths():
    with pytest.raises(TooFewSamples):
        mollifier_expectation_bound(range(2, 4), 10, 8, 0)
