import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmpressure.map_kernel import make_params, neutral_orbit
from pmpressure.tails import (
    log_stretched_exp_sum_upper,
    neutral_tail_bounds,
)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_envelope_sandwiches_true_orbit(alpha):
    p = make_params(alpha)
    tb = neutral_tail_bounds(p, 200)
    orbit = neutral_orbit(p, 2000)
    ns = np.arange(200, 2001)
    xs = orbit.points[ns]
    assert np.all(tb.lower_x(ns) <= xs + 1e-15)
    assert np.all(xs <= tb.upper_x(ns) + 1e-15)


def test_envelope_tightens_with_depth():
    p = make_params(1.0)
    shallow = neutral_tail_bounds(p, 50)
    deep = neutral_tail_bounds(p, 500)
    n = 1000
    assert deep.upper_x(n) - deep.lower_x(n) < shallow.upper_x(n) - shallow.lower_x(n)


@pytest.mark.parametrize("alpha,gamma", [(0.5, 1.0), (1.0, 1.5), (2.0, 2.5)])
def test_power_sum_upper_dominates_partial_sums(alpha, gamma):
    p = make_params(alpha)
    tb = neutral_tail_bounds(p, 100)
    orbit = neutral_orbit(p, 50_000)
    true_partial = float(np.sum(orbit.points[101:] ** gamma))
    assert tb.power_sum_upper(gamma) >= true_partial


def test_power_sum_upper_infinite_at_critical_exponent():
    p = make_params(1.0)
    tb = neutral_tail_bounds(p, 100)
    assert math.isinf(tb.power_sum_upper(1.0))
    assert math.isinf(tb.power_sum_upper(0.5))
    assert math.isfinite(tb.power_sum_upper(1.01))


def test_power_sum_lower_partial_is_a_lower_bound():
    p = make_params(1.0)
    depth = 100
    tb = neutral_tail_bounds(p, depth)
    orbit = neutral_orbit(p, depth + 5000)
    for gamma in (1.0, 1.5, 2.0):
        for count in (10, 500, 5000):
            true_sum = float(np.sum(orbit.points[depth + 1 : depth + count + 1] ** gamma))
            got = float(tb.power_sum_lower_partial(gamma, count))
            assert got <= true_sum + 1e-12


def test_log_df_sum_lower_partial():
    p = make_params(0.8)
    depth = 100
    tb = neutral_tail_bounds(p, depth)
    orbit = neutral_orbit(p, depth + 2000)
    xs = orbit.points[depth + 1 : depth + 2001]
    true_sum = float(np.sum(np.log1p((1 + p.alpha) * xs**p.alpha)))
    got = float(tb.log_df_sum_lower_partial(2000))
    assert 0 < got <= true_sum


@settings(deadline=None, max_examples=60)
@given(
    b=st.floats(0.05, 4.0),
    prm=st.floats(0.2, 0.95),
    v1=st.floats(0.5, 50.0),
)
def test_stretched_exp_sum_upper_dominates(b, prm, v1):
    # bound on log sum_{k>=1} exp(-b (v1 + k*step)^prm); brute force below it
    step = 1.0
    ks = np.arange(1, 200_001)
    brute = float(np.log(np.sum(np.exp(-b * (v1 + ks * step) ** prm))))
    upper = log_stretched_exp_sum_upper(b, prm, v1, step)
    assert upper >= brute - 1e-9


def test_depth_validation():
    p = make_params(1.0)
    with pytest.raises(ValueError):
        neutral_tail_bounds(p, 0)
