import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmpressure.map_kernel import eval_map, make_params, neutral_orbit
from pmpressure.phases import (
    INTERMITTENT,
    STATIONARY,
    UNDETERMINED,
    PhaseVerdict,
    TransitionBracket,
    boundary_tau,
    classify,
    ct_bracket,
    decay_fit,
    distortion_constants,
    ground_state_check,
    hausdorff_subsystem,
    kernel_projection,
    z1_criterion,
)
from pmpressure.potentials import ZERO, eval_potential, parse_potential

P1 = make_params(1.0)
PHALF = make_params(0.5)


# --- classify ---------------------------------------------------------------


def test_classify_clear_cases():
    omega = parse_potential("omega(0.5)", P1)
    assert classify(omega.scaled(0.9), P1, gamma=0.5).label == INTERMITTENT
    assert classify(omega.scaled(1.1), P1, gamma=0.5).label == STATIONARY


def test_classify_zero_potential_intermittent():
    v = classify(ZERO, P1, gamma=1.0)
    assert v.label == INTERMITTENT
    assert v.evidence["lower_gap_log"] > -math.inf


def test_classify_low_effort_returns_undetermined_near_transition():
    v = classify(parse_potential("-logdf", P1), P1, gamma=0.5, tol=0.5, effort=0)
    assert v.label == UNDETERMINED


def test_classify_effort_escalation_is_consistent():
    # a potential resolvable only by the word tree: effort 0 gives up,
    # effort 2 certifies, and the labels never conflict
    phi = parse_potential("0.95*omega(0.5)", P1)
    low = classify(phi, P1, gamma=0.5, effort=0)
    high = classify(phi, P1, gamma=0.5, effort=2)
    assert low.label in (UNDETERMINED, high.label)
    assert high.label == STATIONARY


def test_phase_verdict_validates_label():
    with pytest.raises(ValueError):
        PhaseVerdict("Sideways")


# --- transition bracket ------------------------------------------------------


def test_transition_bracket_validation():
    with pytest.raises(ValueError):
        TransitionBracket(lo=2.0, hi=1.0, kind="TemperatureBetaStar")
    br = TransitionBracket(lo=1.0, hi=math.inf, kind="TemperatureBetaStar")
    assert br.is_infinite
    assert math.isinf(br.width)


def test_ct_geometric_potential_contains_one():
    br = ct_bracket(parse_potential("-logdf", P1), P1, gamma=0.5, tol=0.25)
    assert not br.stalled
    assert br.lo <= 1.0 <= br.hi
    assert br.hi - br.lo <= 0.25


def test_ct_infinite_marker():
    br = ct_bracket(parse_potential("omega(1)", PHALF), PHALF, gamma=1.0, beta_max=64.0)
    assert br.is_infinite
    assert br.lo == 64.0


def test_ct_scaling_spot_check():
    phi = parse_potential("-0.8*logdf", P1)
    a = ct_bracket(phi, P1, gamma=0.5, tol=0.2, beta_max=16.0)
    b = ct_bracket(phi.scaled(2.0), P1, gamma=0.5, tol=0.2, beta_max=16.0)
    assert not a.is_infinite and not b.is_infinite
    # ct(2 phi) = ct(phi)/2: the halved bracket of a must meet b
    assert b.lo <= a.hi / 2 + 1e-12 and a.lo / 2 <= b.hi + 1e-12


def test_ct_never_leaves_intermittent_for_nonnegative_direction():
    # scaling a nonnegative potential cannot reach the stationary phase:
    # the marker (beta_max, infinity) comes back instead of an error
    br = ct_bracket(parse_potential("const(1)", P1), P1, gamma=1.0, beta_max=16.0)
    assert br.is_infinite
    zr = ct_bracket(ZERO, P1, gamma=1.0, beta_max=16.0)
    assert zr.is_infinite


# --- boundary tracer ----------------------------------------------------------


def test_boundary_tau_stationary_at_zero_gives_left_ray():
    br = boundary_tau(parse_potential("1.5*omega(0.5)", P1), P1, gamma=0.5)
    assert br.lo == -math.inf
    assert br.hi == 0.0
    assert not br.stalled


def test_boundary_tau_gamma_validation():
    with pytest.raises(ValueError):
        boundary_tau(ZERO, PHALF, gamma=0.8)  # gamma must be <= alpha


# --- kernel projection ---------------------------------------------------------


def _orbit_of(params, x, period):
    pts = []
    z = x
    for _ in range(period):
        pts.append(z)
        z = float(eval_map(params, z))
    return np.array(pts)


def test_kernel_projection_zeroes_functional_and_is_idempotent():
    phi = parse_potential("-logdf", P1)
    orbit = _orbit_of(P1, 0.3728615355680063, 3)  # period-3 orbit point
    psi, t = kernel_projection(phi, P1, 0.5, orbit)

    def ell(f):
        vals = eval_potential(f, P1, orbit)
        return eval_potential(f, P1, 0.0) - float(np.mean(vals))

    omega = parse_potential("omega(0.5)", P1)
    assert t == pytest.approx(ell(phi) / ell(omega), rel=1e-12)
    assert abs(ell(psi)) < 1e-12
    psi2, t2 = kernel_projection(psi, P1, 0.5, orbit)
    assert abs(t2) < 1e-12


def test_kernel_projection_rejects_degenerate_orbit():
    with pytest.raises(ValueError):
        kernel_projection(ZERO, P1, 0.5, np.array([]))


# --- ground states ---------------------------------------------------------------


def test_ground_state_violation_by_increasing_potential():
    # -omega(1) = +x: the fixed point at 1 beats phi(0) = 0 immediately
    rep = ground_state_check(
        parse_potential("-1*omega(1)", P1), P1, period_max=2, neutral_depth=8
    )
    assert rep.status == "Violated"
    assert rep.witness_point == pytest.approx(1.0)
    assert rep.witness_average == pytest.approx(1.0)
    assert rep.margin < 0


def test_ground_state_consistent_for_decreasing_potential():
    rep = ground_state_check(
        parse_potential("omega(0.5)", P1), P1, period_max=4, neutral_depth=64
    )
    assert rep.status == "ConsistentUpTo"
    assert rep.margin >= 0
    assert rep.witness_itinerary is None


def test_ground_state_validation():
    with pytest.raises(ValueError):
        ground_state_check(ZERO, P1, period_max=0)


# --- decay diagnostics -------------------------------------------------------------


def test_decay_fit_range_validation():
    phi = parse_potential("-logdf", P1)
    with pytest.raises(ValueError):
        decay_fit(phi, P1, (100, 100))
    with pytest.raises(ValueError):
        decay_fit(phi, P1, (0, 1000))
    with pytest.raises(ValueError):
        decay_fit(phi, P1, (100, 500))  # hi < 10*lo: not enough decades


def test_decay_fit_fields():
    fit = decay_fit(parse_potential("-logdf", P1), P1, (100, 10_000))
    assert fit.C_fit > 0
    assert fit.delta_fit == pytest.approx(2.0, rel=0.2)
    assert fit.residual < 0.05


# --- distortion and the one-cylinder criterion ----------------------------------------


def test_distortion_constants_deterministic_and_positive():
    d1 = distortion_constants(P1, N=12)
    d2 = distortion_constants(P1, N=12)
    assert d1 == d2
    assert 0 < d1.eps0 < 1
    assert d1.eps1 > 0 and d1.C1 > 0 and d1.D > 1
    assert d1.certified_depth == 12


def test_distortion_requires_depth():
    with pytest.raises(ValueError):
        distortion_constants(P1, N=5)


def test_z1_criterion_directions():
    d = distortion_constants(P1, N=12)
    assert z1_criterion(ZERO, P1, alpha_exponent=0.5, N=12, dist=d) is True
    omega = parse_potential("omega(0.5)", P1)
    assert z1_criterion(omega, P1, alpha_exponent=0.5, N=12, dist=d) is False


# --- Hausdorff dimension ---------------------------------------------------------------


def test_hausdorff_full_branch_pair_has_dimension_near_one():
    br = hausdorff_subsystem(PHALF, n=5, tol=1e-3)
    assert br.lower == pytest.approx(0.890538, abs=1e-4)
    assert br.upper == pytest.approx(0.907645, abs=1e-4)
    assert br.branches == 5


def test_hausdorff_dimension_increases_with_branches():
    lo_few = hausdorff_subsystem(PHALF, n=2, tol=1e-2).lower
    lo_many = hausdorff_subsystem(PHALF, n=10, tol=1e-2).lower
    assert lo_many > lo_few


def test_hausdorff_upper_capped_at_line_dimension():
    br = hausdorff_subsystem(PHALF, n=20, tol=1e-2)
    assert br.upper <= 1.0
    assert br.lower > 0.9


@settings(deadline=None, max_examples=10)
@given(beta=st.floats(0.2, 3.0))
def test_classify_never_conflicts_across_efforts(beta):
    phi = parse_potential("omega(0.5)", P1).scaled(beta)
    labels = {
        classify(phi, P1, gamma=0.5, effort=0).label,
        classify(phi, P1, gamma=0.5, effort=1).label,
    }
    assert not (INTERMITTENT in labels and STATIONARY in labels)
