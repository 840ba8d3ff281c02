import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmpressure.map_kernel import make_params
from pmpressure.potentials import (
    ZERO,
    Const,
    NegLogDf,
    Omega,
    Potential,
    birkhoff,
    eval_potential,
    holder_data,
    load_table,
    parse_potential,
    print_potential,
    zeta_n,
    zeta_sequence,
)

P1 = make_params(1.0)


# --- atoms ----------------------------------------------------------------


def test_atom_values():
    x = np.array([0.0, 0.25, 1.0])
    assert np.allclose(Omega(0.5).evaluate(P1, x), -np.sqrt(x))
    assert np.allclose(NegLogDf().evaluate(P1, x), -np.log1p(2 * x))
    assert np.allclose(Const(0.7).evaluate(P1, x), 0.7)


def test_omega_requires_positive_exponent():
    with pytest.raises(ValueError):
        Omega(0.0)


# --- expression grammar ---------------------------------------------------


def test_parse_surface_logdf_is_positive_log_df():
    # surface token denotes +log Df; the geometric potential is "-logdf"
    phi = parse_potential("-logdf", P1)
    assert eval_potential(phi, P1, 1.0) == pytest.approx(-math.log(3.0))
    assert eval_potential(phi, P1, 0.0) == 0.0
    plus = parse_potential("logdf", P1)
    assert eval_potential(plus, P1, 1.0) == pytest.approx(math.log(3.0))


def test_parse_combinations():
    phi = parse_potential("0.4*omega(0.5) - 0.6*logdf + const(0.25)", P1)
    x = 0.49
    expect = 0.4 * -math.sqrt(x) - 0.6 * math.log1p(2 * x) + 0.25
    assert eval_potential(phi, P1, x) == pytest.approx(expect, abs=1e-14)


def test_parse_leading_sign_and_whitespace():
    a = parse_potential("-0.5*omega(0.5) - logdf", P1)
    b = parse_potential("  -  0.5 * omega( 0.5 )-logdf ", P1)
    assert a == b


@pytest.mark.parametrize(
    "bad",
    ["", "bad(0.3)", "omega()", "omega(-1)", "2**logdf", "logdf + ", "const(x)"],
)
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse_potential(bad, P1)


@pytest.mark.parametrize(
    "text",
    [
        "const(0)",
        "-logdf",
        "logdf",
        "omega(1)",
        "-0.5*omega(0.5) - logdf",
        "0.4*omega(0.5) - 0.6*logdf + const(0.25)",
        "3*omega(2) + 2*logdf",
    ],
)
def test_print_parse_round_trip(text):
    phi = parse_potential(text, P1)
    assert parse_potential(print_potential(phi), P1) == phi


# --- algebra ---------------------------------------------------------------


@settings(deadline=None)
@given(
    a=st.floats(-3, 3),
    c=st.floats(-2, 2),
    x=st.floats(0, 1),
)
def test_scaled_plus_shifted_linearity(a, c, x):
    phi = parse_potential("0.7*omega(0.5) - logdf", P1)
    v = eval_potential(phi, P1, x)
    assert eval_potential(phi.scaled(a), P1, x) == pytest.approx(a * v, abs=1e-10)
    assert eval_potential(phi.shifted(c), P1, x) == pytest.approx(v + c, abs=1e-12)
    psi = parse_potential("const(0.3)", P1)
    assert eval_potential(phi.plus(psi), P1, x) == pytest.approx(v + 0.3, abs=1e-12)


def test_eval_domain_check():
    with pytest.raises(ValueError):
        eval_potential(ZERO, P1, 1.5)
    with pytest.raises(ValueError):
        eval_potential(ZERO, P1, np.array([0.2, -0.1]))


# --- Holder data -----------------------------------------------------------


def test_holder_data_omega_exact():
    h = holder_data(parse_potential("omega(0.5)", P1), P1, 0.5)
    assert h.seminorm == pytest.approx(1.0)
    assert h.sup_norm == pytest.approx(1.0)
    assert not h.estimate_only


def test_holder_data_scales():
    h1 = holder_data(parse_potential("-logdf", P1), P1, 0.5)
    h2 = holder_data(parse_potential("-2*logdf", P1), P1, 0.5)
    assert h2.seminorm == pytest.approx(2 * h1.seminorm, rel=1e-9)
    assert h2.sup_norm == pytest.approx(2 * h1.sup_norm, rel=1e-9)


def test_holder_gamma_exceeding_regularity_rejected():
    # -x^0.5 is not Lipschitz at 0: requesting gamma = 1 must fail
    with pytest.raises(ValueError):
        holder_data(parse_potential("omega(0.5)", P1), P1, 1.0)


# --- Birkhoff sums and the neutral-orbit series -----------------------------


def test_birkhoff_at_fixed_point():
    phi = parse_potential("-logdf", P1)
    # x = 1 is the fixed point of the right branch
    assert birkhoff(phi, P1, 1.0, 7) == pytest.approx(-7 * math.log(3.0))


def test_zeta_sequence_oracle():
    phi = parse_potential("-logdf", P1)
    zs = zeta_sequence(phi, P1, 10)  # zs[n-1] = zeta_n for n = 1..10
    # zeta_10 computed by direct orbit summation at build time and frozen
    assert zs[9] == pytest.approx(0.019409198423347, abs=1e-12)
    assert zeta_n(phi, P1, 10) == pytest.approx(zs[9], abs=1e-18)


def test_zeta_sequence_partial_sum_oracle():
    # sum_{j=1}^{200000} x_j at alpha = 0.5 (gamma = 1 power sum), frozen
    p = make_params(0.5)
    zs = zeta_sequence(parse_potential("omega(1)", p), p, 200_000)
    assert -np.log(zs[199_999]) == pytest.approx(2.1972935961927997, rel=1e-12)


# --- tabulated atoms --------------------------------------------------------


def _write_table(path, params, gamma=0.5, seminorm=1.0):
    xs = np.linspace(0, 1, 4001)
    ys = -(xs**gamma)
    with open(path, "w") as fh:
        fh.write(f"# gamma={gamma}\n# seminorm={seminorm}\n")
        for x, y in zip(xs, ys):
            fh.write(f"{float(x)!r},{float(y)!r}\n")


def test_tabulated_round_trip(tmp_path):
    path = tmp_path / "omega_half.csv"
    _write_table(path, P1)
    tab = load_table(str(path))
    phi = Potential(terms=((1.0, tab),))
    xs = np.linspace(0, 1, 97)
    assert np.allclose(
        eval_potential(phi, P1, xs), -np.sqrt(xs), atol=2e-4
    )  # piecewise-linear interpolation error only


def test_tabulated_declared_seminorm_validated(tmp_path):
    path = tmp_path / "omega_lying.csv"
    _write_table(path, P1, seminorm=0.01)  # declared far below sampled slope
    with pytest.raises(ValueError):
        load_table(str(path))


def test_tabulated_parse_atom(tmp_path):
    path = tmp_path / "t.csv"
    _write_table(path, P1)
    phi = parse_potential(f"0.5*table({path})", P1)
    assert eval_potential(phi, P1, 0.25) == pytest.approx(-0.25, abs=1e-4)
