import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmpressure.map_kernel import (
    MAX_DEPTH,
    MapParams,
    PartitionDepthError,
    branch_point,
    cylinder_endpoints,
    cylinder_for,
    cylinders,
    deriv,
    eval_map,
    first_return,
    inv_left,
    inv_left_many,
    inv_right,
    inv_right_many,
    make_params,
    neutral_orbit,
    preimages,
    return_partition,
    return_time,
)

# Branch points x1 solving x(1 + x^alpha) = 1, computed by independent
# 80-round bisection at build time and frozen.
BRANCH_ORACLE = {
    0.5: 0.5698402909980533,
    0.8: 0.6005809415281749,
    1.0: 0.6180339887498949,
    2.0: 0.6823278038280194,
}

# Backward orbit of 1 under the left branch at alpha = 1, from the same
# independent bisection solver.
ORBIT_ORACLE_A1 = [
    1.0,
    0.6180339887498949,
    0.4316834166,
    0.3256412154,
    0.2587102315,
    0.2132392526,
    0.1806168178,
    0.156214003,
    0.1373492002,
    0.1223738428,
]


@pytest.mark.parametrize("alpha,x1", sorted(BRANCH_ORACLE.items()))
def test_branch_point_oracle(alpha, x1):
    assert branch_point(alpha) == pytest.approx(x1, abs=1e-14)
    p = make_params(alpha)
    assert eval_map(p, p.x1) == pytest.approx(1.0, abs=1e-12)


def test_params_validation():
    with pytest.raises(ValueError):
        MapParams(alpha=0.0, x1=0.5)
    with pytest.raises(ValueError):
        make_params(-1.0)


def test_map_branches_and_derivative():
    p = make_params(1.0)
    x = np.array([0.0, 0.3, p.x1, 0.8, 1.0])
    y = eval_map(p, x)
    assert y[0] == 0.0
    assert y[2] == pytest.approx(1.0, abs=1e-12)
    assert y[4] == pytest.approx(1.0)  # right branch: 1*(1+1) - 1
    assert np.all(deriv(p, x) == 1.0 + 2.0 * x)


@settings(deadline=None)
@given(
    alpha=st.floats(0.3, 2.5),
    y=st.floats(1e-9, 1.0, exclude_min=True),
)
def test_inverse_branches(alpha, y):
    p = make_params(alpha)
    xl, xr = inv_left(p, y), inv_right(p, y)
    assert 0.0 < xl <= p.x1 + 1e-12
    assert p.x1 - 1e-12 <= xr <= 1.0
    assert eval_map(p, xl) == pytest.approx(y, abs=1e-10)
    assert eval_map(p, xr) == pytest.approx(y, abs=1e-10)


def test_inverse_many_match_scalar():
    p = make_params(0.7)
    ys = np.linspace(0.05, 1.0, 17)
    assert np.allclose(inv_left_many(p, ys), [inv_left(p, y) for y in ys])
    assert np.allclose(inv_right_many(p, ys), [inv_right(p, y) for y in ys])


def test_neutral_orbit_oracle_and_recurrence():
    p = make_params(1.0)
    orb = neutral_orbit(p, 9)
    assert np.allclose(orb.points, ORBIT_ORACLE_A1, atol=1e-9)
    assert np.all(np.diff(orb.points) < 0)
    # f maps each point one step up the orbit, through the left branch
    back = eval_map(p, orb.points[1:])
    assert np.allclose(back, orb.points[:-1], atol=1e-12)


def test_return_partition_geometry():
    p = make_params(1.0)
    part = return_partition(p, 40)
    y = part.y
    assert y[0] == 1.0
    assert y[1] == pytest.approx(0.8667603991738622, abs=1e-12)
    assert np.all(np.diff(y) < 0)
    assert y[-1] > p.x1
    # f(y_j) = x_{j-1}: each return interval right endpoint maps onto the
    # neutral orbit
    assert np.allclose(eval_map(p, y[1:]), part.orbit.points[1:41], atol=1e-10)


def test_return_time_and_first_return():
    p = make_params(1.0)
    part = return_partition(p, 64)
    for j in (1, 2, 5, 17):
        lo, hi = part.interval(j)
        mid = 0.5 * (lo + hi)
        assert return_time(part, mid) == j
        # f^j maps I_j back into J0
        fr = first_return(part, mid)
        assert p.x1 < fr <= 1.0
        z = mid
        for _ in range(j):
            z = float(eval_map(p, z))
        assert fr == pytest.approx(z, abs=1e-12)
    with pytest.raises(ValueError):
        return_time(part, p.x1 / 2)
    with pytest.raises(PartitionDepthError):
        return_time(part, float(part.y[-1]) * 0.999999)


def test_cylinder_for_oracle():
    p = make_params(1.0)
    c = cylinder_for(p, (0, 0, 1))
    assert c.left == pytest.approx(0.3256412154141648, abs=1e-12)
    assert c.right == pytest.approx(0.4316834165905793, abs=1e-12)


def test_cylinders_are_ordered_binary_partition():
    p = make_params(0.5)
    n = 6
    cyls = cylinders(p, n)
    assert len(cyls) == 2**n
    los = np.array([c.left for c in cyls])
    his = np.array([c.right for c in cyls])
    # position-sorted, abutting, covering (0, 1]
    assert np.all(np.diff(los) > 0)
    assert los[0] == 0.0 and his[-1] == 1.0
    assert np.allclose(his[:-1], los[1:], atol=1e-12)
    # itinerary of cylinder i is the n-bit binary expansion of i
    for i in (0, 1, 13, 2**n - 1):
        bits = tuple((i >> (n - 1 - k)) & 1 for k in range(n))
        assert cyls[i].itinerary == bits
    ends = cylinder_endpoints(p, n)
    assert np.allclose(ends[:-1], los) and ends[-1] == 1.0


def test_cylinder_refines_membership():
    p = make_params(1.3)
    c = cylinder_for(p, (1, 0, 1, 1))
    x = 0.5 * (c.left + c.right)
    z = x
    for bit in c.itinerary:
        assert (z > p.x1) == bool(bit)
        z = float(eval_map(p, z))


def test_enumeration_depth_cap():
    p = make_params(1.0)
    with pytest.raises(ValueError):
        cylinder_endpoints(p, MAX_DEPTH + 1)
    # deep single-word queries are not capped
    deep = cylinder_for(p, (0,) * 64)
    assert 0 <= deep.left < deep.right


def test_preimages():
    p = make_params(0.9)
    pts = preimages(p, 0.37, 4)
    assert len(pts) == 16
    z = pts.copy()
    for _ in range(4):
        z = eval_map(p, z)
    assert np.allclose(z, 0.37, atol=1e-9)
