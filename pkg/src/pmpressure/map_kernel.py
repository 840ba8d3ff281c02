"""Pomeau-Manneville map family: branches, inverse branches, the neutral
backward orbit, the first-return structure on J0 = (x1, 1], and binary
cylinder/preimage enumeration.

The map is f(x) = x(1 + x^alpha) on [0, x1] and x(1 + x^alpha) - 1 on
(x1, 1], where x1 is the unique root of x(1 + x^alpha) = 1 in (0, 1).
Both branches are increasing bijections onto [0, 1] (the right branch
onto (0, 1]), so the itinerary coding over {0, 1} realizes the full
2-shift.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Absolute tolerance targeted by the inverse-branch solvers.
SOLVE_TOL = 1e-13
# Default hard ceiling on cylinder/preimage enumeration depth.
MAX_DEPTH = 26

__all__ = [
    "MapParams",
    "NeutralOrbit",
    "ReturnPartition",
    "Cylinder",
    "branch_point",
    "make_params",
    "eval_map",
    "deriv",
    "inv_left",
    "inv_right",
    "inv_left_many",
    "inv_right_many",
    "neutral_orbit",
    "return_partition",
    "return_time",
    "first_return",
    "cylinders",
    "cylinder_endpoints",
    "cylinder_for",
    "preimages",
    "PartitionDepthError",
]


@dataclass(frozen=True)
class MapParams:
    """Map family parameters: the exponent alpha and the branch point x1."""

    alpha: float
    x1: float

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        resid = self.x1 * (1 + self.x1**self.alpha) - 1.0
        if abs(resid) > 1e-10:
            raise ValueError(f"x1={self.x1} does not solve x(1+x^alpha)=1")


def branch_point(alpha: float) -> float:
    """Root of x(1 + x^alpha) = 1 in (0, 1): the discontinuity of the map.

    Bisection to near machine width, then Newton polish.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mid * (1 + mid**alpha) - 1.0 <= 0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(3):
        g = x * (1 + x**alpha) - 1.0
        x -= g / (1 + (1 + alpha) * x**alpha)
    return x


def make_params(alpha: float) -> MapParams:
    """Construct MapParams with the branch point solved to tolerance."""
    return MapParams(alpha=alpha, x1=branch_point(alpha))


def _check_domain(x, lo: float = 0.0, hi: float = 1.0) -> None:
    arr = np.asarray(x, dtype=float)
    if np.any(arr < lo) or np.any(arr > hi):
        raise ValueError(f"argument outside [{lo}, {hi}]")


def eval_map(params: MapParams, x):
    """Apply the map. Accepts scalars or arrays in [0, 1]."""
    _check_domain(x)
    x = np.asarray(x, dtype=float)
    y = x * (1 + x**params.alpha)
    out = np.where(y <= 1.0, y, y - 1.0)
    return float(out) if out.ndim == 0 else out


def deriv(params: MapParams, x):
    """Derivative 1 + (1+alpha) x^alpha; equals 1 only at the neutral point."""
    _check_domain(x)
    x = np.asarray(x, dtype=float)
    out = 1 + (1 + params.alpha) * x**params.alpha
    return float(out) if out.ndim == 0 else out


def _bisect_increasing(g, lo, hi, iters: int = 52):
    """Vectorized bisection for an increasing function g with a root in
    [lo, hi]. Returns the midpoint of the final bracket."""
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        neg = g(mid) <= 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    return 0.5 * (lo + hi)


def inv_left_many(params: MapParams, y) -> np.ndarray:
    """Preimages on the left branch [0, x1] for y in [0, 1] (vectorized).

    Bisection only: near x = 0 the derivative degenerates to 1, which is
    harmless for bisection and treacherous for pure Newton.
    """
    _check_domain(y)
    a = params.alpha
    y = np.atleast_1d(np.asarray(y, dtype=float))
    # inv_left(y) <= min(y, x1): the left branch satisfies f(x) >= x.
    hi = np.minimum(y, params.x1)
    roots = _bisect_increasing(lambda x: x * (1 + x**a) - y, np.zeros_like(y), hi)
    # One guarded Newton step sharpens the last bits away from 0.
    g = roots * (1 + roots**a) - y
    dg = 1 + (1 + a) * roots**a
    roots = np.clip(roots - g / dg, 0.0, params.x1)
    return roots


def inv_right_many(params: MapParams, y) -> np.ndarray:
    """Preimages on the right branch (x1, 1] for y in (0, 1] (vectorized)."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y <= 0) or np.any(y > 1):
        raise ValueError("inv_right requires y in (0, 1]")
    a = params.alpha
    lo = np.full_like(y, params.x1)
    roots = _bisect_increasing(
        lambda x: x * (1 + x**a) - 1.0 - y, lo, np.ones_like(y)
    )
    g = roots * (1 + roots**a) - 1.0 - y
    dg = 1 + (1 + a) * roots**a
    roots = np.clip(roots - g / dg, params.x1, 1.0)
    return roots


def inv_left(params: MapParams, y: float) -> float:
    """Scalar left-branch inverse."""
    return float(inv_left_many(params, y)[0])


def inv_right(params: MapParams, y: float) -> float:
    """Scalar right-branch inverse."""
    return float(inv_right_many(params, y)[0])


@dataclass(frozen=True)
class NeutralOrbit:
    """Backward orbit of 1 down the left branch: x_0 = 1 > x_1 > x_2 > ...

    x_1 is the branch point and f(x_{j+1}) = x_j on the left branch; the
    sequence decreases to the neutral fixed point at 0.
    """

    params: MapParams
    points: np.ndarray  # x_0 .. x_N

    @property
    def depth(self) -> int:
        return len(self.points) - 1


def neutral_orbit(params: MapParams, n: int) -> NeutralOrbit:
    """x_0 .. x_n with f(x_{j+1}) = x_j, each step re-solved directly.

    Each x_{j+1} is found by Newton on x(1+x^alpha) = x_j (seeded below the
    root, where the iteration is monotone), rather than by composing earlier
    approximations — the sequence enters the flat region near 0 where
    composition loses digits.
    """
    if n < 0:
        raise ValueError("orbit depth must be nonnegative")
    a = params.alpha
    xs = np.empty(n + 1)
    xs[0] = 1.0
    for j in range(n):
        y = xs[j]
        x = y / (1 + y**a)  # below the root since x(1+x^a) is increasing
        for _ in range(80):
            g = x * (1 + x**a) - y
            step = g / (1 + (1 + a) * x**a)
            x -= step
            if abs(step) < 0.25 * SOLVE_TOL:
                break
        xs[j + 1] = x
    return NeutralOrbit(params=params, points=xs)


@dataclass(frozen=True)
class ReturnPartition:
    """First-return structure on J0 = (x1, 1].

    y_1 = 1 > y_2 > ... > y_{M+1} > x1 with f(y_j) = x_{j-1}; the return
    time to J0 equals j exactly on I_j = (y_{j+1}, y_j], and f^j maps I_j
    onto J0.
    """

    params: MapParams
    y: np.ndarray  # y_1 .. y_{M+1} (descending)
    orbit: NeutralOrbit  # x_0 .. x_M at least

    @property
    def depth(self) -> int:
        """Largest j for which I_j = (y_{j+1}, y_j] is materialized."""
        return len(self.y) - 1

    def interval(self, j: int) -> tuple[float, float]:
        """Endpoints (y_{j+1}, y_j) of I_j, 1-indexed."""
        if not 1 <= j <= self.depth:
            raise IndexError(f"I_{j} not materialized (depth {self.depth})")
        return float(self.y[j]), float(self.y[j - 1])


def return_partition(params: MapParams, m: int) -> ReturnPartition:
    """Materialize y_1 .. y_{m+1} by pulling the neutral orbit through the
    right branch: y_j = inv_right(x_{j-1})."""
    if m < 1:
        raise ValueError("partition depth must be >= 1")
    orbit = neutral_orbit(params, m + 1)
    y = np.empty(m + 1)
    y[0] = 1.0  # y_1: f(1) = 1 = x_0
    y[1:] = inv_right_many(params, orbit.points[1 : m + 1])
    return ReturnPartition(params=params, y=y, orbit=orbit)


class PartitionDepthError(RuntimeError):
    """Return time exceeds the materialized partition depth."""


def return_time(partition: ReturnPartition, x: float) -> int:
    """Return time m(x) for x in J0: m(x) = j iff x in I_j = (y_{j+1}, y_j]."""
    params = partition.params
    if not params.x1 < x <= 1.0:
        raise ValueError(f"x={x} not in J0=({params.x1}, 1]")
    y = partition.y
    if x <= y[-1]:
        raise PartitionDepthError(
            f"x={x} lies below y_{len(y)}: extend the partition depth"
        )
    # y is descending; x in I_j means y_{j+1} < x <= y_j. The first index
    # with y[idx] < x (strict) is exactly j in 1-indexed terms.
    return int(np.searchsorted(-y, -x, side="right"))


def first_return(partition: ReturnPartition, x: float) -> float:
    """F(x) = f^{m(x)}(x), the first-return map on J0."""
    m = return_time(partition, x)
    z = x
    for _ in range(m):
        z = eval_map(partition.params, z)
    return float(z)


@dataclass(frozen=True)
class Cylinder:
    """A length-n itinerary cylinder: closure of the set of points whose
    first n symbols under {left, right} branch coding match ``itinerary``."""

    itinerary: tuple[int, ...]
    left: float
    right: float

    @property
    def interval(self) -> tuple[float, float]:
        return (self.left, self.right)

    @property
    def width(self) -> float:
        return self.right - self.left


def cylinder_endpoints(params: MapParams, n: int) -> np.ndarray:
    """The 2^n + 1 sorted endpoints of the level-n cylinder tiling.

    Built by E_{k+1} = inv_left(E_k) ++ inv_right(E_k)[1:]: each branch
    inverse maps the level-k tiling into its branch, and the two blocks
    share the endpoint x1. Position-sorted cylinder i at level n has
    itinerary equal to the n-bit binary expansion of i, MSB first.
    """
    if not 1 <= n <= MAX_DEPTH:
        raise ValueError(f"depth must be within [1, {MAX_DEPTH}]")
    e = np.array([0.0, params.x1, 1.0])
    for _ in range(n - 1):
        left = inv_left_many(params, e)
        # inv_right is undefined at 0; the right-branch block starts at x1.
        right = inv_right_many(params, e[1:])
        e = np.concatenate([left, right])
    return e


def cylinders(params: MapParams, n: int, prefix: tuple[int, ...] = ()) -> list[Cylinder]:
    """All 2^n cylinders of length n, sorted by position.

    The position-sorted cylinder at index i has itinerary equal to the n-bit
    binary expansion of i (most significant bit first). ``prefix`` restricts
    enumeration to cylinders whose itinerary starts with it — the
    divide-by-prefix hook for parallel reductions.
    """
    e = cylinder_endpoints(params, n)
    out = []
    lo = 0
    hi = 2**n
    if prefix:
        if len(prefix) > n or any(b not in (0, 1) for b in prefix):
            raise ValueError("prefix must be a 0/1 word no longer than n")
        base = 0
        for b in prefix:
            base = (base << 1) | b
        lo = base << (n - len(prefix))
        hi = lo + (1 << (n - len(prefix)))
    for i in range(lo, hi):
        word = tuple((i >> (n - 1 - k)) & 1 for k in range(n))
        out.append(Cylinder(itinerary=word, left=float(e[i]), right=float(e[i + 1])))
    return out


def cylinder_for(params: MapParams, itinerary: tuple[int, ...]) -> Cylinder:
    """The single cylinder for an itinerary, by pulling [0, 1] back branch
    by branch (right-to-left through the word)."""
    if not itinerary or any(b not in (0, 1) for b in itinerary):
        raise ValueError("itinerary must be a nonempty 0/1 word")
    lo, hi = 0.0, 1.0
    for b in reversed(itinerary):
        if b == 0:
            lo, hi = inv_left(params, lo), inv_left(params, hi)
        else:
            if lo == 0.0:
                lo_pull = params.x1  # right branch covers (0, 1]: preimage of 0 is the branch point limit
            else:
                lo_pull = inv_right(params, lo)
            lo, hi = lo_pull, inv_right(params, hi)
    return Cylinder(itinerary=tuple(itinerary), left=lo, right=hi)


def preimages(params: MapParams, x: float, n: int) -> np.ndarray:
    """All n-th preimages of x, sorted ascending.

    One preimage per length-n itinerary — 2^n points — except that the right
    branch never maps to 0, so pullbacks of 0 lose their right-branch copy.
    """
    if not 0 < x <= 1:
        raise ValueError("preimages requires x in (0, 1]")
    if not 1 <= n <= MAX_DEPTH:
        raise ValueError(f"depth must be within [1, {MAX_DEPTH}]")
    pts = np.array([x], dtype=float)
    for _ in range(n):
        left = inv_left_many(params, pts)
        pos = pts[pts > 0]
        right = inv_right_many(params, pos) if len(pos) else np.empty(0)
        pts = np.concatenate([left, right])
    return np.sort(pts)
