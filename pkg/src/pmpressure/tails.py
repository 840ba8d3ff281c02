"""Certified bounds on the neutral orbit beyond any computed depth, and the
closed-form series tails built from them.

Writing u_n = x_n^(-alpha) for the orbit x_0 = 1 > x_1 > ... accumulating at
the neutral fixed point, the recursion x_n = x_{n+1} (1 + x_{n+1}^alpha)
pinches the increment u_{n+1} - u_n between alpha*c and alpha:

    (1 - (1+t)^(-alpha)) / t  with t = x_{n+1}^alpha
        <= alpha              (concavity of t -> 1 - (1+t)^(-alpha))
        >= alpha (1 - (alpha+1) t / 2)   (second-order Taylor remainder)

so beyond a computed depth M the orbit is enclosed by explicit envelopes,
and power sums such as sum_{n>M} x_n^gamma admit closed-form bounds by
integral comparison. These are the only facts the certified series tails in
the pressure engines rely on.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincc, gammaln

from .map_kernel import MapParams, neutral_orbit

__all__ = ["NeutralTailBounds", "neutral_tail_bounds", "log_stretched_exp_sum_upper"]


@dataclass(frozen=True)
class NeutralTailBounds:
    """Orbit envelope beyond depth M: lower_x(n) <= x_n <= upper_x(n)."""

    params: MapParams
    depth: int
    x_exact: np.ndarray = field(repr=False)  # x_0 .. x_depth
    u_depth: float = 0.0
    c_depth: float = 0.0

    def lower_x(self, n):
        """Certified lower bound on x_n, valid for every n >= depth."""
        a = self.params.alpha
        k = np.asarray(n, dtype=float) - self.depth
        return (self.u_depth + a * k) ** (-1.0 / a)

    def upper_x(self, n):
        """Certified upper bound on x_n, valid for every n >= depth."""
        a = self.params.alpha
        k = np.asarray(n, dtype=float) - self.depth
        return (self.u_depth + a * self.c_depth * k) ** (-1.0 / a)

    # -- power-sum tails ------------------------------------------------

    def power_sum_upper(self, gamma: float) -> float:
        """Certified upper bound on sum_{n > depth} x_n^gamma.

        Infinite when gamma <= alpha (the true sum diverges there).
        """
        a = self.params.alpha
        q = gamma / a
        if q <= 1.0:
            return float("inf")
        # sum_{k>=1} (u + a c k)^(-q) <= integral_0^inf = u^(1-q)/(a c (q-1))
        return self.u_depth ** (1.0 - q) / (a * self.c_depth * (q - 1.0))

    def power_sum_lower_partial(self, gamma: float, count) -> np.ndarray:
        """Certified lower bound on sum_{m=depth+1}^{depth+count} x_m^gamma.

        Uses the lower envelope inside the decreasing summand and an
        integral comparison from below; vectorized over `count`.
        """
        a = self.params.alpha
        q = gamma / a
        u = self.u_depth
        kk = np.asarray(count, dtype=float)
        top = u + a * (kk + 1.0)
        bot = u + a
        if abs(q - 1.0) < 1e-12:
            return np.log(top / bot) / a
        return (top ** (1.0 - q) - bot ** (1.0 - q)) / (a * (1.0 - q))

    def log_df_sum_lower_partial(self, count) -> np.ndarray:
        """Certified lower bound on sum_{m=depth+1}^{depth+count}
        log Df(x_m), via log(1+v) >= v (1 - v/2) and the power-sum bound."""
        a = self.params.alpha
        v1 = (1 + a) * float(self.lower_x(self.depth + 1)) ** a
        damp = max(0.0, 1.0 - v1 / 2.0)
        return (1 + a) * damp * self.power_sum_lower_partial(a, count)


def neutral_tail_bounds(params: MapParams, depth: int) -> NeutralTailBounds:
    """Compute the exact orbit to `depth` and package the tail envelopes."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    a = params.alpha
    orbit = neutral_orbit(params, depth)
    x_m = float(orbit.points[-1])
    c = 1.0 - (a + 1.0) * x_m**a / 2.0
    if c <= 0.0:
        raise ValueError(f"depth {depth} too shallow for an upper envelope")
    return NeutralTailBounds(
        params=params,
        depth=depth,
        x_exact=orbit.points,
        u_depth=x_m ** (-a),
        c_depth=c,
    )


def _log_upper_incomplete_gamma(s: float, x: float) -> float:
    """log of an upper bound on Gamma(s, x) = integral_x^inf t^{s-1} e^{-t} dt.

    Uses the exact value via the regularized function when it is
    representable; far in the tail (where it underflows) switches to the
    integration-by-parts bound Gamma(s, x) <= x^{s-1} e^{-x} / (1 - (s-1)/x),
    valid for x > s - 1 (which always holds once the exact value underflows).
    """
    exact = gammaincc(s, x)
    if exact > 0:
        return float(gammaln(s) + np.log(exact))
    return float((s - 1.0) * np.log(x) - x - np.log1p(-(s - 1.0) / x))


def log_stretched_exp_sum_upper(b: float, p: float, v1: float, step: float) -> float:
    """Log of a certified upper bound on the sum over the grid
    v1, v1+step, v1+2*step, ... of exp(-b v^p), for b > 0 and 0 < p < 1.

    Decreasing summand: sum <= first term + (1/step) integral_{v1}^inf,
    and the integral has the closed form (1/p) b^(-1/p) Gamma(1/p, b v1^p)
    with Gamma the upper incomplete gamma function.  Returned in log scale
    because the sum underflows double precision long before it stops
    mattering to series roots near s = 1.
    """
    if not (b > 0 and 0 < p < 1 and v1 > 0 and step > 0):
        raise ValueError("need b > 0, 0 < p < 1, v1 > 0, step > 0")
    log_first = -b * v1**p
    log_integral = (
        -np.log(p)
        - np.log(b) / p
        + _log_upper_incomplete_gamma(1.0 / p, b * v1**p)
    )
    return float(np.logaddexp(log_first, log_integral - np.log(step)))
