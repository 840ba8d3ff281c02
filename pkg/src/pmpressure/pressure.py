"""Pressure estimators with certified brackets.

Three engines compute the topological pressure P(phi) = sup over invariant
measures of entropy plus the integral of the potential:

* **Cylinder sums with Fekete bracketing** — the sup-weighted partition sums
  over depth-n itinerary cylinders are submultiplicative (and the
  inf-weighted ones supermultiplicative) because the binary itinerary coding
  is a full shift: every concatenation of cylinders is nonempty.  Hence
  (1/n) log Z_n^sup is a certified upper bound and (1/n) log Z_n^inf a
  certified lower bound at every finite n.

* **Preimage sums** — the diagnostic estimator (1/n) log sum over n-th
  preimages of exp(S_n(phi)); no convergence rate is available, so this
  engine never claims a certificate.

* **Induced renewal series** — weights over the first-return partition
  {I_j} of J_0 = (x_1, 1].  With W(s) = sum_j wsup_j s^j built from
  branch-wise suprema (plus a closed-form tail from the neutral-orbit
  envelopes), W(s) <= 1 certifies P <= phi(0) - log s; with V(s) built from
  infima, V(s) >= 1 certifies P >= phi(0) - log s.  The heterogeneous word
  tree refines both sides by splitting return words adaptively while
  keeping every leaf's weight in the accounting, so the refined family is
  simultaneously a complete cover (sup side) and a disjoint packing
  (inf side).

Endpoint exactness: every built-in potential atom is monotone and both map
branches are increasing, so Birkhoff sums over a cylinder split into a
nonincreasing plus a nondecreasing part whose extrema sit at the cylinder
endpoints.  Sup/inf enclosures are therefore exact for built-in atoms;
tabulated atoms contribute declared-seminorm slack instead.

Certificates here mean: valid bounds up to floating-point rounding, with a
1e-12 safety margin applied on every series comparison against 1.

Lower bounds near phi(0) are additionally reported as gaps (bounds on
P - phi(0)): for strongly contracting potentials the certified gap can be
far below the resolution of ``phi(0) + gap`` in double precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import logsumexp

from .map_kernel import (
    MapParams,
    cylinder_endpoints,
    inv_left_many,
    inv_right_many,
    neutral_orbit,
    return_partition,
)
from .potentials import Const, NegLogDf, Omega, Potential, Tabulated, eval_potential
from .tails import NeutralTailBounds, log_stretched_exp_sum_upper, neutral_tail_bounds

__all__ = [
    "PressureBracket",
    "InducedSeries",
    "TailPolicy",
    "BracketInconsistencyError",
    "partition_sums",
    "pressure_cylinder",
    "pressure_preimage",
    "induced_series",
    "pressure_induced",
    "pressure",
    "InducedLetters",
    "WordTree",
]

_MARGIN = 1e-12  # safety pad on every certified comparison against 1
_ROOT_ITERS = 60


class BracketInconsistencyError(RuntimeError):
    """Certified lower and upper bounds crossed: a bug or an invalid
    declared seminorm on a tabulated atom."""


@dataclass(frozen=True)
class TailPolicy:
    """How the part of the induced series beyond the computed depth is
    handled: 'truncate-flagged' (no certificate on the sup side) or
    'analytic-tail' (closed-form dominated, certificates valid)."""

    kind: str
    description: str = ""

    @staticmethod
    def truncate_flagged() -> "TailPolicy":
        return TailPolicy(kind="truncate-flagged")

    @staticmethod
    def analytic(description: str) -> "TailPolicy":
        return TailPolicy(kind="analytic-tail", description=description)


@dataclass(frozen=True)
class InducedSeries:
    """First-return weight sequences: weights_sup[j-1] and weights_inf[j-1]
    bracket sup/inf over I_j of exp(S_j(phi) - j phi(0)) for j = 1..M."""

    weights_sup: np.ndarray = field(repr=False)
    weights_inf: np.ndarray = field(repr=False)
    tail_policy: TailPolicy

    def __post_init__(self) -> None:
        ws, wi = self.weights_sup, self.weights_inf
        if ws.shape != wi.shape:
            raise ValueError("weight sequences must align")
        if np.any(wi > ws * (1 + 1e-12)):
            raise ValueError("weights_inf must not exceed weights_sup")


@dataclass(frozen=True)
class PressureBracket:
    """Certified enclosure of P(phi).

    ``lower_gap`` / ``upper_gap`` are certified bounds on P(phi) - phi(0);
    they carry more precision than ``lower``/``upper`` when the gap is tiny.
    ``lower_gap_log`` is the log of the certified positive gap (-inf when no
    positive gap is certified): for strongly contracting potentials the gap
    can be far below the smallest positive double, so only its log is
    representable.  ``upper_gap`` is None when no certified upper bound
    exists (pruned).  ``stationary`` marks a certified series test sum < 1
    at s = 1.
    """

    lower: float
    upper: float
    method: str  # CylinderFekete | InducedRenewal | Combined
    n_used: int
    pruned: bool = False
    notes: str = ""
    lower_gap: float = 0.0
    upper_gap: float | None = None
    stationary: bool = False
    lower_gap_log: float = -math.inf

    def __post_init__(self) -> None:
        if self.lower > self.upper + 1e-9:
            raise BracketInconsistencyError(
                f"bracket sides crossed: {self.lower} > {self.upper} ({self.notes})"
            )

    @property
    def width(self) -> float:
        return self.upper - self.lower


# ---------------------------------------------------------------------------
# monotone split of a potential
# ---------------------------------------------------------------------------


class _Split:
    """Evaluators for the monotone decomposition of a potential, all
    normalized to vanish at 0 (psi = part - part(0))."""

    def __init__(self, phi: Potential, params: MapParams, gamma: float | None):
        self.params = params
        self.phi = phi
        dec, inc, tab = phi.split()
        self.dec_terms = dec
        self.inc_terms = inc
        self.tab_terms = tab
        self.phi0 = eval_potential(phi, params, 0.0)
        self.has_tab = bool(tab)
        if tab:
            gammas = [a.declared_gamma for _, a in tab]
            self.tab_gamma = min(gammas) if gamma is None else min(gamma, *gammas)
            self.tab_seminorm = sum(
                abs(c) * a.declared_seminorm for c, a in tab
            )
        else:
            self.tab_gamma = 1.0
            self.tab_seminorm = 0.0

    def _zeroed(self, terms, x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x)
        zero = np.zeros(1)
        for c, atom in terms:
            out += c * (atom.evaluate(self.params, x) - atom.evaluate(self.params, zero)[0])
        return out

    def dec(self, x) -> np.ndarray:
        """Nonincreasing part, zero at 0."""
        return self._zeroed(self.dec_terms, np.asarray(x, dtype=float))

    def inc(self, x) -> np.ndarray:
        """Nondecreasing part, zero at 0."""
        return self._zeroed(self.inc_terms, np.asarray(x, dtype=float))

    def tab(self, x) -> np.ndarray:
        return self._zeroed(self.tab_terms, np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# cylinder engine
# ---------------------------------------------------------------------------


def _cylinder_sums_from_endpoints(
    split: _Split, endpoints: np.ndarray, n: int
) -> tuple[float, float]:
    """(log Z_n^sup, log Z_n^inf) given the level-n endpoint array.

    The level-l endpoints are ``endpoints[::2**(n-l)]``, and the j-th image
    of cylinder i is the level-(n-j) cylinder ``i mod 2**(n-j)``, so each
    orbit level contributes a tiled slice of the coarser endpoint array.
    The nonincreasing part is maximal at left endpoints, the nondecreasing
    part at right endpoints; both attained simultaneously, so the enclosure
    is exact for built-in atoms.  Tabulated parts use endpoint extrema plus
    declared-seminorm slack in the cylinder image widths.
    """
    size = 1 << n
    sup_acc = np.zeros(size)
    inf_acc = np.zeros(size)
    for level in range(n, 0, -1):
        pts = endpoints[:: 1 << (n - level)]
        reps = 1 << (n - level)
        left = pts[:-1]
        right = pts[1:]
        dec_l, dec_r = split.dec(left), split.dec(right)
        inc_l, inc_r = split.inc(left), split.inc(right)
        sup_lvl = dec_l + inc_r
        inf_lvl = dec_r + inc_l
        if split.has_tab:
            t_l, t_r = split.tab(left), split.tab(right)
            slack = split.tab_seminorm * (right - left) ** split.tab_gamma
            sup_lvl = sup_lvl + np.maximum(t_l, t_r) + slack
            inf_lvl = inf_lvl + np.minimum(t_l, t_r) - slack
        sup_acc += np.tile(sup_lvl, reps)
        inf_acc += np.tile(inf_lvl, reps)
    return float(logsumexp(sup_acc)), float(logsumexp(inf_acc))


def partition_sums(
    phi: Potential, params: MapParams, gamma: float, n: int
) -> tuple[float, float]:
    """(log Z_n^sup, log Z_n^inf): log-sum-exp over all depth-n cylinders of
    certified sup/inf enclosures of S_n(phi).

    Note the enclosures are normalized by the potential itself (not by
    phi(0)); both values include the full Birkhoff sums.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    split = _Split(phi, params, gamma)
    endpoints = cylinder_endpoints(params, n)
    shift = n * split.phi0  # _Split evaluators are zeroed at 0
    zs, zi = _cylinder_sums_from_endpoints(split, endpoints, n)
    return zs + shift, zi + shift


def pressure_cylinder(
    phi: Potential, params: MapParams, gamma: float, n_max: int
) -> PressureBracket:
    """Fekete bracket: upper = min_n (1/n) log Z_n^sup over n <= n_max,
    lower = max_n (1/n) log Z_n^inf.  Certified at every finite depth, but
    the bracket can stay wide near the neutral fixed point (slowly falling
    sup weights along the laminar cylinder); the induced engine is the
    sharper authority there.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    split = _Split(phi, params, gamma)
    endpoints = cylinder_endpoints(params, n_max)
    upper = math.inf
    lower = -math.inf
    for n in range(1, n_max + 1):
        pts = endpoints[:: 1 << (n_max - n)]
        zs, zi = _cylinder_sums_from_endpoints(split, pts, n)
        zs += n * split.phi0
        zi += n * split.phi0
        upper = min(upper, zs / n)
        lower = max(lower, zi / n)
    gap = lower - split.phi0
    return PressureBracket(
        lower=lower,
        upper=upper,
        method="CylinderFekete",
        n_used=n_max,
        lower_gap=max(gap, 0.0),
        upper_gap=upper - split.phi0,
        notes=f"fekete depths 1..{n_max}",
        lower_gap_log=math.log(gap) if gap > 0 else -math.inf,
    )


def pressure_preimage(
    phi: Potential, params: MapParams, n_max: int, base_x: float = 1.0
) -> list[tuple[int, float]]:
    """Diagnostic sequence (1/n) log sum_{f^n(x') = base_x} exp(S_n(phi)(x')).

    No certificate: no convergence rate is available for this estimator.
    """
    if not 0 < base_x <= 1:
        raise ValueError("base_x must lie in (0, 1]")
    pts = np.array([base_x])
    sums = np.zeros(1)
    out = []
    for n in range(1, n_max + 1):
        left = inv_left_many(params, pts)
        right = inv_right_many(params, pts)
        pts = np.concatenate([left, right])
        sums = np.tile(sums, 2)
        sums += eval_potential(phi, params, pts)
        out.append((n, float(logsumexp(sums)) / n))
    return out


# ---------------------------------------------------------------------------
# induced renewal engine
# ---------------------------------------------------------------------------


class InducedLetters:
    """Exact endpoint weights of the first-return letters j = 1..depth plus
    certified closed-form series tails beyond the depth.

    log_wsup[j] / log_winf[j] (1-based) are the logs of the bracketing
    weights of exp(S_j(phi) - j phi(0)) over I_j.
    """

    def __init__(
        self,
        phi: Potential,
        params: MapParams,
        depth: int,
        gamma: float | None = None,
    ):
        if depth < 1:
            raise ValueError("depth must be >= 1")
        self.phi = phi
        self.params = params
        self.depth = depth
        self.split = _Split(phi, params, gamma)
        self.partition = return_partition(params, depth)
        self.tb: NeutralTailBounds = neutral_tail_bounds(params, depth)

        xs = self.partition.orbit.points  # x_0 .. x_depth
        ys = self.partition.y  # ys[k] = y_{k+1}
        sp = self.split
        dec_x, inc_x = sp.dec(xs), sp.inc(xs)
        dec_y, inc_y = sp.dec(ys), sp.inc(ys)
        cum_dec = np.concatenate([[0.0], np.cumsum(dec_x[1:])])  # sum_{m<=j}
        cum_inc = np.concatenate([[0.0], np.cumsum(inc_x[1:])])
        j = np.arange(1, depth + 1)
        # sup at left endpoint y_{j+1}, inf at right endpoint y_j
        self.log_wsup = (
            dec_y[j] + (cum_dec[j] - cum_dec[1]) + inc_y[j - 1] + cum_inc[j - 1]
        )
        self.log_winf = (
            dec_y[j - 1] + cum_dec[j - 1] + inc_y[j] + (cum_inc[j] - cum_inc[1])
        )
        if sp.has_tab:
            t_x, t_y = sp.tab(xs), sp.tab(ys)
            pair_max = np.maximum(t_x[1:depth], t_x[2 : depth + 1])
            pair_min = np.minimum(t_x[1:depth], t_x[2 : depth + 1])
            pair_w = (xs[1:depth] - xs[2 : depth + 1]) ** sp.tab_gamma
            cum_max = np.concatenate([[0.0], np.cumsum(pair_max)])
            cum_min = np.concatenate([[0.0], np.cumsum(pair_min)])
            cum_w = np.concatenate([[0.0], np.cumsum(pair_w)])
            own_max = np.maximum(t_y[j], t_y[j - 1])
            own_min = np.minimum(t_y[j], t_y[j - 1])
            own_w = (ys[j - 1] - ys[j]) ** sp.tab_gamma
            slack = sp.tab_seminorm * (own_w + cum_w[j - 1])
            self.log_wsup = self.log_wsup + own_max + cum_max[j - 1] + slack
            self.log_winf = self.log_winf + own_min + cum_min[j - 1] - slack
        self.tail_ok = not sp.has_tab
        self._prepare_tails(xs, cum_dec, cum_inc)

    # -- analytic tails ------------------------------------------------

    def _prepare_tails(self, xs, cum_dec, cum_inc) -> None:
        sp, tb, m = self.split, self.tb, self.depth
        a = self.params.alpha
        x1 = float(xs[1])
        if not self.tail_ok:
            self.log_floor = -math.inf
            return
        # universal geometric handle: log wsup_j <= geo_const + (j-1-m)*delta
        self._geo_const = float(
            sp.dec(x1)[()]
            + (cum_dec[m] - cum_dec[1])
            + sp.inc(1.0)[()]
            + cum_inc[m]
        )
        self._delta = float(sp.inc(xs[m])[()])
        # sharp tail candidates need every nondecreasing atom summable
        inc_over = 0.0
        for c, atom in sp.inc_terms:
            if isinstance(atom, Omega):
                inc_over += abs(c) * tb.power_sum_upper(atom.gamma)
            elif isinstance(atom, NegLogDf):
                inc_over += math.inf
        self._sharp: list[tuple[float, float]] = []  # (log prefactor, ignored)
        u = tb.u_depth
        if np.isfinite(inc_over):
            base = self._geo_const + inc_over
            for c, atom in sp.dec_terms:
                if isinstance(atom, Const) or c == 0:
                    continue
                if isinstance(atom, Omega):
                    q = atom.gamma / a
                    if q < 1 - 1e-12:
                        p = 1.0 - q
                        b = c / (a * p)
                        log_s_sum = log_stretched_exp_sum_upper(b, p, u + a, a)
                        self._sharp.append((base + b * (u + a) ** p + log_s_sum, 0.0))
                    elif q < 1 + 1e-12:
                        r = c / a
                        if r > 1 + 1e-9:
                            s_sum = 1.0 + (u + a) / (a * (r - 1.0))
                            self._sharp.append((base + math.log(s_sum), 0.0))
                elif isinstance(atom, NegLogDf):
                    v1 = (1 + a) * float(tb.lower_x(m + 1)) ** a
                    kappa = (1 + a) * max(0.0, 1.0 - v1 / 2.0)
                    r = c * kappa / a
                    if r > 1 + 1e-9:
                        s_sum = 1.0 + (u + a) / (a * (r - 1.0))
                        self._sharp.append((base + math.log(s_sum), 0.0))
        # certified positive floor under every inf weight beyond depth
        floor_tail = 0.0
        for c, atom in sp.dec_terms:
            if isinstance(atom, Const) or c == 0:
                continue
            if isinstance(atom, Omega):
                floor_tail -= c * tb.power_sum_upper(atom.gamma)
            elif isinstance(atom, NegLogDf):
                floor_tail = -math.inf
        self.log_floor = float(
            sp.dec(1.0)[()]
            + cum_dec[m]
            + floor_tail
            + sp.inc(x1)[()]
            + (cum_inc[m] - cum_inc[1])
        )

    def log_sup_tail(self, log_s: float, start: int) -> float:
        """Certified upper bound on log sum_{j > start} wsup_j s^j."""
        if start > self.depth:
            raise ValueError("start beyond computed depth")
        pieces = []
        if start < self.depth:
            j = np.arange(start + 1, self.depth + 1)
            pieces.append(float(logsumexp(self.log_wsup[start:] + j * log_s)))
        if not self.tail_ok:
            return math.inf
        m = self.depth
        beyond = []
        if log_s + self._delta < -1e-15:
            beyond.append(
                self._geo_const
                + (m + 1) * log_s
                - math.log1p(-math.exp(log_s + self._delta))
            )
        if log_s <= 1e-15:
            for log_pref, _ in self._sharp:
                beyond.append(log_pref + (m + 1) * log_s)
        pieces.append(min(beyond) if beyond else math.inf)
        return float(logsumexp(pieces))

    def log_inf_tail_t(self, t: float, start: int) -> float:
        """Certified lower bound on log sum_{j > start} winf_j e^{-p j} at
        p = e^t.  Working in t = log p keeps the bound evaluable for gaps
        far below the smallest positive double."""
        if start > self.depth:
            raise ValueError("start beyond computed depth")
        p = math.exp(t)  # may underflow to 0; products below stay sound
        pieces = []
        if start < self.depth:
            j = np.arange(start + 1, self.depth + 1)
            pieces.append(float(logsumexp(self.log_winf[start:] - j * p)))
        if self.log_floor > -math.inf:
            # sum_{j>m} e^{-pj} = e^{-p(m+1)}/(1-e^{-p}) >= e^{-p(m+1)}/p
            pieces.append(self.log_floor - p * (self.depth + 1) - t)
        if not pieces:
            return -math.inf
        return float(logsumexp(pieces))

    def log_cover(self, log_s: float, letters: int | None = None) -> float:
        """log W(s): complete certified cover value of the letter series."""
        cut = self.depth if letters is None else min(letters, self.depth)
        j = np.arange(1, cut + 1)
        head = float(logsumexp(self.log_wsup[:cut] + j * log_s))
        return float(np.logaddexp(head, self.log_sup_tail(log_s, cut)))

    def log_packing_t(self, t: float, letters: int | None = None) -> float:
        """log V at s = e^{-p}, p = e^t: certified disjoint-packing value."""
        cut = self.depth if letters is None else min(letters, self.depth)
        j = np.arange(1, cut + 1)
        head = float(logsumexp(self.log_winf[:cut] - j * math.exp(t)))
        return float(np.logaddexp(head, self.log_inf_tail_t(t, cut)))

    def norm_bound(self) -> float:
        """Crude upper bound on sup |phi - phi(0)| used to size root searches."""
        sp = self.split
        grid = np.linspace(0.0, 1.0, 257)
        vals = np.abs(sp.dec(grid)) + np.abs(sp.inc(grid))
        if sp.has_tab:
            vals = vals + np.abs(sp.tab(grid)) + sp.tab_seminorm
        return float(np.max(vals)) + 1.0


def _largest_log_s_cover_le_1(log_cover_fn, norm: float) -> float | None:
    """Largest log s (<= 0) with certified W(s) <= 1; None if W(1) <= 1."""
    if log_cover_fn(0.0) <= -_MARGIN:
        return None
    lo = -(norm + math.log(2.0) + 5.0)
    while log_cover_fn(lo) > -_MARGIN:
        lo *= 2.0
        if lo < -1e6:  # pragma: no cover - weights are finite
            raise RuntimeError("no certified cover root found")
    hi = 0.0
    for _ in range(_ROOT_ITERS):
        mid = 0.5 * (lo + hi)
        if log_cover_fn(mid) <= -_MARGIN:
            lo = mid
        else:
            hi = mid
    return lo


def _largest_t_packing_ge_1(
    log_packing_t_fn, p_hi: float, log_floor: float
) -> float:
    """Largest certified t = log p with V(e^{-e^t}) >= 1; -inf if none.

    When a positive floor sits under the inf weights the packing diverges as
    p -> 0, so a root always exists; the probe range is stretched down to
    where the floor term alone certifies V > 1.
    """
    t_lo = -744.0
    if log_floor > -math.inf:
        t_lo = min(t_lo, log_floor - 5.0)
    t_hi = math.log(p_hi)
    if log_packing_t_fn(t_lo) < _MARGIN:
        return -math.inf
    if log_packing_t_fn(t_hi) >= _MARGIN:  # pragma: no cover - p_hi oversized
        return t_hi
    for _ in range(_ROOT_ITERS):
        t_mid = 0.5 * (t_lo + t_hi)
        if log_packing_t_fn(t_mid) >= _MARGIN:
            t_lo = t_mid
        else:
            t_hi = t_mid
    return t_lo


def induced_series(
    phi: Potential, params: MapParams, M: int, gamma: float | None = None
) -> InducedSeries:
    """Bracketing weight sequences over return times j = 1..M.

    The tail policy is analytic when every atom is built-in (closed-form
    dominated tails from the neutral-orbit envelopes), truncate-flagged when
    tabulated atoms are present.
    """
    letters = InducedLetters(phi, params, M, gamma)
    if letters.tail_ok:
        policy = TailPolicy.analytic(
            "neutral-orbit envelope tails (geometric and power-law forms)"
        )
    else:
        policy = TailPolicy.truncate_flagged()
    return InducedSeries(
        weights_sup=np.exp(letters.log_wsup),
        weights_inf=np.exp(letters.log_winf),
        tail_policy=policy,
    )


def _induced_bracket_from_letters(
    letters: InducedLetters, n_used: int
) -> PressureBracket:
    phi0 = letters.split.phi0
    norm = letters.norm_bound()
    gap_log = _largest_t_packing_ge_1(
        letters.log_packing_t,
        p_hi=2 * norm + math.log(2.0) + 5.0,
        log_floor=letters.log_floor,
    )
    lower_gap = math.exp(gap_log) if gap_log > -math.inf else 0.0
    notes = []
    stationary = False
    pruned = False
    if letters.tail_ok:
        root = _largest_log_s_cover_le_1(letters.log_cover, norm)
        if root is None:
            stationary = True
            upper_gap: float | None = 0.0
            notes.append("StationaryCertified: series test sum < 1 at s = 1")
        else:
            upper_gap = -root
    else:
        pruned = True
        notes.append("tabulated atoms: truncated series, sup side not certified")
        root = _largest_log_s_cover_le_1(letters.log_cover, norm)
        upper_gap = None if root is None else -root  # heuristic value
    upper = phi0 + (upper_gap if upper_gap is not None else math.inf)
    if pruned and upper_gap is not None:
        notes.append(f"heuristic upper {upper:.6g}")
        upper = math.inf
    return PressureBracket(
        lower=phi0 + lower_gap,
        upper=max(upper, phi0 + lower_gap),
        method="InducedRenewal",
        n_used=n_used,
        pruned=pruned,
        notes="; ".join(notes),
        lower_gap=lower_gap,
        upper_gap=None if pruned else upper_gap,
        stationary=stationary,
        lower_gap_log=gap_log,
    )


def pressure_induced(
    phi: Potential, params: MapParams, M: int = 10_000, gamma: float | None = None
) -> PressureBracket:
    """Renewal-series bracket for P(phi) from the first M return letters.

    Solves W(s) = 1 (sup weights, certified tail) for the upper side and
    V(s) = 1 (inf weights) for the lower side; P = phi(0) - log s.  When the
    complete sup series at s = 1 stays below 1 the certified degenerate
    bracket [phi(0), phi(0)] is returned with the stationary flag.  If the
    packing has no root the lower side falls back to the always-valid
    P >= phi(0) (the point mass at the neutral fixed point).
    """
    return _induced_bracket_from_letters(
        InducedLetters(phi, params, M, gamma), n_used=M
    )


# ---------------------------------------------------------------------------
# heterogeneous word tree
# ---------------------------------------------------------------------------


class WordTree:
    """Adaptive refinement of the return-word renewal series.

    Maintains a prefix-free complete family of return words.  Expanding a
    word w prepends every letter a <= A, computing the children's endpoint
    Birkhoff components exactly (child endpoints map onto the parent's, so
    composition is lossless); dropped letters a > A are retained through the
    per-letter tail series, scaled by w's weight (valid by the endpoint
    enclosures' sub/supermultiplicativity).  Every leaf keeps both its sup
    and inf weight, so the family certifies upper bounds (cover) and lower
    bounds (packing) simultaneously at any evaluation point s.
    """

    def __init__(
        self,
        phi: Potential,
        params: MapParams,
        letters: int = 48,
        depth: int = 4096,
        gamma: float | None = None,
    ):
        self.letters_data = InducedLetters(phi, params, depth, gamma)
        if self.letters_data.split.has_tab:
            raise ValueError("word tree requires a tabulated-free potential")
        self.params = params
        self.A = min(letters, depth)
        self.split = self.letters_data.split
        x1 = params.x1
        # active leaf arrays (the initial leaves are the single letters)
        sd, si, ends = self._letter_tables(np.array([x1, 1.0]))
        a = np.arange(1, self.A + 1)
        self.n = a.copy()
        self.zl = ends[:, 0].copy()
        self.zh = ends[:, 1].copy()
        self.sdL = sd[:, 0].copy()  # nonincreasing part at left endpoint
        self.sdR = sd[:, 1].copy()
        self.siL = si[:, 0].copy()
        self.siR = si[:, 1].copy()
        # root's dropped letters a > A
        self.exp_sup: dict[int, float] = {0: 0.0}  # log sums by word length n
        self.exp_inf: dict[int, float] = {0: 0.0}
        self.bucket_sup: dict[int, float] = {}
        self.bucket_inf: dict[int, float] = {}
        self.expansions = 0

    # -- letter tables ---------------------------------------------------

    def _letter_tables(self, targets: np.ndarray):
        """For each letter a = 1..A and target y: the letter's monotone-part
        Birkhoff components of the branch landing on y, and the pulled-back
        endpoint F_a^{-1}(y).  Shapes (A, len(targets))."""
        sp = self.split
        p = self.params
        k = len(targets)
        sd = np.empty((self.A, k))
        si = np.empty((self.A, k))
        ends = np.empty((self.A, k))
        chain = targets.astype(float)
        cum_d = np.zeros(k)
        cum_i = np.zeros(k)
        for a in range(1, self.A + 1):
            back = inv_right_many(p, chain)
            sd[a - 1] = sp.dec(back) + cum_d
            si[a - 1] = sp.inc(back) + cum_i
            ends[a - 1] = back
            if a < self.A:
                chain = inv_left_many(p, chain)
                cum_d += sp.dec(chain)
                cum_i += sp.inc(chain)
        return sd, si, ends

    # -- accounting ------------------------------------------------------

    @staticmethod
    def _accumulate(table: dict[int, float], ns: np.ndarray, logs: np.ndarray):
        for nv in np.unique(ns):
            chunk = float(logsumexp(logs[ns == nv]))
            prev = table.get(int(nv))
            table[int(nv)] = chunk if prev is None else float(np.logaddexp(prev, chunk))

    def refine(self, steps: int, batch: int = 64) -> None:
        """Best-first expansion: `steps` rounds of splitting the `batch`
        heaviest active leaves (by sup weight)."""
        for _ in range(steps):
            count = len(self.n)
            if count == 0:
                return
            k = min(batch, count)
            w = self.sdL + self.siR
            idx = np.argpartition(-w, k - 1)[:k] if k < count else np.arange(count)
            targets = np.concatenate([self.zl[idx], self.zh[idx]])
            sd, si, ends = self._letter_tables(targets)
            # parent mass moves to the dropped-letter accumulators
            self._accumulate(self.exp_sup, self.n[idx], self.sdL[idx] + self.siR[idx])
            self._accumulate(self.exp_inf, self.n[idx], self.sdR[idx] + self.siL[idx])
            a = np.arange(1, self.A + 1)[:, None]
            child_n = (self.n[idx][None, :] + a).ravel()
            child_sdL = (sd[:, :k] + self.sdL[idx][None, :]).ravel()
            child_siR = (si[:, k:] + self.siR[idx][None, :]).ravel()
            child_sdR = (sd[:, k:] + self.sdR[idx][None, :]).ravel()
            child_siL = (si[:, :k] + self.siL[idx][None, :]).ravel()
            child_zl = ends[:, :k].ravel()
            child_zh = ends[:, k:].ravel()
            keep = np.ones(count, dtype=bool)
            keep[idx] = False
            # freeze negligible children instead of tracking them
            wsup_child = child_sdL + child_siR
            tiny = wsup_child < (np.max(wsup_child) - 60.0)
            if np.any(tiny):
                self._accumulate(self.bucket_sup, child_n[tiny], wsup_child[tiny])
                self._accumulate(
                    self.bucket_inf, child_n[tiny], (child_sdR + child_siL)[tiny]
                )
            live = ~tiny
            self.n = np.concatenate([self.n[keep], child_n[live]])
            self.zl = np.concatenate([self.zl[keep], child_zl[live]])
            self.zh = np.concatenate([self.zh[keep], child_zh[live]])
            self.sdL = np.concatenate([self.sdL[keep], child_sdL[live]])
            self.sdR = np.concatenate([self.sdR[keep], child_sdR[live]])
            self.siL = np.concatenate([self.siL[keep], child_siL[live]])
            self.siR = np.concatenate([self.siR[keep], child_siR[live]])
            self.expansions += 1

    # -- certified evaluations --------------------------------------------

    def _table_eval(self, table: dict[int, float], rate: float) -> float:
        if not table:
            return -math.inf
        ns = np.fromiter(table.keys(), dtype=float)
        vs = np.fromiter(table.values(), dtype=float)
        return float(logsumexp(vs + ns * rate))

    def log_cover(self, log_s: float) -> float:
        """Certified log W(s) over the full heterogeneous family."""
        L = self.letters_data
        parts = [self._table_eval(self.bucket_sup, log_s)]
        if len(self.n):
            parts.append(float(logsumexp(self.sdL + self.siR + self.n * log_s)))
        tail = L.log_sup_tail(log_s, self.A)
        parts.append(self._table_eval(self.exp_sup, log_s) + tail)
        return float(logsumexp(parts))

    def log_packing_t(self, t: float) -> float:
        """Certified log V(e^{-p}), p = e^t, over the heterogeneous family."""
        p = math.exp(t)
        L = self.letters_data
        parts = [self._table_eval(self.bucket_inf, -p)]
        if len(self.n):
            parts.append(float(logsumexp(self.sdR + self.siL - self.n * p)))
        tail = L.log_inf_tail_t(t, self.A)
        parts.append(self._table_eval(self.exp_inf, -p) + tail)
        return float(logsumexp(parts))

    def gaps(self) -> tuple[float, float | None, bool]:
        """(lower_gap_log, upper_gap, stationary) certified by the tree."""
        norm = self.letters_data.norm_bound()
        gap_log = _largest_t_packing_ge_1(
            self.log_packing_t,
            p_hi=2 * norm + math.log(2.0) + 5.0,
            log_floor=self.letters_data.log_floor,
        )
        root = _largest_log_s_cover_le_1(self.log_cover, norm)
        if root is None:
            return gap_log, 0.0, True
        return gap_log, -root, False


# ---------------------------------------------------------------------------
# combiner
# ---------------------------------------------------------------------------


def _merge(
    best: dict,
    lower_gap_log: float,
    upper_gap: float | None,
    stationary: bool,
    label: str,
) -> None:
    if lower_gap_log > best["lower_gap_log"]:
        best["lower_gap_log"] = lower_gap_log
        best["lower_src"] = label
    if upper_gap is not None and (
        best["upper_gap"] is None or upper_gap < best["upper_gap"]
    ):
        best["upper_gap"] = upper_gap
        best["upper_src"] = label
    best["stationary"] = best["stationary"] or stationary
    lower_gap = math.exp(min(best["lower_gap_log"], 700.0))
    if best["upper_gap"] is not None and lower_gap > best["upper_gap"] + 1e-9:
        raise BracketInconsistencyError(
            f"certified sides disjoint: lower gap {lower_gap} from "
            f"{best['lower_src']} exceeds upper gap {best['upper_gap']} from "
            f"{best['upper_src']}"
        )
    if best["stationary"] and best["lower_gap_log"] > -math.inf:
        raise BracketInconsistencyError(
            "certified stationary series test together with a certified "
            f"positive gap from {best['lower_src']}"
        )


def pressure(
    phi: Potential,
    params: MapParams,
    gamma: float,
    tol: float,
    *,
    n_max: int = 22,
    induced_depth: int = 10_000,
    tree_letters: int = 48,
    tree_step_budget: int = 640,
) -> PressureBracket:
    """Certified bracket for P(phi), intersecting the engines and escalating
    resolution until the width is at most tol or budgets are exhausted.

    The trivial bound P >= phi(0) (point mass at the neutral fixed point)
    seeds the lower side.  Certified sides from the cylinder and induced
    engines only ever tighten the intersection; disjoint certified sides
    raise BracketInconsistencyError.  If tol is not reached the widest
    certified bracket is returned with a note.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    split = _Split(phi, params, gamma)
    phi0 = split.phi0
    best: dict = {
        "lower_gap_log": -math.inf,
        "upper_gap": None,
        "stationary": False,
        "lower_src": "neutral point mass",
        "upper_src": "none",
    }
    notes: list[str] = []
    depth_used = 0

    def lower_gap() -> float:
        return math.exp(min(best["lower_gap_log"], 700.0))

    def width() -> float:
        if best["upper_gap"] is None:
            return math.inf
        return best["upper_gap"] - lower_gap()

    # stage 1: induced series at moderate depth
    m0 = min(2048, induced_depth)
    letters = InducedLetters(phi, params, m0, gamma)
    br = _induced_bracket_from_letters(letters, m0)
    _merge(best, br.lower_gap_log, br.upper_gap, br.stationary, f"induced M={m0}")
    depth_used = max(depth_used, m0)

    # stage 2: shallow cylinder bracket
    if width() > tol:
        n0 = min(11, n_max)
        cyl = pressure_cylinder(phi, params, gamma, n0)
        _merge(
            best,
            math.log(cyl.lower_gap) if cyl.lower_gap > 0 else -math.inf,
            cyl.upper_gap,
            False,
            f"cylinder n={n0}",
        )
        depth_used = max(depth_used, n0)

    # stage 3: escalation
    tree: WordTree | None = None
    tree_steps_done = 0
    m_cur = m0
    n_cur = min(11, n_max)
    stage = 0
    while width() > tol and stage < 24:
        stage += 1
        progressed = False
        if m_cur < induced_depth:
            m_cur = min(2 * m_cur, induced_depth)
            br = pressure_induced(phi, params, m_cur, gamma)
            _merge(
                best, br.lower_gap_log, br.upper_gap, br.stationary,
                f"induced M={m_cur}",
            )
            depth_used = max(depth_used, m_cur)
            progressed = True
        if width() > tol and not split.has_tab and tree_steps_done < tree_step_budget:
            if tree is None:
                tree = WordTree(
                    phi, params, letters=tree_letters,
                    depth=min(4096, induced_depth), gamma=gamma,
                )
            chunk = min(max(16, tree_steps_done or 16), tree_step_budget - tree_steps_done)
            tree.refine(steps=chunk, batch=64)
            tree_steps_done += chunk
            lo_g, up_g, stat = tree.gaps()
            _merge(best, lo_g, up_g, stat, f"word tree ({tree.expansions} expansions)")
            progressed = True
        if width() > tol and n_cur < n_max:
            n_cur = min(n_cur + 4, n_max)
            cyl = pressure_cylinder(phi, params, gamma, n_cur)
            _merge(
                best,
                math.log(cyl.lower_gap) if cyl.lower_gap > 0 else -math.inf,
                cyl.upper_gap,
                False,
                f"cylinder n={n_cur}",
            )
            depth_used = max(depth_used, n_cur)
            progressed = True
        if not progressed:
            break

    pruned = best["upper_gap"] is None
    if pruned:
        notes.append("no certified upper bound (tabulated tail truncated)")
    if width() > tol:
        notes.append(f"tolerance {tol} not reached (width {width():.3g})")
    notes.append(f"lower via {best['lower_src']}; upper via {best['upper_src']}")
    if best["stationary"]:
        notes.append("StationaryCertified: series test sum < 1 at s = 1")
    upper = math.inf if pruned else phi0 + best["upper_gap"]
    return PressureBracket(
        lower=phi0 + lower_gap(),
        upper=max(upper, phi0 + lower_gap()),
        method="Combined",
        n_used=depth_used,
        pruned=pruned,
        notes="; ".join(notes),
        lower_gap=lower_gap(),
        upper_gap=best["upper_gap"],
        stationary=best["stationary"],
        lower_gap_log=best["lower_gap_log"],
    )
