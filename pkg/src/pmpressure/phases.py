"""Phase classification and transition diagnostics.

The potential space splits into an intermittent phase (P(phi) > phi(0),
positive-entropy equilibrium) and a stationary phase (the point mass at the
neutral fixed point is the equilibrium state).  Membership is not decidable
by finite computation at the common boundary, so every verdict here is a
one-sided certificate:

* ``Intermittent`` — a certified positive lower bound on P(phi) - phi(0)
  (renewal packing, word tree, or cylinder sums);
* ``StationaryCertified`` — the complete sup-weight return series, including
  its closed-form tail, sums below one;
* ``Undetermined`` — neither certificate was reached within budget; honest,
  and the only possible answer exactly on the boundary.

On top of classification sit the transition-parameter brackets: the
temperature transition ct(phi) (bisection over beta in classify(beta*phi),
sound because the intermittent set is star-shaped in beta) and the boundary
tracer tau0 along phi_0 + tau*omega_gamma (sound because adding a multiple
of omega_gamma only pushes toward the stationary phase).  The remaining
operations are diagnostics: ground-state checks over periodic orbits, decay
fits of the neutral-orbit weight sequence, empirical distortion constants,
and Bowen-root dimension brackets for finite-branch expanding subsystems.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .map_kernel import (
    MapParams,
    cylinder_for,
    eval_map,
    deriv,
    inv_left_many,
    inv_right_many,
    neutral_orbit,
)
from .potentials import (
    Omega,
    Potential,
    eval_potential,
    holder_data,
)
from .pressure import InducedLetters, WordTree, _induced_bracket_from_letters

__all__ = [
    "INTERMITTENT",
    "STATIONARY",
    "UNDETERMINED",
    "PhaseVerdict",
    "TransitionBracket",
    "GroundStateReport",
    "DistortionConstants",
    "DecayFit",
    "DimensionBracket",
    "classify",
    "ct_bracket",
    "boundary_tau",
    "kernel_projection",
    "ground_state_check",
    "decay_fit",
    "z1_criterion",
    "distortion_constants",
    "hausdorff_subsystem",
]

INTERMITTENT = "Intermittent"
STATIONARY = "StationaryCertified"
UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class PhaseVerdict:
    """One-sided certificate: the label plus the numbers that earned it."""

    label: str
    evidence: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.label not in (INTERMITTENT, STATIONARY, UNDETERMINED):
            raise ValueError(f"unknown phase label {self.label!r}")


@dataclass(frozen=True)
class TransitionBracket:
    """Enclosure of a transition parameter.

    ``hi`` may be ``inf`` (no transition up to the search cap — the marker
    case).  For the boundary tracer, a base potential that is already
    non-intermittent at tau = 0 is reported as (-inf, 0] — the one case
    where ``lo`` is not positive.  ``stalled`` means probes near the
    boundary came back Undetermined before the width target was met; the
    returned endpoints are still certified.
    """

    lo: float
    hi: float
    kind: str  # TemperatureBetaStar | BoundaryTau
    stalled: bool = False
    notes: str = ""

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError("transition bracket endpoints out of order")
        if self.kind not in ("TemperatureBetaStar", "BoundaryTau"):
            raise ValueError(f"unknown bracket kind {self.kind!r}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.hi)


@dataclass(frozen=True)
class GroundStateReport:
    """Outcome of the periodic-orbit search against the neutral value.

    ``Violated`` is sound (a concrete orbit beats phi(0));
    ``ConsistentUpTo`` is bounded evidence, not a proof.
    ``margin`` is phi(0) minus the best competing Birkhoff average
    (negative exactly when violated).
    """

    status: str  # Violated | ConsistentUpTo
    margin: float
    period_max: int
    neutral_depth: int
    witness_itinerary: tuple[int, ...] | None = None
    witness_point: float | None = None
    witness_average: float | None = None


@dataclass(frozen=True)
class DistortionConstants:
    """Empirical distortion data, valid on the sampled depths n <= certified_depth.

    eps0: one constant serving both sides of the derivative-growth sandwich
    (1 + eps0*n)^(1/alpha+1) <= Df^n <= (1 + n/eps0)^(1/alpha+1) on the
    sampled laminar levels.  eps1/C1: the analogous minimum growth rate and
    the worst distortion ratio over sampled components of f^{-n}(J_0).
    D: the derived series constant |J_0|^alpha * sum_k (1+eps1*k)^{-(1+alpha)},
    with a closed-form tail.
    """

    eps0: float
    eps1: float
    C1: float
    D: float
    certified_depth: int


class DecayFit(tuple):
    """(C_fit, delta_fit, residual) from the power-law fit of the
    neutral-orbit weight sequence."""

    __slots__ = ()

    def __new__(cls, C_fit: float, delta_fit: float, residual: float):
        return super().__new__(cls, (C_fit, delta_fit, residual))

    @property
    def C_fit(self) -> float:
        return self[0]

    @property
    def delta_fit(self) -> float:
        return self[1]

    @property
    def residual(self) -> float:
        return self[2]


@dataclass(frozen=True)
class DimensionBracket:
    """Bowen-root enclosure of the Hausdorff dimension of the expanding
    subsystem built from finitely many first-return branches."""

    lower: float
    upper: float
    branches: int
    levels: int

    @property
    def width(self) -> float:
        return self.upper - self.lower


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

_TREE_CHECKPOINTS = {0: (), 1: (), 2: (16, 64), 3: (16, 64, 160)}
# wider trees pay off when the return-time tail is heavy (small alpha):
# effort 3 widens the letter alphabet instead of just deepening the search
_TREE_LETTERS = {2: 48, 3: 128}


def classify(
    phi: Potential,
    params: MapParams,
    gamma: float,
    tol: float = 1e-3,
    *,
    effort: int = 3,
) -> PhaseVerdict:
    """One-sided phase certificate for phi.

    Escalates: plain return series at depth 2048, then 8192, then word-tree
    refinement (effort >= 2).  ``tol`` bounds the pressure resolution after
    which refinement stops; ``effort`` in 0..3 caps the ladder.  Budget
    exhaustion yields Undetermined with the best bracket attached — never a
    wrong certificate.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    effort = max(0, min(3, int(effort)))
    evidence: dict = {}

    def verdict_from(gap_log, upper_gap, stationary, source) -> PhaseVerdict | None:
        evidence.update(
            {
                "lower_gap_log": gap_log,
                "upper_gap": upper_gap,
                "source": source,
            }
        )
        if stationary and gap_log > -math.inf:  # pragma: no cover - structural
            raise RuntimeError("conflicting certificates in classify")
        if stationary:
            return PhaseVerdict(STATIONARY, dict(evidence))
        if gap_log > -math.inf:
            return PhaseVerdict(INTERMITTENT, dict(evidence))
        return None

    depths = [2048] if effort == 0 else [2048, 8192]
    for m in depths:
        letters = InducedLetters(phi, params, m, gamma)
        br = _induced_bracket_from_letters(letters, m)
        out = verdict_from(
            br.lower_gap_log, br.upper_gap, br.stationary, f"induced M={m}"
        )
        if out is not None:
            return out
    if effort >= 2 and not phi.has_tabulated():
        tree = WordTree(
            phi, params, letters=_TREE_LETTERS[effort], depth=4096, gamma=gamma
        )
        done = 0
        for checkpoint in _TREE_CHECKPOINTS[effort]:
            tree.refine(steps=checkpoint - done, batch=64)
            done = checkpoint
            gap_log, upper_gap, stationary = tree.gaps()
            out = verdict_from(
                gap_log, upper_gap, stationary, f"word tree x{tree.expansions}"
            )
            if out is not None:
                return out
            if upper_gap is not None and upper_gap <= tol:
                break  # bracket already tighter than the caller's resolution
    return PhaseVerdict(UNDETERMINED, dict(evidence))


# ---------------------------------------------------------------------------
# temperature transition
# ---------------------------------------------------------------------------


def _sup_norm_bound(phi: Potential, params: MapParams) -> float:
    return sum(abs(c) * atom.sup_norm(params) for c, atom in phi.terms)


def _resolve_one(
    classify_at, lo: float, hi: float, effort: int
) -> tuple[float, str] | None:
    """Find a point inside (lo, hi) where classify_at(point, effort) is
    conclusive.  Tries mid, then the quarter points, all at the base effort
    (cheap) before escalating everything — a single undetermined midpoint
    must not stall the bisection when its neighbours are decidable."""
    points = [lo + f * (hi - lo) for f in (0.5, 0.75, 0.25)]
    efforts = [effort] if effort >= 3 else [effort, effort + 1]
    for e in efforts:
        for x in points:
            label = classify_at(x, e)
            if label != UNDETERMINED:
                return x, label
    return None


def ct_bracket(
    phi: Potential,
    params: MapParams,
    gamma: float,
    tol: float = 0.1,
    beta_max: float = 1024.0,
    *,
    effort: int = 2,
) -> TransitionBracket:
    """Bracket the temperature transition parameter of beta -> P(beta*phi).

    Soundness: the intermittent set meets each ray {beta*phi} in an interval
    (0, beta_*), so Intermittent probes raise ``lo`` and StationaryCertified
    probes lower ``hi``.  The seed lo = log2 / (2 sup|phi|) is analytic:
    below it the depth-1 partition sum already forces P > phi(0).  If even
    classify(beta_max * phi) is Intermittent the marker (lo=beta_max, inf)
    is returned.  Undetermined probes trigger alternate probe points and one
    higher-effort retry before stalling.
    """
    if tol <= 0 or beta_max <= 0:
        raise ValueError("tol and beta_max must be positive")
    norm = _sup_norm_bound(phi, params)
    if norm < 1e-12:
        # vanishing potential: every beta is intermittent (P = log 2 > 0)
        return TransitionBracket(
            lo=beta_max,
            hi=math.inf,
            kind="TemperatureBetaStar",
            notes="sup norm 0: no transition at any beta",
        )
    seed = 0.99 * math.log(2.0) / (2.0 * norm)
    lo = min(seed, beta_max)
    hi = math.inf
    stalled = False
    notes = []

    def probe(beta: float, probe_effort: int) -> str:
        return classify(
            phi.scaled(beta), params, gamma, tol=1e-6, effort=probe_effort
        ).label

    # upward doubling scan (clamped at beta_max) for a stationary cap
    beta = max(2.0 * lo, 1.0)
    last_label = None
    while math.isinf(hi):
        beta = min(beta, beta_max)
        last_label = probe(beta, effort)
        if last_label == STATIONARY:
            hi = beta
            break
        if last_label == INTERMITTENT:
            lo = max(lo, beta)
        if beta >= beta_max:
            break
        beta *= 2.0
    if math.isinf(hi):
        if last_label == INTERMITTENT:
            return TransitionBracket(
                lo=beta_max,
                hi=math.inf,
                kind="TemperatureBetaStar",
                notes=f"intermittent at beta_max={beta_max}: no finite transition found",
            )
        return TransitionBracket(
            lo=lo,
            hi=math.inf,
            kind="TemperatureBetaStar",
            stalled=True,
            notes=f"undetermined at beta_max={beta_max}",
        )

    # bisection with alternate probes on Undetermined
    for _ in range(60):
        if hi - lo <= tol:
            break
        hit = _resolve_one(probe, lo, hi, effort)
        if hit is None:
            stalled = True
            notes.append(f"probes undetermined inside [{lo:.6g}, {hi:.6g}]")
            break
        beta, label = hit
        if label == INTERMITTENT:
            lo = max(lo, beta)
        else:
            hi = min(hi, beta)
    return TransitionBracket(
        lo=lo,
        hi=hi,
        kind="TemperatureBetaStar",
        stalled=stalled,
        notes="; ".join(notes),
    )


# ---------------------------------------------------------------------------
# boundary tracer
# ---------------------------------------------------------------------------


def boundary_tau(
    phi0: Potential,
    params: MapParams,
    gamma: float,
    tol: float = 0.05,
    *,
    effort: int = 2,
) -> TransitionBracket:
    """Bracket tau0 along the ray tau -> phi0 + tau*omega_gamma.

    Requires gamma <= min(alpha, 1) so that pure omega_gamma multiples are
    eventually stationary.  Monotone validity: adding tau*omega_gamma with
    larger tau only lowers the potential away from the neutral point, so
    intermittency at tau implies intermittency at every tau' < tau.  The
    upper end is seeded by domination: once P(beta0 * omega_gamma) is
    certified stationary, tau_dagger = beta0 + |phi0|_gamma is a certified
    stationary point of the ray because the normalized potential is
    pointwise below beta0 * omega_gamma.
    """
    if not (0 < gamma <= min(params.alpha, 1.0) + 1e-12):
        raise ValueError("boundary tracer requires 0 < gamma <= min(alpha, 1)")
    if tol <= 0:
        raise ValueError("tol must be positive")
    omega = Potential(((1.0, Omega(gamma)),))

    base = classify(phi0, params, gamma, tol=1e-6, effort=effort)
    if base.label != INTERMITTENT:
        return TransitionBracket(
            lo=-math.inf,
            hi=0.0,
            kind="BoundaryTau",
            stalled=base.label == UNDETERMINED,
            notes=f"tau0 <= 0: base potential is {base.label} at tau = 0",
        )

    beta0 = None
    b = 1.0
    while b <= 2.0**22:
        if classify(omega.scaled(b), params, gamma, tol=1e-6, effort=effort).label == STATIONARY:
            beta0 = b
            break
        b *= 2.0
    if beta0 is None:  # pragma: no cover - gamma <= alpha guarantees existence
        return TransitionBracket(
            lo=0.0,
            hi=math.inf,
            kind="BoundaryTau",
            stalled=True,
            notes="no stationary multiple of omega_gamma found",
        )
    tau_dagger = beta0 + holder_data(phi0, params, gamma).seminorm

    def probe(tau: float, probe_effort: int) -> str:
        return classify(
            phi0.plus(omega.scaled(tau)), params, gamma,
            tol=1e-6, effort=probe_effort,
        ).label

    lo, hi = 0.0, tau_dagger
    stalled = False
    notes = [f"upper end tau_dagger = {tau_dagger:.6g} certified by domination"]
    for _ in range(60):
        # keep going until an intermittent probe lifts lo off zero: the
        # reported bracket must have a certified-positive lower end
        if hi - lo <= tol and lo > 0.0:
            break
        hit = _resolve_one(probe, lo, hi, effort)
        if hit is None:
            stalled = True
            notes.append(f"probes undetermined inside [{lo:.6g}, {hi:.6g}]")
            break
        tau, label = hit
        if label == INTERMITTENT:
            lo = max(lo, tau)
        else:
            hi = min(hi, tau)
    return TransitionBracket(
        lo=lo,
        hi=hi,
        kind="BoundaryTau",
        stalled=stalled,
        notes="; ".join(notes),
    )


# ---------------------------------------------------------------------------
# kernel projection
# ---------------------------------------------------------------------------


def kernel_projection(
    phi: Potential,
    params: MapParams,
    gamma: float,
    orbit: tuple[float, ...] | list[float] | np.ndarray,
) -> tuple[Potential, float]:
    """Project phi onto the kernel of ell(psi) = psi(0) - mean(psi on orbit).

    ``orbit`` is a periodic orbit defining the uniform reference measure.
    Returns (phi - t*omega_gamma, t) with t = ell(phi)/ell(omega_gamma);
    the projected potential satisfies ell = 0 by construction.
    """
    pts = np.asarray(orbit, dtype=float)
    if pts.size == 0:
        raise ValueError("orbit must be nonempty")
    if np.all(pts == 0.0):
        raise ValueError("degenerate orbit: the neutral fixed point itself")

    def ell(pot: Potential) -> float:
        at0 = eval_potential(pot, params, 0.0)
        return float(at0 - np.mean(eval_potential(pot, params, pts)))

    omega = Potential(((1.0, Omega(gamma)),))
    denom = ell(omega)
    t = ell(phi) / denom
    projected = phi.plus(omega.scaled(-t))
    return projected, t


# ---------------------------------------------------------------------------
# ground states
# ---------------------------------------------------------------------------


def _periodic_point(params: MapParams, itinerary: tuple[int, ...]) -> float | None:
    """The unique fixed point of f^p inside the itinerary's cylinder.

    f^p is increasing on the open cylinder and maps it onto (0, 1), so
    g(x) = f^p(x) - x changes sign across it.  The bracket is trimmed
    strictly inside: exactly at an endpoint the floating-point branch
    decision can flip (endpoints map onto the branch point), and the root
    sits at distance >= (image gap)/sup(Df^p) from either end, far beyond
    the trim.  The all-ones word is the one case whose fixed point is the
    endpoint itself.
    """
    if all(b == 1 for b in itinerary):
        return 1.0
    cyl = cylinder_for(params, itinerary)
    p = len(itinerary)
    width = cyl.right - cyl.left
    lo, hi = cyl.left + 1e-9 * width, cyl.right - 1e-9 * width

    def g(x: float) -> float:
        y = x
        for _ in range(p):
            y = eval_map(params, y)
        return y - x

    if g(lo) > 0 or g(hi) < 0:  # pragma: no cover - full-shift coding prevents this
        return None
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _neutral_adjacent_family(
    phi: Potential, params: MapParams, depth: int
) -> tuple[np.ndarray, np.ndarray]:
    """Periodic points p_n with itinerary 0^{n-1} 1, n = 2..depth, and their
    Birkhoff averages, all at once.

    p_n is the fixed point of the contraction inv_left^{n-1} o inv_right
    (contraction factor 1/Df^n < 1/2), so a few dozen sweeps of the whole
    family reach solver tolerance; the inverse-branch chains double as the
    periodic orbits for the Birkhoff sums.
    """
    if depth < 2:
        return np.empty(0), np.empty(0)
    count = depth - 1  # index i holds n = i + 2
    pts = np.full(count, 0.25)
    for _ in range(30):
        cur = inv_right_many(params, pts)
        new = np.empty_like(pts)
        for k in range(1, depth):
            cur = inv_left_many(params, cur)
            new[k - 1] = cur[k - 1]  # n = k + 1 harvested after k pullbacks
        pts = new
    cur = inv_right_many(params, pts)
    sums = np.asarray(eval_potential(phi, params, cur), dtype=float).copy()
    for k in range(1, depth):
        cur = inv_left_many(params, cur)
        vals = np.asarray(eval_potential(phi, params, cur))
        sums[k - 1 :] += vals[k - 1 :]  # only cycles with n - 1 >= k continue
    ns = np.arange(2, depth + 1, dtype=float)
    return pts, sums / ns


def _orbit_average(
    phi: Potential, params: MapParams, x: float, period: int
) -> float:
    total = 0.0
    y = x
    for _ in range(period):
        total += float(eval_potential(phi, params, y))
        y = eval_map(params, y)
    return total / period


def ground_state_check(
    phi: Potential,
    params: MapParams,
    period_max: int = 8,
    neutral_depth: int = 256,
) -> GroundStateReport:
    """Search for a periodic orbit whose Birkhoff average beats phi(0).

    Scans every itinerary of period <= period_max (excluding the all-zeros
    word, which codes the neutral fixed point itself) plus the
    neutral-adjacent periodic points with itinerary 0^{n-1} 1 for
    n <= neutral_depth.  Those laminar-hugging orbits are the canonical
    violation witnesses, and their averages can cross phi(0) only at depths
    in the hundreds — hence the deep default.  Violated is sound;
    ConsistentUpTo is evidence up to the stated depths.
    """
    if period_max < 1:
        raise ValueError("period_max must be >= 1")
    phi0 = float(eval_potential(phi, params, 0.0))
    best_avg = -math.inf
    best: tuple[tuple[int, ...], float] | None = None

    def consider(itinerary: tuple[int, ...], x: float | None, avg: float) -> None:
        nonlocal best_avg, best
        if x is not None and avg > best_avg:
            best_avg = avg
            best = (itinerary, x)

    for p in range(1, period_max + 1):
        for code in range(1, 1 << p):
            word = tuple((code >> (p - 1 - k)) & 1 for k in range(p))
            x = _periodic_point(params, word)
            if x is not None:
                consider(word, x, _orbit_average(phi, params, x, p))
    pts, avgs = _neutral_adjacent_family(phi, params, neutral_depth)
    for i in range(pts.size):
        n = i + 2
        consider(tuple([0] * (n - 1) + [1]), float(pts[i]), float(avgs[i]))

    margin = phi0 - best_avg
    if best is not None and best_avg > phi0 + 1e-9:
        itinerary, x = best
        return GroundStateReport(
            status="Violated",
            margin=margin,
            period_max=period_max,
            neutral_depth=neutral_depth,
            witness_itinerary=itinerary,
            witness_point=x,
            witness_average=best_avg,
        )
    return GroundStateReport(
        status="ConsistentUpTo",
        margin=margin,
        period_max=period_max,
        neutral_depth=neutral_depth,
    )


# ---------------------------------------------------------------------------
# decay diagnostics
# ---------------------------------------------------------------------------


def _log_zeta_sequence(phi: Potential, params: MapParams, n_max: int) -> np.ndarray:
    """log of the neutral-orbit weights exp(S_n(phi)(x_n) - n*phi(0)),
    n = 1..n_max, computed in log scale (the weights underflow doubles for
    strongly contracting potentials long before they stop being useful)."""
    orbit = neutral_orbit(params, n_max)
    vals = eval_potential(phi, params, orbit.points[1 : n_max + 1])
    phi0 = float(eval_potential(phi, params, 0.0))
    n = np.arange(1, n_max + 1)
    return np.cumsum(vals) - n * phi0


def decay_fit(
    phi: Potential,
    params: MapParams,
    n_range: tuple[int, int] = (100, 10_000),
) -> DecayFit:
    """Power-law fit log zeta_n ~ log C - delta log n over a geometric grid
    in n_range.  delta_fit > 0 is evidence of polynomial decay, not proof.
    """
    n_lo, n_hi = int(n_range[0]), int(n_range[1])
    if not (1 <= n_lo < n_hi):
        raise ValueError("n_range must satisfy 1 <= lo < hi")
    if n_hi < 10 * n_lo:
        raise ValueError("n_range must span at least one decade")
    log_zeta = _log_zeta_sequence(phi, params, n_hi)
    ns = np.unique(
        np.rint(np.geomspace(n_lo, n_hi, num=64)).astype(int)
    )
    x = np.log(ns.astype(float))
    y = log_zeta[ns - 1]
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return DecayFit(
        C_fit=float(np.exp(intercept)),
        delta_fit=float(-slope),
        residual=float(np.sqrt(np.mean(resid**2))),
    )


def z1_criterion(
    phi: Potential,
    params: MapParams,
    alpha_exponent: float,
    N: int,
    dist: DistortionConstants,
) -> bool:
    """Sufficient certificate that P(phi) > phi(0): the partial sum of the
    neutral-orbit weights exceeds exp(D |phi|_alpha).  False = inconclusive.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    data = holder_data(phi, params, alpha_exponent)
    log_partial = float(logsumexp(_log_zeta_sequence(phi, params, N)))
    return log_partial > dist.D * data.seminorm


# ---------------------------------------------------------------------------
# distortion constants
# ---------------------------------------------------------------------------


def _deriv_products(params: MapParams, xs: np.ndarray, n: int) -> np.ndarray:
    """Df^n at each sample (product of branch derivatives along n steps)."""
    acc = np.ones_like(xs)
    y = xs.copy()
    for _ in range(n):
        acc *= deriv(params, y)
        y = eval_map(params, y)
    return acc


def distortion_constants(
    params: MapParams,
    N: int = 12,
    samples_per_level: int = 24,
) -> DistortionConstants:
    """Empirical distortion constants up to depth N (N >= 10 required).

    eps0 is the single constant making both sides of the laminar
    derivative-growth sandwich hold on all samples: the minimum of the
    sampled growth rates ((Df^n)^{alpha/(alpha+1)} - 1)/n and of the
    reciprocals of their maxima.  eps1 and C1 are measured over sampled
    components of f^{-n}(J_0) (depth-(n+1) cylinders whose final symbol is
    the expanding branch).  Deterministic: fixed-seed sampling.
    """
    if N < 10:
        raise ValueError("N must be >= 10")
    if samples_per_level < 2:
        raise ValueError("samples_per_level must be >= 2")
    a = params.alpha
    rng = np.random.default_rng(0x5EED)
    orbit = neutral_orbit(params, N + 1)
    xs_orbit = orbit.points

    q_min, q_max = math.inf, -math.inf
    for n in range(1, N + 1):
        lo, hi = xs_orbit[n + 1], xs_orbit[n]  # J_n = (x_{n+1}, x_n]
        pts = np.concatenate([[hi], lo + (hi - lo) * rng.random(samples_per_level)])
        growth = _deriv_products(params, pts, n) ** (a / (a + 1.0))
        q = (growth - 1.0) / n
        q_min = min(q_min, float(np.min(q)))
        q_max = max(q_max, float(np.max(q)))
    eps0 = min(q_min, 1.0 / q_max)

    e_min = math.inf
    c1 = 1.0
    for n in range(1, N + 1):
        n_components = 1 << n
        count = min(n_components, samples_per_level)
        codes = rng.choice(n_components, size=count, replace=False)
        # always include the extreme components: the laminar-hugging one
        # (slowest growth, pins eps1) and the uniformly expanding one
        codes = np.unique(np.concatenate([[0, n_components - 1], codes]))
        for code in codes:
            word = tuple((int(code) >> (n - 1 - k)) & 1 for k in range(n)) + (1,)
            cyl = cylinder_for(params, word)
            pts = np.linspace(cyl.left, cyl.right, 5)
            dfs = _deriv_products(params, pts, n)
            c1 = max(c1, float(np.max(dfs) / np.min(dfs)))
            growth = dfs ** (a / (a + 1.0))
            e_min = min(e_min, float(np.min((growth - 1.0) / n)))
    eps1 = e_min

    j0_len = 1.0 - params.x1
    k = np.arange(0, 100_000)
    series = float(np.sum((1.0 + eps1 * k) ** (-(1.0 + a))))
    tail = (1.0 + eps1 * 100_000) ** (-a) / (a * eps1)
    d_const = j0_len**a * (series + tail)
    return DistortionConstants(
        eps0=eps0, eps1=eps1, C1=c1, D=d_const, certified_depth=N
    )


# ---------------------------------------------------------------------------
# Hausdorff dimension of finite-branch subsystems
# ---------------------------------------------------------------------------


def hausdorff_subsystem(
    params: MapParams, n: int, tol: float = 1e-3
) -> DimensionBracket:
    """Bowen-root bracket for the maximal invariant set of the expanding
    system with branches F_j = f^j on I_j, j = 1..n (each a full branch onto
    J_0 = (x_1, 1]).

    log DF^l is increasing on every word cylinder (each branch derivative
    is increasing and each inverse branch preserves order), so sup/inf of
    (DF^l)^{-beta} sit exactly at the cylinder endpoints: word-level
    partition sums give certified pressure bounds, and bisection in beta of
    the upper/lower pressure yields a certified dimension bracket.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    def letter_pullback(targets: np.ndarray):
        """For each branch j = 1..n: F_j^{-1}(targets) and log DF_j there."""
        ends = np.empty((n, targets.size))
        logdf = np.empty((n, targets.size))
        chain = targets.astype(float)
        acc = np.zeros(targets.size)
        for j in range(1, n + 1):
            back = inv_right_many(params, chain)
            ends[j - 1] = back
            logdf[j - 1] = np.log(deriv(params, back)) + acc
            if j < n:
                chain = inv_left_many(params, chain)
                acc += np.log(deriv(params, chain))
        return ends, logdf

    max_words = 200_000
    levels = 1
    while levels < 12 and n ** (levels + 1) <= max_words:
        levels += 1

    # level-1 data: pull the ends of J_0 = (x_1, 1] back through each branch
    ends_l, logdf_l = letter_pullback(np.array([params.x1]))
    ends_r, logdf_r = letter_pullback(np.array([1.0]))
    level_data = [(logdf_l[:, 0].copy(), logdf_r[:, 0].copy())]
    cur_left, cur_right = ends_l[:, 0], ends_r[:, 0]
    cur_dl, cur_dr = logdf_l[:, 0], logdf_r[:, 0]
    for _ in range(2, levels + 1):
        ends_l, logdf_l = letter_pullback(cur_left)
        ends_r, logdf_r = letter_pullback(cur_right)
        cur_dl = (logdf_l + cur_dl[None, :]).ravel()
        cur_dr = (logdf_r + cur_dr[None, :]).ravel()
        cur_left = ends_l.ravel()
        cur_right = ends_r.ravel()
        level_data.append((cur_dl.copy(), cur_dr.copy()))

    def upper_pressure(beta: float) -> float:
        # sup of (DF^l)^{-beta} at the left endpoint (smallest DF)
        return min(
            float(logsumexp(-beta * dl)) / (lvl + 1)
            for lvl, (dl, _) in enumerate(level_data)
        )

    def lower_pressure(beta: float) -> float:
        return max(
            float(logsumexp(-beta * dr)) / (lvl + 1)
            for lvl, (_, dr) in enumerate(level_data)
        )

    def bowen_root(pressure_fn) -> tuple[float, float]:
        """Final bisection interval [lo, hi] with pressure_fn(lo) > 0 >=
        pressure_fn(hi).  The dimension of a subset of the line never
        exceeds 1, so the cap 1 + tol is a true upper end even when the
        pressure bound is still positive there."""
        lo, hi = 0.0, 1.0 + max(tol, 1e-6)
        if pressure_fn(lo) <= 0:
            return 0.0, 0.0
        if pressure_fn(hi) > 0:
            return hi, hi
        for _ in range(60):
            if hi - lo <= 0.5 * tol:
                break
            mid = 0.5 * (lo + hi)
            if pressure_fn(mid) > 0:
                lo = mid
            else:
                hi = mid
        return lo, hi

    # dim <= beta whenever the upper pressure is <= 0 there: keep that hi.
    # dim >= beta whenever the lower pressure is > 0 there: keep that lo.
    _, upper_dim = bowen_root(upper_pressure)
    lower_dim, _ = bowen_root(lower_pressure)
    # a subset of the line never has dimension above 1
    upper_dim = min(upper_dim, 1.0)
    lower_dim = min(lower_dim, 1.0)
    if lower_dim > upper_dim:  # pragma: no cover - endpoint ordering prevents it
        lower_dim, upper_dim = upper_dim, lower_dim
    return DimensionBracket(
        lower=lower_dim, upper=upper_dim, branches=n, levels=levels
    )
