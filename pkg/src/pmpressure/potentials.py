"""Potential expression trees: parsing, evaluation, Hölder metadata,
Birkhoff sums, and the neutral-orbit weight sequence.

A potential is a linear combination of atoms:

    omega(g)   x -> -x**g          (g > 0)
    logdf      x -> log Df(x)      (Df = 1 + (1+alpha) x**alpha)
    const(c)   x -> c
    table(p)   piecewise-linear interpolant loaded from CSV file p

so the geometric potential -log Df is written "-logdf" (or "-1*logdf").
Internally that term is stored with the nonincreasing atom NegLogDf and a
positive coefficient; the parser and printer handle the sign swap.

Every built-in atom is monotone on [0, 1], which downstream engines exploit:
a potential splits into a nonincreasing part plus a nondecreasing part, so
extrema of Birkhoff sums over cylinders are attained at endpoints exactly.
Tabulated atoms carry no monotonicity information and contribute through
declared Hölder seminorm slack instead.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .map_kernel import MapParams, eval_map, neutral_orbit

__all__ = [
    "Omega",
    "NegLogDf",
    "Const",
    "Tabulated",
    "Potential",
    "HolderData",
    "parse_potential",
    "print_potential",
    "eval_potential",
    "holder_data",
    "birkhoff",
    "zeta_n",
    "zeta_sequence",
    "ZERO",
]


@dataclass(frozen=True)
class Omega:
    """Atom x -> -x**gamma."""

    gamma: float

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise ValueError(f"omega exponent must be positive, got {self.gamma}")

    def evaluate(self, params: MapParams, x: np.ndarray) -> np.ndarray:
        return -(x**self.gamma)

    # Valid Hölder exponents: (0, min(gamma, 1)].
    def max_exponent(self, params: MapParams) -> float:
        return min(self.gamma, 1.0)

    def seminorm(self, params: MapParams, gamma: float) -> float:
        # |x^g - y^g| <= |x - y|^min(g,1) on [0,1] for g <= 1 (with sup 1,
        # attained toward the endpoints); for g > 1 the map is g-Lipschitz.
        if self.gamma <= 1.0:
            return 1.0
        return self.gamma

    def sup_norm(self, params: MapParams) -> float:
        return 1.0

    def render(self) -> str:
        return f"omega({_fmt(self.gamma)})"


@dataclass(frozen=True)
class NegLogDf:
    """Atom x -> -log Df(x); nonincreasing since Df is increasing."""

    def evaluate(self, params: MapParams, x: np.ndarray) -> np.ndarray:
        return -np.log1p((1 + params.alpha) * x**params.alpha)

    def max_exponent(self, params: MapParams) -> float:
        return min(params.alpha, 1.0)

    def seminorm(self, params: MapParams, gamma: float) -> float:
        # |log Df(x) - log Df(y)| <= (1+a)|x^a - y^a| and |x^a - y^a| is
        # bounded by |x-y|^a for a <= 1, by a|x-y| otherwise.
        a = params.alpha
        return (1 + a) if a <= 1 else a * (1 + a)

    def sup_norm(self, params: MapParams) -> float:
        return float(np.log(2 + params.alpha))

    def render(self) -> str:
        return "logdf"


@dataclass(frozen=True)
class Const:
    """Constant atom."""

    c: float

    def evaluate(self, params: MapParams, x: np.ndarray) -> np.ndarray:
        return np.full_like(x, self.c)

    def max_exponent(self, params: MapParams) -> float:
        return 1.0

    def seminorm(self, params: MapParams, gamma: float) -> float:
        return 0.0

    def sup_norm(self, params: MapParams) -> float:
        return abs(self.c)

    def render(self) -> str:
        return f"const({_fmt(self.c)})"


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear interpolant through sorted sample points.

    The true Hölder seminorm of a sampled function is not computable, so a
    declared exponent and seminorm accompany the samples; the sampled
    two-point quotient gives a lower bound that must not contradict them.
    """

    xs: tuple[float, ...]
    values: tuple[float, ...]
    declared_gamma: float
    declared_seminorm: float
    source: str = ""

    def __post_init__(self) -> None:
        if len(self.xs) < 2 or len(self.xs) != len(self.values):
            raise ValueError("tabulated atom needs >= 2 aligned samples")
        if not 0 < self.declared_gamma <= 1:
            raise ValueError("declared gamma must lie in (0, 1]")
        if self.declared_seminorm < 0:
            raise ValueError("declared seminorm must be nonnegative")
        xs = np.asarray(self.xs)
        if np.any(np.diff(xs) <= 0):
            raise ValueError("sample abscissae must be strictly increasing")
        lower = self.sampled_seminorm(self.declared_gamma)
        if lower > self.declared_seminorm * (1 + 1e-9) + 1e-12:
            raise ValueError(
                f"sampled seminorm {lower} exceeds declared {self.declared_seminorm}"
            )

    def sampled_seminorm(self, gamma: float) -> float:
        """Two-point sup over all sample pairs: a lower-bound estimate."""
        xs = np.asarray(self.xs)
        vs = np.asarray(self.values)
        dx = np.abs(xs[:, None] - xs[None, :])
        dv = np.abs(vs[:, None] - vs[None, :])
        mask = dx > 0
        return float(np.max(dv[mask] / dx[mask] ** gamma))

    def evaluate(self, params: MapParams, x: np.ndarray) -> np.ndarray:
        return np.interp(x, self.xs, self.values)

    def max_exponent(self, params: MapParams) -> float:
        return self.declared_gamma

    def seminorm(self, params: MapParams, gamma: float) -> float:
        return self.declared_seminorm

    def sup_norm(self, params: MapParams) -> float:
        return float(np.max(np.abs(self.values)))

    def render(self) -> str:
        return f"table({self.source})"


Atom = Omega | NegLogDf | Const | Tabulated


@dataclass(frozen=True)
class Potential:
    """A potential as a flat sum of (coefficient, atom) terms."""

    terms: tuple[tuple[float, Atom], ...]

    def scaled(self, a: float) -> "Potential":
        return Potential(tuple((a * c, atom) for c, atom in self.terms))

    def plus(self, other: "Potential") -> "Potential":
        return Potential(self.terms + other.terms)

    def shifted(self, c: float) -> "Potential":
        return Potential(self.terms + ((1.0, Const(c)),))

    # --- monotone decomposition ---------------------------------------
    # Omega and NegLogDf atoms are nonincreasing; a positive coefficient
    # keeps that, a negative one flips it. Const goes with the
    # nonincreasing bucket (harmless), Tabulated into its own bucket.

    def split(self):
        dec, inc, tab = [], [], []
        for c, atom in self.terms:
            if isinstance(atom, Tabulated):
                tab.append((c, atom))
            elif isinstance(atom, Const) or c >= 0:
                dec.append((c, atom))
            else:
                inc.append((c, atom))
        return tuple(dec), tuple(inc), tuple(tab)

    def has_tabulated(self) -> bool:
        return any(isinstance(atom, Tabulated) for _, atom in self.terms)


ZERO = Potential(terms=((0.0, Const(0.0)),))


def _fmt(v: float) -> str:
    """Shortest round-trip decimal, integers without the trailing .0."""
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def print_potential(phi: Potential) -> str:
    """Canonical text form; parse(print(parse(t))) == parse(t)."""
    if not phi.terms:
        return "const(0)"
    parts = []
    for i, (c, atom) in enumerate(phi.terms):
        if isinstance(atom, NegLogDf):
            c = -c
        mag = abs(c)
        body = f"{_fmt(mag)}*{atom.render()}"
        if i == 0:
            parts.append(body if c >= 0 else f"-{body}")
        else:
            parts.append(f"{'+' if c >= 0 else '-'} {body}")
    return " ".join(parts)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)"
    r"|(?P<name>[a-z_]+)"
    r"|(?P<punct>[()*+-])"
    r"|(?P<path>[^\s()*+-]+))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].isspace():
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"parse error at position {pos}: {text[pos:pos+10]!r}")
        for kind in ("num", "name", "punct", "path"):
            if m.group(kind) is not None:
                out.append((kind, m.group(kind), pos))
                break
        pos = m.end()
    return out


class _Parser:
    """Recursive-descent parser for
    expr := term (('+'|'-') term)* ; term := number '*' atom | atom."""

    def __init__(self, text: str, params: MapParams):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.params = params

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("end", "", len(self.text))

    def take(self, kind=None, value=None):
        tok = self.peek()
        if kind and tok[0] != kind or value is not None and tok[1] != value:
            raise ValueError(
                f"parse error at position {tok[2]}: expected {value or kind}, got {tok[1]!r}"
            )
        self.i += 1
        return tok

    def parse(self) -> Potential:
        lead = 1.0
        if self.peek()[1] in ("+", "-"):
            lead = 1.0 if self.take()[1] == "+" else -1.0
        terms = [self.term(lead)]
        while self.peek()[1] in ("+", "-"):
            sign = 1.0 if self.take()[1] == "+" else -1.0
            terms.append(self.term(sign))
        if self.peek()[0] != "end":
            tok = self.peek()
            raise ValueError(f"parse error at position {tok[2]}: unexpected {tok[1]!r}")
        return Potential(terms=tuple(terms))

    def term(self, sign: float) -> tuple[float, Atom]:
        tok = self.peek()
        coeff = sign
        if tok[0] == "num":
            self.take()
            coeff = sign * float(tok[1])
            self.take("punct", "*")
        atom = self.atom()
        # Surface "logdf" means +log Df; the stored atom is -log Df.
        if isinstance(atom, NegLogDf):
            coeff = -coeff
        return (coeff, atom)

    def atom(self) -> Atom:
        tok = self.take()
        if tok[0] != "name":
            raise ValueError(f"parse error at position {tok[2]}: expected an atom")
        name = tok[1]
        if name == "logdf":
            return NegLogDf()
        if name == "omega":
            self.take("punct", "(")
            g = float(self.take("num")[1])
            self.take("punct", ")")
            return Omega(gamma=g)
        if name == "const":
            self.take("punct", "(")
            sign = 1.0
            if self.peek()[1] == "-":
                self.take()
                sign = -1.0
            c = sign * float(self.take("num")[1])
            self.take("punct", ")")
            return Const(c=c)
        if name == "table":
            self.take("punct", "(")
            parts = []
            while self.peek()[1] != ")" and self.peek()[0] != "end":
                parts.append(self.take()[1])
            self.take("punct", ")")
            return load_table("".join(parts))
        raise ValueError(f"unknown atom {name!r} at position {tok[2]}")


def load_table(path: str) -> Tabulated:
    """Read a tabulated atom from CSV: header ``x,value``, rows of samples,
    metadata comment lines ``# gamma=...`` and ``# seminorm=...``."""
    gamma = None
    seminorm = None
    xs, vals = [], []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("gamma="):
                gamma = float(body.split("=", 1)[1])
            elif body.startswith("seminorm="):
                seminorm = float(body.split("=", 1)[1])
            continue
        if line.lower().replace(" ", "") == "x,value":
            continue
        a, b = line.split(",")
        xs.append(float(a))
        vals.append(float(b))
    if gamma is None or seminorm is None:
        raise ValueError(f"{path}: missing '# gamma=' or '# seminorm=' metadata")
    return Tabulated(
        xs=tuple(xs), values=tuple(vals),
        declared_gamma=gamma, declared_seminorm=seminorm, source=path,
    )


def parse_potential(text: str, params: MapParams) -> Potential:
    """Parse an expression string into a Potential."""
    return _Parser(text, params).parse()


def eval_potential(phi: Potential, params: MapParams, x):
    """Pointwise value of the potential; scalars or arrays in [0, 1]."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("potential arguments must lie in [0, 1]")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    total = np.zeros_like(arr)
    for c, atom in phi.terms:
        total += c * atom.evaluate(params, arr)
    return float(total[0]) if scalar else total


def _eval_terms(terms, params: MapParams, arr: np.ndarray) -> np.ndarray:
    total = np.zeros_like(arr)
    for c, atom in terms:
        total += c * atom.evaluate(params, arr)
    return total


def eval_split(phi: Potential, params: MapParams, x: np.ndarray):
    """(nonincreasing part, nondecreasing part, tabulated part) values."""
    dec, inc, tab = phi.split()
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    return (
        _eval_terms(dec, params, arr),
        _eval_terms(inc, params, arr),
        _eval_terms(tab, params, arr),
    )


@dataclass(frozen=True)
class HolderData:
    """Hölder package of a potential: exponent, seminorm upper bound, and a
    sup-norm upper bound. The composite norm is sup_norm + seminorm."""

    gamma: float
    seminorm: float
    sup_norm: float
    estimate_only: bool = False  # True when a sampled tabulated bound entered

    @property
    def norm(self) -> float:
        return self.sup_norm + self.seminorm


def holder_data(phi: Potential, params: MapParams, gamma_request: float) -> HolderData:
    """Seminorm and sup-norm upper bounds at the requested exponent.

    Seminorms combine subadditively: |a*phi + b*psi|_g <= |a||phi|_g +
    |b||psi|_g; any upper bound keeps the certified consumers valid.
    Raises if the requested exponent exceeds an atom's valid range.
    """
    if not 0 < gamma_request <= 1:
        raise ValueError("requested exponent must lie in (0, 1]")
    seminorm = 0.0
    sup = 0.0
    estimate = False
    for c, atom in phi.terms:
        if isinstance(atom, Const):
            sup += abs(c) * atom.sup_norm(params)
            continue
        max_g = atom.max_exponent(params)
        if gamma_request > max_g + 1e-12:
            raise ValueError(
                f"atom {atom.render()} only supports exponents <= {max_g}, "
                f"requested {gamma_request}"
            )
        seminorm += abs(c) * atom.seminorm(params, gamma_request)
        sup += abs(c) * atom.sup_norm(params)
        if isinstance(atom, Tabulated):
            estimate = True
    return HolderData(
        gamma=gamma_request, seminorm=seminorm, sup_norm=sup, estimate_only=estimate
    )


def birkhoff(phi: Potential, params: MapParams, x: float, n: int) -> float:
    """Birkhoff sum S_n(phi)(x) along the forward orbit; S_0 = 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    total = 0.0
    z = float(x)
    for _ in range(n):
        total += eval_potential(phi, params, z)
        z = eval_map(params, z)
    return total


def zeta_sequence(phi: Potential, params: MapParams, n_max: int) -> np.ndarray:
    """zeta_n = exp(S_n(phi)(x_n) - n*phi(0)) for n = 1 .. n_max.

    The orbit of x_n climbs the neutral sequence x_n -> x_{n-1} -> ... ->
    x_1, so S_n(phi)(x_n) is a prefix sum of phi over that sequence.
    """
    orbit = neutral_orbit(params, n_max)
    vals = eval_potential(phi, params, orbit.points[1:])  # phi(x_1..x_{n_max})
    phi0 = eval_potential(phi, params, 0.0)
    csum = np.cumsum(vals)
    n = np.arange(1, n_max + 1)
    return np.exp(csum - n * phi0)


def zeta_n(phi: Potential, params: MapParams, n: int) -> float:
    """Single neutral-orbit weight exp(S_n(phi)(x_n) - n*phi(0))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(zeta_sequence(phi, params, n)[-1])
