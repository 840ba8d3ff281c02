"""Command-line front end: single computations, phase-diagram scans, and
the validation suite.  Output is data only (JSON or CSV); plotting is left
to external tools, though ``scan --plot-script`` emits a ready-to-run
matplotlib script as text.

Exit codes: 0 = certified result, 2 = user error (bad flags, bad
expression, bad config), 3 = undetermined / stalled within budget.
Validation failures exit 1.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import benchbook
from .map_kernel import MapParams, make_params
from .phases import (
    INTERMITTENT,
    STATIONARY,
    UNDETERMINED,
    boundary_tau,
    classify,
    ct_bracket,
    decay_fit,
    distortion_constants,
    ground_state_check,
    hausdorff_subsystem,
)
from .potentials import Omega, Potential, parse_potential
from .pressure import pressure

__all__ = ["main"]


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------


def _cell(v) -> str:
    """Render one value for CSV: floats with round-trip precision."""
    if isinstance(v, float):
        if math.isinf(v):
            return "infinity" if v > 0 else "-infinity"
        if math.isnan(v):
            return "nan"
        return repr(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _jsonable(v):
    if isinstance(v, float):
        if math.isinf(v) or math.isnan(v):
            return _cell(v)
        return v
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _emit_table(header: list[str], rows: list[list], fmt: str, out) -> None:
    if fmt == "json":
        payload = [dict(zip(header, map(_jsonable, row))) for row in rows]
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _emit_record(record: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(_jsonable(record), indent=2) + "\n")
    else:
        _emit_table(list(record), [list(record.values())], "csv", out)


class _Usage(Exception):
    """User error: reported on stderr, exit code 2."""


# ---------------------------------------------------------------------------
# option merging: built-in defaults < config file < explicit flags
# ---------------------------------------------------------------------------

_DEFAULTS = {
    "gamma": None,
    "tol": None,
    "nmax": None,
    "induced_depth": 10_000,
    "beta_max": 1024.0,
    "period_max": 8,
    "neutral_depth": 256,
    "threads": 1,
    "format": None,
    "out": None,
    "only": None,
    "potential": None,
    "dir_u": None,
    "dir_v": None,
    "u": None,
    "v": None,
    "alpha": None,
    "timings": False,
    "tau0": False,
    "plot_script": False,
}


class Opts:
    """Flag values merged over an optional JSON config file."""

    def __init__(self, args: argparse.Namespace):
        cfg = {}
        if getattr(args, "config", None):
            try:
                with open(args.config, encoding="utf-8") as fh:
                    cfg = json.load(fh)
            except (OSError, json.JSONDecodeError) as e:
                raise _Usage(f"cannot read config {args.config!r}: {e}")
            if not isinstance(cfg, dict):
                raise _Usage("config file must hold a JSON object")
            cfg = {str(k).replace("-", "_"): v for k, v in cfg.items()}
            unknown = set(cfg) - set(_DEFAULTS)
            if unknown:
                raise _Usage(f"unknown config keys: {', '.join(sorted(unknown))}")
        self._args = args
        self._cfg = cfg

    def get(self, name: str, fallback=None):
        v = getattr(self._args, name, None)
        if v is None or v is False and name in ("timings", "tau0", "plot_script"):
            v = self._cfg.get(name, None if v is None else v)
        if v is None:
            v = _DEFAULTS.get(name)
        if v is None:
            v = fallback
        return v

    def require(self, name: str):
        v = self.get(name)
        if v is None:
            raise _Usage(f"missing --{name.replace('_', '-')}")
        return v

    def params(self) -> MapParams:
        alpha = float(self.require("alpha"))
        if not 0 < alpha:
            raise _Usage("--alpha must be positive")
        return make_params(alpha)

    def potential(self, params: MapParams, key: str = "potential") -> Potential:
        text = self.require(key)
        try:
            return parse_potential(str(text), params)
        except ValueError as e:
            raise _Usage(f"--{key.replace('_', '-')}: {e}")


def _open_out(opts: Opts):
    path = opts.get("out")
    if path:
        return open(path, "w", encoding="utf-8", newline="")
    return None  # caller uses stdout


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_pressure(opts: Opts, out) -> int:
    params = opts.params()
    gamma = float(opts.require("gamma"))
    tol = float(opts.require("tol"))
    phi = opts.potential(params)
    kw = {}
    if opts.get("nmax") is not None:
        kw["n_max"] = int(opts.get("nmax"))
    br = pressure(phi, params, gamma, tol, induced_depth=int(opts.get("induced_depth")), **kw)
    _emit_record(
        {"lower": br.lower, "upper": br.upper, "method": br.method, "n_used": br.n_used},
        opts.get("format", "json"),
        out,
    )
    return 0 if br.width <= tol else 3


def cmd_classify(opts: Opts, out) -> int:
    params = opts.params()
    gamma = float(opts.require("gamma"))
    tol = float(opts.get("tol", 1e-3))
    phi = opts.potential(params)
    v = classify(phi, params, gamma, tol)
    _emit_record(
        {"verdict": v.label, "evidence": _jsonable(v.evidence)}
        if opts.get("format", "json") == "json"
        else {"verdict": v.label, **v.evidence},
        opts.get("format", "json"),
        out,
    )
    return 0 if v.label != UNDETERMINED else 3


def _bracket_record(br) -> dict:
    return {
        "lo": br.lo,
        "hi": br.hi,
        "kind": br.kind,
        "stalled": br.stalled,
        "notes": br.notes,
    }


def cmd_ct(opts: Opts, out) -> int:
    params = opts.params()
    gamma = float(opts.require("gamma"))
    tol = float(opts.get("tol", 0.1))
    phi = opts.potential(params)
    br = ct_bracket(phi, params, gamma, tol, beta_max=float(opts.get("beta_max")))
    _emit_record(_bracket_record(br), opts.get("format", "json"), out)
    return 3 if br.stalled else 0


def cmd_trace(opts: Opts, out) -> int:
    params = opts.params()
    gamma = float(opts.require("gamma"))
    tol = float(opts.get("tol", 0.05))
    phi = opts.potential(params)
    br = boundary_tau(phi, params, gamma, tol)
    _emit_record(_bracket_record(br), opts.get("format", "json"), out)
    return 3 if br.stalled else 0


def cmd_groundstate(opts: Opts, out) -> int:
    params = opts.params()
    phi = opts.potential(params)
    rep = ground_state_check(
        phi,
        params,
        period_max=int(opts.get("period_max")),
        neutral_depth=int(opts.get("neutral_depth")),
    )
    witness = (
        "".join(map(str, rep.witness_itinerary)) if rep.witness_itinerary else ""
    )
    _emit_record(
        {
            "status": rep.status,
            "margin": rep.margin,
            "period_max": rep.period_max,
            "neutral_depth": rep.neutral_depth,
            "witness_itinerary": witness,
            "witness_point": rep.witness_point,
            "witness_average": rep.witness_average,
        },
        opts.get("format", "json"),
        out,
    )
    return 0 if rep.status == "Violated" else 3


def cmd_decay(opts: Opts, out) -> int:
    params = opts.params()
    phi = opts.potential(params)
    n_hi = int(opts.get("nmax", 10_000) or 10_000)
    fit = decay_fit(phi, params, (100, n_hi))
    _emit_record(
        {"C_fit": fit.C_fit, "delta_fit": fit.delta_fit, "residual": fit.residual},
        opts.get("format", "json"),
        out,
    )
    return 0


def cmd_dimension(opts: Opts, out) -> int:
    params = opts.params()
    n = int(opts.get("nmax", 5) or 5)
    tol = float(opts.get("tol", 1e-3))
    br = hausdorff_subsystem(params, n, tol)
    _emit_record(
        {
            "lower": br.lower,
            "upper": br.upper,
            "branches": br.branches,
            "levels": br.levels,
        },
        opts.get("format", "json"),
        out,
    )
    return 0


def cmd_distortion(opts: Opts, out) -> int:
    params = opts.params()
    n = int(opts.get("nmax", 12) or 12)
    d = distortion_constants(params, N=n)
    _emit_record(
        {
            "eps0": d.eps0,
            "eps1": d.eps1,
            "C1": d.C1,
            "D": d.D,
            "certified_depth": d.certified_depth,
        },
        opts.get("format", "json"),
        out,
    )
    return 0


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------


def _parse_grid(text: str, flag: str) -> list[float]:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise _Usage(f"--{flag} must be LO:HI:STEPS")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise _Usage(f"--{flag} must be LO:HI:STEPS")
    if n < 1:
        raise _Usage(f"--{flag}: STEPS must be >= 1")
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _verdict_of(br) -> str:
    if br.stationary:
        return STATIONARY
    if br.lower_gap_log > -math.inf:
        return INTERMITTENT
    return UNDETERMINED


def _pure_omega(phi: Potential):
    """(gamma, coefficient) if phi is a single positively scaled omega atom."""
    if len(phi.terms) != 1:
        return None
    c, atom = phi.terms[0]
    if isinstance(atom, Omega) and c > 0:
        return atom.gamma, c
    return None


_PLOT_SCRIPT = """\
#!/usr/bin/env python3
# Render a scan CSV as a phase-diagram heat map.  Usage: plot.py scan.csv
import csv, sys
import matplotlib.pyplot as plt

rows = list(csv.DictReader(r for r in open(sys.argv[1]) if not r.startswith("#")))
us = sorted({float(r["u"]) for r in rows})
vs = sorted({float(r["v"]) for r in rows})
code = {"Intermittent": 0, "Undetermined": 1, "StationaryCertified": 2}
grid = [[float("nan")] * len(us) for _ in vs]
for r in rows:
    grid[vs.index(float(r["v"]))][us.index(float(r["u"]))] = code.get(r["verdict"], 1)
plt.pcolormesh(us, vs, grid, vmin=0, vmax=2, cmap="coolwarm")
plt.xlabel("u"); plt.ylabel("v"); plt.colorbar(label="0=Int 1=Und 2=Stat")
plt.tight_layout(); plt.savefig("scan.png", dpi=150)
print("wrote scan.png")
"""


def cmd_scan(opts: Opts, out) -> int:
    params = opts.params()
    gamma = float(opts.require("gamma"))
    tol = float(opts.get("tol", 0.05))
    base = opts.potential(params)
    dir_u = opts.potential(params, "dir_u")
    dir_v = opts.potential(params, "dir_v")
    us = _parse_grid(opts.require("u"), "u")
    vs = _parse_grid(opts.require("v"), "v")
    threads = max(1, int(opts.get("threads")))
    timings = bool(opts.get("timings"))
    induced_depth = int(opts.get("induced_depth"))
    n_max = int(opts.get("nmax", 12) or 12)

    def one(point):
        u, v = point
        phi = base.plus(dir_u.scaled(u)).plus(dir_v.scaled(v))
        t0 = time.monotonic()
        try:
            br = pressure(
                phi,
                params,
                gamma,
                tol,
                n_max=n_max,
                induced_depth=induced_depth,
                tree_step_budget=48,
            )
            row = [u, v, _verdict_of(br), br.lower, br.upper]
        except Exception as e:  # per-point failure: record, keep scanning
            row = [u, v, f"Error({type(e).__name__}: {e})", math.nan, math.nan]
        if timings:
            row.append(time.monotonic() - t0)
        return row

    points = [(u, v) for u in us for v in vs]  # grid order
    if threads == 1:
        rows = [one(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, points))  # map preserves grid order

    header = ["u", "v", "verdict", "P_lower", "P_upper"]
    if timings:
        header.append("wall_time")
    fmt = opts.get("format", "csv")
    _emit_table(header, rows, fmt, out)

    if opts.get("tau0"):
        if fmt != "csv":
            raise _Usage("--tau0 requires --format csv")
        om = _pure_omega(dir_v)
        if om is None:
            raise _Usage("--tau0 requires --dir-v to be a scaled omega atom")
        g, c = om
        for u in us:
            br = boundary_tau(base.plus(dir_u.scaled(u)), params, g, tol=max(tol, 0.05))
            line = (
                f"# tau0 u={_cell(u)} lo={_cell(br.lo / c)} "
                f"hi={_cell(br.hi / c)} stalled={_cell(br.stalled)}"
            )
            out.write(line + "\n")

    if opts.get("plot_script"):
        if not opts.get("out"):
            raise _Usage("--plot-script requires --out for the data rows")
        sys.stdout.write(_PLOT_SCRIPT)
    return 0


def cmd_validate(opts: Opts, out) -> int:
    only = opts.get("only")
    try:
        rows = benchbook.run_scenario(only) if only else benchbook.run_all()
    except ValueError as e:
        raise _Usage(str(e))
    fmt = opts.get("format", "json")
    if fmt == "json":
        out.write(benchbook.report_json(rows) + "\n")
    else:
        _emit_table(
            ["scenario", "check", "expected", "got", "pass", "reference"],
            [[r.scenario, r.check, r.expected, r.got, r.passed, r.reference] for r in rows],
            "csv",
            out,
        )
    return 0 if benchbook.all_passed(rows) else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

_COMMANDS = {
    "pressure": cmd_pressure,
    "classify": cmd_classify,
    "ct": cmd_ct,
    "trace": cmd_trace,
    "groundstate": cmd_groundstate,
    "decay": cmd_decay,
    "dimension": cmd_dimension,
    "distortion": cmd_distortion,
    "scan": cmd_scan,
    "validate": cmd_validate,
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float)
    common.add_argument("--gamma", type=float)
    common.add_argument("--potential", type=str)
    common.add_argument("--tol", type=float)
    common.add_argument("--nmax", type=int)
    common.add_argument("--induced-depth", dest="induced_depth", type=int)
    common.add_argument("--beta-max", dest="beta_max", type=float)
    common.add_argument("--period-max", dest="period_max", type=int)
    common.add_argument("--neutral-depth", dest="neutral_depth", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", type=str)
    common.add_argument("--config", type=str)

    parser = argparse.ArgumentParser(
        prog="pmpress",
        description="Certified pressure, phase classification, and scans "
        "for the intermittent interval map family.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "scan":
            p.add_argument("--dir-u", dest="dir_u", type=str)
            p.add_argument("--dir-v", dest="dir_v", type=str)
            p.add_argument("--u", type=str, help="grid LO:HI:STEPS")
            p.add_argument("--v", type=str, help="grid LO:HI:STEPS")
            p.add_argument("--timings", action="store_true")
            p.add_argument("--tau0", action="store_true")
            p.add_argument("--plot-script", dest="plot_script", action="store_true")
        if name == "validate":
            p.add_argument("--only", type=str)
    return parser


_VALUE_FLAGS = {
    "--alpha", "--gamma", "--potential", "--tol", "--nmax", "--induced-depth",
    "--beta-max", "--period-max", "--neutral-depth", "--threads", "--format",
    "--out", "--config", "--dir-u", "--dir-v", "--u", "--v", "--only",
}


def _join_flag_values(argv: list[str]) -> list[str]:
    """Turn ``--flag value`` into ``--flag=value`` so values with a leading
    dash (potential expressions, negative grid bounds) parse as values."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_join_flag_values(list(argv)))
    try:
        opts = Opts(args)
        sink = _open_out(opts)
        try:
            return _COMMANDS[args.command](opts, sink or sys.stdout)
        finally:
            if sink:
                sink.close()
    except _Usage as e:
        print(f"pmpress {args.command}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
