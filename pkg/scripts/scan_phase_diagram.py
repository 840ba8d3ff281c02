#!/usr/bin/env python3
"""Scan a two-parameter slice of the phase plane and emit a CSV.

Each grid point (u, v) evaluates the potential

    phi = phi0 + u * dir_u + v * dir_v

and records the certified pressure bracket together with the phase verdict
derived from it.  The loop calls the same engine the ``pmpress scan``
subcommand uses, but goes through the library API directly so it can add a
midpoint column and an optional ASCII rendering of the verdict grid.

Typical use:

    python3 scripts/scan_phase_diagram.py --alpha 1.0 --gamma 0.5 \
        --u -1:1:21 --v 0.2:1.4:13 --out phase.csv --ascii
"""
from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass

from pmpressure.cli import _Usage, _join_flag_values, _parse_grid
from pmpressure.map_kernel import make_params
from pmpressure.potentials import parse_potential
from pmpressure.pressure import pressure

VERDICT_GLYPH = {"StationaryCertified": "#", "Intermittent": ".", "Undetermined": "?"}


@dataclass(frozen=True)
class ScanConfig:
    alpha: float
    gamma: float
    base: str
    dir_u: str
    dir_v: str
    u_grid: tuple[float, ...]
    v_grid: tuple[float, ...]
    tol: float
    induced_depth: int
    out: str | None
    ascii_art: bool


def parse_args(argv: list[str] | None = None) -> ScanConfig:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--gamma", type=float, default=0.5)
    ap.add_argument("--potential", default="const(0)", help="base potential phi0")
    ap.add_argument("--dir-u", default="omega(0.5)")
    ap.add_argument("--dir-v", default="-1*logdf")
    ap.add_argument("--u", default="-1:1:11", help="grid LO:HI:STEPS")
    ap.add_argument("--v", default="0.2:1.4:11", help="grid LO:HI:STEPS")
    ap.add_argument("--tol", type=float, default=0.1)
    ap.add_argument("--induced-depth", type=int, default=1024)
    ap.add_argument("--out", default=None, help="CSV path (default: stdout)")
    ap.add_argument("--ascii", action="store_true", help="print a glyph grid to stderr")
    raw = list(sys.argv[1:] if argv is None else argv)
    ns = ap.parse_args(_join_flag_values(raw))
    return ScanConfig(
        alpha=ns.alpha,
        gamma=ns.gamma,
        base=ns.potential,
        dir_u=ns.dir_u,
        dir_v=ns.dir_v,
        u_grid=tuple(_parse_grid(ns.u, "u")),
        v_grid=tuple(_parse_grid(ns.v, "v")),
        tol=ns.tol,
        induced_depth=ns.induced_depth,
        out=ns.out,
        ascii_art=ns.ascii,
    )


def run(cfg: ScanConfig) -> list[dict]:
    params = make_params(cfg.alpha)
    phi0 = parse_potential(cfg.base, params)
    du = parse_potential(cfg.dir_u, params)
    dv = parse_potential(cfg.dir_v, params)
    rows = []
    t0 = time.monotonic()
    for u in cfg.u_grid:
        for v in cfg.v_grid:
            phi = phi0.plus(du.scaled(u)).plus(dv.scaled(v))
            br = pressure(
                phi,
                params,
                gamma=cfg.gamma,
                tol=cfg.tol,
                induced_depth=cfg.induced_depth,
                tree_step_budget=48,
            )
            if br.stationary:
                verdict = "StationaryCertified"
            elif br.lower_gap_log > float("-inf"):
                verdict = "Intermittent"
            else:
                verdict = "Undetermined"
            rows.append(
                {
                    "u": u,
                    "v": v,
                    "verdict": verdict,
                    "P_lower": br.lower,
                    "P_upper": br.upper,
                    "P_mid": 0.5 * (br.lower + br.upper),
                }
            )
    print(
        f"scanned {len(rows)} points in {time.monotonic() - t0:.1f}s",
        file=sys.stderr,
    )
    return rows


def emit(cfg: ScanConfig, rows: list[dict]) -> None:
    sink = open(cfg.out, "w", newline="") if cfg.out else sys.stdout
    try:
        writer = csv.writer(sink, lineterminator="\n")
        header = list(rows[0])
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [row[k] if isinstance(row[k], str) else repr(row[k]) for k in header]
            )
    finally:
        if cfg.out:
            sink.close()
    if cfg.ascii_art:
        # v increases downward, u rightward
        by_uv = {(row["u"], row["v"]): VERDICT_GLYPH[row["verdict"]] for row in rows}
        for v in reversed(cfg.v_grid):
            line = "".join(by_uv[(u, v)] for u in cfg.u_grid)
            print(line, file=sys.stderr)
        print("legend: # stationary, . intermittent, ? undetermined", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_args(argv)
    except _Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rows = run(cfg)
    emit(cfg, rows)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
