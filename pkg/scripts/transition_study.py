#!/usr/bin/env python3
"""Trace how the temperature transition moves with the tangency exponent.

For each map exponent alpha in a grid this script brackets

  * ct(-log Df): the coupling where beta * (-log Df) stops being
    intermittent (expected near 1 for every alpha, since beta = 1 is the
    boundary case of the geometric potential), and
  * optionally tau0 = the boundary coupling of the omega ray above the
    zero potential (--with-trace; roughly one minute per alpha at the
    default tolerance).

Results go to a CSV so the drift can be plotted or diffed across runs.

Typical use:

    python3 scripts/transition_study.py --alphas 0.6:1.4:5 --out ct.csv
"""
from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass

from pmpressure.cli import _Usage, _join_flag_values, _parse_grid
from pmpressure.map_kernel import make_params
from pmpressure.phases import boundary_tau, ct_bracket
from pmpressure.potentials import ZERO, parse_potential


@dataclass(frozen=True)
class StudyConfig:
    alphas: tuple[float, ...]
    gamma: float
    tol: float
    trace_tol: float
    with_trace: bool
    out: str | None


def parse_args(argv: list[str] | None = None) -> StudyConfig:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alphas", default="0.6:1.4:3", help="grid LO:HI:STEPS")
    ap.add_argument("--gamma", type=float, default=0.5)
    ap.add_argument("--tol", type=float, default=0.25, help="ct bracket tolerance")
    ap.add_argument("--trace-tol", type=float, default=0.25)
    ap.add_argument("--with-trace", action="store_true")
    ap.add_argument("--out", default=None, help="CSV path (default: stdout)")
    raw = list(sys.argv[1:] if argv is None else argv)
    ns = ap.parse_args(_join_flag_values(raw))
    return StudyConfig(
        alphas=tuple(_parse_grid(ns.alphas, "alphas")),
        gamma=ns.gamma,
        tol=ns.tol,
        trace_tol=ns.trace_tol,
        with_trace=ns.with_trace,
        out=ns.out,
    )


def run(cfg: StudyConfig) -> list[dict]:
    rows = []
    for alpha in cfg.alphas:
        if cfg.gamma > alpha:
            print(f"skip alpha={alpha}: gamma={cfg.gamma} exceeds alpha", file=sys.stderr)
            continue
        params = make_params(alpha)
        geometric = parse_potential("-1*logdf", params)
        t0 = time.monotonic()
        ct = ct_bracket(geometric, params, gamma=cfg.gamma, tol=cfg.tol)
        row = {
            "alpha": alpha,
            "ct_lo": ct.lo,
            "ct_hi": ct.hi,
            "ct_stalled": ct.stalled,
            "seconds": round(time.monotonic() - t0, 2),
        }
        if cfg.with_trace:
            t1 = time.monotonic()
            tr = boundary_tau(ZERO, params, gamma=cfg.gamma, tol=cfg.trace_tol)
            row.update(
                tau0_lo=tr.lo,
                tau0_hi=tr.hi,
                trace_seconds=round(time.monotonic() - t1, 2),
            )
        print(f"alpha={alpha}: ct in [{ct.lo:.4g}, {ct.hi:.4g}]", file=sys.stderr)
        rows.append(row)
    return rows


def emit(cfg: StudyConfig, rows: list[dict]) -> None:
    if not rows:
        print("nothing to report", file=sys.stderr)
        return
    sink = open(cfg.out, "w", newline="") if cfg.out else sys.stdout
    try:
        writer = csv.writer(sink, lineterminator="\n")
        header = list(rows[0])
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [
                    row[k]
                    if isinstance(row[k], (str, bool, int))
                    else repr(float(row[k]))
                    for k in header
                ]
            )
    finally:
        if cfg.out:
            sink.close()


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_args(argv)
    except _Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    emit(cfg, run(cfg))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
