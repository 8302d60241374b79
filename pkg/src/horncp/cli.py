"""Command-line jobs: detect, simulate, table, ingest, scatter, bootstrap, zero-curve.

Data goes to ``--output`` (or standard output); diagnostics go to standard
error. Every output carries the resolved configuration, including the seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from contextlib import contextmanager
from dataclasses import asdict
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .detect import SCORE_ALIASES, detect
from .ingest import IngestError, daily_w_series, read_minute_bars, write_daily_w, yearly_slice
from .manifold import embed_batch
from .simulation import (DEFAULT_SEED, ScenarioConfig, monte_carlo_risk,
                         parametric_bootstrap_risk, run_replicates,
                         zero_probability_curve)
from .types import DegenerateScaleError, Series

SCORE_CHOICES = ("likelihood", "cusum", "sn")
TABLE_DEFAULTS = {"cusum": (0.5, 0.9), "self-normalized": (0.25, 0.35)}


def fmt(value) -> str:
    """Nine significant digits for floats; everything else verbatim."""
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.9g}"
    return str(value)


def _round(obj):
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.9g}")
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dump_json(obj, stream) -> None:
    json.dump(_round(obj), stream, indent=2)
    stream.write("\n")


@contextmanager
def _open_output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_rows(rows: list[dict], meta: dict, fmt_name: str, path: Optional[str]) -> None:
    with _open_output(path) as out:
        if fmt_name == "json":
            dump_json({"config": meta, "rows": rows}, out)
            return
        out.write("# " + json.dumps(_round(meta), sort_keys=True) + "\n")
        if not rows:
            return
        writer = csv.writer(out, lineterminator="\n")
        keys = list(rows[0])
        writer.writerow(keys)
        for row in rows:
            writer.writerow([fmt(row[k]) for k in keys])


def read_series_file(path: str, sigma: Optional[float] = None) -> Series:
    """Values from a ``date,w`` CSV, a one-column CSV with a header, or bare numbers."""
    with open(path, newline="") as fh:
        text = fh.read()
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    if not rows:
        raise ValueError(f"{path}: no data")
    col = len(rows[0]) - 1
    try:
        float(rows[0][col])
        body = rows
    except ValueError:
        header = [h.strip().lower() for h in rows[0]]
        for name in ("w", "value", "x"):
            if name in header:
                col = header.index(name)
                break
        body = rows[1:]
    values = []
    for i, row in enumerate(body, start=1 if body is rows else 2):
        try:
            values.append(float(row[col]))
        except (ValueError, IndexError):
            raise ValueError(f"{path}: line {i}: cannot parse a number") from None
    return Series(values, sigma)


def _scenario_args(p: argparse.ArgumentParser, multi: bool = False) -> None:
    nargs = "+" if multi else None
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--r", type=int, nargs=nargs, default=[0] if multi else 0)
    p.add_argument("--delta", type=float, nargs=nargs, default=[0.0] if multi else 0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--replicates", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--score", choices=SCORE_CHOICES, default="likelihood")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--plug-in", action="store_true",
                   help="estimate sigma from each replicate instead of using the true value")


def _config(args, r: int, delta: float) -> ScenarioConfig:
    return ScenarioConfig(n=args.n, r=r, delta=delta, sigma=args.sigma,
                          replicates=args.replicates, seed=args.seed,
                          estimator=args.score, known_sigma=not args.plug_in)


def cmd_detect(args) -> int:
    series = read_series_file(args.input, args.sigma)
    est = detect(series, score=args.score,
                 plug_in="global" if args.global_sigma else "pooled")
    with _open_output(args.output) as out:
        dump_json(est.to_dict(), out)
    return 0


def cmd_simulate(args) -> int:
    rows = []
    for delta in args.delta:
        for r in args.r:
            cfg = _config(args, r, delta)
            rep = monte_carlo_risk(cfg, workers=args.workers)
            d = rep.to_dict()
            rows.append({
                "n": cfg.n, "r": cfg.r, "delta": cfg.delta, "t": cfg.r / cfg.n,
                "mean_loss_mle": d["mean_loss_mle"],
                "mean_loss_proposed": d["mean_loss_proposed"],
                "se_loss_mle": d["se_loss_mle"],
                "se_loss_proposed": d["se_loss_proposed"],
                "relative_efficiency": d["relative_efficiency"],
                "zero_rate": d["zero_rate"],
                "rejections": d["rejections"],
            })
            print(f"n={cfg.n} r={cfg.r} delta={cfg.delta}: RE={fmt(d['relative_efficiency'])}",
                  file=sys.stderr)
    meta = {"command": "simulate", "n": args.n, "r": args.r, "delta": args.delta,
            "sigma": args.sigma, "replicates": args.replicates, "seed": args.seed,
            "score": SCORE_ALIASES[args.score], "known_sigma": not args.plug_in}
    write_rows(rows, meta, args.format, args.output)
    return 0


def table_rows(which: str, n: int, deltas, change_points, replicates: int, seed: int,
               workers: int = 1) -> list[dict]:
    """Baseline vs walk average errors, one row per (delta, change point)."""
    rows = []
    for delta in deltas:
        for cp in change_points:
            cfg = ScenarioConfig(n=n, r=cp, delta=delta, replicates=replicates,
                                 seed=seed, estimator=which)
            rep = monte_carlo_risk(cfg, workers=workers)
            base, prop = rep.mean_loss_mle, rep.mean_loss_proposed
            rows.append({
                "change_point": cp, "delta": delta,
                "baseline": base, "proposed": prop,
                "ratio": prop / base if base > 0 else float("nan"),
            })
    return rows


def cmd_table(args) -> int:
    which = SCORE_ALIASES[args.which]
    deltas = args.delta or TABLE_DEFAULTS[which]
    cps = args.r or [args.n * i // 6 for i in range(1, 6)]
    rows = table_rows(which, args.n, deltas, cps, args.replicates, args.seed, args.workers)
    meta = {"command": "table", "which": which, "n": args.n, "delta": list(deltas),
            "change_points": list(cps), "replicates": args.replicates, "seed": args.seed}
    write_rows(rows, meta, args.format, args.output)
    return 0


def cmd_ingest(args) -> int:
    with open(args.input, newline="") as fh:
        bars = read_minute_bars(fh)
    days, report = daily_w_series(bars)
    print(report.summary(), file=sys.stderr)
    for d in report.dropped:
        print(f"dropped {d.isoformat()}: zero high-low spread", file=sys.stderr)
    if args.year is not None:
        yearly_slice(days, args.year)
        days = [d for d in days if d.date.year == args.year]
    with _open_output(args.output) as out:
        write_daily_w(days, out)
    return 0


def cmd_scatter(args) -> int:
    cfg = _config(args, args.r, args.delta)
    res = run_replicates(cfg, workers=args.workers)
    u_mle = embed_batch(res.t_mle, res.theta_mle)
    u_hat = embed_batch(res.t_hat, res.theta_hat)
    rows = []
    for label, pts in (("mle", u_mle), ("proposed", u_hat)):
        for j, u in enumerate(pts):
            rows.append({"replicate": j, "estimator": label,
                         "u1": float(u[0]), "u2": float(u[1]), "u3": float(u[2])})
    meta = {"command": "scatter", **cfg.to_dict()}
    write_rows(rows, meta, args.format, args.output)
    return 0


def cmd_bootstrap(args) -> int:
    series = read_series_file(args.input, args.sigma)
    res = parametric_bootstrap_risk(series, args.replicates, args.seed, args.workers)
    out = {
        "risk_mle": res.risk_mle,
        "risk_proposed": res.risk_proposed,
        "fit_mle": asdict(res.fit_mle),
        "fit_proposed": asdict(res.fit_proposed),
        "replicates": args.replicates,
        "seed": args.seed,
    }
    with _open_output(args.output) as fh:
        dump_json(out, fh)
    return 0


def cmd_zero_curve(args) -> int:
    curve = zero_probability_curve(args.sizes, args.replicates, args.seed,
                                   SCORE_ALIASES[args.score], args.workers)
    rows = [{"n": n, "zero_rate": z} for n, z in curve]
    meta = {"command": "zero-curve", "sizes": args.sizes, "replicates": args.replicates,
            "seed": args.seed, "score": SCORE_ALIASES[args.score]}
    write_rows(rows, meta, args.format, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="horncp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="estimate the change point of one series (JSON)")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--sigma", type=float)
    p.add_argument("--score", choices=SCORE_CHOICES, default="likelihood")
    p.add_argument("--global-sigma", action="store_true",
                   help="plug-in sigma from the whole series instead of the MLE split")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("simulate", help="Monte Carlo risk of both estimators")
    _scenario_args(p, multi=True)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("table", help="baseline vs walk errors over change points")
    p.add_argument("which", choices=("cusum", "self-normalized", "sn"))
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--r", type=int, nargs="+")
    p.add_argument("--delta", type=float, nargs="+")
    p.add_argument("--replicates", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("ingest", help="per-minute OHLC CSV to daily W series")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--year", type=int)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("scatter", help="manifold point clouds of both estimators")
    _scenario_args(p)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("bootstrap", help="parametric bootstrap risks for one series")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--sigma", type=float)
    p.add_argument("--replicates", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("zero-curve", help="P(walk reports no change) on no-change data")
    p.add_argument("--sizes", type=int, nargs="+", default=[100, 1000, 10000])
    p.add_argument("--replicates", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--score", choices=SCORE_CHOICES, default="likelihood")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_zero_curve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DegenerateScaleError, IngestError, ValueError, OSError) as exc:
        print(f"horncp {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
