"""Command-line interface: ``esscirc <subcommand> ...``.

Results are JSON for single objects and CSV for grids.  Numbers are printed
with at least ten significant digits.  Errors go to stderr with exit status 1
(2 for usage errors, as raised by argparse).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .datasets import AngleDataset, ingest, termite_mounds
from .ess import EssModel
from .experiments import default_workers, export_tables, load_campaign, run_campaign
from .inference import FitConfig, fit_mle
from .moments import circular_skewness, moments, skewness_range
from .selection import select_order, symmetry_test


def _num(x) -> str:
    return f"{float(x):.10g}"


def _clean(obj):
    """Make an object JSON-safe: arrays to lists, non-finite floats to null."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def _emit_json(obj, out) -> None:
    json.dump(_clean(obj), out, indent=2)
    out.write("\n")


def parse_grid(text: str) -> tuple[int, ...]:
    """'0..4' -> (0, 1, 2, 3, 4); '0,2,3' -> (0, 2, 3)."""
    text = text.strip()
    try:
        if ".." in text:
            a, b = text.split("..")
            grid = tuple(range(int(a), int(b) + 1))
        else:
            grid = tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad order grid {text!r}") from None
    if not grid:
        raise argparse.ArgumentTypeError("order grid is empty")
    return grid


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=("vm", "wc"), required=True)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--conc", type=float, required=True, help="kappa (vm) or rho (wc)")
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--m", type=int, default=0)


def _add_data_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", type=Path, help="file of angles")
    src.add_argument("--termite", type=int, choices=(1, 2), help="built-in termite-mound sample")
    p.add_argument("--unit", choices=("radians", "degrees"), default="radians")
    p.add_argument("--shift", type=float, default=None, help="radians added after conversion")


def _model(args) -> EssModel:
    return EssModel.of(args.family, args.mu, args.conc, args.lam, args.m)


def _data(args) -> AngleDataset:
    if args.termite is not None:
        return termite_mounds(args.termite)
    return ingest(args.data, unit=args.unit, shift=args.shift)


def cmd_density(args, out) -> None:
    if args.grid < 2:
        raise ValueError("--grid must be at least 2")
    model = _model(args)
    theta = -math.pi + 2 * math.pi * np.arange(args.grid) / args.grid
    dens = model.density(theta)
    out.write("theta,density\n")
    for t, f in zip(theta, dens):
        out.write(f"{_num(t)},{_num(f)}\n")


def cmd_moments(args, out) -> None:
    model = _model(args)
    t = moments(model, args.p)
    res = t.as_dict()
    try:
        res["skewness"] = circular_skewness(model)
    except ValueError:
        res["skewness"] = None
    _emit_json(res, out)


def cmd_skew_range(args, out) -> None:
    if args.family != "vm":
        raise ValueError("skewness ranges are tabulated for the vm family only")
    r = skewness_range(args.m)
    out.write("m,s_min,s_max,kappa,lambda\n")
    out.write(f"{r.m},{_num(r.s_min)},{_num(r.s_max)},{_num(r.kappa)},{_num(r.lam)}\n")


def cmd_sample(args, out) -> None:
    if args.n < 1:
        raise ValueError("--n must be positive")
    draws = _model(args).sample(args.n, np.random.default_rng(args.seed))
    out.writelines(f"{x:.17g}\n" for x in draws)


def _fit_config(args, m: int) -> FitConfig:
    return FitConfig(m=m, base_family=args.family, delta_lambda=args.delta_lambda)


def cmd_fit(args, out) -> None:
    ds = _data(args)
    report = fit_mle(ds.angles, _fit_config(args, args.m))
    res = report.to_dict()
    res["data"] = {"name": ds.name, "n": ds.n, "provenance": ds.provenance}
    _emit_json(res, out)


def cmd_select(args, out) -> None:
    ds = _data(args)
    sel = select_order(ds.angles, args.family, args.m_grid, delta_lambda=args.delta_lambda)
    res = {
        "family": args.family,
        "data": {"name": ds.name, "n": ds.n},
        "m_mll": sel.m_mll,
        "m_aic": sel.m_aic,
        "m_tic": sel.m_tic,
        "table": sel.table(),
    }
    _emit_json(res, out)


def cmd_symmetry(args, out) -> None:
    ds = _data(args)
    r = symmetry_test(ds.angles)
    st = r.sample_stats
    _emit_json(
        {
            "n": ds.n,
            "statistic": r.statistic,
            "p_value": r.p_value,
            "mean_direction": st.mean_direction,
            "mean_resultant_length": st.mean_resultant_length,
            "skewness": st.skewness,
        },
        out,
    )


def cmd_simulate(args, out) -> None:
    campaign, extras = load_campaign(args.config)
    if args.replicates is not None:
        from dataclasses import replace

        campaign = replace(campaign, replicates=args.replicates)
    workers = args.workers if args.workers is not None else extras.get("workers", default_workers())
    summaries = run_campaign(campaign, workers=workers)
    paths = export_tables(summaries, args.out, prefix=f"{campaign.name}_")
    _emit_json({"campaign": campaign.name, "files": [str(p) for p in paths]}, out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="esscirc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="density on a regular grid (CSV)")
    _add_model_args(p)
    p.add_argument("--grid", type=int, default=361)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("moments", help="p-th trigonometric moment and skewness (JSON)")
    _add_model_args(p)
    p.add_argument("--p", type=int, default=1)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("skew-range", help="range of circular skewness for order m (CSV row)")
    p.add_argument("--family", choices=("vm", "wc"), default="vm")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_skew_range)

    p = sub.add_parser("sample", help="random draws, one angle per line")
    _add_model_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("fit", help="maximum likelihood fit (JSON)")
    _add_data_args(p)
    p.add_argument("--family", choices=("vm", "wc"), required=True)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--delta-lambda", type=float, default=0.0)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select", help="fit over an order grid and report AIC/TIC (JSON)")
    _add_data_args(p)
    p.add_argument("--family", choices=("vm", "wc"), required=True)
    p.add_argument("--m-grid", type=parse_grid, default=(0, 1, 2, 3, 4))
    p.add_argument("--delta-lambda", type=float, default=0.0)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("symmetry", help="test of reflective symmetry (JSON)")
    _add_data_args(p)
    p.set_defaults(func=cmd_symmetry)

    p = sub.add_parser("simulate", help="run a Monte Carlo campaign from an INI file")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--replicates", type=int, default=None, help="override the configured count")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args, out)
    except (ValueError, FileNotFoundError, OSError, RuntimeError) as exc:
        print(f"esscirc {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
