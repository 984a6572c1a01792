"""Run a Monte Carlo campaign from an INI file and export its tables.

    python scripts/run_simulation.py configs/wc_m3.ini --out results/ --workers 4
    python scripts/run_simulation.py configs/vm_m2.ini --out results/ --cells 8
"""

import argparse
import logging

from esscirc.experiments import default_workers, export_tables, load_campaign, run_campaign


def main():
    ap = argparse.ArgumentParser(description="Monte Carlo campaign runner")
    ap.add_argument("config")
    ap.add_argument("--out", default="results")
    ap.add_argument("--workers", type=int)
    ap.add_argument("--cells", type=int, nargs="*", help="cell indices to run (lambda-major order)")
    ap.add_argument("--replicates", type=int)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    campaign, extras = load_campaign(args.config)
    if args.replicates:
        from dataclasses import replace

        campaign = replace(campaign, replicates=args.replicates)
    workers = args.workers or extras.get("workers") or default_workers()
    for c, lam, n in campaign.cells():
        print(f"cell {c}: lambda={lam:g} n={n}")
    summaries = run_campaign(campaign, workers=workers, cells=set(args.cells) if args.cells else None)
    for p in export_tables(summaries, args.out, prefix=f"{campaign.name}_"):
        print("wrote", p)
    failures = sum(s.failures for s in summaries)
    if failures:
        print(f"{failures} individual fits failed (counted in the summaries)")


if __name__ == "__main__":
    main()
