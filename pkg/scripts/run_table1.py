"""Range of circular skewness of ESS-vM distributions for orders 0..M."""

import argparse
import csv
import sys

from esscirc.moments import skewness_range


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-order", type=int, default=5)
    ap.add_argument("--csv", help="also write the table here")
    args = ap.parse_args()
    rows = [skewness_range(m) for m in range(args.max_order + 1)]
    print(f"{'m':>3} {'s_min':>10} {'s_max':>10} {'kappa':>10}")
    for r in rows:
        print(f"{r.m:>3} {r.s_min:>10.5f} {r.s_max:>10.5f} {r.kappa:>10.5f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["m", "s_min", "s_max", "kappa", "lambda"])
            for r in rows:
                w.writerow([r.m, f"{r.s_min:.10g}", f"{r.s_max:.10g}", f"{r.kappa:.10g}", r.lam])


if __name__ == "__main__":
    sys.exit(main())
