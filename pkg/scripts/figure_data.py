"""Plot-ready curves: skewing functions, ESS-vM densities and skewness against lambda."""

import argparse
import csv
import math
from pathlib import Path

import numpy as np

from esscirc.ess import EssModel
from esscirc.moments import circular_skewness
from esscirc.skewing import skewing_cdf, skewing_pdf


def write(path, columns):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(columns))
        for row in zip(*columns.values()):
            w.writerow([f"{v:.10g}" for v in row])
    print("wrote", path)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    x = np.linspace(-1, 1, 201)
    cols = {"x": x}
    for m in (0, 1, 5):
        cols[f"g{m}"] = skewing_pdf(m, x)
        cols[f"G{m}"] = skewing_cdf(m, x)
    write(out / "skewing_functions.csv", cols)

    theta = np.linspace(-math.pi, math.pi, 361)
    cols = {"theta": theta}
    for m in (0, 1, 2, 5):
        for lam in (0.0, 0.5, 0.9):
            cols[f"m{m}_lam{lam}"] = EssModel.of("vm", 0.0, 8.0, lam, m).density(theta)
    write(out / "vm_densities.csv", cols)

    lams = np.linspace(-1, 1, 81)
    cols = {"lambda": lams}
    for family, conc in (("vm", 2.0), ("wc", 0.8)):
        for m in (0, 1, 2):
            cols[f"{family}_m{m}"] = [circular_skewness(EssModel.of(family, 0.0, conc, lam, m)) for lam in lams]
    write(out / "skewness_curves.csv", cols)


if __name__ == "__main__":
    main()
