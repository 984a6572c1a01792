"""Place the termite-mound table (B13.csv) under ./data and check it.

The table is not distributed with this repository.  It ships with the MIT
licensed pycircstat2 package; this script copies it from an installed copy
(``pip install pycircstat2``) or from a path you supply, then reports whether
each sample reproduces the reference statistics.
"""

import argparse
import shutil
from pathlib import Path

from esscirc.datasets import TERMITE_FINGERPRINTS, fingerprint, find_termite_file, matches_reference, termite_mounds


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--source", type=Path, help="path to a B13.csv")
    ap.add_argument("--dest", type=Path, default=Path("data"))
    args = ap.parse_args()
    src = args.source or find_termite_file()
    if src is None:
        raise SystemExit("no B13.csv found: pip install pycircstat2 or pass --source")
    args.dest.mkdir(parents=True, exist_ok=True)
    target = args.dest / "B13.csv"
    if src.resolve() != target.resolve():
        shutil.copyfile(src, target)
    print("using", target)
    for which in (1, 2):
        ds = termite_mounds(which, path=target)
        fp = fingerprint(ds.angles)
        known = TERMITE_FINGERPRINTS.get(which)
        status = "matches reference statistics" if matches_reference(ds, which) else "DOES NOT match reference statistics"
        print(f"dataset {which}: n={ds.n}, {status}; fingerprint {fp[:16]}" + ("" if known is None else f" (expected {known[:16]})"))


if __name__ == "__main__":
    main()
