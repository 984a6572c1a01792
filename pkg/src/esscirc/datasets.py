"""Angle-file ingestion and the termite-mound orientation data.

The termite data (Fisher's B13 table, as distributed with several circular
statistics packages) is not shipped here.  :func:`termite_mounds` looks for a
``B13.csv`` under ``$ESSCIRC_DATA``, ``./data`` or an installed ``pycircstat2``.
"""

from __future__ import annotations

import csv
import hashlib
import importlib.util
import math
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .ess import wrap_angle

DATA_ENV = "ESSCIRC_DATA"
_SPLIT = re.compile(r"[\s,;]+")


@dataclass(frozen=True)
class AngleDataset:
    name: str
    angles: np.ndarray
    provenance: str

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("an angle dataset needs at least one value")
        if not np.all((a >= -math.pi) & (a < math.pi)):
            raise ValueError("angles must lie in [-pi, pi)")

    @property
    def n(self) -> int:
        return int(np.size(self.angles))


def _to_radians(values: np.ndarray, unit: str, shift: Optional[float]) -> tuple[np.ndarray, float]:
    if unit not in ("degrees", "radians"):
        raise ValueError(f"unit must be 'degrees' or 'radians', got {unit!r}")
    if shift is None:
        shift = -math.pi if unit == "degrees" else 0.0
    rad = np.deg2rad(values) if unit == "degrees" else np.asarray(values, dtype=float)
    return wrap_angle(rad + shift), shift


def ingest(path, unit: str = "radians", shift: Optional[float] = None, name: Optional[str] = None) -> AngleDataset:
    """Read numbers separated by whitespace, commas or newlines; ``#`` starts a comment.

    Degrees are converted to radians and, unless ``shift`` is given, shifted by
    -pi.  The result is wrapped into [-pi, pi).
    """
    path = Path(path)
    values = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            for tok in _SPLIT.split(body):
                if not tok:
                    continue
                try:
                    v = float(tok)
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: cannot parse {tok!r} as a number") from None
                if not math.isfinite(v):
                    raise ValueError(f"{path}:{lineno}: non-finite value {tok!r}")
                values.append(v)
    if not values:
        raise ValueError(f"{path}: no angles found")
    angles, shift = _to_radians(np.array(values), unit, shift)
    prov = f"{path} ({unit}, shift {shift:+.6g} rad, wrapped to [-pi, pi))"
    return AngleDataset(name or path.stem, angles, prov)


# ---------------------------------------------------------------------------
# termite mounds

# set labels inside B13.csv for the two samples analysed
TERMITE_SETS = {1: 8, 2: 1}
# (n, mean direction, mean resultant length) after deg -> rad and -pi, from the published analysis
TERMITE_REFERENCE = {1: (48, -0.0989, 0.9427), 2: (100, 0.0489, 0.8826)}
# fingerprint() of the transformed samples known to reproduce the reference statistics
TERMITE_FINGERPRINTS = {1: "b0f61193990fbb74c0f704cd35036dc25bc2b4f79cdac61a49201d7e7e7e3373"}


def _candidate_files() -> list[Path]:
    out = []
    env = os.environ.get(DATA_ENV)
    if env:
        out.append(Path(env) / "B13.csv")
    out.append(Path.cwd() / "data" / "B13.csv")
    out.append(Path(__file__).resolve().parents[2] / "data" / "B13.csv")
    spec = importlib.util.find_spec("pycircstat2")
    if spec is not None and spec.submodule_search_locations:
        for loc in spec.submodule_search_locations:
            out.append(Path(loc) / "data" / "fisher" / "B13.csv")
    return out


def find_termite_file() -> Optional[Path]:
    for p in _candidate_files():
        if p.is_file():
            return p
    return None


def fingerprint(angles) -> str:
    """SHA-256 of the angles rounded to 1e-9 rad, sorted; stable across file layouts."""
    a = np.sort(np.round(np.asarray(angles, dtype=float), 9))
    return hashlib.sha256(",".join(f"{x:.9f}" for x in a).encode()).hexdigest()


def matches_reference(dataset: AngleDataset, which: int, tol: float = 5e-4) -> bool:
    """True when n, mean direction and resultant length agree with the published values."""
    n, md, r = TERMITE_REFERENCE[which]
    a = dataset.angles
    c, s = np.cos(a).mean(), np.sin(a).mean()
    return dataset.n == n and abs(math.atan2(s, c) - md) <= tol and abs(math.hypot(c, s) - r) <= tol


def termite_mounds(which: int, path=None) -> AngleDataset:
    """Dataset 1 (n = 48) or Dataset 2 (n = 100) of the termite-mound orientations, in radians."""
    if which not in TERMITE_SETS:
        raise ValueError("which must be 1 or 2")
    path = Path(path) if path is not None else find_termite_file()
    if path is None or not path.is_file():
        raise FileNotFoundError(
            f"B13.csv not found; set ${DATA_ENV}, place it under ./data, or install pycircstat2 "
            "(see scripts/fetch_data.py)"
        )
    label = str(TERMITE_SETS[which])
    degs = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        angle_col = next(c for c in reader.fieldnames if c not in ("", "set", "latitude", "longitude"))
        for row in reader:
            if row["set"].strip() == label:
                degs.append(float(row[angle_col]))
    if not degs:
        raise ValueError(f"{path}: no rows for set {label}")
    angles, _ = _to_radians(np.array(degs), "degrees", None)
    return AngleDataset(f"termite{which}", angles, f"{path} set {label} (degrees, shift -pi)")
