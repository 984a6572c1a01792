"""Monte Carlo harness: estimator accuracy, order selection, boundary rates, TIC penalties.

Every replicate draws from its own stream seeded by ``(master_seed, cell, replicate)``
so a cell, or a single replicate, can be rerun in isolation and the results do
not depend on the number of workers.
"""

from __future__ import annotations

import configparser
import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .ess import EssModel, wrap_angle
from .inference import FitConfig, fit_mle

log = logging.getLogger(__name__)

WORKERS_ENV = "ESSCIRC_WORKERS"


def default_workers() -> int:
    return int(os.environ.get(WORKERS_ENV, "1"))


@dataclass(frozen=True)
class SimCampaign:
    family: str
    concentration: float
    true_m: int
    lambdas: tuple[float, ...]
    mu: float = 0.0
    n_grid: tuple[int, ...] = (100, 200, 500)
    replicates: int = 1000
    m_grid: tuple[int, ...] = (0, 1, 2, 3, 4)
    master_seed: int = 20240601
    name: str = "campaign"

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be positive")
        if not self.lambdas or not self.n_grid or not self.m_grid:
            raise ValueError("lambdas, n_grid and m_grid must be non-empty")
        EssModel.of(self.family, self.mu, self.concentration, self.lambdas[0], self.true_m)

    def cells(self) -> list[tuple[int, float, int]]:
        """(cell index, true lambda, n), lambda-major."""
        out = []
        for lam in self.lambdas:
            for n in self.n_grid:
                out.append((len(out), float(lam), int(n)))
        return out

    @property
    def fit_orders(self) -> tuple[int, ...]:
        orders = set(self.m_grid) | {self.true_m}
        return tuple(sorted(orders))

    def model(self, lam: float) -> EssModel:
        return EssModel.of(self.family, self.mu, self.concentration, lam, self.true_m)


def replicate_rng(master_seed: int, cell: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, cell, rep]))


@dataclass
class ReplicateResult:
    rep: int
    # per fitted order: (mu, conc, lam, loglik, aic, tic or nan, penalty or nan, se_lam or nan)
    fits: dict[int, tuple[float, ...]] = field(default_factory=dict)
    failures: dict[int, str] = field(default_factory=dict)


def run_replicate(campaign: SimCampaign, cell: int, lam: float, n: int, rep: int) -> ReplicateResult:
    rng = replicate_rng(campaign.master_seed, cell, rep)
    data = campaign.model(lam).sample(n, rng)
    out = ReplicateResult(rep)
    for m in campaign.fit_orders:
        try:
            f = fit_mle(data, FitConfig(m=m, base_family=campaign.family))
        except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
            out.failures[m] = str(exc)
            continue
        nan = float("nan")
        se_lam = float(f.se[2]) if f.se is not None else nan
        out.fits[m] = (
            f.mu,
            f.concentration,
            f.lam,
            f.loglik_total,
            f.aic,
            f.tic if f.tic is not None else nan,
            f.tic_penalty if f.tic_penalty is not None else nan,
            se_lam,
        )
    return out


def _run_chunk(args) -> list[ReplicateResult]:
    campaign, cell, lam, n, reps = args
    return [run_replicate(campaign, cell, lam, n, r) for r in reps]


@dataclass
class CellSummary:
    family: str
    true_m: int
    mu: float
    concentration: float
    lam: float
    n: int
    replicates: int
    mean: np.ndarray
    rmse: np.ndarray
    mean_se: np.ndarray  # Monte Carlo standard error of each mean
    selection_mll: dict[int, int]
    selection_tic: dict[int, int]
    boundary_rate: dict[int, float]
    penalty_mean: dict[int, float]
    penalty_sd: dict[int, float]
    penalty_excluded: dict[int, int]
    mean_reported_se_lam: float
    failures: int
    records: list[ReplicateResult] = field(default_factory=list, repr=False)

    @property
    def truth(self) -> np.ndarray:
        return np.array([self.mu, self.concentration, self.lam])


def summarize_cell(campaign: SimCampaign, lam: float, n: int, results: Sequence[ReplicateResult]) -> CellSummary:
    if not results:
        raise ValueError("cannot summarise an empty cell")
    truth = np.array([campaign.mu, campaign.concentration, lam])
    tm = campaign.true_m
    est = np.array([r.fits[tm][:3] for r in results if tm in r.fits])
    if est.size == 0:
        raise ValueError("no successful fits at the true order")
    # unwrap mu around its true value before averaging
    est[:, 0] = campaign.mu + wrap_angle(est[:, 0] - campaign.mu)
    err = est - truth
    mean = est.mean(axis=0)
    rmse = np.sqrt((err**2).mean(axis=0))
    mean_se = est.std(axis=0, ddof=1) / math.sqrt(len(est)) if len(est) > 1 else np.full(3, np.nan)

    grid = campaign.m_grid
    sel_mll = {m: 0 for m in grid}
    sel_tic = {m: 0 for m in grid}
    for r in results:
        ll = {m: r.fits[m][3] for m in grid if m in r.fits}
        if ll:
            sel_mll[max(ll, key=lambda m: (ll[m], -m))] += 1
        tic = {m: r.fits[m][5] for m in grid if m in r.fits and math.isfinite(r.fits[m][5])}
        if tic:
            sel_tic[min(tic, key=lambda m: (tic[m], m))] += 1

    boundary, pen_mean, pen_sd, pen_excl = {}, {}, {}, {}
    for m in grid:
        lams = np.array([r.fits[m][2] for r in results if m in r.fits])
        boundary[m] = float(np.mean(np.abs(lams) > 0.99)) if lams.size else float("nan")
        pens = np.array([r.fits[m][6] for r in results if m in r.fits])
        ok = pens[np.isfinite(pens)]
        pen_excl[m] = int(len(results) - ok.size)
        pen_mean[m] = float(ok.mean()) if ok.size else float("nan")
        pen_sd[m] = float(ok.std(ddof=1)) if ok.size > 1 else float("nan")

    se_lam = np.array([r.fits[tm][7] for r in results if tm in r.fits])
    se_lam = se_lam[np.isfinite(se_lam)]
    return CellSummary(
        family=campaign.family,
        true_m=tm,
        mu=campaign.mu,
        concentration=campaign.concentration,
        lam=lam,
        n=n,
        replicates=len(results),
        mean=mean,
        rmse=rmse,
        mean_se=mean_se,
        selection_mll=sel_mll,
        selection_tic=sel_tic,
        boundary_rate=boundary,
        penalty_mean=pen_mean,
        penalty_sd=pen_sd,
        penalty_excluded=pen_excl,
        mean_reported_se_lam=float(se_lam.mean()) if se_lam.size else float("nan"),
        failures=sum(len(r.failures) for r in results),
        records=list(results),
    )


def run_cell(campaign: SimCampaign, cell: int, lam: float, n: int, workers: int = 1) -> CellSummary:
    reps = list(range(campaign.replicates))
    if workers <= 1:
        results = _run_chunk((campaign, cell, lam, n, reps))
    else:
        chunks = [reps[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_chunk, [(campaign, cell, lam, n, c) for c in chunks])
            results = sorted((r for part in parts for r in part), key=lambda r: r.rep)
    return summarize_cell(campaign, lam, n, results)


def run_campaign(campaign: SimCampaign, workers: Optional[int] = None, cells=None) -> list[CellSummary]:
    """Run every (lambda, n) cell, or only those whose indices are listed in ``cells``."""
    workers = default_workers() if workers is None else workers
    out = []
    for c, lam, n in campaign.cells():
        if cells is not None and c not in cells:
            continue
        log.info("%s: cell %d (lambda=%g, n=%d)", campaign.name, c, lam, n)
        out.append(run_cell(campaign, c, lam, n, workers))
    return out


def penalty_curve(cell: CellSummary) -> dict[int, tuple[float, float, int]]:
    """Per fitted order: (mean penalty, SD, number of replicates excluded as singular)."""
    if cell.replicates == 0 or not cell.penalty_mean:
        raise ValueError("empty cell")
    return {m: (cell.penalty_mean[m], cell.penalty_sd[m], cell.penalty_excluded[m]) for m in cell.penalty_mean}


# ---------------------------------------------------------------------------
# configuration and export


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.replace(",", " ").split())


def _ints(s: str) -> tuple[int, ...]:
    s = s.strip()
    if ".." in s:
        a, b = s.split("..")
        return tuple(range(int(a), int(b) + 1))
    return tuple(int(x) for x in s.replace(",", " ").split())


def load_campaign(path) -> tuple[SimCampaign, dict]:
    """Read an INI file with a ``[campaign]`` section; returns the campaign and extras (workers)."""
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise FileNotFoundError(path)
    if "campaign" not in cp:
        raise ValueError(f"{path}: missing [campaign] section")
    sec = cp["campaign"]
    known = {"name", "family", "mu", "concentration", "lambdas", "true_m", "n_grid", "replicates", "m_grid", "seed", "workers"}
    unknown = set(sec) - known
    if unknown:
        raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
    campaign = SimCampaign(
        family=sec.get("family", "wc").strip().lower(),
        concentration=sec.getfloat("concentration"),
        true_m=sec.getint("true_m"),
        lambdas=_floats(sec["lambdas"]),
        mu=sec.getfloat("mu", 0.0),
        n_grid=_ints(sec.get("n_grid", "100 200 500")),
        replicates=sec.getint("replicates", 1000),
        m_grid=_ints(sec.get("m_grid", "0..4")),
        master_seed=sec.getint("seed", 20240601),
        name=sec.get("name", Path(path).stem),
    )
    extras = {}
    if "workers" in sec:
        extras["workers"] = sec.getint("workers")
    return campaign, extras


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.10g}"


PARAM_NAMES = {"vm": ("mu", "kappa", "lambda"), "wc": ("mu", "rho", "lambda")}


def table2_rows(summaries: Sequence[CellSummary]) -> tuple[list[str], list[list[str]]]:
    """Means and RMSEs: one row per (lambda, statistic), 3 parameter columns per n."""
    ns = sorted({s.n for s in summaries})
    lams = list(dict.fromkeys(s.lam for s in summaries))
    names = PARAM_NAMES[summaries[0].family]
    header = ["lambda", "statistic"] + [f"{p}_n{n}" for n in ns for p in names]
    by = {(s.lam, s.n): s for s in summaries}
    rows = []
    for lam in lams:
        for stat in ("mean", "rmse"):
            row = [_fmt(lam), stat]
            for n in ns:
                s = by.get((lam, n))
                vals = getattr(s, stat) if s is not None else [float("nan")] * 3
                row += [_fmt(v) for v in vals]
            rows.append(row)
    return header, rows


def selection_rows(summaries: Sequence[CellSummary]):
    grid = list(summaries[0].selection_mll)
    header = ["lambda", "n"] + [f"mll_m{m}" for m in grid] + [f"tic_m{m}" for m in grid]
    rows = [
        [_fmt(s.lam), _fmt(s.n)] + [_fmt(s.selection_mll[m]) for m in grid] + [_fmt(s.selection_tic[m]) for m in grid]
        for s in summaries
    ]
    return header, rows


def boundary_rows(summaries: Sequence[CellSummary]):
    grid = list(summaries[0].boundary_rate)
    header = ["lambda", "n"] + [f"m{m}" for m in grid]
    rows = [[_fmt(s.lam), _fmt(s.n)] + [_fmt(s.boundary_rate[m]) for m in grid] for s in summaries]
    return header, rows


def penalty_rows(summaries: Sequence[CellSummary]):
    header = ["lambda", "n", "m", "penalty_mean", "penalty_sd", "excluded"]
    rows = []
    for s in summaries:
        for m, (mean, sd, excl) in penalty_curve(s).items():
            rows.append([_fmt(s.lam), _fmt(s.n), _fmt(m), _fmt(mean), _fmt(sd), _fmt(excl)])
    return header, rows


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _pretty(header, rows) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(x).rjust(w) for x, w in zip(r, widths)) for r in [header, *rows]]
    return "\n".join(lines) + "\n"


def export_tables(summaries: Sequence[CellSummary], outdir, prefix: str = "") -> list[Path]:
    """Write estimator, selection, boundary and penalty tables as CSV plus a text rendering."""
    if not summaries:
        raise ValueError("nothing to export")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    tables = {
        "estimates": table2_rows(summaries),
        "selection": selection_rows(summaries),
        "boundary": boundary_rows(summaries),
        "penalty": penalty_rows(summaries),
    }
    written = []
    report = []
    for name, (header, rows) in tables.items():
        path = outdir / f"{prefix}{name}.csv"
        path.write_text(_csv_text(header, rows))
        written.append(path)
        report.append(f"== {name}\n{_pretty(header, rows)}")
    path = outdir / f"{prefix}report.txt"
    path.write_text("\n".join(report))
    written.append(path)
    return written
