"""Order selection over a grid of m, sample circular statistics and a symmetry test."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm

from .ess import wrap_angle
from .inference import FitConfig, FitReport, fit_mle

DEFAULT_GRID = (0, 1, 2, 3, 4)


@dataclass
class OrderSelection:
    family: str
    grid: tuple[int, ...]
    fits: dict[int, FitReport]
    failures: dict[int, str] = field(default_factory=dict)

    @property
    def m_mll(self) -> int:
        """Order maximising the log-likelihood (equivalently minimising AIC)."""
        return max(self.fits, key=lambda m: (self.fits[m].loglik_total, -m))

    @property
    def m_aic(self) -> int:
        return min(self.fits, key=lambda m: (self.fits[m].aic, m))

    @property
    def m_tic(self) -> Optional[int]:
        usable = {m: f.tic for m, f in self.fits.items() if f.tic is not None}
        if not usable:
            return None
        return min(usable, key=lambda m: (usable[m], m))

    def table(self) -> list[dict]:
        rows = []
        for m in self.grid:
            if m not in self.fits:
                rows.append({"m": m, "error": self.failures.get(m, "")})
                continue
            f = self.fits[m]
            rows.append(
                {
                    "m": m,
                    "mu": f.mu,
                    "concentration": f.concentration,
                    "lambda": f.lam,
                    "loglik": f.loglik_total,
                    "aic": f.aic,
                    "tic": f.tic,
                    "penalty": f.tic_penalty,
                    "boundary": f.boundary,
                }
            )
        return rows


def select_order(data, base_family: str, grid: Sequence[int] = DEFAULT_GRID, **fit_kwargs) -> OrderSelection:
    grid = tuple(int(m) for m in grid)
    if not grid:
        raise ValueError("order grid must be non-empty")
    fits, failures = {}, {}
    for m in grid:
        try:
            fits[m] = fit_mle(data, FitConfig(m=m, base_family=base_family, **fit_kwargs))
        except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
            failures[m] = str(exc)
    if not fits:
        raise RuntimeError(f"every fit failed: {failures}")
    return OrderSelection(base_family, grid, fits, failures)


@dataclass(frozen=True)
class SampleStats:
    mean_direction: float
    mean_resultant_length: float
    skewness: float


def sample_circular_stats(data) -> SampleStats:
    """Mean direction, mean resultant length and b2_bar / (1 - R)^(3/2)."""
    x = np.asarray(data, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two angles")
    c, s = np.cos(x).mean(), np.sin(x).mean()
    mu = math.atan2(s, c)
    r = math.hypot(c, s)
    if 1.0 - r < 1e-12:
        raise ValueError("sample is degenerate (resultant length 1)")
    b2 = float(np.sin(2.0 * (x - mu)).mean())
    return SampleStats(mu, r, b2 / (1.0 - r) ** 1.5)


@dataclass(frozen=True)
class SymmetryTestResult:
    statistic: float
    p_value: float
    sample_stats: SampleStats


def symmetry_test(data) -> SymmetryTestResult:
    """Large-sample test of reflective symmetry about the unknown mean direction.

    The centred second sine moment b2_bar is standardised by its estimated
    asymptotic variance

        [(1 - a4)/2 - 2 a2 + (2 a2 / R)(a3 + a2 (1 - a2) / R)] / n,

    with a_p the centred sample cosine moments (Pewsey, 2002).
    """
    x = wrap_angle(np.asarray(data, dtype=float))
    n = x.size
    if n < 10:
        raise ValueError("symmetry test needs at least 10 observations")
    stats = sample_circular_stats(x)
    d = x - stats.mean_direction
    r = stats.mean_resultant_length
    a2, a3, a4 = (float(np.cos(p * d).mean()) for p in (2, 3, 4))
    b2 = float(np.sin(2.0 * d).mean())
    var = ((1 - a4) / 2 - 2 * a2 + (2 * a2 / r) * (a3 + a2 * (1 - a2) / r)) / n
    if not var > 0:
        raise ValueError(f"degenerate variance estimate {var:.3g}")
    z = b2 / math.sqrt(var)
    return SymmetryTestResult(z, float(2.0 * norm.sf(abs(z))), stats)
