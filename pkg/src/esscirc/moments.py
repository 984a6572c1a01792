"""Closed-form trigonometric moments of ESS distributions of integer order.

The cosine moments of a centred ESS model equal those of its base.  Sine
moments follow from expanding each odd power sin^n in multiple-angle sines,

    sin^n(theta) = sum_k c_{n, n-2k} sin((n - 2k) theta),

which turns every term of G_m(lambda sin theta) into base cosine moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .bases import VonMisesBase
from .ess import EssModel
from .skewing import cdf_coeffs_exact

M_MAX = 12


@dataclass(frozen=True)
class SinPowerExpansion:
    """``coeffs[k]`` is c_{n, n-2k}, the weight of sin((n - 2k) theta)."""

    n: int
    coeffs: tuple[Fraction, ...]

    @property
    def frequencies(self) -> tuple[int, ...]:
        return tuple(self.n - 2 * k for k in range(len(self.coeffs)))

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return sum(float(c) * np.sin(j * theta) for c, j in zip(self.coeffs, self.frequencies))


def _check_odd(n: int) -> int:
    n = int(n)
    if n < 1 or n % 2 == 0 or n > 2 * M_MAX + 1:
        raise ValueError(f"n must be odd with 1 <= n <= {2 * M_MAX + 1}, got {n}")
    return n


def multiple_angle_sine_row(j: int) -> dict[int, int]:
    """Integer a_{j,i} with sin(j theta) = sum_i a_{j,i} sin^i(theta), j odd.

    Imaginary part of (cos + i sin)^j, with cos^2 replaced by 1 - sin^2.
    """
    row: dict[int, int] = {}
    for r in range(1, j + 1, 2):
        # binom(j, r) cos^{j-r} sin^r i^{r-1}, cos^{j-r} = (1 - sin^2)^{(j-r)/2}
        sign = (-1) ** ((r - 1) // 2)
        h = (j - r) // 2
        for t in range(h + 1):
            power = r + 2 * t
            row[power] = row.get(power, 0) + sign * comb(j, r) * comb(h, t) * (-1) ** t
    return row


@lru_cache(maxsize=None)
def sin_power_coeffs(n: int) -> SinPowerExpansion:
    """Invert the upper-triangular multiple-angle system by back substitution."""
    n = _check_odd(n)
    odd = list(range(n, 0, -2))
    rows = {j: multiple_angle_sine_row(j) for j in odd}
    # sin^j = (sin(j theta) - sum_{i<j} a_{j,i} sin^i) / a_{j,j}; resolve from low j upward
    expansions: dict[int, dict[int, Fraction]] = {}
    for j in reversed(odd):
        a = rows[j]
        exp_j: dict[int, Fraction] = {j: Fraction(1, a[j])}
        for i, a_ji in a.items():
            if i == j or a_ji == 0:
                continue
            for freq, c in expansions[i].items():
                exp_j[freq] = exp_j.get(freq, Fraction(0)) - Fraction(a_ji, a[j]) * c
        expansions[j] = exp_j
    coeffs = tuple(expansions[n].get(n - 2 * k, Fraction(0)) for k in range((n - 1) // 2 + 1))
    return SinPowerExpansion(n, coeffs)


def sin_power_coeffs_binomial(n: int) -> SinPowerExpansion:
    """Classical closed form: c_{n,n-2k} = (-1)^((n-1)/2 - k) binom(n, k) / 2^(n-1)."""
    n = _check_odd(n)
    h = (n - 1) // 2
    coeffs = tuple(Fraction((-1) ** (h - k) * comb(n, k), 2 ** (n - 1)) for k in range(h + 1))
    return SinPowerExpansion(n, coeffs)


@lru_cache(maxsize=None)
def sine_moment_weights(m: int) -> dict[int, tuple[float, ...]]:
    """Weights w[j][l] such that, summing over odd frequencies j,

        beta_p = sum_j (sum_l w[j][l] lambda^(2l+1)) (alpha_{0,|j-p|} - alpha_{0,|j+p|}).
    """
    if not 0 <= m <= M_MAX:
        raise ValueError(f"moment machinery supports 0 <= m <= {M_MAX}, got {m}")
    gcoef = cdf_coeffs_exact(m)  # C_m binom(m,l) (-1)^l / (2l+1)
    weights: dict[int, list[Fraction]] = {}
    for l, g in enumerate(gcoef):
        exp = sin_power_coeffs(2 * l + 1)
        for c, j in zip(exp.coeffs, exp.frequencies):
            w = weights.setdefault(j, [Fraction(0)] * (m + 1))
            # 2 sin(j t) sin(p t) = cos((j-p) t) - cos((j+p) t) absorbs the factor 2
            w[l] += g * c
    return {j: tuple(float(x) for x in w) for j, w in sorted(weights.items())}


def _cosine_table(model: EssModel, qmax: int) -> np.ndarray:
    return model.base.cosine_moments(qmax)


def centered_moments(model: EssModel, p: int) -> tuple[float, float]:
    """(alpha_p, beta_p) of the model re-centred at mu = 0."""
    p = int(p)
    m = model.m
    alpha0 = _cosine_table(model, abs(p) + 2 * m + 1)

    def a(q: int) -> float:
        return float(alpha0[abs(q)])

    lam = model.lam
    lam_pows = np.array([lam ** (2 * l + 1) for l in range(m + 1)])
    beta = 0.0
    for j, w in sine_moment_weights(m).items():
        beta += float(np.dot(w, lam_pows)) * (a(j - p) - a(j + p))
    return a(p), beta


@dataclass(frozen=True)
class TrigMoments:
    p: int
    alpha: float
    beta: float

    @property
    def mrl(self) -> float:
        return math.hypot(self.alpha, self.beta)

    @property
    def md(self) -> float:
        if self.mrl < 1e-12:
            raise ValueError(f"mean direction undefined: resultant length {self.mrl:.3g}")
        return math.atan2(self.beta, self.alpha)

    def as_dict(self) -> dict:
        out = {"p": self.p, "alpha": self.alpha, "beta": self.beta, "mrl": self.mrl}
        out["md"] = self.md if self.mrl >= 1e-12 else None
        return out


def moments(model: EssModel, p: int) -> TrigMoments:
    """p-th trigonometric moment E[exp(i p Theta)] at the model's location."""
    a, b = centered_moments(model, p)
    c, s = math.cos(p * model.mu), math.sin(p * model.mu)
    return TrigMoments(int(p), c * a - s * b, c * b + s * a)


def circular_skewness(model: EssModel) -> float:
    """beta2_bar / (1 - R_1)^(3/2) with beta2_bar = E sin(2(Theta - md_1))."""
    t1 = moments(model, 1)
    t2 = moments(model, 2)
    if 1.0 - t1.mrl < 1e-10:
        raise ValueError("skewness undefined: first resultant length is 1")
    z = complex(t2.alpha, t2.beta) * complex(math.cos(-2 * t1.md), math.sin(-2 * t1.md))
    return z.imag / (1.0 - t1.mrl) ** 1.5


@dataclass(frozen=True)
class SkewnessRange:
    m: int
    s_min: float
    s_max: float
    kappa: float
    lam: float  # skewness parameter giving s_max


def _golden_max(f, a: float, b: float, tol: float = 1e-10, maxiter: int = 500) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if abs(b - a) < tol * (1.0 + abs(a) + abs(b)):
            return 0.5 * (a + b)
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    raise RuntimeError("golden-section search did not converge")


def skewness_range(m: int, kappa_bounds=(0.01, 50.0), grid: int = 400) -> SkewnessRange:
    """Range of circular skewness of centred ESS-vM models of order m.

    The extremes sit at lambda = +-1; |s| is maximised over kappa by a log-spaced
    scan that brackets the peak followed by golden-section refinement.
    """

    def abs_s(kappa: float) -> float:
        return abs(circular_skewness(EssModel(0.0, VonMisesBase(kappa), -1.0, m)))

    ks = np.geomspace(*kappa_bounds, grid)
    vals = np.array([abs_s(k) for k in ks])
    i = int(np.argmax(vals))
    lo, hi = ks[max(i - 1, 0)], ks[min(i + 1, grid - 1)]
    kappa = _golden_max(abs_s, lo, hi)
    s = abs_s(kappa)
    lam = -1.0 if circular_skewness(EssModel(0.0, VonMisesBase(kappa), -1.0, m)) > 0 else 1.0
    return SkewnessRange(m, -s, s, float(kappa), lam)
