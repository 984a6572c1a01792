"""Symmetric circular base densities: von Mises and wrapped Cauchy.

Each base exposes its density at centred angles, its cosine moments
alpha_{0,p} and a sampler for the centred distribution.  Bessel function
ratios I_p(kappa) / I_0(kappa) come from a Miller backward recurrence so
that no raw I_p is ever formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import i0e

TWO_PI = 2.0 * math.pi


def bessel_ratios(pmax: int, kappa: float) -> np.ndarray:
    """Return ``r[p] = I_p(kappa) / I_0(kappa)`` for ``p = 0..pmax``.

    Backward recurrence I_{k-1} = (2k / kappa) I_k + I_{k+1} from an order well
    above ``max(pmax, kappa)`` (the minimal solution dominates going down),
    normalised at order 0.  Values are rescaled whenever they grow large.
    """
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    pmax = int(pmax)
    if pmax < 0:
        raise ValueError("pmax must be non-negative")
    start = int(max(pmax, kappa) + 40 + 10 * math.sqrt(kappa))
    out = np.zeros(pmax + 1)
    nxt, cur = 0.0, 1e-280
    for k in range(start, 0, -1):
        prev = (2.0 * k / kappa) * cur + nxt
        nxt, cur = cur, prev
        if k - 1 <= pmax:
            out[k - 1] = cur
        if cur > 1e250:
            nxt /= 1e250
            cur /= 1e250
            out /= 1e250
    return out / out[0]


def bessel_ratio(p: int, kappa: float) -> float:
    """I_p(kappa) / I_0(kappa) for integer p (symmetric in the sign of p)."""
    p = abs(int(p))
    return float(bessel_ratios(p, kappa)[p])


@dataclass(frozen=True)
class VonMisesBase:
    kappa: float

    family = "vm"

    def __post_init__(self):
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ValueError(f"von Mises kappa must be positive, got {self.kappa}")

    @property
    def concentration(self) -> float:
        return self.kappa

    def log_density(self, theta):
        # log I_0(k) = log(i0e(k)) + k
        k = self.kappa
        return k * (np.cos(theta) - 1.0) - math.log(TWO_PI * i0e(k))

    def density(self, theta):
        return np.exp(self.log_density(theta))

    def cosine_moments(self, pmax: int) -> np.ndarray:
        return bessel_ratios(pmax, self.kappa)

    def sample(self, rng: np.random.Generator, size=None):
        # numpy's von Mises generator is the Best-Fisher rejection scheme
        return rng.vonmises(0.0, self.kappa, size=size)


@dataclass(frozen=True)
class WrappedCauchyBase:
    rho: float

    family = "wc"

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"wrapped Cauchy rho must lie in (0, 1), got {self.rho}")

    @property
    def concentration(self) -> float:
        return self.rho

    def density(self, theta):
        r = self.rho
        return (1.0 - r * r) / (TWO_PI * (1.0 + r * r - 2.0 * r * np.cos(theta)))

    def log_density(self, theta):
        r = self.rho
        return math.log((1.0 - r * r) / TWO_PI) - np.log1p(r * r - 2.0 * r * np.cos(theta))

    def cosine_moments(self, pmax: int) -> np.ndarray:
        return self.rho ** np.arange(int(pmax) + 1, dtype=float)

    def sample(self, rng: np.random.Generator, size=None):
        u = rng.random(size)
        r = self.rho
        return 2.0 * np.arctan((1.0 - r) / (1.0 + r) * np.tan(math.pi * (u - 0.5)))


BaseModel = VonMisesBase | WrappedCauchyBase

FAMILIES = {"vm": VonMisesBase, "wc": WrappedCauchyBase}


def make_base(family: str, concentration: float) -> BaseModel:
    try:
        cls = FAMILIES[family.lower()]
    except KeyError:
        raise ValueError(f"unknown base family {family!r}; expected 'vm' or 'wc'") from None
    return cls(float(concentration))


def base_density(base: BaseModel, theta):
    return base.density(theta)


def base_cosine_moment(base: BaseModel, p: int) -> float:
    """alpha_{0,p}; negative orders allowed since the base is symmetric."""
    p = abs(int(p))
    return float(base.cosine_moments(p)[p])


def base_sample(base: BaseModel, rng: np.random.Generator, size=None):
    return base.sample(rng, size)
