"""Beta-type skewing density g_m and its distribution function G_m.

For integer order m the distribution function is an odd polynomial plus 1/2,

    G_m(x) = 1/2 + C_m * sum_l binom(m, l) (-1)^l x^(2l+1) / (2l+1),

with C_m = Gamma(2(m+1)) / (2^(2m+1) Gamma(m+1)^2).  Coefficients are built
in exact rational arithmetic and converted to floats once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

LOG_FLOOR = 1e-300
DOMAIN_TOL = 1e-12


def normalizer_exact(m: int) -> Fraction:
    """C_m as an exact fraction."""
    return Fraction(factorial(2 * m + 1), 2 ** (2 * m + 1) * factorial(m) ** 2)


def cdf_coeffs_exact(m: int) -> list[Fraction]:
    """Coefficients of x^(2l+1), l = 0..m, in G_m(x) - 1/2."""
    c = normalizer_exact(m)
    return [c * comb(m, l) * (-1) ** l / (2 * l + 1) for l in range(m + 1)]


def _check_order(m) -> int:
    if isinstance(m, bool) or not float(m).is_integer():
        raise ValueError(f"order m must be a non-negative integer, got {m!r}")
    m = int(m)
    if m < 0:
        raise ValueError(f"order m must be non-negative, got {m}")
    return m


@dataclass(frozen=True)
class SkewingPolynomial:
    """Skewing function of integer order ``m``.

    ``cdf_coeffs[l]`` multiplies ``x**(2*l + 1)``; the constant term of G_m is 1/2.
    """

    m: int
    normalizer: float = field(init=False)
    cdf_coeffs: tuple[float, ...] = field(init=False)
    # full power-basis coefficients of G_m, highest degree first (np.polyval order)
    _poly: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = _check_order(self.m)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "normalizer", float(normalizer_exact(m)))
        coeffs = cdf_coeffs_exact(m)
        object.__setattr__(self, "cdf_coeffs", tuple(float(c) for c in coeffs))
        poly = np.zeros(2 * m + 2)
        poly[-1] = 0.5
        for l, c in enumerate(coeffs):
            poly[-(2 * l + 2)] = float(c)
        poly.setflags(write=False)
        object.__setattr__(self, "_poly", poly)

    def _clamp(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) > 1.0 + DOMAIN_TOL):
            raise ValueError("skewing function argument outside [-1, 1]")
        return np.clip(x, -1.0, 1.0)

    def pdf(self, x):
        x = self._clamp(x)
        out = self.normalizer * (1.0 - x * x) ** self.m
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = self._clamp(x)
        out = np.polyval(self._poly, x)
        return out if out.ndim else float(out)

    def log_cdf(self, x):
        out = np.log(np.maximum(self.cdf(x), LOG_FLOOR))
        return out if np.ndim(out) else float(out)

    def cdf_unchecked(self, x):
        """G_m extended polynomially beyond [-1, 1]; used by finite differences."""
        return np.polyval(self._poly, np.asarray(x, dtype=float))

    def pdf_unchecked(self, x):
        """Derivative of :meth:`cdf_unchecked`."""
        x = np.asarray(x, dtype=float)
        return self.normalizer * (1.0 - x * x) ** self.m


@lru_cache(maxsize=None)
def skewing_polynomial(m: int) -> SkewingPolynomial:
    return SkewingPolynomial(_check_order(m))


def skewing_pdf(m: int, x):
    """Density C_m (1 - x^2)^m on [-1, 1]."""
    return skewing_polynomial(m).pdf(x)


def skewing_cdf(m: int, x):
    return skewing_polynomial(m).cdf(x)


def skewing_log_cdf(m: int, x):
    """log G_m(x), floored at log(1e-300) so it is always finite."""
    return skewing_polynomial(m).log_cdf(x)
