"""Fused log-likelihood kernels used inside the optimiser loop."""

import math

import numpy as np
from numba import njit

from .skewing import LOG_FLOOR


@njit(cache=True)
def _log_skew_sum(sx, cx, cm, sm, lam, odd_coeffs):
    # sum_i log max(G_m(lam sin(theta_i - mu)), floor), G_m = 1/2 + x P(x^2)
    total = 0.0
    k = odd_coeffs.size
    for i in range(sx.size):
        x = lam * (sx[i] * cm - cx[i] * sm)
        x2 = x * x
        acc = odd_coeffs[k - 1]
        for j in range(k - 2, -1, -1):
            acc = acc * x2 + odd_coeffs[j]
        g = 0.5 + x * acc
        total += math.log(g if g > LOG_FLOOR else LOG_FLOOR)
    return total


@njit(cache=True)
def _wc_log_base_sum(sx, cx, cm, sm, rho):
    total = 0.0
    a = rho * rho
    for i in range(sx.size):
        total += math.log1p(a - 2.0 * rho * (cx[i] * cm + sx[i] * sm))
    return sx.size * math.log((1.0 - a) / (2.0 * math.pi)) - total


def wc_loglik(sx, cx, mu, rho, lam, odd_coeffs) -> float:
    cm, sm = math.cos(mu), math.sin(mu)
    return (
        _wc_log_base_sum(sx, cx, cm, sm, rho)
        + sx.size * math.log(2.0)
        + _log_skew_sum(sx, cx, cm, sm, lam, odd_coeffs)
    )


def vm_loglik(sx, cx, sum_s, sum_c, mu, kappa, log_2pi_i0e, lam, odd_coeffs) -> float:
    cm, sm = math.cos(mu), math.sin(mu)
    n = sx.size
    base = kappa * (cm * sum_c + sm * sum_s - n) - n * log_2pi_i0e
    return base + n * math.log(2.0) + _log_skew_sum(sx, cx, cm, sm, lam, odd_coeffs)


def as_odd_coeffs(cdf_coeffs) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(cdf_coeffs, dtype=float))
