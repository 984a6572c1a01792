"""Maximum likelihood for ESS models, observed information and AIC/TIC."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, i0e, logit

from ._kernels import as_odd_coeffs, vm_loglik, wc_loglik
from .bases import bessel_ratio
from .ess import EssModel, log_density_unchecked, wrap_angle
from .skewing import LOG_FLOOR, skewing_polynomial

N_PARAMS = 3
BOUNDARY_LAMBDA = 0.99
SINGULAR_COND = 1e10


@dataclass(frozen=True)
class FitConfig:
    m: int = 0
    base_family: str = "wc"
    delta_lambda: float = 0.0
    kappa_bounds: tuple[float, float] = (1e-4, 500.0)
    rho_bounds: tuple[float, float] = (1e-4, 1.0 - 1e-6)
    starts: int = 9
    tol: float = 1e-9
    maxiter: int = 5000

    def __post_init__(self):
        if self.base_family not in ("vm", "wc"):
            raise ValueError(f"base_family must be 'vm' or 'wc', got {self.base_family!r}")
        lo, hi = self.bounds
        if not 0 < lo < hi:
            raise ValueError("concentration bounds must satisfy 0 < lo < hi")
        if not 0.0 <= self.delta_lambda < 1.0:
            raise ValueError("delta_lambda must lie in [0, 1)")
        if self.starts < 1:
            raise ValueError("starts must be at least 1")
        skewing_polynomial(self.m)

    @property
    def bounds(self) -> tuple[float, float]:
        return self.kappa_bounds if self.base_family == "vm" else self.rho_bounds


@dataclass
class FitReport:
    family: str
    m: int
    n: int
    mu: float
    concentration: float
    lam: float
    loglik_total: float
    aic: float
    tic: Optional[float]
    tic_penalty: Optional[float]
    boundary: bool
    converged: bool
    singular: bool
    J: np.ndarray = field(repr=False)
    I: np.ndarray = field(repr=False)
    cov: Optional[np.ndarray] = field(default=None, repr=False)
    se: Optional[np.ndarray] = None
    se_robust: Optional[np.ndarray] = None
    se_note: str = ""
    n_evals: int = 0

    @property
    def eta_hat(self) -> tuple[float, float, float]:
        return (self.mu, self.concentration, self.lam)

    @property
    def model(self) -> EssModel:
        return EssModel.of(self.family, self.mu, self.concentration, self.lam, self.m)

    def to_dict(self) -> dict:
        out = asdict(self)
        for k, v in out.items():
            if isinstance(v, (np.ndarray, np.generic)):
                out[k] = v.tolist()
        out["parameters"] = ["mu", "kappa" if self.family == "vm" else "rho", "lambda"]
        return out


# ---------------------------------------------------------------------------
# likelihood


def log_likelihood(model: EssModel, data) -> float:
    """Total log-likelihood sum_i log f(theta_i); logs are floored so it stays finite."""
    data = np.asarray(data, dtype=float)
    if data.size == 0:
        raise ValueError("log-likelihood of empty data")
    return float(np.sum(model.log_density(wrap_angle(data))))


def _make_negloglik(data: np.ndarray, config: FitConfig):
    """Negative total log-likelihood in unconstrained coordinates z = (mu, z_conc, z_lam)."""
    lo, hi = config.bounds
    lam_scale = 1.0 - config.delta_lambda
    coeffs = as_odd_coeffs(skewing_polynomial(config.m).cdf_coeffs)
    # angle addition keeps trig calls out of the objective
    sx = np.ascontiguousarray(np.sin(data))
    cx = np.ascontiguousarray(np.cos(data))
    sum_s, sum_c = float(sx.sum()), float(cx.sum())

    if config.base_family == "vm":
        llo, lhi = math.log(lo), math.log(hi)

        def to_natural(z):
            kappa = math.exp(llo + (lhi - llo) * expit(z[1]))
            return z[0], kappa, lam_scale * math.tanh(z[2])

        def negll(z):
            mu, kappa, lam = to_natural(z)
            log_norm = math.log(2 * math.pi * i0e(kappa))
            return -vm_loglik(sx, cx, sum_s, sum_c, mu, kappa, log_norm, lam, coeffs)

    else:

        def to_natural(z):
            return z[0], lo + (hi - lo) * expit(z[1]), lam_scale * math.tanh(z[2])

        def negll(z):
            mu, rho, lam = to_natural(z)
            return -wc_loglik(sx, cx, mu, rho, lam, coeffs)

    def to_unconstrained(mu, conc, lam):
        c = min(max(conc, lo * (1 + 1e-9)), hi * (1 - 1e-9))
        if config.base_family == "vm":
            u = (math.log(c) - llo) / (lhi - llo)
        else:
            u = (c - lo) / (hi - lo)
        u = min(max(u, 1e-9), 1 - 1e-9)
        lam_u = min(max(lam / lam_scale, -1 + 1e-12), 1 - 1e-12)
        return np.array([mu, float(logit(u)), math.atanh(lam_u)])

    return negll, to_natural, to_unconstrained


def sample_mean_direction(data) -> tuple[float, float]:
    data = np.asarray(data, dtype=float)
    c, s = np.cos(data).mean(), np.sin(data).mean()
    return math.atan2(s, c), math.hypot(c, s)


def kappa_from_resultant(rbar: float) -> float:
    """Approximate inverse of A(kappa) = I_1(kappa) / I_0(kappa)."""
    if rbar < 0.53:
        return 2 * rbar + rbar**3 + 5 * rbar**5 / 6
    if rbar < 0.85:
        return -0.4 + 1.39 * rbar + 0.43 / (1 - rbar)
    return 1.0 / (rbar**3 - 4 * rbar**2 + 3 * rbar)


def start_design(data, config: FitConfig) -> list[tuple[float, float, float]]:
    """Deterministic multi-start points (mu, concentration, lambda)."""
    md, rbar = sample_mean_direction(data)
    lo, hi = config.bounds
    conc = kappa_from_resultant(rbar) if config.base_family == "vm" else rbar
    conc = min(max(conc, lo), hi)
    design = []
    for dmu in (0.0, -math.pi / 4, math.pi / 4):
        for lam in (0.0, -0.5, 0.5):
            design.append((md + dmu, conc, lam))
    return design[: config.starts]


def fit_mle(data, config: FitConfig) -> FitReport:
    """Maximise the total log-likelihood over mu x concentration x Lambda."""
    data = wrap_angle(np.asarray(data, dtype=float))
    if data.size < N_PARAMS + 1:
        raise ValueError(f"need at least {N_PARAMS + 1} observations, got {data.size}")
    negll, to_natural, to_unconstrained = _make_negloglik(data, config)
    coarse = {"xatol": 1e-4, "fatol": 1e-6, "maxiter": config.maxiter}
    fine = {"xatol": 1e-8, "fatol": config.tol, "maxiter": config.maxiter, "maxfev": 2 * config.maxiter}

    best = None
    n_evals = 0
    for start in start_design(data, config):
        res = minimize(negll, to_unconstrained(*start), method="Nelder-Mead", options=coarse)
        n_evals += res.nfev
        if best is None or res.fun < best.fun:
            best = res
    # two tight restarts from the winner; the second guards against simplex collapse
    converged = False
    for _ in range(2):
        polished = minimize(negll, best.x, method="Nelder-Mead", options=fine)
        n_evals += polished.nfev
        converged = bool(polished.success)
        if polished.fun <= best.fun:
            best = polished

    eta = np.array(to_natural(best.x))
    loglik = -float(best.fun)
    eta, loglik = _newton_polish(data, config, eta, loglik, lambda e: -negll(to_unconstrained(*e)))
    mu, conc, lam = eta
    return build_report(data, config, wrap_angle(mu), conc, lam, loglik, converged, n_evals)


def _newton_polish(data, config: FitConfig, eta, loglik, total_loglik, max_steps: int = 4):
    """Newton steps on the score equations from the simplex solution.

    The simplex stalls once likelihood differences reach rounding level, which
    leaves weakly identified directions resolved only to ~1e-6.  Steps are taken
    only at interior points, must stay small, and must not lower the likelihood.
    """
    lo, hi = config.bounds
    lam_max = 1.0 - config.delta_lambda
    for _ in range(max_steps):
        if abs(eta[2]) > BOUNDARY_LAMBDA * lam_max:
            break
        J, _ = observed_information(config.base_family, config.m, eta, data)
        grad = score_matrix(config.base_family, config.m, eta, data).mean(axis=0)
        try:
            if np.any(np.linalg.eigvalsh(J) <= 0):
                break
            step = np.linalg.solve(J, grad)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)) or np.max(np.abs(step)) > 1e-3:
            break
        new = eta + step
        if not (lo < new[1] < hi and abs(new[2]) < lam_max):
            break
        new_ll = total_loglik(new)
        if new_ll < loglik - 1e-9:
            break
        eta, loglik = new, new_ll
        if np.max(np.abs(step)) < 1e-13:
            break
    return eta, loglik


# ---------------------------------------------------------------------------
# information matrices and criteria


FD_STEP = 1e-5


def fd_steps(eta) -> np.ndarray:
    """Central-difference steps: absolute for the location, relative elsewhere.

    The location step does not depend on mu itself, so information estimates are
    unchanged when the data are rotated.
    """
    eta = np.asarray(eta, dtype=float)
    h = np.maximum(FD_STEP, FD_STEP * np.abs(eta))
    h[0] = FD_STEP
    return h


def score_matrix(family: str, m: int, eta, data) -> np.ndarray:
    """Per-observation analytic scores d log f / d(mu, concentration, lambda), shape (n, 3).

    Observations where the floored skewing factor is active contribute nothing
    through G_m, matching the floored log-density.
    """
    mu, conc, lam = (float(v) for v in eta)
    d = np.asarray(data, dtype=float) - mu
    sd, cd = np.sin(d), np.cos(d)
    skew = skewing_polynomial(m)
    x = lam * sd
    G = skew.cdf_unchecked(x)
    ratio = np.where(G > LOG_FLOOR, skew.pdf_unchecked(x) / np.maximum(G, LOG_FLOOR), 0.0)
    if family == "vm":
        dlogf0_dd = -conc * sd
        dlogf0_dc = cd - bessel_ratio(1, conc)
    elif family == "wc":
        denom = 1.0 + conc * conc - 2.0 * conc * cd
        dlogf0_dd = -2.0 * conc * sd / denom
        dlogf0_dc = -2.0 * conc / (1.0 - conc * conc) - (2.0 * conc - 2.0 * cd) / denom
    else:
        raise ValueError(f"unknown family {family!r}")
    s_mu = -dlogf0_dd - ratio * lam * cd
    s_lam = ratio * sd
    return np.stack([s_mu, dlogf0_dc, s_lam], axis=1)


def _shift_inside(family: str, eta: np.ndarray, i: int, h: float) -> float:
    # keep rho + h below 1 for the wrapped Cauchy
    if family == "wc" and i == 1:
        return min(h, 0.5 * (1.0 - eta[1]))
    return h


def observed_information(family: str, m: int, eta, data) -> tuple[np.ndarray, np.ndarray]:
    """(J_hat, I_hat): minus the mean Hessian and the mean outer product of scores.

    Scores are analytic; the Hessian is a central difference of the scores.
    """
    data = np.asarray(data, dtype=float)
    eta = np.asarray(eta, dtype=float)
    h = fd_steps(eta)
    n = data.size
    scores = score_matrix(family, m, eta, data)
    hess = np.zeros((3, 3))
    for i in range(3):
        hi = _shift_inside(family, eta, i, h[i])
        e = np.zeros(3)
        e[i] = hi
        up = score_matrix(family, m, eta + e, data)
        dn = score_matrix(family, m, eta - e, data)
        hess[i] = (up - dn).mean(axis=0) / (2 * hi)
    J = -hess
    I = scores.T @ scores / n
    return 0.5 * (J + J.T), 0.5 * (I + I.T)


def expected_information(family: str, m: int, eta, npts: int = 2**12) -> np.ndarray:
    """Fisher information E[score score^T] at eta, by periodic quadrature of the scores.

    For the von Mises base at lambda = 0 the location and skewness scores are
    both proportional to sin(theta - mu), so this matrix is singular there even
    though the finite-sample J_hat is not.
    """
    eta = np.asarray(eta, dtype=float)
    grid = -math.pi + 2 * math.pi * np.arange(npts) / npts
    w = np.exp(log_density_unchecked(family, grid, *eta, m)) * (2 * math.pi / npts)
    scores = score_matrix(family, m, eta, grid)
    return (scores * w[:, None]).T @ scores


def information_criteria(loglik_total: float, J: np.ndarray, I: np.ndarray):
    """(aic, tic, penalty, singular); tic and penalty are None when J is singular."""
    aic = -2.0 * loglik_total + 2.0 * N_PARAMS
    singular = (not np.all(np.isfinite(J))) or np.linalg.cond(J) > SINGULAR_COND
    if singular:
        return aic, None, None, True
    penalty = float(np.trace(np.linalg.solve(J, I)))
    return aic, -2.0 * loglik_total + 2.0 * penalty, penalty, False


def wald_standard_errors(report: FitReport):
    """(model-based SEs, sandwich SEs, note).  Suppressed on boundary or singular fits."""
    if report.boundary:
        return None, None, "suppressed: skewness estimate on the boundary"
    if report.singular:
        return None, None, "suppressed: observed information is singular"
    Jinv = np.linalg.inv(report.J)
    cov = Jinv / report.n
    sandwich = Jinv @ report.I @ Jinv / report.n
    with np.errstate(invalid="ignore"):
        se = np.sqrt(np.diag(cov))
        se_rob = np.sqrt(np.diag(sandwich))
    if not (np.all(np.isfinite(se)) and np.all(np.isfinite(se_rob))):
        return None, None, "suppressed: information not positive definite"
    return se, se_rob, ""


def build_report(data, config: FitConfig, mu, conc, lam, loglik, converged, n_evals=0) -> FitReport:
    J, I = observed_information(config.base_family, config.m, (mu, conc, lam), data)
    aic, tic, penalty, singular = information_criteria(loglik, J, I)
    if not singular and abs(lam) < 1e-3:
        # degeneracy of the model itself is invisible to J_hat in finite samples
        fisher = expected_information(config.base_family, config.m, (mu, conc, lam))
        if np.linalg.cond(fisher) > SINGULAR_COND:
            tic, penalty, singular = None, None, True
    report = FitReport(
        family=config.base_family,
        m=config.m,
        n=int(np.size(data)),
        mu=float(mu),
        concentration=float(conc),
        lam=float(lam),
        loglik_total=float(loglik),
        aic=aic,
        tic=tic,
        tic_penalty=penalty,
        boundary=bool(abs(lam) > BOUNDARY_LAMBDA),
        converged=converged,
        singular=bool(singular),
        J=J,
        I=I,
        n_evals=n_evals,
    )
    if not singular:
        report.cov = np.linalg.inv(J) / report.n
    report.se, report.se_robust, report.se_note = wald_standard_errors(report)
    return report
