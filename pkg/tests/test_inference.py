import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esscirc.bases import WrappedCauchyBase
from esscirc.ess import EssModel, log_density_unchecked, wrap_angle
from esscirc.inference import (
    FitConfig,
    _make_negloglik,
    build_report,
    expected_information,
    fd_steps,
    score_matrix,
    fit_mle,
    information_criteria,
    log_likelihood,
    observed_information,
    start_design,
)


@pytest.fixture(scope="module")
def wc_sample():
    return EssModel.of("wc", 0.4, 0.7, 0.6, 2).sample(300, np.random.default_rng(3))


@pytest.fixture(scope="module")
def vm_sample():
    return EssModel.of("vm", -1.0, 3.0, -0.5, 1).sample(300, np.random.default_rng(4))


def test_loglik_single_datum():
    for m in range(4):
        for lam in (-1.0, 0.3, 1.0):
            model = EssModel.of("wc", 0.0, 0.8, lam, m)
            assert log_likelihood(model, [0.0]) == pytest.approx(math.log(1.43239), abs=1e-5)


def test_loglik_lambda_zero_and_permutation(wc_sample):
    model = EssModel.of("wc", 0.4, 0.7, 0.0, 3)
    base = WrappedCauchyBase(0.7)
    assert log_likelihood(model, wc_sample) == pytest.approx(np.sum(base.log_density(wc_sample - 0.4)), rel=1e-13)
    perm = np.random.default_rng(0).permutation(wc_sample)
    assert log_likelihood(model, perm) == pytest.approx(log_likelihood(model, wc_sample), rel=1e-13)
    with pytest.raises(ValueError):
        log_likelihood(model, [])


@pytest.mark.parametrize("family", ["vm", "wc"])
@pytest.mark.parametrize("m", [0, 1, 4])
def test_kernel_objective_matches_density(family, m, wc_sample):
    cfg = FitConfig(m=m, base_family=family)
    negll, to_natural, to_unc = _make_negloglik(wc_sample, cfg)
    for eta in [(0.1, 0.5, -0.3), (-2.0, 0.9, 0.95), (3.0, 0.2, 0.0)]:
        conc = eta[1] * (4 if family == "vm" else 1)
        z = to_unc(eta[0], conc, eta[2])
        mu, c, lam = to_natural(z)
        assert c == pytest.approx(conc, rel=1e-8) and lam == pytest.approx(eta[2], abs=1e-10)
        ref = log_likelihood(EssModel.of(family, mu, c, lam, m), wc_sample)
        assert -negll(z) == pytest.approx(ref, rel=1e-11)


def test_optimum_beats_every_start(wc_sample):
    cfg = FitConfig(m=2, base_family="wc")
    fit = fit_mle(wc_sample, cfg)
    for mu, c, lam in start_design(wc_sample, cfg):
        assert fit.loglik_total >= log_likelihood(EssModel.of("wc", mu, c, lam, 2), wc_sample) - 1e-9
    assert fit.loglik_total == pytest.approx(log_likelihood(fit.model, wc_sample), rel=1e-12)
    assert fit.converged


def test_start_design_size():
    x = np.linspace(-1, 1, 20)
    assert len(start_design(x, FitConfig())) == 9
    assert len(start_design(x, FitConfig(starts=4))) == 4


def _assert_fits_equivalent(a, b, mu_b):
    assert wrap_angle(a.mu - mu_b) == pytest.approx(0.0, abs=1e-6)
    assert a.concentration == pytest.approx(b.concentration, abs=1e-6)
    assert a.loglik_total == pytest.approx(b.loglik_total, abs=1e-6)
    assert a.aic == pytest.approx(b.aic, abs=1e-6)
    assert a.tic == pytest.approx(b.tic, abs=1e-6)


@pytest.mark.parametrize("delta", [0.7, -2.5, math.pi / 2])
def test_rotation_equivariance(vm_sample, delta):
    cfg = FitConfig(m=1, base_family="vm")
    a = fit_mle(vm_sample, cfg)
    b = fit_mle(wrap_angle(vm_sample + delta), cfg)
    _assert_fits_equivalent(b, a, a.mu + delta)
    assert b.lam == pytest.approx(a.lam, abs=1e-6)


@pytest.mark.parametrize("family", ["vm", "wc"])
def test_reflection_equivariance(family, wc_sample, vm_sample):
    data = wc_sample if family == "wc" else vm_sample
    cfg = FitConfig(m=2, base_family=family)
    a = fit_mle(data, cfg)
    b = fit_mle(wrap_angle(-data), cfg)
    _assert_fits_equivalent(b, a, -a.mu)
    assert b.lam == pytest.approx(-a.lam, abs=1e-6)


def test_recovers_truth_large_n():
    truth = EssModel.of("wc", 1.2, 0.8, 0.5, 1)
    x = truth.sample(2000, np.random.default_rng(11))
    fit = fit_mle(x, FitConfig(m=1, base_family="wc"))
    est = np.array([wrap_angle(fit.mu - 1.2), fit.concentration - 0.8, fit.lam - 0.5])
    assert np.all(np.abs(est) < 3 * fit.se)


def test_symmetric_data_gives_small_lambda():
    x = EssModel.of("wc", 0.5, 0.7, 0.0, 0).sample(5000, np.random.default_rng(2))
    fit = fit_mle(x, FitConfig(m=0, base_family="wc"))
    assert abs(fit.lam) < 3 * fit.se[2]
    assert abs(wrap_angle(fit.mu - 0.5)) < 3 * fit.se[0]


def test_information_matrices(wc_sample):
    fit = fit_mle(wc_sample, FitConfig(m=2, base_family="wc"))
    np.testing.assert_allclose(fit.J, fit.J.T, atol=1e-8)
    np.testing.assert_allclose(fit.I, fit.I.T, atol=1e-8)
    assert fit.aic - (-2 * fit.loglik_total) == pytest.approx(6.0, abs=1e-12)
    assert fit.tic == pytest.approx(-2 * fit.loglik_total + 2 * np.trace(np.linalg.solve(fit.J, fit.I)))
    assert np.all(np.linalg.eigvalsh(fit.J) > 0)


def _richardson_scores(family, m, eta, data, i):
    def d(h):
        e = np.zeros(3)
        e[i] = h
        return (log_density_unchecked(family, data, *(eta + e), m) - log_density_unchecked(family, data, *(eta - e), m)) / (2 * h)

    h = 1e-3 * max(1.0, abs(eta[i]))
    return (4 * d(h / 2) - d(h)) / 3


@pytest.mark.parametrize("family,eta", [("wc", (0.3, 0.7, 0.4)), ("vm", (-0.5, 2.5, -0.6)), ("wc", (2.0, 0.95, 0.9))])
def test_scores_match_richardson(family, eta):
    data = EssModel.of(family, *eta, 2).sample(200, np.random.default_rng(5))
    eta = np.asarray(eta)
    scores = score_matrix(family, 2, eta, data)
    for i in range(3):
        np.testing.assert_allclose(scores[:, i], _richardson_scores(family, 2, eta, data, i), rtol=1e-5, atol=1e-7)


def test_hessian_against_second_differences():
    eta = np.array([0.3, 0.7, 0.4])
    data = EssModel.of("wc", *eta, 1).sample(100, np.random.default_rng(2))
    J, _ = observed_information("wc", 1, eta, data)
    h = 1e-4

    def ll(e):
        return log_density_unchecked("wc", data, *e, 1).mean()

    H = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            ei, ej = np.eye(3)[i] * h, np.eye(3)[j] * h
            H[i, j] = (ll(eta + ei + ej) - ll(eta + ei - ej) - ll(eta - ei + ej) + ll(eta - ei - ej)) / (4 * h * h)
    np.testing.assert_allclose(J, -H, rtol=1e-4, atol=1e-5)


def test_expected_information_matches_mean_score_outer_product():
    eta = (0.0, 0.8, 0.3)
    x = EssModel.of("wc", *eta, 1).sample(200_000, np.random.default_rng(9))
    _, I = observed_information("wc", 1, eta, x)
    fisher = expected_information("wc", 1, eta)
    np.testing.assert_allclose(I, fisher, rtol=0.03, atol=0.05)


def test_vm_singular_at_symmetric_point():
    fisher = expected_information("vm", 0, (0.0, 2.0, 0.0))
    assert np.linalg.cond(fisher) > 1e10
    # the wrapped Cauchy base has no such degeneracy
    assert np.linalg.cond(expected_information("wc", 0, (0.0, 0.6, 0.0))) < 1e3
    x = EssModel.of("vm", 0.0, 2.0, 0.0, 0).sample(100, np.random.default_rng(1))
    report = build_report(x, FitConfig(m=0, base_family="vm"), 0.0, 2.0, 0.0, -100.0, True)
    assert report.singular and report.tic is None and report.se is None
    assert "singular" in report.se_note


def test_fd_location_step_is_absolute():
    assert fd_steps([3.0, 2.0, 0.5])[0] == fd_steps([0.0, 2.0, 0.5])[0]


def test_information_criteria_singular_input():
    aic, tic, pen, singular = information_criteria(-10.0, np.diag([1.0, 1.0, 1e-12]), np.eye(3))
    assert aic == 26.0 and tic is None and pen is None and singular


def test_penalty_near_three_correct_model():
    x = EssModel.of("wc", 0.0, 0.8, 0.5, 2).sample(10_000, np.random.default_rng(6))
    fit = fit_mle(x, FitConfig(m=2, base_family="wc"))
    assert fit.tic_penalty == pytest.approx(3.0, abs=0.3)


def test_se_scale_with_n():
    truth = EssModel.of("wc", 0.0, 0.8, 0.2, 3)
    se = {}
    for n in (200, 800):
        fits = [fit_mle(truth.sample(n, np.random.default_rng(100 + k)), FitConfig(m=3, base_family="wc")) for k in range(3)]
        se[n] = np.mean([f.se for f in fits], axis=0)
    ratio = se[200] / se[800]
    assert np.all(np.abs(ratio - 2.0) < 0.5)


def test_boundary_suppresses_se():
    x = EssModel.of("wc", 0.0, 0.8, 1.0, 3).sample(100, np.random.default_rng(8))
    fit = fit_mle(x, FitConfig(m=0, base_family="wc"))
    assert fit.boundary
    assert fit.se is None and fit.se_robust is None and "boundary" in fit.se_note


def test_delta_lambda_keeps_interior():
    x = EssModel.of("wc", 0.0, 0.8, 1.0, 3).sample(100, np.random.default_rng(8))
    fit = fit_mle(x, FitConfig(m=0, base_family="wc", delta_lambda=0.05))
    assert abs(fit.lam) <= 0.95 + 1e-12


def test_config_validation():
    with pytest.raises(ValueError):
        FitConfig(base_family="cardioid")
    with pytest.raises(ValueError):
        FitConfig(delta_lambda=1.0)
    with pytest.raises(ValueError):
        FitConfig(m=-1)
    with pytest.raises(ValueError):
        fit_mle([0.1, 0.2, 0.3], FitConfig())


def test_report_serialises(wc_sample):
    import json

    d = fit_mle(wc_sample, FitConfig(m=1)).to_dict()
    assert d["parameters"] == ["mu", "rho", "lambda"]
    json.dumps(d)
