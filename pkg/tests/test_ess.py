import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from esscirc.bases import VonMisesBase, WrappedCauchyBase
from esscirc.ess import EssModel, grid_cdf, log_density_unchecked, wrap_angle
from esscirc.skewing import LOG_FLOOR

from conftest import periodic_grid, quad

FAMILY_CONC = [("vm", k) for k in (0.1, 1.0, 4.0, 20.0, 100.0)] + [("wc", r) for r in (0.1, 0.4, 0.7, 0.9, 0.97)]
GRID_200 = list(itertools.product(FAMILY_CONC, (-1.0, -0.3, 0.0, 0.6, 1.0), (0, 1, 3, 6)))


def _ess(family, conc, lam, m, mu=0.0):
    return EssModel.of(family, mu, conc, lam, m)


def test_grid_has_200_models():
    assert len(GRID_200) == 200


@pytest.mark.parametrize("fc,lam,m", GRID_200)
def test_normalisation(fc, lam, m):
    family, conc = fc
    model = _ess(family, conc, lam, m, mu=0.7)
    assert quad(model.density(periodic_grid())) == pytest.approx(1.0, abs=1e-9)


def test_wc_closed_form_value():
    model = _ess("wc", 0.8, 1.0, 0)
    expected = 2 * 0.36 / (2 * math.pi * 1.64)
    assert model.density(math.pi / 2) == pytest.approx(expected, rel=1e-14)
    assert model.density(math.pi / 2) == pytest.approx(0.0698729, abs=1e-7)


@given(st.floats(-math.pi, math.pi), st.integers(0, 6))
def test_lambda_zero_is_base(theta, m):
    model = _ess("vm", 2.0, 0.0, m, mu=0.3)
    assert model.density(theta) == pytest.approx(VonMisesBase(2.0).density(theta - 0.3), rel=1e-13)


@given(st.floats(-math.pi, math.pi), st.floats(-1, 1), st.integers(0, 6), st.floats(-3, 3))
def test_reflection_of_lambda(t, lam, m, mu):
    # f(mu + t; lam) = f(mu - t; -lam)
    a = _ess("wc", 0.6, lam, m, mu)
    b = _ess("wc", 0.6, -lam, m, mu)
    assert a.density(mu + t) == pytest.approx(b.density(mu - t), rel=1e-12, abs=1e-300)


@given(st.floats(-math.pi, math.pi), st.floats(-0.99, 0.99), st.integers(0, 6))
def test_log_density_consistent(t, lam, m):
    model = _ess("vm", 3.0, lam, m, mu=-0.4)
    f = model.density(t)
    if f > 1e-200:
        assert math.exp(model.log_density(t)) == pytest.approx(f, rel=1e-12)


def test_log_density_floor_at_zero():
    model = _ess("wc", 0.8, 1.0, 0)
    assert model.density(-math.pi / 2) == 0.0
    val = model.log_density(-math.pi / 2)
    assert math.isfinite(val) and val < math.log(LOG_FLOOR) + 5


def test_unchecked_matches_checked_inside():
    t = np.linspace(-3, 3, 50)
    model = _ess("wc", 0.7, 0.4, 2, mu=0.2)
    np.testing.assert_allclose(log_density_unchecked("wc", t, 0.2, 0.7, 0.4, 2), model.log_density(t), rtol=1e-13)


def test_vm_kappa9_m5_asymmetric_mass():
    model = _ess("vm", 8.0, 0.9, 5)
    t = periodic_grid()
    f = model.density(t)
    left = quad(np.where(t < 0, f, 0.0))
    assert left < 0.5 - 0.05  # positive lambda pushes mass to positive angles


def _ks_to_model(x, model):
    grid, cdf = grid_cdf(model)
    return stats.kstest(x, lambda q: np.interp(q, grid, cdf)).statistic


@pytest.mark.parametrize("family,conc,lam,m", [("wc", 0.8, 0.8, 3), ("vm", 2.0, -0.8, 2)])
def test_sampler_matches_density(family, conc, lam, m, rng):
    model = _ess(family, conc, lam, m)
    x = model.sample(100_000, rng)
    assert np.all((x >= -math.pi) & (x < math.pi))
    assert _ks_to_model(x, model) < 0.01


def test_sampler_lambda_zero_equals_base(rng):
    model = _ess("vm", 2.0, 0.0, 3, mu=1.0)
    x = model.sample(100_000, rng)
    base = EssModel(1.0, VonMisesBase(2.0), 0.0, 0)
    assert _ks_to_model(x, base) < 0.01
    r = np.abs(np.exp(1j * x).mean())
    assert r == pytest.approx(0.6977746579640081, abs=0.01)


def test_sampler_reproducible():
    model = _ess("wc", 0.5, 0.3, 1)
    a = model.sample(100, np.random.default_rng(7))
    b = model.sample(100, np.random.default_rng(7))
    np.testing.assert_array_equal(a, b)


def test_wrap_angle():
    assert wrap_angle(math.pi) == -math.pi
    assert wrap_angle(-math.pi) == -math.pi
    assert wrap_angle(-1e-18) == pytest.approx(-1e-18)
    x = wrap_angle(np.linspace(-20, 20, 1001))
    assert np.all((x >= -math.pi) & (x < math.pi))


def test_validation():
    with pytest.raises(ValueError):
        _ess("wc", 0.5, 1.2, 0)
    with pytest.raises(ValueError):
        _ess("wc", 0.5, 0.1, -2)
    with pytest.raises(ValueError):
        _ess("wc", 0.5, 0.1, 0).sample(0, np.random.default_rng())
    assert _ess("wc", 0.5, 0.0, 0, mu=4.0).mu == pytest.approx(4.0 - 2 * math.pi)
