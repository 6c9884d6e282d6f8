"""
Tests for the bath functionals eta, V, F
"""

import math

import numpy as np
import pytest

from app.core.errors import DegenerateGap
from app.models import ContinuumBath, DiscreteBath
from app.services.spectral_service import SpectralService

@pytest.fixture
def ohmic_bath():
    return ContinuumBath(alpha=0.1, s=1.0)

@pytest.fixture
def sub_ohmic_bath():
    return ContinuumBath(alpha=0.1, s=0.5)

def _midpoint(func, panels=1_000_000):
    """Brute-force midpoint rule on [0, 1]"""
    t = (np.arange(panels) + 0.5) / panels
    return float(np.sum(func(t)) / panels)

def test_zero_coupling_is_trivial():
    """alpha = 0 gives eta = 1, V = 0, F = 0"""
    bath = ContinuumBath(alpha=0.0, s=0.7)
    eta, v_ind, f_stat = SpectralService.functionals(bath, 0.05)

    assert eta == 1.0
    assert v_ind == 0.0
    assert f_stat == 0.0

def test_eta_matches_ohmic_closed_form(ohmic_bath):
    """For s = 1 the exponent is alpha [ln((wc+S)/S) - wc/(wc+S)]"""
    sigma = 0.05
    exponent = 0.1 * (math.log((1.0 + sigma) / sigma) - 1.0 / (1.0 + sigma))

    assert SpectralService.eta_of_sigma(ohmic_bath, sigma) == pytest.approx(math.exp(-exponent), rel=1e-9)

def test_eta_matches_brute_force(ohmic_bath):
    """Quadrature agrees with a dense midpoint sum of w/(w+S)^2"""
    sigma = 0.05
    exponent = 0.1 * _midpoint(lambda w: w / (w + sigma) ** 2)

    assert SpectralService.eta_of_sigma(ohmic_bath, sigma) == pytest.approx(math.exp(-exponent), rel=1e-8)

def test_v_matches_brute_force(sub_ohmic_bath):
    """V at (alpha=0.1, s=0.5, Sigma=0.02) against a midpoint sum in w = t^2"""
    sigma = 0.02

    def integrand(t):
        w = t * t
        return 2.0 * t * w ** -0.5 * w * (w + 2 * sigma) / (w + sigma) ** 2

    expected = 0.1 * _midpoint(integrand)
    assert SpectralService.v_of_sigma(sub_ohmic_bath, sigma) == pytest.approx(expected, rel=1e-8)

def test_f_matches_brute_force(sub_ohmic_bath):
    """F = 2 alpha int w^(s-1) S^2/(w+S)^2 against a midpoint sum in w = t^2"""
    sigma = 0.01

    def integrand(t):
        w = t * t
        return 2.0 * sigma ** 2 / (w + sigma) ** 2

    expected = 2 * 0.1 * _midpoint(integrand)
    assert SpectralService.f_of_sigma(sub_ohmic_bath, sigma) == pytest.approx(expected, rel=1e-8)

def test_v_small_gap_limit(ohmic_bath):
    """V -> alpha wc as Sigma -> 0 for s = 1"""
    assert SpectralService.v_of_sigma(ohmic_bath, 1e-8) == pytest.approx(0.1, abs=1e-5)

def test_f_vanishes_with_gap(sub_ohmic_bath):
    """F ~ Sigma^s for s < 1"""
    assert SpectralService.f_of_sigma(sub_ohmic_bath, 1e-6) < 0.1 * SpectralService.f_of_sigma(sub_ohmic_bath, 1e-3)

def test_f_against_asymptotic_form(sub_ohmic_bath):
    """F(0.01) at s=0.5 matches 2 pi alpha (1-s)/sin(pi(1-s)) Sigma^s within 2%"""
    quadrature = SpectralService.f_of_sigma(sub_ohmic_bath, 0.01)
    asymptotic = SpectralService.f_asymptotic(0.1, 0.5, 0.01)

    assert asymptotic == pytest.approx(0.0314159, rel=1e-5)
    assert quadrature == pytest.approx(asymptotic, rel=0.02)

def test_f_asymptotic_ohmic_limit():
    """At s = 1 the asymptotic form reduces to 2 alpha Sigma"""
    assert SpectralService.f_asymptotic(0.125, 1.0, 0.004) == pytest.approx(0.001, rel=1e-12)
    assert SpectralService.f_asymptotic(0.125, 1.0, 0.0) == 0.0

def test_f_approaches_asymptote_at_small_gap(sub_ohmic_bath):
    """The relative deviation from the asymptotic form shrinks with Sigma"""
    def deviation(sigma):
        exact = SpectralService.f_of_sigma(sub_ohmic_bath, sigma)
        return abs(exact / SpectralService.f_asymptotic(0.1, 0.5, sigma) - 1.0)

    assert deviation(1e-4) < deviation(1e-2)
    assert deviation(1e-6) < 1e-3

@pytest.mark.parametrize("s", [0.25, 0.5, 1.0])
def test_functionals_are_monotone(s):
    """eta and F increase with Sigma, V decreases"""
    bath = ContinuumBath(alpha=0.05, s=s)
    values = [SpectralService.functionals(bath, sigma) for sigma in np.logspace(-4, 0, 25)]
    eta = np.array([value.eta for value in values])
    v_ind = np.array([value.v_ind for value in values])
    f_stat = np.array([value.f_stat for value in values])

    assert np.all(np.diff(eta) > 0)
    assert np.all(np.diff(v_ind) < 0)
    assert np.all(np.diff(f_stat) > 0)

def test_discrete_mode_sums():
    """A single mode gives the closed-form sums"""
    g, omega, sigma = 0.05, 0.5, 0.1
    xi = omega / (omega + sigma)
    eta, v_ind, f_stat = SpectralService.functionals(DiscreteBath(modes=((g, omega),)), sigma)

    assert eta == pytest.approx(math.exp(-g ** 2 * xi ** 2 / (2 * omega ** 2)))
    assert v_ind == pytest.approx(g ** 2 / (2 * omega) * xi * (2 - xi))
    assert f_stat == pytest.approx(g ** 2 * (1 - xi) ** 2 / omega)

def test_log_discretization_converges_to_continuum(sub_ohmic_bath):
    """400 logarithmic bins reproduce the continuum functionals within 1%"""
    discrete = SpectralService.log_discretize(sub_ohmic_bath, 400)
    sigma = 0.05
    continuum_values = SpectralService.functionals(sub_ohmic_bath, sigma)
    discrete_values = SpectralService.functionals(discrete, sigma)

    assert discrete.n_modes == 400
    for exact, approx in zip(continuum_values, discrete_values):
        assert approx == pytest.approx(exact, rel=0.01)

def test_log_discretization_weights_match_density(sub_ohmic_bath):
    """sum g_k^2 equals the integral of J over the covered bins"""
    base = 2.0
    discrete = SpectralService.log_discretize(sub_ohmic_bath, 6, base=base)
    lowest = base ** -6
    expected = 2 * 0.1 * (1.0 - lowest ** 1.5) / 1.5

    assert float(np.sum(discrete.couplings ** 2)) == pytest.approx(expected, rel=1e-12)
    assert np.all(np.diff(discrete.frequencies) > 0)

def test_functionals_are_memoized(ohmic_bath):
    """Repeated evaluation at the same bath and gap hits the cache"""
    SpectralService.cache_clear()
    first = SpectralService.functionals(ohmic_bath, 0.0123)
    second = SpectralService.functionals(ohmic_bath, 0.0123)

    assert first is second

def test_collapsed_gap_raises(ohmic_bath):
    """Sigma = 0 is a degenerate gap"""
    with pytest.raises(DegenerateGap):
        SpectralService.functionals(ohmic_bath, 0.0)
