"""Tests for profile extraction, classical bounds, and variation identities."""

import numpy as np
import pytest

from iso_ricci.isoperimetric import (bol_fiala_bound,
                                     certify_flat_comparison_constant,
                                     certify_rosenau_shift,
                                     isoperimetric_constant, latitude_profile,
                                     profile_at_areas, small_scale_fit,
                                     support_concavity_check, variation_check)
from iso_ricci.model_profiles import rosenau_profile
from iso_ricci.profile_pde import HALFLINE, ProfileSamples
from iso_ricci.surface_geometry import (ConformalTorusMetric, gauss_curvature,
                                        perturbed_round_sphere, rosenau_metric,
                                        round_sphere)


# ---------------------------------------------------------------------------
# Latitude profiles against closed forms
# ---------------------------------------------------------------------------

def test_round_sphere_profile_closed_form():
    prof = latitude_profile(round_sphere(n=2048))
    a = prof.a
    v_ex = 4 * np.pi * a - a * a
    assert np.max(np.abs(prof.v - v_ex)) < 1e-6 * np.max(v_ex)


def test_rosenau_profile_closed_form():
    t = 0.7
    prof = latitude_profile(rosenau_metric(t, n=2048))
    interior = (prof.a > 0) & (prof.a < 4 * np.pi)
    phi = rosenau_profile(prof.a[interior] / (4 * np.pi), t)
    rel = np.max(np.abs(prof.profile[interior] - phi)) / np.max(phi)
    assert rel < 1e-5


def test_profile_symmetry_under_complement():
    prof = latitude_profile(rosenau_metric(0.4, n=1024))
    assert np.max(np.abs(prof.v - prof.v[::-1])) < 1e-8 * np.max(prof.v)


def test_profile_at_areas_clips_to_total():
    m = round_sphere(n=512)
    I = profile_at_areas(m, [0.0, 4 * np.pi, 5 * np.pi])
    assert abs(I[0]) < 1e-8
    assert abs(I[1]) < 1e-3
    assert I[2] == I[1]


def test_latitude_profile_requires_normalized_area():
    m = round_sphere(n=256)
    bad = type(m)(m.x, 2.0 * m.u, m.P, m.decay, t=m.t)
    with pytest.raises(ValueError):
        latitude_profile(bad)


# ---------------------------------------------------------------------------
# Classical bounds
# ---------------------------------------------------------------------------

def test_bol_fiala_values():
    # kappa0 = 1 at the half-area point: sqrt(4 pi^2 - pi^2) = pi sqrt 3
    np.testing.assert_allclose(bol_fiala_bound(np.pi, 1.0),
                               np.pi * np.sqrt(3.0), rtol=1e-12)
    np.testing.assert_allclose(bol_fiala_bound(2.0, 0.0),
                               np.sqrt(8 * np.pi), rtol=1e-12)
    with pytest.raises(ValueError):
        bol_fiala_bound(5 * np.pi, 1.0)


def test_round_sphere_attains_bol_fiala():
    prof = latitude_profile(round_sphere(n=2048))
    interior = (prof.a > 0) & (prof.a < 4 * np.pi)
    bound = bol_fiala_bound(prof.a[interior], 1.0)
    diff = prof.profile[interior] - bound
    assert np.max(np.abs(diff)) < 1e-6 * np.max(bound)   # equality case
    assert np.min(diff) > -1e-8 * np.max(bound)          # still a lower bound


def test_isoperimetric_constant_values():
    prof = latitude_profile(round_sphere(n=1024))
    # round sphere: min over (0, 2 pi] of (4 pi a - a^2)/a = 2 pi at a = 2 pi
    np.testing.assert_allclose(isoperimetric_constant(prof), 2 * np.pi,
                               rtol=1e-6)
    a = np.linspace(0.0, 10.0, 101)
    flat = ProfileSamples(a, 4 * np.pi * a, 0.0, 1, HALFLINE)
    np.testing.assert_allclose(isoperimetric_constant(flat), 4 * np.pi,
                               rtol=1e-12)


# ---------------------------------------------------------------------------
# Small-scale curvature fit
# ---------------------------------------------------------------------------

def test_small_scale_fit_round_sphere():
    fit = small_scale_fit(latitude_profile(round_sphere(n=4096), n=100000))
    assert abs(fit.supK_est - 1.0) < 0.05
    assert fit.r2 > 0.9


def test_small_scale_fit_flat_profile():
    a = np.linspace(0.0, 1.0, 100001)
    flat = ProfileSamples(a, 4 * np.pi * a, 0.0, 1, HALFLINE)
    assert abs(small_scale_fit(flat).supK_est) < 0.05


def test_small_scale_fit_recovers_max_curvature():
    # the maximum curvature of the explicit solution is attained at the poles
    # and equals s coth s with s = e^{-2t}
    t = 0.5
    fit = small_scale_fit(latitude_profile(rosenau_metric(t, n=4096),
                                           n=100000))
    s = np.exp(-2.0 * t)
    supK = s / np.tanh(s)
    assert abs(fit.supK_est - supK) < 0.05 * supK


def test_small_scale_fit_requires_resolution():
    prof = latitude_profile(round_sphere(n=256))
    with pytest.raises(ValueError):
        small_scale_fit(prof)


# ---------------------------------------------------------------------------
# Support concavity
# ---------------------------------------------------------------------------

def test_support_concavity_round_sphere():
    # v + a^2 = 4 pi a is linear: second differences vanish
    prof = latitude_profile(round_sphere(n=1024))
    rep = support_concavity_check(prof, kappa0=1.0, tolerance=1e-6)
    assert rep.passed


def test_support_concavity_needs_small_enough_kappa():
    # along latitudes v'' = -2 K, so v + kappa0 a^2 is concave exactly when
    # kappa0 <= min K; for the explicit solution min K = s / sinh s
    prof = latitude_profile(rosenau_metric(1.0, n=1024))
    s = np.exp(-2.0)
    minK = s / np.sinh(s)
    assert support_concavity_check(prof, kappa0=minK, tolerance=1e-3).passed
    assert not support_concavity_check(prof, kappa0=1.05 * minK,
                                       tolerance=1e-3).passed


# ---------------------------------------------------------------------------
# Variation identities
# ---------------------------------------------------------------------------

def test_variation_check_round_sphere_equator():
    rep = variation_check(round_sphere(n=2048), x0=0.0)
    assert rep.passed, {k: r.max_abs for k, r in rep.checks.items()}
    # the equator is a geodesic: dL/deps = int k = 0 and d2L = -int K ds = -L
    assert abs(rep.checks["dL_deps"].residuals[0]) < 1e-4


def test_variation_check_off_equator():
    for x0 in (-0.8, 0.5):
        rep = variation_check(rosenau_metric(0.5, n=2048), x0=x0)
        assert rep.passed, {k: r.max_abs for k, r in rep.checks.items()}


def test_variation_check_rejects_boundary_latitude():
    m = round_sphere(n=512)
    with pytest.raises(ValueError):
        variation_check(m, x0=float(m.x[-1]))


# ---------------------------------------------------------------------------
# Certification helpers
# ---------------------------------------------------------------------------

def test_certify_flat_comparison_constant():
    w = 0.1 * np.ones((16, 16))
    m = ConformalTorusMetric(w, 1.0, 1.0)
    # zero oscillation: C = (1 + margin) / (4 pi) exactly
    np.testing.assert_allclose(certify_flat_comparison_constant(m, 0.05),
                               1.05 / (4 * np.pi), rtol=1e-12)
    osc = ConformalTorusMetric(np.outer([0.0, 0.3], np.ones(2)), 1.0, 1.0)
    np.testing.assert_allclose(certify_flat_comparison_constant(osc, 0.0),
                               np.exp(0.6) / (4 * np.pi), rtol=1e-12)


def test_certify_rosenau_shift_positive_perturbation():
    m = perturbed_round_sphere(0.05, n=1024)
    assert certify_rosenau_shift(m) == pytest.approx(1.0)


def test_certify_rosenau_shift_returns_none_when_uncertifiable():
    m = perturbed_round_sphere(-0.3, n=512)
    assert certify_rosenau_shift(m) is None
