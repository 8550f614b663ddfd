"""Tests for the concrete metric families, curvature fields, and integrals."""

import numpy as np
import pytest

from iso_ricci.surface_geometry import (
    ConformalTorusMetric, RotSymSphereMetric, deriv1_uniform, deriv2_uniform,
    flat_torus, gauss_bonnet_check, gauss_curvature, geodesic_ball_expansion,
    normalize_area, perturbed_flat_torus, perturbed_round_sphere,
    rosenau_metric, round_sphere, torus_laplacian, total_area,
)


def rosenau_curvature_exact(x, t):
    """Closed-form curvature of the explicit sphere solution: differentiate
    ln u = const - ln(cosh x + cosh s) twice and divide by -2u."""
    s = np.exp(-2.0 * t)
    u = np.sinh(s) / (2.0 * s * (np.cosh(x) + np.cosh(s)))
    d2 = -(1.0 + np.cosh(x) * np.cosh(s)) / (np.cosh(x) + np.cosh(s)) ** 2
    return -d2 / (2.0 * u)


# ---------------------------------------------------------------------------
# Finite-difference stencils
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [64, 128])
def test_derivative_stencils_fourth_order(n):
    x = np.linspace(0.0, 2.0, n + 1)
    h = x[1] - x[0]
    y = np.sin(3.0 * x)
    e1 = np.max(np.abs(deriv1_uniform(y, h) - 3.0 * np.cos(3.0 * x)))
    e2 = np.max(np.abs(deriv2_uniform(y, h) + 9.0 * np.sin(3.0 * x)))
    assert e1 < 60.0 * h ** 4
    assert e2 < 400.0 * h ** 4


def test_derivative_stencils_exact_on_cubics():
    x = np.linspace(-1.0, 1.0, 33)
    h = x[1] - x[0]
    y = 2.0 + x - 3.0 * x ** 2 + 0.5 * x ** 3
    np.testing.assert_allclose(deriv1_uniform(y, h),
                               1.0 - 6.0 * x + 1.5 * x ** 2, atol=1e-11)
    np.testing.assert_allclose(deriv2_uniform(y, h),
                               -6.0 + 3.0 * x, atol=1e-10)


# ---------------------------------------------------------------------------
# Metric containers and presets
# ---------------------------------------------------------------------------

def test_metric_validation():
    x = np.linspace(-5, 5, 64)
    with pytest.raises(ValueError):
        RotSymSphereMetric(x, -np.ones(64), 2 * np.pi, (1.0, 1.0))
    with pytest.raises(ValueError):
        RotSymSphereMetric(x, np.ones(64), 2 * np.pi, (0.0, 1.0))
    with pytest.raises(ValueError):
        ConformalTorusMetric(np.zeros(8), 1.0, 1.0)  # not 2D
    with pytest.raises(ValueError):
        ConformalTorusMetric(np.zeros((8, 8)), -1.0, 1.0)


@pytest.mark.parametrize("metric_fn", [
    lambda: round_sphere(n=512),
    lambda: rosenau_metric(0.5, n=512),
    lambda: perturbed_round_sphere(0.05, n=512),
    lambda: flat_torus(n=32),
    lambda: perturbed_flat_torus(0.1, n=32),
], ids=["round", "rosenau", "perturbed-sphere", "flat-torus", "perturbed-torus"])
def test_presets_are_area_normalized(metric_fn):
    assert abs(total_area(metric_fn()) - 4 * np.pi) < 1e-9


def test_normalize_area_rescales():
    m = ConformalTorusMetric(0.3 * np.ones((16, 16)), 1.0, 1.0)
    assert abs(total_area(normalize_area(m)) - 4 * np.pi) < 1e-12


# ---------------------------------------------------------------------------
# Curvature fields
# ---------------------------------------------------------------------------

def test_round_sphere_curvature_is_one_on_core():
    m = round_sphere(n=1024)
    K = gauss_curvature(m)
    core = m.u >= 1e-5 * np.max(m.u)
    assert np.max(np.abs(K[core] - 1.0)) < 1e-6


def test_rosenau_curvature_matches_closed_form():
    m = rosenau_metric(0.5, n=2048)
    K = gauss_curvature(m)
    core = m.u >= 1e-4 * np.max(m.u)
    # the closed form is scaled by the area normalization of the preset
    K_ex = rosenau_curvature_exact(m.x, 0.5)
    assert np.max(np.abs(K[core] - K_ex[core])) < 1e-6


def test_flat_torus_curvature_zero():
    assert np.max(np.abs(gauss_curvature(flat_torus(n=32)))) < 1e-14


def test_torus_curvature_spectral_exactness():
    # w a single Fourier mode: K = -e^{-2w} lap w with lap w = -k^2 w exactly
    n = 32
    L = np.sqrt(4 * np.pi)
    xs = np.arange(n) * (L / n)
    w = 0.1 * np.outer(np.sin(2 * np.pi * xs / L), np.cos(4 * np.pi * xs / L))
    m = ConformalTorusMetric(w, L, L)
    k2 = (2 * np.pi / L) ** 2 + (4 * np.pi / L) ** 2
    np.testing.assert_allclose(gauss_curvature(m),
                               np.exp(-2 * w) * k2 * w, atol=1e-12)


def test_torus_laplacian_annihilates_constants():
    assert np.max(np.abs(torus_laplacian(np.full((16, 16), 2.5),
                                         1.0, 1.0))) < 1e-12


# ---------------------------------------------------------------------------
# Integrals
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("metric_fn,tol", [
    (lambda: round_sphere(n=1024), 1e-8),
    (lambda: rosenau_metric(0.3, n=1024), 1e-8),
    (lambda: perturbed_round_sphere(0.05, n=1024), 1e-8),
    (lambda: flat_torus(n=32), 1e-12),
    (lambda: perturbed_flat_torus(0.2, n=32), 1e-12),
], ids=["round", "rosenau", "perturbed-sphere", "flat-torus", "perturbed-torus"])
def test_gauss_bonnet(metric_fn, tol):
    rep = gauss_bonnet_check(metric_fn(), tolerance=tol)
    assert rep.passed, f"Gauss-Bonnet defect {rep.worst():.3e}"


def test_total_area_closed_form():
    # sech^2 integrates to 2, plus the tails: area = 2 pi * 2 exactly as
    # X -> infinity; the preset then rescales to 4 pi
    m = round_sphere(n=2048)
    np.testing.assert_allclose(np.max(m.u), 1.0, rtol=1e-6)


# ---------------------------------------------------------------------------
# Geodesic balls
# ---------------------------------------------------------------------------

def test_geodesic_ball_expansion_round_sphere():
    m = round_sphere(n=1024)
    for r in (0.05, 0.2):
        area, perim = geodesic_ball_expansion(m, 0.0, r)
        exact_area = 2 * np.pi * (1 - np.cos(r))
        exact_perim = 2 * np.pi * np.sin(r)
        assert abs(area - exact_area) < r ** 6
        assert abs(perim - exact_perim) < r ** 5


def test_geodesic_ball_expansion_flat_torus():
    m = flat_torus(n=32)
    area, perim = geodesic_ball_expansion(m, (0, 0), 0.3)
    np.testing.assert_allclose(area, np.pi * 0.09, rtol=1e-12)
    np.testing.assert_allclose(perim, 2 * np.pi * 0.3, rtol=1e-12)


def test_geodesic_ball_expansion_radius_guard():
    m = round_sphere(n=512)
    with pytest.raises(ValueError):
        geodesic_ball_expansion(m, 0.0, 10.0)
