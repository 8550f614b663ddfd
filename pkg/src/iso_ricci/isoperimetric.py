"""Isoperimetric profile extraction and classical bounds for the concrete
metric families, plus numerical verification of the first/second variation
formulas for latitude circles.

Profiles of rotationally symmetric sphere metrics are computed from latitude
circles (exact for the Rosenau family; assumed, and flagged as
``profile_method=latitude``, for its perturbations), with the geodesic-ball
series used as an additional upper bound near the endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .model_profiles import rosenau_profile
from .profile_pde import COMPACT, ProfileSamples
from .reporting import ResidualReport, Sense
from .surface_geometry import (RotSymSphereMetric, ConformalTorusMetric,
                               deriv1_uniform, gauss_curvature)

__all__ = ["latitude_profile", "profile_at_areas", "bol_fiala_bound",
           "isoperimetric_constant", "small_scale_fit", "FitReport",
           "support_concavity_check", "variation_check", "VariationReport",
           "certify_flat_comparison_constant", "certify_rosenau_shift"]

PROFILE_METHOD = "latitude"


def _area_length_splines(metric: RotSymSphereMetric):
    """Cumulative-area spline A(x) (with analytic left tail) and squared
    latitude length v(x) = P^2 u(x)."""
    u_spline = CubicSpline(metric.x, metric.u)
    A_anti = u_spline.antiderivative()
    lam_l, lam_r = metric.decay
    tail_l = metric.u[0] / lam_l
    A_nodes = metric.P * (A_anti(metric.x) - A_anti(metric.x[0]) + tail_l)
    A_total = A_nodes[-1] + metric.P * metric.u[-1] / lam_r
    v_nodes = metric.P**2 * metric.u
    return A_nodes, v_nodes, A_total


def profile_at_areas(metric: RotSymSphereMetric, areas) -> np.ndarray:
    """Latitude-circle profile I at prescribed enclosed areas.

    Interpolates the squared length v = L^2 against enclosed area A (v is
    smooth and nearly linear at both endpoints, unlike L ~ sqrt(A))."""
    areas = np.asarray(areas, dtype=float)
    A_nodes, v_nodes, A_total = _area_length_splines(metric)
    A_ext = np.concatenate([[0.0], A_nodes, [A_total]])
    v_ext = np.concatenate([[0.0], v_nodes, [0.0]])
    v_of_a = CubicSpline(A_ext, v_ext)
    v = v_of_a(np.clip(areas, 0.0, A_total))
    return np.sqrt(np.maximum(v, 0.0))


def _ball_perimeter_at_area(K, a):
    """Perimeter of the geodesic-ball series at enclosed area a (series
    inverted to the displayed order)."""
    r = np.sqrt(a / np.pi) * (1 + K * a / (24 * np.pi))
    return 2 * np.pi * r * (1 - K * r**2 / 6.0)


def latitude_profile(metric: RotSymSphereMetric, n: Optional[int] = None,
                     ball_window: float = 1e-3) -> ProfileSamples:
    """Isoperimetric profile from latitude circles, resampled onto a uniform
    area grid of n intervals; near the endpoints the pointwise minimum with
    the geodesic-ball series bound is taken (window in area units)."""
    if n is None:
        n = metric.x.size - 1
    A_nodes, v_nodes, A_total = _area_length_splines(metric)
    if abs(A_total - 4 * np.pi) > 1e-6:
        raise ValueError("latitude_profile expects an area-normalized metric")
    a = np.linspace(0.0, 4 * np.pi, n + 1)
    I = profile_at_areas(metric, np.minimum(a, A_total))
    K = gauss_curvature(metric)
    K_left, K_right = float(K[0]), float(K[-1])
    lo = (a > 0) & (a <= ball_window)
    I[lo] = np.minimum(I[lo], _ball_perimeter_at_area(K_left, a[lo]))
    hi = (a < 4 * np.pi) & (4 * np.pi - a <= ball_window)
    I[hi] = np.minimum(I[hi], _ball_perimeter_at_area(K_right, 4 * np.pi - a[hi]))
    v = I**2
    v[0] = 0.0
    v[-1] = 0.0
    return ProfileSamples(a, v, t=metric.t, genus=0, domain_kind=COMPACT)


def bol_fiala_bound(a, kappa0):
    """Lower bound sqrt(4 pi a - kappa0 a^2) for lengths of boundaries of
    simply connected regions under sup K <= kappa0."""
    a = np.asarray(a, dtype=float)
    rad = 4 * np.pi * a - kappa0 * a * a
    if np.any(rad < 0):
        raise ValueError("bound undefined: negative radicand")
    return np.sqrt(rad)


def isoperimetric_constant(samples: ProfileSamples) -> float:
    """inf I^2 / a; compact domains take the inf over a in (0, 2 pi] (the
    smaller of region/complement areas), half-line domains over the whole
    grid including the end slope."""
    a, v = samples.a, samples.v
    pos = a > 0
    if samples.domain_kind == COMPACT:
        pos &= a <= 2 * np.pi + 1e-12
        return float(np.min(v[pos] / a[pos]))
    ratios = v[pos] / a[pos]
    end_slope = (v[-1] - v[-2]) / (a[-1] - a[-2])
    return float(min(np.min(ratios), end_slope))


@dataclass(frozen=True)
class FitReport:
    supK_est: float
    window_lo: float
    window_hi: float
    r2: float


def small_scale_fit(samples: ProfileSamples) -> FitReport:
    """Estimate sup K from the small-area expansion
    I = sqrt(4 pi a) - (sup K / (4 sqrt(pi))) a^{3/2} + O(a^{5/2}),
    by a linear fit of (sqrt(4 pi a) - I) / a^{3/2} over the smallest decade
    of positive grid areas."""
    a, v = samples.a, samples.v
    pos = a > 0
    a_pos = a[pos]
    if int(np.sum(a_pos < 0.01)) < 20:
        raise ValueError("grid does not resolve the small-area regime "
                         "(need >= 20 nodes with a < 0.01)")
    # smallest decade of grid areas containing at least 20 nodes
    window = None
    for lo in a_pos:
        window = (a_pos >= lo) & (a_pos <= 10 * lo)
        if np.sum(window) >= 20:
            break
    if window is None or np.sum(window) < 20:
        raise ValueError("no decade of the grid contains >= 20 nodes")
    aw = a_pos[window]
    Iw = np.sqrt(np.maximum(v[pos][window], 0.0))
    y = (np.sqrt(4 * np.pi * aw) - Iw) / aw**1.5
    coeffs = np.polyfit(aw, y, 1)
    fitted = np.polyval(coeffs, aw)
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot < 1e-30 else 1.0 - ss_res / ss_tot
    supK = 4 * np.sqrt(np.pi) * coeffs[-1]  # intercept of the linear fit
    return FitReport(supK_est=float(supK), window_lo=float(aw[0]),
                     window_hi=float(aw[-1]), r2=r2)


def support_concavity_check(samples: ProfileSamples, kappa0,
                            tolerance=0.0) -> ResidualReport:
    """Second-difference concavity test for a -> I(a)^2 + kappa0 a^2."""
    a, v = samples.a, samples.v
    h = samples.h
    y = v + kappa0 * a * a
    d2 = (y[2:] - 2 * y[1:-1] + y[:-2]) / (h * h)
    return ResidualReport(grid=a[1:-1], residuals=d2, tolerance=tolerance,
                          sense=Sense.LESS_EQUAL,
                          label="support concavity of I^2 + kappa0 a^2")


@dataclass(frozen=True)
class VariationReport:
    """Residuals of the variation identities for a normal family of latitude
    circles, each normalized by max(1, |right-hand side|)."""

    checks: Dict[str, ResidualReport]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.checks.values())


def variation_check(metric: RotSymSphereMetric, x0: float,
                    tol_first=1e-4, tol_second=1e-3,
                    tol_gauss_bonnet=1e-6) -> VariationReport:
    """Verify, at latitude x0, the variation identities under unit-speed
    normal displacement eps (d eps = sqrt(u) dx):

        dL/deps   = int k ds          (= k L, k the geodesic curvature)
        dA/deps   = L
        d2A/deps2 = int k ds
        d2L/deps2 = - int K ds
        int k ds  = 2 pi - int_Omega K dmu   (Gauss-Bonnet, disc side)

    Left sides by 4th-order finite differences on an eps-uniform stencil of
    interpolated latitudes; right sides by independent quadrature of the
    curvature fields.
    """
    x, u, P, h = metric.x, metric.u, metric.P, metric.h
    if not (x[4] < x0 < x[-5]):
        raise ValueError("x0 too close to the chart boundary")
    s_spline = CubicSpline(x, np.log(u))
    sqrtu_spline = CubicSpline(x, np.sqrt(u))
    eps_anti = sqrtu_spline.antiderivative()
    u_at = lambda xx: np.exp(s_spline(xx))

    # eps-uniform 5-point stencil around x0 by Newton inversion of eps(x)
    d_eps = 2.0 * h * float(np.sqrt(u_at(x0)))
    targets = eps_anti(x0) + d_eps * np.arange(-2, 3)
    xs = x0 + (targets - eps_anti(x0)) / np.sqrt(u_at(x0))
    for _ in range(4):
        xs = xs - (eps_anti(xs) - targets) / np.sqrt(u_at(xs))
    L_st = P * np.sqrt(u_at(xs))

    u_sp = CubicSpline(x, u)
    A_anti = u_sp.antiderivative()
    lam_l = metric.decay[0]
    A_at = lambda xx: P * (A_anti(xx) - A_anti(x[0]) + u[0] / lam_l)
    A_st = A_at(xs)

    c1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * d_eps)
    c2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * d_eps**2)
    dL = float(np.dot(c1, L_st))
    d2L = float(np.dot(c2, L_st))
    dA = float(np.dot(c1, A_st))
    d2A = float(np.dot(c2, A_st))

    # right-hand sides from the curvature fields
    u0 = float(u_at(x0))
    L0 = P * np.sqrt(u0)
    k0 = float(s_spline(x0, 1)) / (2.0 * np.sqrt(u0))  # u'/(2 u^{3/2})
    int_k = k0 * L0
    K_field = gauss_curvature(metric)
    K0 = float(CubicSpline(x, K_field)(x0))
    int_K_ds = K0 * L0
    # total curvature of the disc {x < x0}: quadrature of the
    # finite-difference curvature field plus the analytic left tail
    Ku_spline = CubicSpline(x, K_field * u)
    sp_left = float(deriv1_uniform(np.log(u), h)[0])
    tail = -(P / 2.0) * (sp_left - lam_l)
    int_K_disc = P * float(Ku_spline.antiderivative()(x0)
                           - Ku_spline.antiderivative()(x[0])) + tail

    def report(name, lhs, rhs, tol):
        scale = max(1.0, abs(rhs))
        return ResidualReport(grid=np.array([x0]),
                              residuals=np.array([(lhs - rhs) / scale]),
                              tolerance=tol, sense=Sense.EQUALITY, label=name)

    checks = {
        "dL_deps": report("dL/deps = int k", dL, int_k, tol_first),
        "dA_deps": report("dA/deps = L", dA, L0, tol_first),
        "d2A_deps2": report("d2A/deps2 = int k", d2A, int_k, tol_second),
        "d2L_deps2": report("d2L/deps2 = -int K ds", d2L, -int_K_ds, tol_second),
        "gauss_bonnet": report("int k = 2 pi - int_Omega K", int_k,
                               2 * np.pi - int_K_disc, tol_gauss_bonnet),
    }
    return VariationReport(checks)


# ---------------------------------------------------------------------------
# Certification helpers used by the flow harnesses
# ---------------------------------------------------------------------------

def certify_flat_comparison_constant(metric: ConformalTorusMetric,
                                     margin: float = 0.05) -> float:
    """Certified constant C for the flat-cover comparison a / C <= I(a)^2.

    Conformal distortion bounds the profile of e^{2w} g_flat from below by
    e^{2 min w - 2 max w} times the flat profile 4 pi a, giving
    C = (1 + margin) e^{2 (max w - min w)} / (4 pi)."""
    osc = float(np.max(metric.w) - np.min(metric.w))
    return (1.0 + margin) * np.exp(2.0 * osc) / (4 * np.pi)


def certify_rosenau_shift(metric: RotSymSphereMetric, candidates=None,
                          margin: float = 0.0) -> Optional[float]:
    """Largest time offset t0 such that the Rosenau profile at t0 sits below
    the latitude profile of the metric pointwise on the grid (the gap decays
    like a^{3/2} at the endpoints, so only a weak margin is meaningful).

    Returns None when no candidate certifies."""
    if candidates is None:
        candidates = np.linspace(0.01, 1.0, 100)
    prof = latitude_profile(metric)
    interior = (prof.a > 0) & (prof.a < 4 * np.pi)
    a_int = prof.a[interior]
    I_int = prof.profile[interior]
    for t0 in sorted(np.asarray(candidates, dtype=float), reverse=True):
        phi = rosenau_profile(a_int / (4 * np.pi), t0)
        if float(np.min(I_int - phi)) >= margin:
            return float(t0)
    return None
