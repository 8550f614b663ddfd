"""Concrete metric families: rotationally symmetric sphere metrics on a
cylinder chart, and doubly periodic conformal torus metrics.

Sphere metrics are u(x) (dx^2 + dy^2) on [-X, X] x (R / P Z) with an
exponential tail model for |x| > X; tail contributions to areas and
curvature integrals are added analytically.  Torus metrics are
e^{2 w(x, y)} (dx^2 + dy^2) over a flat square background.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .reporting import ResidualReport, Sense

__all__ = [
    "RotSymSphereMetric", "ConformalTorusMetric",
    "round_sphere", "rosenau_metric", "perturbed_round_sphere",
    "flat_torus", "perturbed_flat_torus",
    "gauss_curvature", "total_area", "normalize_area", "gauss_bonnet_check",
    "geodesic_ball_expansion", "torus_laplacian",
    "deriv1_uniform", "deriv2_uniform",
]


# ---------------------------------------------------------------------------
# Finite differences on uniform grids (4th order, one-sided at the ends)
# ---------------------------------------------------------------------------

def deriv1_uniform(y, h):
    """4th-order first derivative on a uniform grid."""
    y = np.asarray(y, dtype=float)
    n = y.size
    d = np.empty(n)
    d[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    for i in (0, 1):
        c = np.array([-25, 48, -36, 16, -3]) / 12.0
        d[i] = np.dot(c, y[i:i + 5]) / h
    for i in (n - 2, n - 1):
        c = np.array([3, -16, 36, -48, 25]) / 12.0
        d[i] = np.dot(c, y[i - 4:i + 1]) / h
    return d


def deriv2_uniform(y, h):
    """4th-order second derivative on a uniform grid."""
    y = np.asarray(y, dtype=float)
    n = y.size
    d = np.empty(n)
    d[2:-2] = (-y[:-4] + 16 * y[1:-3] - 30 * y[2:-2]
               + 16 * y[3:-1] - y[4:]) / (12 * h * h)
    c_fwd = np.array([45, -154, 214, -156, 61, -10]) / 12.0
    for i in (0, 1):
        d[i] = np.dot(c_fwd, y[i:i + 6]) / (h * h)
    c_bwd = c_fwd[::-1]
    for i in (n - 2, n - 1):
        d[i] = np.dot(c_bwd, y[i - 5:i + 1]) / (h * h)
    return d


# ---------------------------------------------------------------------------
# Metric types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RotSymSphereMetric:
    """Rotationally symmetric conformal metric u (dx^2 + dy^2) on a cylinder
    chart, with y-period P and exponential decay rates beyond the chart."""

    x: np.ndarray
    u: np.ndarray
    P: float
    decay: Tuple[float, float]  # (lambda_left, lambda_right)
    t: float = 0.0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        u = np.asarray(self.u, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "u", u)
        if x.ndim != 1 or x.size < 8 or x.size != u.size:
            raise ValueError("need matching 1D grids with >= 8 nodes")
        h = np.diff(x)
        if np.any(h <= 0) or not np.allclose(h, h[0], rtol=1e-9):
            raise ValueError("x grid must be uniform increasing")
        if np.any(u <= 0):
            raise ValueError("conformal factor must be positive")
        if self.decay[0] <= 0 or self.decay[1] <= 0:
            raise ValueError("tail decay rates must be positive")

    @property
    def h(self) -> float:
        return float(self.x[1] - self.x[0])


@dataclass(frozen=True)
class ConformalTorusMetric:
    """Doubly periodic log-conformal factor w over a flat L1 x L2 background."""

    w: np.ndarray
    L1: float
    L2: float
    t: float = 0.0

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        object.__setattr__(self, "w", w)
        if w.ndim != 2:
            raise ValueError("w must be a 2D periodic grid")
        if self.L1 <= 0 or self.L2 <= 0:
            raise ValueError("periods must be positive")

    @property
    def cell_area(self) -> float:
        n1, n2 = self.w.shape
        return (self.L1 / n1) * (self.L2 / n2)


def _fit_decay(x, u):
    h = x[1] - x[0]
    lam_left = float(np.log(u[1] / u[0]) / h)
    lam_right = float(np.log(u[-2] / u[-1]) / h)
    if lam_left <= 0 or lam_right <= 0:
        raise ValueError("conformal factor does not decay at the chart ends")
    return (lam_left, lam_right)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def round_sphere(n: int = 1024, X: float = 15.0) -> RotSymSphereMetric:
    """Unit round sphere: u = sech^2(x), y-period 2 pi."""
    x = np.linspace(-X, X, n + 1)
    u = 1.0 / np.cosh(x) ** 2
    m = RotSymSphereMetric(x, u, 2 * np.pi, _fit_decay(x, u))
    return normalize_area(m)


def rosenau_metric(t: float, n: int = 1024, X: float = 24.0) -> RotSymSphereMetric:
    """Rosenau solution at time t: u = sinh(s)/(2s(cosh x + cosh s)) with
    s = e^{-2t}, y-period 4 pi."""
    from .model_profiles import rosenau_conformal_factor
    x = np.linspace(-X, X, n + 1)
    u = rosenau_conformal_factor(x, t)
    return RotSymSphereMetric(x, u, 4 * np.pi, _fit_decay(x, u), t=t)


def perturbed_round_sphere(amplitude: float, n: int = 1024,
                           X: float = 15.0) -> RotSymSphereMetric:
    """Round sphere with an axisymmetric conformal perturbation
    exp(2 A sech^2 x) (a sin^2-latitude bump), renormalized to area 4 pi."""
    x = np.linspace(-X, X, n + 1)
    sech2 = 1.0 / np.cosh(x) ** 2
    u = sech2 * np.exp(2.0 * amplitude * sech2)
    m = RotSymSphereMetric(x, u, 2 * np.pi, _fit_decay(x, u))
    return normalize_area(m)


def flat_torus(n: int = 64) -> ConformalTorusMetric:
    """Flat torus of area 4 pi (w = 0 over a square background)."""
    L = np.sqrt(4 * np.pi)
    return ConformalTorusMetric(np.zeros((n, n)), L, L)


def perturbed_flat_torus(amplitude: float, n: int = 64) -> ConformalTorusMetric:
    """Flat torus with w = A sin(2 pi x / L) sin(2 pi y / L), renormalized."""
    L = np.sqrt(4 * np.pi)
    xs = np.arange(n) * (L / n)
    wx = np.sin(2 * np.pi * xs / L)
    w = amplitude * np.outer(wx, wx)
    return normalize_area(ConformalTorusMetric(w, L, L))


# ---------------------------------------------------------------------------
# Fields and integrals
# ---------------------------------------------------------------------------

def torus_laplacian(w, L1, L2, k2=None):
    """Fourier-spectral flat Laplacian of a doubly periodic field."""
    w = np.asarray(w, dtype=float)
    if k2 is None:
        k2 = torus_k2(w.shape, L1, L2)
    return np.fft.irfft2(-k2 * np.fft.rfft2(w), s=w.shape)


def torus_k2(shape, L1, L2):
    """Squared wavenumbers for the rfft2 layout of an (n1, n2) grid."""
    n1, n2 = shape
    kx = 2 * np.pi * np.fft.fftfreq(n1, d=L1 / n1)
    ky = 2 * np.pi * np.fft.rfftfreq(n2, d=L2 / n2)
    return (kx ** 2)[:, None] + (ky ** 2)[None, :]


def gauss_curvature(metric):
    """Gauss curvature field: K = -(ln u)'' / (2u) on the cylinder chart
    (rotational symmetry kills the y-derivatives); K = -e^{-2w} lap w on
    the torus (spectral Laplacian)."""
    if isinstance(metric, RotSymSphereMetric):
        # differencing ln u keeps the truncation error uniformly O(h^4):
        # (ln u)'' decays with u, cancelling the 1/u amplification.  The
        # field is roundoff-limited only deep in the exponential tails
        # (|ln u| eps / (h^2 u) growing as u -> 0), which consumers mask.
        s = np.log(metric.u)
        return -deriv2_uniform(s, metric.h) / (2.0 * metric.u)
    if isinstance(metric, ConformalTorusMetric):
        lap = torus_laplacian(metric.w, metric.L1, metric.L2)
        return -np.exp(-2.0 * metric.w) * lap
    raise TypeError("unknown metric type")


def total_area(metric) -> float:
    """Total area: trapezoid quadrature plus analytic exponential tails on
    the cylinder chart; exact cell sum on the torus."""
    if isinstance(metric, RotSymSphereMetric):
        core = np.trapezoid(metric.u, dx=metric.h) * metric.P
        lam_l, lam_r = metric.decay
        tails = metric.P * (metric.u[0] / lam_l + metric.u[-1] / lam_r)
        return float(core + tails)
    if isinstance(metric, ConformalTorusMetric):
        return float(np.sum(np.exp(2.0 * metric.w)) * metric.cell_area)
    raise TypeError("unknown metric type")


def normalize_area(metric):
    """Rescale the conformal factor so the total area is exactly 4 pi."""
    target = 4 * np.pi
    area = total_area(metric)
    if isinstance(metric, RotSymSphereMetric):
        return RotSymSphereMetric(metric.x, metric.u * (target / area),
                                  metric.P, metric.decay, metric.t)
    if isinstance(metric, ConformalTorusMetric):
        return ConformalTorusMetric(metric.w + 0.5 * np.log(target / area),
                                    metric.L1, metric.L2, metric.t)
    raise TypeError("unknown metric type")


def gauss_bonnet_check(metric, tolerance=1e-8) -> ResidualReport:
    """Check integral of K dmu against 2 pi chi (chi = 2 sphere, 0 torus)."""
    if isinstance(metric, RotSymSphereMetric):
        K = gauss_curvature(metric)
        core = np.trapezoid(K * metric.u, dx=metric.h) * metric.P
        s = np.log(metric.u)
        sp = deriv1_uniform(s, metric.h)
        lam_l, lam_r = metric.decay
        # integral of K over each tail equals -(P/2) * [s'] evaluated
        # against the exponential tail model
        tail_l = -(metric.P / 2.0) * (sp[0] - lam_l)
        tail_r = (metric.P / 2.0) * (lam_r + sp[-1])
        total = core + tail_l + tail_r
        chi = 2.0
    elif isinstance(metric, ConformalTorusMetric):
        lap = torus_laplacian(metric.w, metric.L1, metric.L2)
        total = float(np.sum(-lap) * metric.cell_area)
        chi = 0.0
    else:
        raise TypeError("unknown metric type")
    res = np.array([total - 2 * np.pi * chi])
    return ResidualReport(grid=np.array([0.0]), residuals=res,
                          tolerance=tolerance, sense=Sense.EQUALITY,
                          label="Gauss-Bonnet")


def geodesic_ball_expansion(metric, p, r, max_fraction=0.5):
    """Truncated small-ball expansions about a point:

        area      = pi r^2 (1 - K(p) r^2 / 12)
        perimeter = 2 pi r (1 - K(p) r^2 / 6)

    ``p`` is a latitude x for sphere metrics or an (i, j) index for torus
    metrics.  Errors out when r exceeds max_fraction of the curvature scale.
    """
    K = gauss_curvature(metric)
    if isinstance(metric, RotSymSphereMetric):
        idx = int(np.argmin(np.abs(metric.x - p)))
        Kp = float(K[idx])
    elif isinstance(metric, ConformalTorusMetric):
        Kp = float(K[p])
    else:
        raise TypeError("unknown metric type")
    scale = 1.0 / np.sqrt(max(abs(Kp), 1e-12))
    if r > max_fraction * scale:
        raise ValueError(f"r={r:g} exceeds {max_fraction:g} of the local "
                         f"curvature scale {scale:g}")
    area = np.pi * r**2 * (1 - Kp * r**2 / 12.0)
    perimeter = 2 * np.pi * r * (1 - Kp * r**2 / 6.0)
    return area, perimeter
