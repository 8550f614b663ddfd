"""Closed-form comparison functions for the profile evolution inequality.

Each family provides the squared profile v(a, t) = phi(a, t)^2 together with
analytic derivatives, so that the evolution residual

    r = phi_t - [phi'' phi^2 - (phi')^2 phi + phi' (4 pi chi0 - 2 (1-g) a)
                 + (1-g) phi]

can be evaluated without finite differences.  Families:

* ConstantCurvature -- v = 4 pi a - kappa a^2 with kappa = 1 - genus;
  stationary solution of the evolution equation.
* Rosenau          -- squared isoperimetric profile of the Rosenau solution
  on the 2-sphere, normalized so that v / a -> 4 pi as a -> 0 with a the
  absolute enclosed area in (0, 4 pi).
* Genus1           -- self-similar supersolution envelope on the plane
  (universal cover of the torus), exact solution of the genus-1 equation.
* HyperbolicQuadratic -- v = 4 pi a + B(t) a^2 with logistic coefficient
  B' = -2 B (B + (1-g)); exact solution for genus >= 2 covers.
* HyperbolicGeneral -- v = v_C(t)(x) + b(t) x^2 built from the stationary
  hyperbolic family plus a quadratic correction with Bernoulli coefficient
  b' = -4 (b^2 + (1-g) b).

All operations are pure functions of their arguments and broadcast over
numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from .reporting import ResidualReport, Sense

__all__ = [
    "ModelSpec", "ModelEval",
    "constant_curvature_profile", "rosenau_conformal_factor",
    "rosenau_profile", "genus1_model", "hyperbolic_quadratic_model",
    "hyperbolic_stationary", "critical_constants", "hyperbolic_general_model",
    "evaluate_model", "model_residual", "residual_from_eval",
    "curvature_bound_of_model", "harmonic_mean_combine",
    "porous_media_residual", "concavity_check",
]

FAMILIES = ("ConstantCurvature", "Rosenau", "Genus1",
            "HyperbolicQuadratic", "HyperbolicGeneral")


@dataclass(frozen=True)
class ModelEval:
    """Squared profile v = phi^2 and its partial derivatives at grid points."""

    value: np.ndarray
    d1: np.ndarray   # dv/da
    d2: np.ndarray   # d2v/da2
    dt: np.ndarray   # dv/dt


@dataclass(frozen=True)
class ModelSpec:
    """Tagged description of one comparison-function family.

    params by family:
      ConstantCurvature: none (kappa = 1 - genus implied)
      Rosenau:           t0 >= 0 (time offset)
      Genus1:            C > 1/(4 pi)
      HyperbolicQuadratic: B0 in [0, genus-1); A accepted but unused
      HyperbolicGeneral: C0 > C_crit, b0 in (0, min(b_crit(C0), genus-1))
    """

    family: str
    genus: int
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family: {self.family}")
        if self.genus < 0:
            raise ValueError("genus must be nonnegative")
        p = self.params
        if self.family == "Rosenau":
            if self.genus != 0:
                raise ValueError("Rosenau family requires genus 0")
            if p.get("t0", 0.0) < 0:
                raise ValueError("Rosenau time offset t0 must be >= 0")
        elif self.family == "Genus1":
            if self.genus != 1:
                raise ValueError("Genus1 family requires genus 1")
            if p.get("C", 1.0) <= 1.0 / (4 * np.pi):
                raise ValueError("Genus1 requires C > 1/(4 pi)")
        elif self.family == "HyperbolicQuadratic":
            if self.genus < 2:
                raise ValueError("HyperbolicQuadratic requires genus >= 2")
            B0 = p.get("B0", 0.0)
            if not (0 <= B0 < self.genus - 1):
                raise ValueError("B0 must lie in [0, genus-1)")
        elif self.family == "HyperbolicGeneral":
            if self.genus < 2:
                raise ValueError("HyperbolicGeneral requires genus >= 2")
            C0 = p["C0"]
            b0 = p["b0"]
            c_crit, b_crit = critical_constants(self.genus, C0)
            if not (0 < b0 < min(b_crit, self.genus - 1)):
                raise ValueError("b0 must lie in (0, min(b_crit(C0), genus-1))")


# ---------------------------------------------------------------------------
# Elementary closed forms
# ---------------------------------------------------------------------------

def constant_curvature_profile(a, kappa):
    """Isoperimetric profile sqrt(4 pi a - kappa a^2) of a constant-curvature
    surface (or its simply connected cover)."""
    a = np.asarray(a, dtype=float)
    rad = 4 * np.pi * a - kappa * a * a
    if np.any(rad < 0):
        raise ValueError("radicand 4 pi a - kappa a^2 is negative")
    return np.sqrt(rad)


def rosenau_conformal_factor(x, t):
    """Conformal factor u(x, t) of the Rosenau solution on a cylinder chart
    with circumferential period 4 pi."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be >= 0")
    x = np.asarray(x, dtype=float)
    s = np.exp(-2.0 * np.asarray(t, dtype=float))
    return np.sinh(s) / (2.0 * s * (np.cosh(x) + np.cosh(s)))


def rosenau_profile(a_frac, t):
    """Isoperimetric profile of the Rosenau solution at area fraction
    a_frac = a / (4 pi), normalized so phi^2 / a -> 4 pi as a -> 0."""
    a_frac = np.asarray(a_frac, dtype=float)
    if np.any((a_frac <= 0) | (a_frac >= 1)):
        raise ValueError("a_frac must lie in (0, 1)")
    s = np.exp(-2.0 * float(t))
    return 4 * np.pi * np.sqrt(
        np.sinh(a_frac * s) * np.sinh((1 - a_frac) * s) / (s * np.sinh(s)))


def _rosenau_eval(a, t):
    """ModelEval of the Rosenau squared profile in absolute area a in (0, 4 pi)."""
    a = np.asarray(a, dtype=float)
    t = np.asarray(t, dtype=float)
    s = np.exp(-2.0 * t)
    ab = a / (4 * np.pi)
    sh = np.sinh(s)
    num = np.sinh(ab * s) * np.sinh((1 - ab) * s)
    den = s * sh
    v = 16 * np.pi**2 * num / den
    d1 = 4 * np.pi * np.sinh((1 - 2 * ab) * s) / sh
    d2 = -2 * s * np.cosh((1 - 2 * ab) * s) / sh
    dnum = ab * np.cosh(ab * s) * np.sinh((1 - ab) * s) \
        + (1 - ab) * np.sinh(ab * s) * np.cosh((1 - ab) * s)
    dden = sh + s * np.cosh(s)
    dv_ds = 16 * np.pi**2 * (dnum * den - num * dden) / (den * den)
    dt = -2.0 * s * dv_ds
    return ModelEval(v, d1, d2, np.broadcast_to(dt, v.shape).copy())


def genus1_model(a, t, C):
    """Self-similar genus-1 comparison function
    v = a/C + (t/C)(4 pi - 1/C)(1 - e^{-C a / t})."""
    if np.any(np.asarray(t) <= 0):
        raise ValueError("Genus1 model requires t > 0")
    if C <= 1.0 / (4 * np.pi):
        raise ValueError("Genus1 requires C > 1/(4 pi)")
    a = np.asarray(a, dtype=float)
    t = np.asarray(t, dtype=float)
    Q = 4 * np.pi - 1.0 / C
    E = np.exp(-C * a / t)
    v = a / C + (t * Q / C) * (1 - E)
    d1 = 1.0 / C + Q * E
    d2 = -(Q * C / t) * E
    dt = (Q / C) * (1 - E - (C * a / t) * E)
    return ModelEval(v, np.broadcast_to(d1, v.shape).copy(),
                     np.broadcast_to(d2, v.shape).copy(),
                     np.broadcast_to(dt, v.shape).copy())


def _logistic_B(t, B0, genus):
    """Solution of B' = -2 B (B + (1-g)) with B(0) = B0 in [0, g-1)."""
    if B0 == 0.0:
        return np.zeros_like(np.asarray(t, dtype=float))
    gm1 = genus - 1.0
    t = np.asarray(t, dtype=float)
    return gm1 / (1.0 + (gm1 / B0 - 1.0) * np.exp(-2.0 * gm1 * t))


def hyperbolic_quadratic_model(a, t, genus, A=0.0, B0=0.0):
    """Quadratic hyperbolic comparison function v = 4 pi a + B(t) a^2 with
    logistic coefficient B; the scale parameter A is accepted for interface
    compatibility and unused."""
    if not (0 <= B0 < genus - 1):
        raise ValueError("B0 must lie in [0, genus-1)")
    a = np.asarray(a, dtype=float)
    t = np.asarray(t, dtype=float)
    B = _logistic_B(t, B0, genus)
    Bdot = -2.0 * B * (B + (1.0 - genus))
    v = 4 * np.pi * a + B * a * a
    d1 = 4 * np.pi + 2 * B * a
    d2 = 2 * B * np.ones_like(v)
    dt = Bdot * a * a
    return ModelEval(v, d1, np.broadcast_to(d2, v.shape).copy(),
                     np.broadcast_to(dt, v.shape).copy())


def hyperbolic_stationary(x, C, genus):
    """Stationary hyperbolic comparison function
    v_C(x) = (1/C)(4 pi + 2(1-g)/C)(1 - e^{-Cx}) - (2(1-g)/C^2)(Cx)."""
    c_crit = (genus - 1.0) / (2 * np.pi)
    if C < c_crit:
        raise ValueError("C must be >= C_crit = (genus-1)/(2 pi)")
    x = np.asarray(x, dtype=float)
    gam = 2.0 * (genus - 1.0)   # = -2 (1-g)
    E = np.exp(-C * x)
    v = (4 * np.pi / C - gam / C**2) * (1 - E) + (gam / C) * x
    d1 = (4 * np.pi - gam / C) * E + gam / C
    d2 = -C * (4 * np.pi - gam / C) * E
    return ModelEval(v, d1, d2, np.zeros_like(v))


def critical_constants(genus, C):
    """Critical constants for the hyperbolic families: C_crit = (g-1)/(2 pi)
    and b_crit = (1-g)^2 / (4 pi C + 2 (1-g)) (sufficiency threshold for
    concavity of sqrt(v_C + b x^2))."""
    if genus < 2:
        raise ValueError("critical constants require genus >= 2")
    c_crit = (genus - 1.0) / (2 * np.pi)
    if C <= c_crit:
        raise ValueError("C must exceed C_crit = (genus-1)/(2 pi)")
    b_crit = (1.0 - genus)**2 / (4 * np.pi * C + 2 * (1.0 - genus))
    return c_crit, b_crit


def _bernoulli_b(t, b0, genus):
    """Solution of b' = -4 (b^2 + (1-g) b) with b(0) = b0 in (0, g-1)."""
    t = np.asarray(t, dtype=float)
    inv = (1.0 / b0 + 1.0 / (1.0 - genus)) * np.exp(4 * (1.0 - genus) * t) \
        - 1.0 / (1.0 - genus)
    return 1.0 / inv


def _general_C(t, C0, b0, genus):
    """Time-dependent stationary-family constant solving
    d/dt ln(C - C_crit) = -2 b, with C(0) = C0."""
    c_crit = (genus - 1.0) / (2 * np.pi)
    b = _bernoulli_b(t, b0, genus)
    return (C0 - c_crit) * np.exp(2 * (1.0 - genus) * np.asarray(t, dtype=float)) \
        * np.sqrt(b / b0) + c_crit


def hyperbolic_general_model(x, t, genus, C0, b0):
    """General hyperbolic comparison function v = v_C(t)(x) + b(t) x^2."""
    c_crit, b_crit = critical_constants(genus, C0)
    if not (0 < b0 < min(b_crit, genus - 1)):
        raise ValueError("b0 must lie in (0, min(b_crit(C0), genus-1))")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    b = _bernoulli_b(t, b0, genus)
    C = _general_C(t, C0, b0, genus)
    bdot = -4.0 * (b * b + (1.0 - genus) * b)
    Cdot = -2.0 * b * (C - c_crit)
    gam = 2.0 * (genus - 1.0)
    E = np.exp(-C * x)
    v = (4 * np.pi / C - gam / C**2) * (1 - E) + (gam / C) * x + b * x * x
    d1 = (4 * np.pi - gam / C) * E + gam / C + 2 * b * x
    d2 = -C * (4 * np.pi - gam / C) * E + 2 * b
    dvdC = (-4 * np.pi / C**2 + 2 * gam / C**3) * (1 - E) \
        + (4 * np.pi / C - gam / C**2) * (x * E) - (gam / C**2) * x
    dt = dvdC * Cdot + bdot * x * x
    return ModelEval(v, d1, d2, dt)


# ---------------------------------------------------------------------------
# Evaluation and residuals
# ---------------------------------------------------------------------------

def evaluate_model(spec: ModelSpec, a, t) -> ModelEval:
    """Evaluate a ModelSpec at (a, t); arrays broadcast."""
    p = spec.params
    if spec.family == "ConstantCurvature":
        kappa = 1.0 - spec.genus
        a = np.asarray(a, dtype=float)
        v = 4 * np.pi * a - kappa * a * a
        return ModelEval(v, 4 * np.pi - 2 * kappa * a,
                         np.full_like(v, -2 * kappa), np.zeros_like(v))
    if spec.family == "Rosenau":
        return _rosenau_eval(a, np.asarray(t, dtype=float) + p.get("t0", 0.0))
    if spec.family == "Genus1":
        return genus1_model(a, t, p["C"])
    if spec.family == "HyperbolicQuadratic":
        return hyperbolic_quadratic_model(a, t, spec.genus,
                                          p.get("A", 0.0), p.get("B0", 0.0))
    if spec.family == "HyperbolicGeneral":
        return hyperbolic_general_model(a, t, spec.genus, p["C0"], p["b0"])
    raise ValueError(f"unknown family {spec.family}")


def residual_from_eval(ev: ModelEval, a, genus, chi0=1) -> np.ndarray:
    """Evolution residual in profile form, r = (r_v) / (2 phi), where r_v is
    the residual of v_t = v v'' - (v')^2 + (4 pi chi0 - 2(1-g)a) v' + 2(1-g)v."""
    a = np.asarray(a, dtype=float)
    drift = 4 * np.pi * chi0 - 2 * (1.0 - genus) * a
    r_v = ev.dt - (ev.value * ev.d2 - ev.d1**2 + drift * ev.d1
                   + 2 * (1.0 - genus) * ev.value)
    phi = np.sqrt(np.maximum(ev.value, 0.0))
    return r_v / (2.0 * np.where(phi > 0, phi, np.inf))


def model_residual(spec: ModelSpec, grid, chi0=1, tolerance=1e-8) -> ResidualReport:
    """Evolution-inequality residual of a model over (a, t) grid points.

    ``grid`` is a pair (a_points, t_points) of equal-length arrays or an
    (N, 2) array.  Residuals are nondimensionalized by max(sup|v|, 1) over
    the grid; sense is LessEqual (supersolution families achieve equality).
    """
    if isinstance(grid, tuple):
        a_pts, t_pts = (np.asarray(grid[0], float), np.asarray(grid[1], float))
    else:
        g = np.asarray(grid, dtype=float)
        if g.ndim == 2 and g.shape[1] == 2:
            a_pts, t_pts = g[:, 0], g[:, 1]
        else:
            raise ValueError("grid must be (a, t) arrays or an (N, 2) array")
    ev = evaluate_model(spec, a_pts, t_pts)
    r = residual_from_eval(ev, a_pts, spec.genus, chi0)
    scale = max(float(np.max(np.abs(ev.value))), 1.0)
    pts = np.column_stack([np.broadcast_to(a_pts, r.shape).ravel(),
                           np.broadcast_to(t_pts, r.shape).ravel()])
    return ResidualReport(grid=pts, residuals=np.ravel(r) / scale,
                          tolerance=tolerance, sense=Sense.LESS_EQUAL,
                          label=f"{spec.family} evolution residual")


def curvature_bound_of_model(spec: ModelSpec, t) -> float:
    """Curvature bound K0(t) from the small-area expansion
    v = 4 pi a - K0 a^2 + O(a^3) of the model."""
    t = float(t)
    p = spec.params
    if spec.family == "ConstantCurvature":
        return 1.0 - spec.genus
    if spec.family == "Genus1":
        if t == 0.0:
            raise ValueError("Genus1 curvature bound undefined at t = 0")
        return (2 * np.pi * p["C"] - 0.5) / t
    if spec.family == "HyperbolicQuadratic":
        return -float(_logistic_B(t, p.get("B0", 0.0), spec.genus))
    if spec.family == "HyperbolicGeneral":
        b = float(_bernoulli_b(t, p["b0"], spec.genus))
        C = float(_general_C(t, p["C0"], p["b0"], spec.genus))
        return 2 * np.pi * C + (1.0 - spec.genus) - b
    if spec.family == "Rosenau":
        a_fit = np.linspace(1e-4, 1e-3, 16)
        v = evaluate_model(spec, a_fit, t).value
        coeffs = np.polyfit(a_fit, 4 * np.pi * a_fit - v, 2)
        return float(coeffs[0])
    raise ValueError(f"unknown family {spec.family}")


def harmonic_mean_combine(ev: ModelEval, C, genus, t) -> ModelEval:
    """Harmonic mean H = (1/v + 1/u_C)^{-1} with the constant-in-area
    solution u_C = C e^{2(1-g)t}; preserves the supersolution inequality."""
    if C <= 0:
        raise ValueError("C must be positive")
    u = C * np.exp(2 * (1.0 - genus) * np.asarray(t, dtype=float))
    u = np.broadcast_to(u, np.asarray(ev.value).shape)
    v = ev.value
    s = v + u
    H = v * u / s
    d1 = u**2 * ev.d1 / s**2
    d2 = u**2 * (ev.d2 * s - 2 * ev.d1**2) / s**3
    u_t = 2 * (1.0 - genus) * u
    dt = (ev.dt * u**2 + u_t * v**2) / s**2
    return ModelEval(H, d1, d2, dt)


def porous_media_residual(ev: ModelEval, a, genus, chi0=1,
                          tolerance=1e-8) -> ResidualReport:
    """Residual of the logarithmic porous-media form under u = phi^{-2}:

        r_u = u_t - [ (ln u)'' + (4 pi chi0 - 2(1-g)a) u' - 2(1-g) u ]

    Sense GreaterEqual: a supersolution of the profile inequality maps to a
    subsolution here via the exact identity r_u = -r_v / v^2.
    """
    a = np.asarray(a, dtype=float)
    v = ev.value
    if np.any(v <= 0):
        raise ValueError("porous-media transform requires phi > 0")
    u = 1.0 / v
    u_t = -ev.dt / v**2
    u_1 = -ev.d1 / v**2
    log_u_2 = -(ev.d2 * v - ev.d1**2) / v**2
    drift = 4 * np.pi * chi0 - 2 * (1.0 - genus) * a
    r_u = u_t - (log_u_2 + drift * u_1 - 2 * (1.0 - genus) * u)
    scale = max(float(np.max(np.abs(u))), 1.0)
    pts = np.column_stack([np.ravel(np.broadcast_to(a, r_u.shape)),
                           np.ravel(r_u)])
    return ResidualReport(grid=pts, residuals=np.ravel(r_u) / scale,
                          tolerance=tolerance, sense=Sense.GREATER_EQUAL,
                          label="porous-media residual")


def concavity_check(a, values=None, eps=0.0, tolerance=0.0) -> ResidualReport:
    """Second-difference concavity test: D2_i + eps <= 0 at interior nodes.

    Accepts either explicit (a, values) arrays or a single object with
    ``.a`` and ``.v`` attributes passed as the first argument.
    """
    if values is None and hasattr(a, "a") and hasattr(a, "v"):
        values = a.v
        a = a.a
    a = np.asarray(a, dtype=float)
    y = np.asarray(values, dtype=float)
    if a.size < 3 or a.size != y.size or np.any(np.diff(a) <= 0):
        raise ValueError("need >= 3 samples on a strictly increasing grid")
    h = np.diff(a)
    if not np.allclose(h, h[0], rtol=1e-9):
        raise ValueError("concavity_check requires a uniform grid")
    d2 = (y[2:] - 2 * y[1:-1] + y[:-2]) / h[0]**2
    return ResidualReport(grid=a[1:-1], residuals=d2 + eps,
                          tolerance=tolerance, sense=Sense.LESS_EQUAL,
                          label="second-difference concavity")
