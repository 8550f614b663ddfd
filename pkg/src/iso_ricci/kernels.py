"""Hot numerical kernels with a numba fast path and a pure-numpy fallback.

The backend is selected at import time: set the environment variable
``ISO_RICCI_NO_NUMBA=1`` to force the pure-numpy implementation (useful for
debugging or on machines without a working numba install).  Both paths
implement the same arithmetic; ``BACKEND`` records which one is active.

Kernels provided:

* ``profile_advance`` -- explicit RK2 (Heun) integration of the squared
  isoperimetric-profile evolution equation

      v_t = v v'' - (v')^2 + (4*pi*chi0 - 2*(1-g)*a) v' + 2*(1-g) v

  on a uniform area grid, with either a compact two-sided zero boundary or a
  half-line closure (zero at a=0, copied second difference at a_max).

* ``sphere_advance`` -- explicit RK2 integration of normalized Ricci flow for
  a rotationally symmetric sphere metric written in the polar-angle gauge
  e^{2 psi(theta)} g_round, using a conservative cell-centered Laplacian with
  natural zero-flux closure at the poles, and periodic area renormalization.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["BACKEND", "profile_advance", "sphere_advance"]

_PROFILE_BLOWUP = 1e15


# ---------------------------------------------------------------------------
# Pure-numpy reference implementations
# ---------------------------------------------------------------------------

def _profile_rhs_np(v, drift, h, genus, halfline):
    n = v.shape[0]
    out = np.zeros_like(v)
    vp = (v[2:] - v[:-2]) / (2.0 * h)
    vpp = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
    two_g = 2.0 * (1.0 - genus)
    out[1:-1] = v[1:-1] * vpp - vp * vp + drift[1:-1] * vp + two_g * v[1:-1]
    if halfline:
        vpN = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
        vppN = (v[n - 1] - 2.0 * v[n - 2] + v[n - 3]) / (h * h)
        out[n - 1] = (v[n - 1] * vppN - vpN * vpN + drift[n - 1] * vpN
                      + two_g * v[n - 1])
    return out


def _profile_advance_np(v, a, h, genus, chi0, halfline, t0, t1, safety):
    v = v.copy()
    drift = 4.0 * np.pi * chi0 - 2.0 * (1.0 - genus) * a
    t = t0
    steps = 0
    while t < t1 - 1e-14:
        vmax = np.max(v)
        if not np.isfinite(vmax) or vmax > _PROFILE_BLOWUP:
            return v, steps, False
        dt = min(safety * h * h / max(vmax, 1e-300), t1 - t)
        k1 = _profile_rhs_np(v, drift, h, genus, halfline)
        k2 = _profile_rhs_np(v + dt * k1, drift, h, genus, halfline)
        v += 0.5 * dt * (k1 + k2)
        t += dt
        steps += 1
    if not np.all(np.isfinite(v)):
        return v, steps, False
    return v, steps, True


def _sphere_rhs_np(psi, sin_c, sin_f, h):
    n = psi.shape[0]
    flux = np.zeros(n + 1)
    flux[1:-1] = sin_f[1:-1] * (psi[1:] - psi[:-1])
    lap = (flux[1:] - flux[:-1]) / (sin_c * h * h)
    return 1.0 - np.exp(-2.0 * psi) * (1.0 - lap)


def _sphere_advance_np(psi, sin_c, sin_f, h, t0, t1, safety, renorm_every):
    psi = psi.copy()
    t = t0
    steps = 0
    drift = 0.0
    area_weight = 2.0 * np.pi * h
    target = 4.0 * np.pi
    while t < t1 - 1e-14:
        dmax = np.max(np.exp(-2.0 * psi))
        if not np.isfinite(dmax):
            return psi, steps, drift, False
        dt = min(safety * h * h / dmax, t1 - t)
        k1 = _sphere_rhs_np(psi, sin_c, sin_f, h)
        k2 = _sphere_rhs_np(psi + dt * k1, sin_c, sin_f, h)
        psi += 0.5 * dt * (k1 + k2)
        t += dt
        steps += 1
        if steps % renorm_every == 0 or t >= t1 - 1e-14:
            area = area_weight * np.sum(np.exp(2.0 * psi) * sin_c)
            if not np.isfinite(area) or area <= 0.0:
                return psi, steps, drift, False
            shift = 0.5 * np.log(target / area)
            psi += shift
            drift += abs(shift)
    if not np.all(np.isfinite(psi)):
        return psi, steps, drift, False
    return psi, steps, drift, True


# ---------------------------------------------------------------------------
# Numba implementations
# ---------------------------------------------------------------------------

_USE_NUMBA = os.environ.get("ISO_RICCI_NO_NUMBA", "0") not in ("1", "true", "yes")
if _USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - exercised only without numba
        _USE_NUMBA = False

if _USE_NUMBA:

    @njit(cache=True)
    def _profile_rhs_nb(v, out, drift, h, genus, halfline):
        n = v.shape[0]
        two_g = 2.0 * (1.0 - genus)
        h2 = h * h
        out[0] = 0.0
        for i in range(1, n - 1):
            vp = (v[i + 1] - v[i - 1]) / (2.0 * h)
            vpp = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2
            out[i] = v[i] * vpp - vp * vp + drift[i] * vp + two_g * v[i]
        if halfline:
            vpN = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
            vppN = (v[n - 1] - 2.0 * v[n - 2] + v[n - 3]) / h2
            out[n - 1] = (v[n - 1] * vppN - vpN * vpN + drift[n - 1] * vpN
                          + two_g * v[n - 1])
        else:
            out[n - 1] = 0.0

    @njit(cache=True)
    def _profile_advance_nb(v0, a, h, genus, chi0, halfline, t0, t1, safety):
        n = v0.shape[0]
        v = v0.copy()
        drift = np.empty(n)
        for i in range(n):
            drift[i] = 4.0 * np.pi * chi0 - 2.0 * (1.0 - genus) * a[i]
        k1 = np.empty(n)
        k2 = np.empty(n)
        vtmp = np.empty(n)
        t = t0
        steps = 0
        while t < t1 - 1e-14:
            vmax = v[0]
            for i in range(1, n):
                if v[i] > vmax:
                    vmax = v[i]
            if not np.isfinite(vmax) or vmax > 1e15:
                return v, steps, False
            dt = safety * h * h / max(vmax, 1e-300)
            if dt > t1 - t:
                dt = t1 - t
            _profile_rhs_nb(v, k1, drift, h, genus, halfline)
            for i in range(n):
                vtmp[i] = v[i] + dt * k1[i]
            _profile_rhs_nb(vtmp, k2, drift, h, genus, halfline)
            for i in range(n):
                v[i] += 0.5 * dt * (k1[i] + k2[i])
            t += dt
            steps += 1
        for i in range(n):
            if not np.isfinite(v[i]):
                return v, steps, False
        return v, steps, True

    @njit(cache=True)
    def _sphere_rhs_nb(psi, out, expm, sin_c, sin_f, h):
        n = psi.shape[0]
        h2 = h * h
        fl = 0.0
        for i in range(n):
            fr = sin_f[i + 1] * (psi[i + 1] - psi[i]) if i < n - 1 else 0.0
            lap = (fr - fl) / (sin_c[i] * h2)
            out[i] = 1.0 - expm[i] * (1.0 - lap)
            fl = fr

    @njit(cache=True)
    def _sphere_advance_nb(psi0, sin_c, sin_f, h, t0, t1, safety, renorm_every):
        n = psi0.shape[0]
        psi = psi0.copy()
        k1 = np.empty(n)
        k2 = np.empty(n)
        ptmp = np.empty(n)
        expm = np.empty(n)
        t = t0
        steps = 0
        drift = 0.0
        area_weight = 2.0 * np.pi * h
        target = 4.0 * np.pi
        while t < t1 - 1e-14:
            dmax = 0.0
            for i in range(n):
                expm[i] = np.exp(-2.0 * psi[i])
                if expm[i] > dmax:
                    dmax = expm[i]
            if not np.isfinite(dmax):
                return psi, steps, drift, False
            dt = safety * h * h / dmax
            if dt > t1 - t:
                dt = t1 - t
            _sphere_rhs_nb(psi, k1, expm, sin_c, sin_f, h)
            for i in range(n):
                ptmp[i] = psi[i] + dt * k1[i]
                expm[i] = np.exp(-2.0 * ptmp[i])
            _sphere_rhs_nb(ptmp, k2, expm, sin_c, sin_f, h)
            for i in range(n):
                psi[i] += 0.5 * dt * (k1[i] + k2[i])
            t += dt
            steps += 1
            if steps % renorm_every == 0 or t >= t1 - 1e-14:
                area = 0.0
                for i in range(n):
                    area += np.exp(2.0 * psi[i]) * sin_c[i]
                area *= area_weight
                if not np.isfinite(area) or area <= 0.0:
                    return psi, steps, drift, False
                shift = 0.5 * np.log(target / area)
                for i in range(n):
                    psi[i] += shift
                drift += abs(shift)
        for i in range(n):
            if not np.isfinite(psi[i]):
                return psi, steps, drift, False
        return psi, steps, drift, True

    BACKEND = "numba"
else:
    BACKEND = "numpy"


# ---------------------------------------------------------------------------
# Public dispatchers
# ---------------------------------------------------------------------------

def profile_advance(v, a, h, genus, chi0, halfline, t0, t1, safety=0.2):
    """Advance the squared-profile PDE from t0 to t1 on a uniform grid.

    Returns ``(v_new, steps, ok)``; ``ok`` is False when the blow-up guard
    tripped (non-finite values or sup v exceeding 1e15).
    """
    v = np.ascontiguousarray(v, dtype=np.float64)
    a = np.ascontiguousarray(a, dtype=np.float64)
    if _USE_NUMBA:
        return _profile_advance_nb(v, a, float(h), float(genus), float(chi0),
                                   bool(halfline), float(t0), float(t1),
                                   float(safety))
    return _profile_advance_np(v, a, float(h), float(genus), float(chi0),
                               bool(halfline), float(t0), float(t1),
                               float(safety))


def sphere_advance(psi, sin_c, sin_f, h, t0, t1, safety=0.25, renorm_every=8):
    """Advance the polar-gauge sphere flow from t0 to t1.

    Returns ``(psi_new, steps, renorm_drift, ok)`` where ``renorm_drift`` is
    the accumulated absolute log-area correction applied to keep total area
    at 4*pi.
    """
    psi = np.ascontiguousarray(psi, dtype=np.float64)
    sin_c = np.ascontiguousarray(sin_c, dtype=np.float64)
    sin_f = np.ascontiguousarray(sin_f, dtype=np.float64)
    if _USE_NUMBA:
        return _sphere_advance_nb(psi, sin_c, sin_f, float(h), float(t0),
                                  float(t1), float(safety), int(renorm_every))
    return _sphere_advance_np(psi, sin_c, sin_f, float(h), float(t0),
                              float(t1), float(safety), int(renorm_every))
