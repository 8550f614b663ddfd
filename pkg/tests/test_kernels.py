"""Backend equivalence tests: the compiled kernels must reproduce the
pure-numpy reference implementations step for step."""

import numpy as np
import pytest

from iso_ricci import kernels
from iso_ricci.kernels import (_profile_advance_np, _sphere_advance_np,
                               profile_advance, sphere_advance)
from iso_ricci.model_profiles import ModelSpec, evaluate_model


def test_backend_flag_is_reported():
    assert kernels.BACKEND in ("numba", "numpy")


def _profile_setup(n=257):
    a = np.linspace(0.0, 4 * np.pi, n)
    v = evaluate_model(ModelSpec("Rosenau", 0),
                       np.clip(a, 1e-12, None), 0.0).value
    v[0] = v[-1] = 0.0
    return a, v, a[1] - a[0]


def test_profile_advance_matches_reference():
    a, v, h = _profile_setup()
    out, steps, ok = profile_advance(v.copy(), a, h, 0, 1, False, 0.0, 0.05)
    ref, steps_ref, ok_ref = _profile_advance_np(v.copy(), a, h, 0, 1.0,
                                                 False, 0.0, 0.05, 0.2)
    assert ok and ok_ref
    assert steps == steps_ref
    np.testing.assert_allclose(out, ref, rtol=1e-13, atol=1e-13)


def test_profile_advance_halfline_matches_reference():
    a = np.linspace(0.0, 20.0, 201)
    h = a[1] - a[0]
    v = 4 * np.pi * a + a * a
    out, steps, ok = profile_advance(v.copy(), a, h, 2, 1, True, 0.0, 0.02)
    ref, steps_ref, ok_ref = _profile_advance_np(v.copy(), a, h, 2, 1.0,
                                                 True, 0.0, 0.02, 0.2)
    assert ok and ok_ref
    assert steps == steps_ref
    np.testing.assert_allclose(out, ref, rtol=1e-13,
                               atol=1e-13 * np.max(np.abs(ref)))


def test_profile_advance_blowup_flag():
    a, v, h = _profile_setup(65)
    v[32] = np.nan
    _, _, ok = profile_advance(v, a, h, 0, 1, False, 0.0, 0.1)
    assert not ok


def _sphere_setup(n=256):
    h = np.pi / n
    theta_c = (np.arange(n) + 0.5) * h
    sin_c = np.sin(theta_c)
    sin_f = np.sin(np.arange(n + 1) * h)
    psi = 0.05 * np.cos(theta_c)
    return psi, sin_c, sin_f, h


def test_sphere_advance_matches_reference():
    psi, sin_c, sin_f, h = _sphere_setup()
    out, steps, drift, ok = sphere_advance(psi.copy(), sin_c, sin_f, h,
                                           0.0, 0.01)
    ref, steps_ref, drift_ref, ok_ref = _sphere_advance_np(
        psi.copy(), sin_c, sin_f, h, 0.0, 0.01, 0.25, 8)
    assert ok and ok_ref
    assert steps == steps_ref
    np.testing.assert_allclose(out, ref, rtol=1e-12, atol=1e-12)
    assert drift == pytest.approx(drift_ref, abs=1e-12)


def test_sphere_advance_blowup_flag():
    psi, sin_c, sin_f, h = _sphere_setup(64)
    psi[10] = np.nan
    _, _, _, ok = sphere_advance(psi, sin_c, sin_f, h, 0.0, 0.01)
    assert not ok
