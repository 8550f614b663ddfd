"""Direct 1D solver for the squared-profile evolution equation and the
numerical comparison-principle harness.

The evolved quantity is v = I^2 (smooth and nearly linear at a -> 0, where
I itself has a square-root singularity), on a uniform area grid with either

* ``compact`` domain: a in [0, 4 pi] with v = 0 pinned at both endpoints, or
* ``halfline`` domain: a in [0, a_max] with v = 0 at a = 0 and a copied
  second difference (one-sided slope) at a_max.

Time stepping is explicit RK2 with dt = safety * h^2 / max(v), recomputed
each step; blow-up is reported via StepFailureError rather than clamped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import kernels
from .model_profiles import ModelSpec, evaluate_model
from .reporting import ResidualReport, Sense

__all__ = ["ProfileSamples", "EvolutionTrace", "StepFailureError",
           "spatial_residual", "evolve_profile", "comparison_gap",
           "GapSeries"]

COMPACT = "compact"
HALFLINE = "halfline"


class StepFailureError(RuntimeError):
    """Raised when the explicit integrator's blow-up guard trips."""


@dataclass(frozen=True)
class ProfileSamples:
    """Squared isoperimetric profile v(a) on a strictly increasing area grid."""

    a: np.ndarray
    v: np.ndarray
    t: float
    genus: int
    domain_kind: str = COMPACT

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        v = np.asarray(self.v, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "v", v)
        if a.ndim != 1 or a.size < 3 or a.size != v.size:
            raise ValueError("need matching 1D grids with >= 3 nodes")
        if np.any(np.diff(a) <= 0):
            raise ValueError("area grid must be strictly increasing")
        if self.domain_kind not in (COMPACT, HALFLINE):
            raise ValueError(f"unknown domain_kind {self.domain_kind}")
        if np.any(v < -1e-12):
            raise ValueError("v must be nonnegative")
        if self.domain_kind == COMPACT:
            if abs(a[0]) > 1e-12 or abs(a[-1] - 4 * np.pi) > 1e-9:
                raise ValueError("compact domain must span [0, 4 pi]")
            if abs(v[0]) > 1e-12 or abs(v[-1]) > 1e-12:
                raise ValueError("compact domain requires v = 0 at endpoints")
        else:
            if abs(a[0]) > 1e-12 or abs(v[0]) > 1e-12:
                raise ValueError("halfline domain requires v(0) = 0")

    @property
    def h(self) -> float:
        return float(self.a[1] - self.a[0])

    @property
    def profile(self) -> np.ndarray:
        """I = sqrt(v), clipped at zero."""
        return np.sqrt(np.maximum(self.v, 0.0))


@dataclass(frozen=True)
class EvolutionTrace:
    """Time-ordered snapshots of an evolve_profile run on a fixed grid."""

    snapshots: List[ProfileSamples]
    dt_used: float
    scheme: str

    def __post_init__(self):
        ts = [s.t for s in self.snapshots]
        if any(t2 <= t1 for t1, t2 in zip(ts, ts[1:])):
            raise ValueError("snapshot times must be strictly increasing")
        a0 = self.snapshots[0].a
        for s in self.snapshots[1:]:
            if s.a.shape != a0.shape or not np.array_equal(s.a, a0):
                raise ValueError("snapshots must share one grid")

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])


def spatial_residual(samples: ProfileSamples, kappa0: float,
                     tolerance=0.0) -> ResidualReport:
    """Stationary supersolution test I'' I^2 + (I')^2 I + kappa0 I <= 0 at
    interior nodes.

    Evaluated through the identity I'' I^2 + (I')^2 I = I * v'' / 2 for
    v = I^2, which avoids differencing the square-root singularity of I at
    a = 0 (exact for quadratic v; centered second differences on v).
    """
    a, v = samples.a, samples.v
    if a.size < 5:
        raise ValueError("need >= 5 nodes")
    h = samples.h
    d2v = (v[2:] - 2 * v[1:-1] + v[:-2]) / (h * h)
    I = np.sqrt(np.maximum(v[1:-1], 0.0))
    res = I * (0.5 * d2v + kappa0)
    return ResidualReport(grid=a[1:-1], residuals=res, tolerance=tolerance,
                          sense=Sense.LESS_EQUAL, label="spatial supersolution")


def evolve_profile(init: ProfileSamples, genus: int, chi0: int, t_end: float,
                   store_every: Optional[float] = None,
                   safety: float = 0.2) -> EvolutionTrace:
    """Explicitly integrate the squared-profile evolution equation

        v_t = v v'' - (v')^2 + (4 pi chi0 - 2(1-g)a) v' + 2(1-g) v

    from ``init.t`` to ``t_end``, storing snapshots every ``store_every``
    time units (default: 10 snapshots over the run).
    """
    if t_end <= init.t:
        raise ValueError("t_end must exceed the initial time")
    span = t_end - init.t
    if store_every is None:
        store_every = span / 10.0
    n_store = max(1, int(round(span / store_every)))
    store_times = init.t + store_every * np.arange(1, n_store + 1)
    store_times[-1] = t_end
    h = samples_h = init.h
    if not np.allclose(np.diff(init.a), samples_h, rtol=1e-9):
        raise ValueError("evolve_profile requires a uniform grid")
    halfline = init.domain_kind == HALFLINE
    v = init.v.copy()
    snaps = [init]
    t_now = init.t
    total_steps = 0
    for t_next in store_times:
        v, steps, ok = kernels.profile_advance(
            v, init.a, h, genus, chi0, halfline, t_now, t_next, safety)
        total_steps += steps
        if not ok:
            raise StepFailureError(
                f"blow-up guard tripped between t={t_now:g} and t={t_next:g}")
        t_now = t_next
        snaps.append(ProfileSamples(init.a, v.copy(), t_now, genus,
                                    init.domain_kind))
    dt_avg = span / max(total_steps, 1)
    return EvolutionTrace(snaps, dt_avg,
                          f"RK2 explicit, dt=safety*h^2/max(v), "
                          f"backend={kernels.BACKEND}")


@dataclass(frozen=True)
class GapSeries:
    """Per-snapshot minimum of sqrt(v_trace) - phi_model with its verdict."""

    times: np.ndarray
    min_gap: np.ndarray
    eps_grid: float
    passed: bool


def comparison_gap(model: ModelSpec, trace: EvolutionTrace,
                   eps_factor: float = 10.0) -> GapSeries:
    """Track min_a (sqrt(v_trace) - phi_model) over the trace.

    Verdict passes when every per-time minimum is >= -eps_grid with
    eps_grid = eps_factor * h (first-order boundary closures).
    """
    h = trace.snapshots[0].h
    eps_grid = eps_factor * h
    times = trace.times
    mins = np.empty(times.size)
    for k, snap in enumerate(trace.snapshots):
        mask = snap.a > 0
        if snap.domain_kind == COMPACT:
            mask &= snap.a < 4 * np.pi
        ev = evaluate_model(model, snap.a[mask], snap.t)
        phi = np.sqrt(np.maximum(ev.value, 0.0))
        mins[k] = float(np.min(snap.profile[mask] - phi))
    return GapSeries(times=times, min_gap=mins, eps_grid=eps_grid,
                     passed=bool(np.all(mins >= -eps_grid)))
