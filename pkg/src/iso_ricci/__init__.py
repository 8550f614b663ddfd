"""iso_ricci: a numerical laboratory for the isoperimetric-profile
comparison method under normalized Ricci flow on surfaces.

Modules:

* ``model_profiles``   -- closed-form comparison functions and their residuals
* ``profile_pde``      -- 1D solver and comparison harness for the squared-
  profile evolution equation
* ``surface_geometry`` -- concrete sphere/torus metric families, curvature,
  areas, Gauss-Bonnet checks
* ``ricci_flow``       -- normalized Ricci flow integrators and diagnostics
* ``isoperimetric``    -- profile extraction, classical bounds, variation
  identities, certification helpers
* ``cli``              -- reproducible experiment runner (``iso-ricci``)
"""

from . import (isoperimetric, kernels, model_profiles, profile_pde,
               reporting, ricci_flow, surface_geometry)

__all__ = ["model_profiles", "profile_pde", "surface_geometry", "ricci_flow",
           "isoperimetric", "kernels", "reporting"]

__version__ = "0.1.0"
