"""slc-lab: special Lagrangian curvature on convex hypersurfaces of hyperbolic space."""

from __future__ import annotations

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
