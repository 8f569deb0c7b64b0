"""foliolab: a combinatorial laboratory for measured foliations by surfaces.

Finite triangulated models with exact transverse measures: cut/glue
surgery with exact Euler accounting, filtration reduction to
connected-boundary domains, planarization, and first-return entropy
invariants of finite Markov models.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .surfaces import (
    CurveSystem,
    InvalidCurveSystemError,
    InvalidSurfaceError,
    NonOrientableError,
    SurfaceClass,
    TriangulatedSurface,
    boundary_components,
    classify_surface,
    cut_along,
    euler_characteristic,
    find_nonseparating_cycle,
    is_reducing,
    neighborhood_complement,
    surface_from_triangles,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "CurveSystem",
    "InvalidCurveSystemError",
    "InvalidSurfaceError",
    "NonOrientableError",
    "SurfaceClass",
    "TriangulatedSurface",
    "boundary_components",
    "classify_surface",
    "cut_along",
    "euler_characteristic",
    "find_nonseparating_cycle",
    "is_reducing",
    "neighborhood_complement",
    "surface_from_triangles",
    "__version__",
]
