"""Firmly nonexpansive fixed-point iterations on p-uniformly convex model spaces."""

from .errors import ConfigError, DomainError, GeofirmError, SolverError
from .spaces import (CAT0, HUB, Euclidean, ModelSpace, PoincareDisk, SpaceParams,
                     SphericalCap, StarTree, TreePoint, check_perpendicular,
                     ohta_constant, verify_p_convexity)

__version__ = "0.1.0"

__all__ = [
    "GeofirmError", "DomainError", "SolverError", "ConfigError",
    "SpaceParams", "CAT0", "ModelSpace", "Euclidean", "PoincareDisk", "SphericalCap",
    "StarTree", "TreePoint", "HUB", "ohta_constant", "verify_p_convexity",
    "check_perpendicular",
]
