"""Operator library: sets, functions, prox maps, barycenters and operator trees."""

from .functions import (FUNCTION_KINDS, DistPower, Indicator, MoreauEnvelope,
                        ProperFunction, SquaredDistance, WeightedSum, zero_function)
from .maps import (Composition, Identity, KMRelaxation, LinearMap, Operator,
                   PCombination, Projector, Prox, compose, composition_alpha,
                   km_alpha, km_relax, p_combination, prox_constants, rotation)
from .prox import moreau_envelope, prox_p
from .sets import (SET_KINDS, ConvexSet, GeodesicBall, GeodesicSegment, Halfspace,
                   Subtree, project, set_distance)
from .solvers import SolveResult, barycenter, check_weights, solve_barycenter

__all__ = [
    "FUNCTION_KINDS", "SET_KINDS",
    "ConvexSet", "GeodesicBall", "GeodesicSegment", "Halfspace", "Subtree",
    "ProperFunction", "Indicator", "DistPower", "SquaredDistance", "WeightedSum",
    "MoreauEnvelope", "zero_function",
    "Operator", "Identity", "Projector", "Prox", "KMRelaxation", "Composition",
    "PCombination", "LinearMap", "rotation",
    "compose", "km_relax", "p_combination", "composition_alpha", "km_alpha",
    "prox_constants", "project", "set_distance", "prox_p", "moreau_envelope",
    "barycenter", "solve_barycenter", "check_weights", "SolveResult",
]
