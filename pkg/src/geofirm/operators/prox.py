"""p-proximal mappings and Moreau-Yosida envelopes."""

from __future__ import annotations

from ..errors import DomainError, SolverError
from ..spaces import StarTree
from .functions import (DistPower, Indicator, SquaredDistance, WeightedSum,
                        contains_indicator)
from .solvers import MAX_ITER, descend, golden_section, tree_minimize


def _coupling(space, lam):
    p = space.p
    return p, 1.0 / (p * lam ** (p - 1))


def _along_geodesic(space, x, anchor, weight, q, lam):
    # The minimizer of w*h(d(., a)) + d(x, .)^p / (p lam^(p-1)) lies on [x, a]:
    # any other point is beaten by the geodesic point at the same distance from x.
    p, scale = _coupling(space, lam)
    dist = space.distance(x, anchor)
    if dist == 0.0 or weight == 0.0:
        return x
    if p == 2 and q == 2:
        t = weight / (weight + scale)
    elif p == 2 and q == 1:
        t = min(1.0, weight / (2.0 * scale * dist))
    else:
        t = golden_section(
            lambda s: weight * (dist * (1 - s)) ** q + scale * (s * dist) ** p, 0.0, 1.0)
    return space.geodesic_point(x, anchor, t)


def _quadratic_terms(f):
    if isinstance(f, SquaredDistance):
        return [(f.point, f.weight)]
    if isinstance(f, WeightedSum):
        out = []
        for w, term in zip(f._weights(), f.terms):
            sub = _quadratic_terms(term)
            if sub is None:
                return None
            out.extend((a, w * aw) for a, aw in sub)
        return out
    return None


def prox_p(space, f, lam, x, method="auto", return_info=False):
    """argmin_y f(y) + d(x, y)^p / (p lam^(p-1)).

    Indicators reduce to projections; a single squared distance or distance
    power is solved on the geodesic through ``x`` in closed form.  Everything
    else goes through the generic descent (``method="descent"`` forces it).
    """
    if lam <= 0:
        raise DomainError(f"prox parameter must be positive, got {lam}")
    x = space.point(x)
    p, scale = _coupling(space, lam)
    if isinstance(f, Indicator):
        y = f.set.project(space, x)
        return (y, None) if return_info else y
    if method == "auto":
        y = None
        if isinstance(f, SquaredDistance):
            y = _along_geodesic(space, x, f.point, f.weight, 2.0, lam)
        elif isinstance(f, DistPower):
            y = _along_geodesic(space, x, f.set.project(space, x), 1.0, f.power, lam)
        if y is not None:
            return (y, None) if return_info else y
    if contains_indicator(f):
        raise DomainError("prox of a sum containing an indicator is not supported")

    def objective(y):
        return f.value(space, y) + scale * space.distance(x, y) ** p

    if isinstance(space, StarTree):
        quad = _quadratic_terms(f) if p == 2 else None
        if quad is not None:
            quad = [(x, scale)] + quad
        result = tree_minimize(space, objective, quad)
    else:
        result = descend(space, objective,
                         lambda y: [(x, scale, p)] + f.anchors(space, y), x)
        if not result.converged:
            raise SolverError(f"prox solver did not converge in {MAX_ITER} steps")
    return (result.point, result) if return_info else result.point


def moreau_envelope(space, f, lam, x):
    """e_{f, lam}(x) = f(prox(x)) + d(x, prox(x))^p / (p lam^(p-1))."""
    y = prox_p(space, f, lam, x)
    p, scale = _coupling(space, lam)
    return f.value(space, y) + scale * space.distance(x, y) ** p
