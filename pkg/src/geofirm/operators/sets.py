"""Convex set descriptors and their metric projections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..spaces import GEOMETRY_TOL, HUB, Euclidean, StarTree, TreePoint


class ConvexSet:
    kind = "abstract"

    def project(self, space, x):
        raise NotImplementedError

    def distance(self, space, x):
        return space.distance(x, self.project(space, x))

    def contains(self, space, x, tol=GEOMETRY_TOL):
        return self.distance(space, x) <= tol

    def sample(self, space, seed=None):
        """Random point of the set (not uniformly distributed)."""
        raise NotImplementedError

    def validate(self, space):
        pass


@dataclass(frozen=True, eq=False)
class GeodesicBall(ConvexSet):
    center: object
    radius: float

    kind = "ball"

    def validate(self, space):
        space.point(self.center)
        if self.radius < 0:
            raise DomainError("ball radius must be nonnegative")
        cap = getattr(space, "radius", None)
        if space.kind == "spherical_cap" and self.radius >= cap:
            raise DomainError("ball radius must stay below the cap radius")

    def project(self, space, x):
        d = space.distance(self.center, x)
        if d <= self.radius:
            return x
        return space.geodesic_point(self.center, x, self.radius / d)

    def distance(self, space, x):
        return max(0.0, space.distance(self.center, x) - self.radius)

    def sample(self, space, seed=None):
        rng = np.random.default_rng(seed)
        z = space.sample(rng)
        d = space.distance(self.center, z)
        if d == 0.0:
            return self.center
        return space.geodesic_point(self.center, z, min(1.0, self.radius * rng.random() / d))


@dataclass(frozen=True, eq=False)
class Halfspace(ConvexSet):
    """``{x : <normal, x> <= offset}`` in a euclidean space."""

    normal: object
    offset: float

    kind = "halfspace"

    def _unit(self):
        n = np.asarray(self.normal, dtype=float)
        norm = float(np.linalg.norm(n))
        if norm == 0.0:
            raise DomainError("halfspace normal must be nonzero")
        return n / norm, self.offset / norm

    def validate(self, space):
        if not isinstance(space, Euclidean):
            raise DomainError("halfspaces are only defined in euclidean spaces")
        if np.asarray(self.normal).shape != (space.dim,):
            raise DomainError("halfspace normal has the wrong dimension")
        self._unit()

    def project(self, space, x):
        n, b = self._unit()
        x = np.asarray(x, dtype=float)
        excess = float(np.dot(n, x)) - b
        if excess <= 0:
            return x
        return x - excess * n

    def distance(self, space, x):
        n, b = self._unit()
        return max(0.0, float(np.dot(n, x)) - b)

    def sample(self, space, seed=None):
        rng = np.random.default_rng(seed)
        n, b = self._unit()
        z = self.project(space, rng.uniform(-2.0, 2.0, space.dim) + b * n)
        return z - rng.random() * n


@dataclass(frozen=True, eq=False)
class GeodesicSegment(ConvexSet):
    start: object
    end: object

    kind = "segment"

    def validate(self, space):
        space.point(self.start)
        space.point(self.end)

    def project(self, space, x):
        a, b = self.start, self.end
        if isinstance(space, StarTree):
            return _tree_segment_projection(a, b, x)
        if isinstance(space, Euclidean):
            a = np.asarray(a, dtype=float)
            ab = np.asarray(b, dtype=float) - a
            denom = float(np.dot(ab, ab))
            if denom == 0.0:
                return a.copy()
            t = min(1.0, max(0.0, float(np.dot(np.asarray(x) - a, ab)) / denom))
            return space.geodesic_point(a, b, t)
        return _manifold_segment_projection(space, a, b, x)

    def sample(self, space, seed=None):
        rng = np.random.default_rng(seed)
        return space.geodesic_point(self.start, self.end, float(rng.random()))


def _descent_sign(space, a, b, x, t):
    """Sign of the derivative of t -> d(x, gamma(t))^2 along [a, b]."""
    g = space.geodesic_point(a, b, t)
    if t < 0.5:
        forward = space.log(g, b)
    else:
        forward = -space.log(g, a)
    return -space.inner(g, space.log(g, x), forward)


def _manifold_segment_projection(space, a, b, x):
    # t -> d(x, gamma(t)) is convex; bisect on the sign of its derivative.
    if space.distance(a, b) == 0.0:
        return a
    if _descent_sign(space, a, b, x, 0.0) >= 0:
        return a
    if _descent_sign(space, a, b, x, 1.0) <= 0:
        return b
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _descent_sign(space, a, b, x, mid) < 0:
            lo = mid
        else:
            hi = mid
    return space.geodesic_point(a, b, 0.5 * (lo + hi))


def _tree_segment_projection(a, b, x):
    if a.edge == b.edge:
        lo, hi = sorted((a.offset, b.offset))
        off = min(max(x.offset if x.edge == a.edge else 0.0, lo), hi)
        return HUB if off == 0.0 else TreePoint(a.edge, off)
    # the segment is a path through the hub
    for end in (a, b):
        if x.edge == end.edge:
            off = min(x.offset, end.offset)
            return HUB if off == 0.0 else TreePoint(end.edge, off)
    return HUB


@dataclass(frozen=True, eq=False)
class Subtree(ConvexSet):
    """Star-tree subtree: the hub plus ``[0, cut]`` on each listed edge.

    ``cuts`` maps edge index to the retained length; missing cuts keep the
    whole edge.
    """

    edges: tuple
    cuts: dict = None

    kind = "subtree"

    def _cut(self, space, edge):
        if edge not in self.edges:
            return 0.0
        cut = (self.cuts or {}).get(edge, space.edges[edge])
        return min(cut, space.edges[edge])

    def validate(self, space):
        if not isinstance(space, StarTree):
            raise DomainError("subtrees are only defined on star trees")
        for e in self.edges:
            if not 0 <= e < len(space.edges):
                raise DomainError(f"subtree edge {e} out of range")
        for e, cut in (self.cuts or {}).items():
            if cut < 0:
                raise DomainError("subtree cuts must be nonnegative")

    def project(self, space, x):
        off = min(x.offset, self._cut(space, x.edge))
        return HUB if off == 0.0 else TreePoint(x.edge, off)

    def sample(self, space, seed=None):
        rng = np.random.default_rng(seed)
        if not self.edges:
            return HUB
        edge = int(self.edges[int(rng.integers(len(self.edges)))])
        off = self._cut(space, edge) * rng.random()
        return HUB if off == 0.0 else TreePoint(edge, off)


SET_KINDS = {
    "ball": GeodesicBall,
    "halfspace": Halfspace,
    "segment": GeodesicSegment,
    "subtree": Subtree,
}


def project(space, C, x):
    """Metric projection of ``x`` onto the convex set ``C``."""
    if C is None:
        raise DomainError("cannot project onto an empty descriptor")
    return C.project(space, space.point(x))


def set_distance(space, C, x):
    return C.distance(space, x)
