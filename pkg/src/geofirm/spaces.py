"""Concrete p-uniformly convex model spaces.

Every space exposes the same small surface: ``distance``, ``geodesic_point``,
membership checks, seeded sampling and the certified convexity parameters
``(p, c)``.  Vector spaces (euclidean, Poincare disk, spherical cap) also
provide ``log``/``exp`` maps, which the barycenter and prox solvers use.
Points of vector spaces are 1-D float arrays; star-tree points are
:class:`TreePoint` tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

GEOMETRY_TOL = 1e-10
SLACK_TOL = 1e-9


@dataclass(frozen=True)
class SpaceParams:
    """Exponent ``p`` and constant ``c`` of the p-uniform convexity inequality."""

    p: float
    c: float

    def __post_init__(self):
        if not self.p > 1:
            raise DomainError(f"p must exceed 1, got {self.p}")
        if not 0 < self.c <= 2:
            raise DomainError(f"c must lie in (0, 2], got {self.c}")
        if self.c == 2 and self.p != 2:
            raise DomainError("c = 2 forces p = 2")


CAT0 = SpaceParams(2.0, 2.0)


def ohta_constant(kappa, epsilon):
    """2-uniform convexity constant of a CAT(kappa) space of diameter
    at most pi/(2 sqrt(kappa)) - epsilon."""
    rk = math.sqrt(kappa)
    return (math.pi - 2 * rk * epsilon) * math.tan(epsilon * rk)


def _rng(seed):
    return np.random.default_rng(seed)


def _unit_vector(rng, dim):
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


class ModelSpace:
    """Common interface of the model spaces."""

    kind = "abstract"
    has_tangent = False

    def __init__(self, params):
        self.params = params

    @property
    def p(self):
        return self.params.p

    @property
    def c(self):
        return self.params.c

    @property
    def is_cat0(self):
        return self.params.p == 2 and self.params.c == 2

    @property
    def diameter(self):
        return math.inf

    # -- subclass surface -------------------------------------------------
    def point(self, x):
        """Validate ``x`` and return it in canonical form."""
        raise NotImplementedError

    def contains(self, x, tol=GEOMETRY_TOL):
        try:
            self.point(x)
        except DomainError:
            return False
        return True

    def distance(self, x, y):
        raise NotImplementedError

    def geodesic_point(self, x, y, t):
        raise NotImplementedError

    def sample(self, seed=None, radius=None):
        raise NotImplementedError

    def descriptor(self):
        raise NotImplementedError

    def coords(self, x):
        """Flat list of floats used when writing points to CSV."""
        return [float(v) for v in np.asarray(x, dtype=float)]

    def origin(self):
        raise NotImplementedError

    # -- shared helpers ---------------------------------------------------
    def _check_t(self, t):
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"geodesic parameter t={t} outside [0, 1]")

    def same_point(self, x, y, tol=GEOMETRY_TOL):
        return self.distance(x, y) <= tol

    def __eq__(self, other):
        return type(self) is type(other) and self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash(tuple(sorted((k, str(v)) for k, v in self.descriptor().items())))

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.descriptor().items() if k != "kind")
        return f"{type(self).__name__}({args})"


class _VectorSpace(ModelSpace):
    has_tangent = True

    def __init__(self, params, dim):
        super().__init__(params)
        if int(dim) != dim or dim < 1:
            raise DomainError(f"dimension must be a positive integer, got {dim}")
        self.dim = int(dim)

    @property
    def ambient_dim(self):
        return self.dim

    def _coerce(self, x):
        arr = np.array(x, dtype=float).reshape(-1)
        if arr.shape != (self.ambient_dim,):
            raise DomainError(
                f"{self.kind} point needs {self.ambient_dim} coordinates, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("point has non-finite coordinates")
        return arr

    def log(self, x, y):
        raise NotImplementedError

    def exp(self, x, v):
        raise NotImplementedError

    def inner(self, x, u, v):
        """Riemannian inner product of tangent vectors ``u``, ``v`` at ``x``."""
        return float(np.dot(u, v))


class Euclidean(_VectorSpace):
    kind = "euclidean"

    def __init__(self, dim=2):
        super().__init__(CAT0, dim)

    def point(self, x):
        return self._coerce(x)

    def origin(self):
        return np.zeros(self.dim)

    def distance(self, x, y):
        return float(np.linalg.norm(np.subtract(x, y)))

    def geodesic_point(self, x, y, t):
        self._check_t(t)
        if t == 0:
            return np.array(x, dtype=float)
        if t == 1:
            return np.array(y, dtype=float)
        return (1.0 - t) * np.asarray(x, dtype=float) + t * np.asarray(y, dtype=float)

    def log(self, x, y):
        return np.subtract(y, x, dtype=float)

    def exp(self, x, v):
        return np.add(x, v, dtype=float)

    def sample(self, seed=None, radius=None):
        radius = 1.0 if radius is None else radius
        if radius < 0:
            raise DomainError("sampling radius must be nonnegative")
        rng = _rng(seed)
        return _unit_vector(rng, self.dim) * radius * rng.random() ** (1.0 / self.dim)

    def descriptor(self):
        return {"kind": self.kind, "dim": self.dim}


def mobius_add(a, b):
    """Mobius addition in the unit ball."""
    ab = float(np.dot(a, b))
    aa = float(np.dot(a, a))
    bb = float(np.dot(b, b))
    num = (1.0 + 2.0 * ab + bb) * a + (1.0 - aa) * b
    return num / (1.0 + 2.0 * ab + aa * bb)


class PoincareDisk(_VectorSpace):
    """Poincare ball model of hyperbolic space (curvature -1); dim 2 by default.

    Geodesics are obtained by Mobius-translating ``x`` to the origin, where
    geodesics are straight rays, and translating back.
    """

    kind = "poincare_disk"

    def __init__(self, dim=2):
        super().__init__(CAT0, dim)

    def point(self, x):
        arr = self._coerce(x)
        if float(np.dot(arr, arr)) >= 1.0:
            raise DomainError(f"Poincare point must have norm < 1, got {np.linalg.norm(arr)}")
        return arr

    def origin(self):
        return np.zeros(self.dim)

    def distance(self, x, y):
        u = mobius_add(-np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        n = float(np.linalg.norm(u))
        return 2.0 * math.atanh(min(n, 1.0 - 1e-16))

    def geodesic_point(self, x, y, t):
        self._check_t(t)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if t == 0:
            return x.copy()
        if t == 1:
            return y.copy()
        u = mobius_add(-x, y)
        n = float(np.linalg.norm(u))
        if n == 0.0:
            return x.copy()
        s = math.tanh(t * math.atanh(min(n, 1.0 - 1e-16)))
        return mobius_add(x, (s / n) * u)

    def log(self, x, y):
        x = np.asarray(x, dtype=float)
        u = mobius_add(-x, np.asarray(y, dtype=float))
        n = float(np.linalg.norm(u))
        if n == 0.0:
            return np.zeros_like(x)
        return (1.0 - float(np.dot(x, x))) * math.atanh(min(n, 1.0 - 1e-16)) / n * u

    def exp(self, x, v):
        x = np.asarray(x, dtype=float)
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            return x.copy()
        lam = 2.0 / (1.0 - float(np.dot(x, x)))
        return mobius_add(x, math.tanh(lam * nv / 2.0) / nv * np.asarray(v, dtype=float))

    def inner(self, x, u, v):
        lam = 2.0 / (1.0 - float(np.dot(x, x)))
        return lam * lam * float(np.dot(u, v))

    def sample(self, seed=None, radius=None):
        radius = 0.9 if radius is None else radius
        if radius < 0:
            raise DomainError("sampling radius must be nonnegative")
        if radius >= 1:
            raise DomainError("Poincare sampling radius must be < 1")
        rng = _rng(seed)
        return _unit_vector(rng, self.dim) * radius * rng.random() ** (1.0 / self.dim)

    def descriptor(self):
        return {"kind": self.kind, "dim": self.dim}


class SphericalCap(_VectorSpace):
    """Closed geodesic ball on the sphere of curvature ``kappa``.

    Points are unit vectors in R^(dim+1); distances are angles scaled by
    1/sqrt(kappa).  The cap radius is half of pi/(2 sqrt(kappa)) - epsilon so
    that its diameter meets the bound under which the Ohta constant
    c = (pi - 2 sqrt(kappa) epsilon) tan(epsilon sqrt(kappa)) holds.
    """

    kind = "spherical_cap"

    def __init__(self, kappa=1.0, epsilon=0.3, dim=2):
        if kappa <= 0:
            raise DomainError("kappa must be positive")
        limit = math.pi / (2 * math.sqrt(kappa))
        if not 0 < epsilon < limit:
            raise DomainError(f"epsilon must lie in (0, {limit})")
        super().__init__(SpaceParams(2.0, ohta_constant(kappa, epsilon)), dim)
        self.kappa = float(kappa)
        self.epsilon = float(epsilon)
        self.radius = (limit - epsilon) / 2.0
        self.base = np.zeros(dim + 1)
        self.base[-1] = 1.0

    @property
    def ambient_dim(self):
        return self.dim + 1

    @property
    def diameter(self):
        return 2.0 * self.radius

    def _angle(self, x, y):
        chord = float(np.linalg.norm(np.subtract(x, y)))
        return 2.0 * math.asin(min(1.0, chord / 2.0))

    def point(self, x):
        arr = self._coerce(x)
        n = float(np.linalg.norm(arr))
        if abs(n - 1.0) > 1e-9:
            raise DomainError(f"spherical point must be a unit vector, norm {n}")
        arr = arr / n
        if self._angle(self.base, arr) / math.sqrt(self.kappa) > self.radius + GEOMETRY_TOL:
            raise DomainError("point lies outside the spherical cap")
        return arr

    def origin(self):
        return self.base.copy()

    def distance(self, x, y):
        return self._angle(x, y) / math.sqrt(self.kappa)

    def geodesic_point(self, x, y, t):
        self._check_t(t)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if t == 0:
            return x.copy()
        if t == 1:
            return y.copy()
        theta = self._angle(x, y)
        if theta == 0.0:
            return x.copy()
        out = (math.sin((1 - t) * theta) * x + math.sin(t * theta) * y) / math.sin(theta)
        return out / np.linalg.norm(out)

    def log(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        w = y - float(np.dot(x, y)) * x
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return np.zeros_like(x)
        return w * (self._angle(x, y) / math.sqrt(self.kappa) / nw)

    def exp(self, x, v):
        x = np.asarray(x, dtype=float)
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            return x.copy()
        theta = math.sqrt(self.kappa) * nv
        out = math.cos(theta) * x + math.sin(theta) / nv * np.asarray(v, dtype=float)
        return out / np.linalg.norm(out)

    def sample(self, seed=None, radius=None):
        radius = self.radius if radius is None else radius
        if radius < 0:
            raise DomainError("sampling radius must be nonnegative")
        radius = min(radius, self.radius)
        rng = _rng(seed)
        direction = np.zeros(self.dim + 1)
        direction[:-1] = _unit_vector(rng, self.dim)
        r = radius * rng.random() ** (1.0 / self.dim)
        return self.exp(self.base, r * direction)

    def descriptor(self):
        return {"kind": self.kind, "kappa": self.kappa, "epsilon": self.epsilon, "dim": self.dim}


class TreePoint(NamedTuple):
    """Point on a star tree: an edge index and the distance from the hub."""

    edge: int
    offset: float


HUB = TreePoint(0, 0.0)


class StarTree(ModelSpace):
    """Finite star: edges of the given lengths glued at a common hub.

    All ``(i, 0)`` denote the hub and are canonicalised to ``(0, 0)``.
    """

    kind = "star_tree"

    def __init__(self, edges=(1.0, 1.0, 1.0)):
        super().__init__(CAT0)
        edges = tuple(float(e) for e in edges)
        if len(edges) < 1 or any(e <= 0 for e in edges):
            raise DomainError("star tree needs at least one edge, all lengths positive")
        self.edges = edges

    @property
    def diameter(self):
        longest = sorted(self.edges, reverse=True)
        return longest[0] + (longest[1] if len(longest) > 1 else 0.0)

    def point(self, x):
        try:
            edge, offset = x
        except (TypeError, ValueError):
            raise DomainError(f"tree point must be (edge, offset), got {x!r}") from None
        if float(edge) != int(edge) or not 0 <= int(edge) < len(self.edges):
            raise DomainError(f"edge index {edge} out of range")
        edge = int(edge)
        offset = float(offset)
        if not math.isfinite(offset) or offset < -GEOMETRY_TOL:
            raise DomainError(f"offset must be nonnegative, got {offset}")
        if offset > self.edges[edge] + GEOMETRY_TOL:
            raise DomainError(f"offset {offset} exceeds edge length {self.edges[edge]}")
        offset = min(max(offset, 0.0), self.edges[edge])
        return HUB if offset == 0.0 else TreePoint(edge, offset)

    def origin(self):
        return HUB

    def distance(self, x, y):
        if x.edge == y.edge:
            return abs(x.offset - y.offset)
        return x.offset + y.offset

    def geodesic_point(self, x, y, t):
        self._check_t(t)
        if t == 0:
            return x
        if t == 1:
            return y
        if x.edge == y.edge:
            off = (1 - t) * x.offset + t * y.offset
            return HUB if off == 0.0 else TreePoint(x.edge, off)
        s = t * (x.offset + y.offset)
        if s < x.offset:
            return TreePoint(x.edge, x.offset - s)
        off = s - x.offset
        return HUB if off == 0.0 else TreePoint(y.edge, min(off, y.offset))

    def sample(self, seed=None, radius=None):
        if radius is not None and radius < 0:
            raise DomainError("sampling radius must be nonnegative")
        rng = _rng(seed)
        edge = int(rng.integers(len(self.edges)))
        reach = self.edges[edge] if radius is None else min(radius, self.edges[edge])
        off = reach * rng.random()
        return HUB if off == 0.0 else TreePoint(edge, off)

    def coords(self, x):
        return [float(x.edge), float(x.offset)]

    def descriptor(self):
        return {"kind": self.kind, "edges": list(self.edges)}


SPACE_KINDS = {
    "euclidean": Euclidean,
    "poincare_disk": PoincareDisk,
    "spherical_cap": SphericalCap,
    "star_tree": StarTree,
}


def space_from_descriptor(desc):
    """Build a space from the dict produced by ``ModelSpace.descriptor``."""
    desc = dict(desc)
    kind = desc.pop("kind", None)
    if kind not in SPACE_KINDS:
        raise DomainError(f"unknown space kind {kind!r}; expected one of {sorted(SPACE_KINDS)}")
    return SPACE_KINDS[kind](**desc)


def point_from_coords(space, values):
    """Inverse of ``space.coords``."""
    values = [float(v) for v in values]
    if isinstance(space, StarTree):
        if len(values) != 2:
            raise DomainError("tree point needs exactly two values: edge, offset")
        return space.point((values[0], values[1]))
    return space.point(values)


def verify_p_convexity(space, n_samples, seed=None, radius=None):
    """Worst signed slack of the p-uniform convexity inequality over random
    quadruples ``(x, y, z, t)``.

    A correctly configured space returns a value ``>= -1e-9``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = _rng(seed)
    p, half_c = space.p, space.c / 2.0
    worst = math.inf
    for _ in range(n_samples):
        x = space.sample(rng, radius)
        y = space.sample(rng, radius)
        z = space.sample(rng, radius)
        t = float(rng.random())
        m = space.geodesic_point(x, y, t)
        rhs = ((1 - t) * space.distance(z, x) ** p + t * space.distance(z, y) ** p
               - half_c * t * (1 - t) * space.distance(x, y) ** p)
        worst = min(worst, rhs - space.distance(z, m) ** p)
    return worst


def _on_segment(space, seg, p0, tol=SLACK_TOL):
    a, b = seg
    return space.distance(a, p0) + space.distance(p0, b) - space.distance(a, b) <= tol


def check_perpendicular(space, gamma, eta, p0, grid=21, tol=GEOMETRY_TOL):
    """True iff segment ``gamma`` is perpendicular to ``eta`` at ``p0``:
    ``d(x, p0) <= d(x, y)`` for grid points ``x`` on gamma and ``y`` on eta.

    Segments are ``(start, end)`` pairs and must both pass through ``p0``.
    """
    if not (_on_segment(space, gamma, p0) and _on_segment(space, eta, p0)):
        raise DomainError("both segments must pass through p0")
    ts = np.linspace(0.0, 1.0, grid)
    xs = [space.geodesic_point(gamma[0], gamma[1], float(t)) for t in ts]
    ys = [space.geodesic_point(eta[0], eta[1], float(t)) for t in ts]
    for x in xs:
        dx = space.distance(x, p0)
        if any(dx > space.distance(x, y) + tol for y in ys):
            return False
    return True
