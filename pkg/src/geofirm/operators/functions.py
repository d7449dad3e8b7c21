"""Proper, lsc, convex functions on the model spaces.

Besides ``value``, smooth-enough functions expose ``anchors(space, y)``: a
list of ``(point, weight, exponent)`` triples such that

    f(u) <= sum(weight * d(u, point) ** exponent)   for all u,

with equality at ``u = y``.  The prox and barycenter solvers use these
majorizers to take geodesic descent steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DomainError


class ProperFunction:
    kind = "abstract"

    def value(self, space, y):
        raise NotImplementedError

    def anchors(self, space, y):
        raise NotImplementedError

    def validate(self, space):
        pass

    def __call__(self, space, y):
        return self.value(space, y)


@dataclass(frozen=True, eq=False)
class Indicator(ProperFunction):
    """0 on the convex set, +inf outside."""

    set: object

    kind = "indicator"

    def value(self, space, y):
        return 0.0 if self.set.contains(space, y) else math.inf

    def anchors(self, space, y):
        raise DomainError("indicators have no smooth majorizer; use their projector")

    def validate(self, space):
        self.set.validate(space)


@dataclass(frozen=True, eq=False)
class DistPower(ProperFunction):
    """``d(y, C) ** power`` for a convex set ``C`` and ``power >= 1``."""

    set: object
    power: float = 2.0

    kind = "dist_power"

    def value(self, space, y):
        return self.set.distance(space, y) ** self.power

    def anchors(self, space, y):
        return [(self.set.project(space, y), 1.0, self.power)]

    def validate(self, space):
        if self.power < 1:
            raise DomainError("dist_power needs power >= 1 to be convex")
        self.set.validate(space)


@dataclass(frozen=True, eq=False)
class SquaredDistance(ProperFunction):
    """``weight * d(y, point) ** 2``; the default weight gives (1/2) d^2."""

    point: object
    weight: float = 0.5

    kind = "squared_distance"

    def value(self, space, y):
        return self.weight * space.distance(y, self.point) ** 2

    def anchors(self, space, y):
        return [(self.point, self.weight, 2.0)]

    def validate(self, space):
        space.point(self.point)
        if self.weight < 0:
            raise DomainError("squared_distance weight must be nonnegative")


@dataclass(frozen=True, eq=False)
class WeightedSum(ProperFunction):
    """Nonnegative combination of other functions; empty sum is f = 0."""

    terms: tuple = ()
    weights: tuple = None

    kind = "weighted_sum"

    def _weights(self):
        if self.weights is None:
            return (1.0,) * len(self.terms)
        if len(self.weights) != len(self.terms):
            raise DomainError("weighted_sum needs one weight per term")
        return tuple(float(w) for w in self.weights)

    def value(self, space, y):
        total = 0.0
        for w, f in zip(self._weights(), self.terms):
            if w:
                total += w * f.value(space, y)
        return total

    def anchors(self, space, y):
        out = []
        for w, f in zip(self._weights(), self.terms):
            if w:
                out.extend((a, w * aw, q) for a, aw, q in f.anchors(space, y))
        return out

    def validate(self, space):
        if any(w < 0 for w in self._weights()):
            raise DomainError("weighted_sum weights must be nonnegative")
        for f in self.terms:
            f.validate(space)


@dataclass(frozen=True, eq=False)
class MoreauEnvelope(ProperFunction):
    """Moreau-Yosida envelope ``e_{f, lam}`` as a function in its own right."""

    function: object
    lam: float

    kind = "envelope"

    def value(self, space, y):
        from .prox import moreau_envelope

        return moreau_envelope(space, self.function, self.lam, y)

    def anchors(self, space, y):
        from .prox import prox_p

        p = space.p
        return [(prox_p(space, self.function, self.lam, y), 1.0 / (p * self.lam ** (p - 1)), p)]

    def validate(self, space):
        if self.lam <= 0:
            raise DomainError("envelope parameter must be positive")
        self.function.validate(space)


def zero_function():
    return WeightedSum(())


FUNCTION_KINDS = {
    "indicator": Indicator,
    "dist_power": DistPower,
    "squared_distance": SquaredDistance,
    "weighted_sum": WeightedSum,
    "envelope": MoreauEnvelope,
}


def contains_indicator(f):
    if isinstance(f, Indicator):
        return True
    if isinstance(f, WeightedSum):
        return any(contains_indicator(t) for t in f.terms)
    return False
