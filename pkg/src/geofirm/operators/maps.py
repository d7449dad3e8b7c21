"""Operator trees built from projectors, prox maps, relaxations,
compositions and p-convex combinations.

Each operator is bound to a space and carries the firmness constants the
theory predicts for it (``predicted_alpha``, ``predicted_epsilon``), or
``None`` where no prediction is available.
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError
from ..spaces import Euclidean
from .prox import prox_p
from .solvers import barycenter, check_weights


class Operator:
    kind = "abstract"

    def __init__(self, space):
        self.space = space

    def apply(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.apply(self.space.point(x))

    @property
    def predicted_alpha(self):
        return None

    @property
    def predicted_epsilon(self):
        return 0.0 if self.predicted_alpha is not None else None


class Identity(Operator):
    kind = "identity"

    def apply(self, x):
        return x

    @property
    def predicted_alpha(self):
        return 0.5


class Projector(Operator):
    kind = "projector"

    def __init__(self, space, C):
        super().__init__(space)
        C.validate(space)
        self.set = C

    def apply(self, x):
        return self.set.project(self.space, x)

    @property
    def predicted_alpha(self):
        return 0.5


def prox_constants(space):
    """(alpha, epsilon) for p-prox maps: (1/2, 0) in CAT(0), otherwise
    ((c-1)/c, (2-c)/(c-1)) which needs c > 1."""
    if space.is_cat0:
        return 0.5, 0.0
    c = space.c
    if space.p != 2 or c <= 1:
        return None, None
    return (c - 1) / c, (2 - c) / (c - 1)


class Prox(Operator):
    kind = "prox"

    def __init__(self, space, f, lam):
        super().__init__(space)
        if lam <= 0:
            raise DomainError(f"prox parameter must be positive, got {lam}")
        f.validate(space)
        self.function = f
        self.lam = float(lam)

    def apply(self, x):
        return prox_p(self.space, self.function, self.lam, x)

    @property
    def predicted_alpha(self):
        return prox_constants(self.space)[0]

    @property
    def predicted_epsilon(self):
        return prox_constants(self.space)[1]


def km_alpha(lam, p):
    return lam ** (p - 1) / (1 - lam + lam ** (p - 1))


class KMRelaxation(Operator):
    """x -> (1 - lam) x + lam T x along the geodesic."""

    kind = "km"

    def __init__(self, base, lam):
        super().__init__(base.space)
        if not 0 < lam < 1:
            raise DomainError(f"relaxation parameter must lie in (0, 1), got {lam}")
        self.base = base
        self.lam = float(lam)

    def apply(self, x):
        return self.space.geodesic_point(x, self.base.apply(x), self.lam)

    @property
    def predicted_alpha(self):
        # the formula assumes a pointwise nonexpansive base map
        if self.base.predicted_alpha is None or self.base.predicted_epsilon != 0:
            return None
        return km_alpha(self.lam, self.space.p)


def composition_alpha(alphas, c):
    """Firmness constant of a composition of quasi alpha_i-firm maps."""
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise DomainError("composition_alpha needs at least one constant")
    for a in alphas:
        if not 0 < a < 1:
            raise DomainError(f"firmness constants must lie in (0, 1), got {a}")
    bar = alphas[0]
    for a in alphas[1:]:
        k1 = (1 - bar) / bar
        k2 = (1 - a) / a
        bar = (k1 + k2) / (0.5 * c * k1 * k2 + k1 + k2)
    return bar


class Composition(Operator):
    """``ops`` applied right to left: Composition([A, B])(x) = A(B(x))."""

    kind = "composition"

    def __init__(self, ops):
        ops = list(ops)
        if not ops:
            raise DomainError("composition of an empty list")
        space = ops[0].space
        if any(op.space != space for op in ops):
            raise DomainError("composed operators must share one space")
        super().__init__(space)
        self.ops = ops

    def apply(self, x):
        for op in reversed(self.ops):
            x = op.apply(x)
        return x

    @property
    def predicted_alpha(self):
        alphas = [op.predicted_alpha for op in self.ops]
        if any(a is None for a in alphas) or any(op.predicted_epsilon != 0 for op in self.ops):
            return None
        if len(alphas) == 1:
            return alphas[0]
        if any(a >= 1 for a in alphas):
            return None
        return composition_alpha(alphas, self.space.c)


class PCombination(Operator):
    """x -> p-barycenter of (T_i x) with the given weights."""

    kind = "p_combination"

    def __init__(self, ops, weights):
        ops = list(ops)
        if not ops:
            raise DomainError("p-combination of an empty list")
        space = ops[0].space
        if any(op.space != space for op in ops):
            raise DomainError("combined operators must share one space")
        super().__init__(space)
        self.ops = ops
        self.weights = check_weights(weights, len(ops))

    def apply(self, x):
        images = [op.apply(x) for op in self.ops]
        return barycenter(self.space, images, self.weights, p=self.space.p)

    @property
    def predicted_alpha(self):
        alphas = [op.predicted_alpha for w, op in zip(self.weights, self.ops) if w > 0]
        if any(a is None for a in alphas) or any(op.predicted_epsilon != 0 for op in self.ops):
            return None
        return max(alphas)


class LinearMap(Operator):
    """Affine map x -> A x + b on a euclidean space (test and demo fixture)."""

    kind = "linear"

    def __init__(self, space, matrix, offset=None):
        if not isinstance(space, Euclidean):
            raise DomainError("linear maps are only defined on euclidean spaces")
        super().__init__(space)
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if self.matrix.shape != (space.dim, space.dim):
            raise DomainError("linear map has the wrong shape")
        self.offset = np.zeros(space.dim) if offset is None else np.asarray(offset, dtype=float)

    def apply(self, x):
        return self.matrix @ x + self.offset


def rotation(space, angle):
    c, s = np.cos(angle), np.sin(angle)
    return LinearMap(space, [[c, -s], [s, c]])


def compose(ops):
    return Composition(ops)


def km_relax(T, lam):
    return KMRelaxation(T, lam)


def p_combination(ops, weights):
    return PCombination(ops, weights)
