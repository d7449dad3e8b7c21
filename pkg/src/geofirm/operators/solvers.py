"""Minimizers of weighted sums of distance powers.

``descend`` is a majorize-minimize geodesic descent usable in every space
with ``log``/``exp`` maps: at the current point each term
``w * d(., a) ** q`` is replaced by its quadratic majorizer, the majorizer's
minimizer is reached by one ``exp`` step (a Weiszfeld step, or the Karcher
step when all exponents are 2), and the step is halved until the true
objective does not increase.  Star trees have no tangent spaces; there each
edge is a geodesic ray from the hub and the objective is minimized edge by
edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, SolverError
from ..spaces import HUB, Euclidean, StarTree, TreePoint

MAX_ITER = 10_000
STEP_TOL = 1e-14
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class SolveResult:
    point: object
    objective: float
    history: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = True


def golden_section(g, lo, hi, tol=1e-13, max_iter=300):
    """Minimize a convex function of one variable on ``[lo, hi]``.

    The endpoints are always compared against the interior estimate so that
    boundary minimizers are returned exactly.
    """
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if gc <= gd:
            b, d, gd = d, c, gc
            c = b - _GOLDEN * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _GOLDEN * (b - a)
            gd = g(d)
    mid = 0.5 * (a + b)
    best = min(((g(t), t) for t in (lo, hi, mid)), key=lambda v: v[0])
    return best[1]


def check_weights(weights, n):
    """Validate a weight vector: entries in [0, 1] summing to 1 within 1e-12."""
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.shape != (n,):
        raise DomainError(f"expected {n} weights, got {w.shape[0]}")
    if np.any(w < 0) or np.any(w > 1):
        raise DomainError("weights must lie in [0, 1]")
    if abs(float(w.sum()) - 1.0) > 1e-12:
        raise DomainError(f"weights must sum to 1, got {float(w.sum())!r}")
    return w


def descend(space, objective, terms_at, y0, max_iter=MAX_ITER, step_tol=STEP_TOL):
    """Majorize-minimize descent; ``terms_at(y)`` returns (anchor, weight, exponent)."""
    y = y0
    value = objective(y)
    history = [value]
    for it in range(1, max_iter + 1):
        num = None
        den = 0.0
        for a, w, q in terms_at(y):
            d = space.distance(y, a)
            if w == 0.0 or d == 0.0:
                continue
            big_w = w * q * d ** (q - 2.0)
            v = big_w * space.log(y, a)
            num = v if num is None else num + v
            den += big_w
        if den == 0.0:
            return SolveResult(y, value, history, it - 1, True)
        direction = num / den
        step = 1.0
        while True:
            cand = space.exp(y, step * direction)
            cand_value = objective(cand)
            # rounding noise in the objective must not stall the iteration
            if cand_value <= value + 1e-15 * max(1.0, abs(value)):
                break
            step *= 0.5
            if step < 1e-12:
                return SolveResult(y, value, history, it - 1, True)
        move = space.distance(y, cand)
        y, value = cand, cand_value
        history.append(value)
        if move <= step_tol:
            return SolveResult(y, value, history, it, True)
    return SolveResult(y, value, history, max_iter, False)


def tree_minimize(space, objective, quadratic_terms=None):
    """Minimize over a star tree edge by edge.

    ``quadratic_terms`` -- fixed ``(anchor, weight)`` pairs of a pure sum of
    weighted squared distances -- enables the exact per-edge solution;
    otherwise each edge is searched by golden section.
    """
    best_point, best_value = HUB, objective(HUB)
    for edge, length in enumerate(space.edges):
        if quadratic_terms is not None:
            num = den = 0.0
            for a, w in quadratic_terms:
                signed = a.offset if a.edge == edge else -a.offset
                num += w * signed
                den += w
            off = min(max(num / den, 0.0), length) if den > 0 else 0.0
        else:
            off = golden_section(lambda o: objective(TreePoint(edge, o)), 0.0, length)
        cand = HUB if off == 0.0 else TreePoint(edge, off)
        value = objective(cand)
        if value < best_value:
            best_point, best_value = cand, value
    return SolveResult(best_point, best_value, [best_value], 1, True)


def solve_barycenter(space, points, weights, p=None, init=None, method="auto",
                     max_iter=MAX_ITER):
    """Minimize ``sum_i w_i d(y, x_i) ** p`` and report the solver trace.

    ``method="descent"`` forces the generic solver even where a closed form
    exists (used to cross-check closed forms).
    """
    p = space.p if p is None else float(p)
    if p <= 1:
        raise DomainError("barycenter exponent must exceed 1")
    if not points:
        raise DomainError("barycenter of an empty list")
    w = check_weights(weights, len(points))
    kept = [(x, wi) for x, wi in zip(points, w) if wi > 0]
    if len(kept) == 1:
        return SolveResult(kept[0][0], 0.0, [0.0], 0, True)

    def objective(y):
        return sum(wi * space.distance(y, x) ** p for x, wi in kept)

    if method == "auto" and p == 2:
        if isinstance(space, Euclidean):
            y = sum(wi * np.asarray(x, dtype=float) for x, wi in kept)
            return SolveResult(y, objective(y), [objective(y)], 0, True)
        if len(kept) == 2:
            (x1, w1), (x2, w2) = kept
            y = space.geodesic_point(x1, x2, w2 / (w1 + w2))
            return SolveResult(y, objective(y), [objective(y)], 0, True)

    if isinstance(space, StarTree):
        quad = kept if p == 2 else None
        return tree_minimize(space, objective, quad)

    if init is None:
        init = max(kept, key=lambda t: t[1])[0]
    terms = [(x, wi, p) for x, wi in kept]
    result = descend(space, objective, lambda y: terms, init, max_iter=max_iter)
    if not result.converged:
        raise SolverError(f"barycenter solver did not converge in {max_iter} steps")
    return result


def barycenter(space, points, weights, p=None, init=None, method="auto"):
    """Weighted p-barycenter of ``points``."""
    return solve_barycenter(space, points, weights, p=p, init=init, method=method).point
