"""Regularity functionals and pointwise firmness certificates.

All checks are sampled: a certificate records the worst signed slack
(right-hand side minus left-hand side) of the tested inequality over the
given sample points, and is valid when that slack is at least ``-SLACK_TOL``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .spaces import GEOMETRY_TOL, SLACK_TOL

ALPHA_TOL = 1e-6


@dataclass(frozen=True)
class FirmnessCertificate:
    alpha: float
    epsilon: float
    anchor: object
    sample_count: int
    worst_slack: float
    tolerance: float = SLACK_TOL

    @property
    def valid(self):
        return self.worst_slack >= -self.tolerance

    @property
    def pointwise(self):
        """True for the epsilon = 0 (quasi / pointwise alpha-firm) flavor."""
        return self.epsilon == 0

    def as_row(self):
        return {"alpha": self.alpha, "epsilon": self.epsilon,
                "worst_slack": self.worst_slack, "n_samples": self.sample_count}

    def __bool__(self):
        return self.valid


def _psi_from_images(space, x, y, tx, ty):
    p, d = space.p, space.distance
    return 0.5 * space.c * (d(tx, x) ** p + d(ty, y) ** p + d(tx, ty) ** p + d(x, y) ** p
                            - d(tx, y) ** p - d(x, ty) ** p)


def psi(space, T, x, y):
    """Transport discrepancy of T at the pair (x, y)."""
    x, y = space.point(x), space.point(y)
    return _psi_from_images(space, x, y, T(x), T(y))


def delta(space, x, y, u, v):
    """Four-point quantity (c/4)(d(x,v)^p + d(y,u)^p - d(x,u)^p - d(y,v)^p);
    the inner product <x - y, u - v> in euclidean space."""
    p, d = space.p, space.distance
    for z in (x, y, u, v):
        space.point(z)
    return 0.25 * space.c * (d(x, v) ** p + d(y, u) ** p - d(x, u) ** p - d(y, v) ** p)


def psi_delta_identity_slack(space, T, x, y):
    x, y = space.point(x), space.point(y)
    tx, ty = T(x), T(y)
    p = space.p
    lhs = _psi_from_images(space, x, y, tx, ty)
    rhs = (0.5 * space.c * (space.distance(tx, ty) ** p + space.distance(x, y) ** p)
           - 2.0 * delta(space, x, y, tx, ty))
    return abs(lhs - rhs)


def _check_constants(alpha, epsilon):
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if epsilon < 0:
        raise DomainError(f"epsilon must be nonnegative, got {epsilon}")


def _samples(samples):
    samples = list(samples)
    if not samples:
        raise DomainError("firmness check needs at least one sample point")
    return samples


def _firmness_terms(space, T, y, samples):
    """Per-sample (d(Tx,Ty)^p, d(x,y)^p, psi, Delta_T) arrays."""
    p = space.p
    y = space.point(y)
    ty = T(y)
    rows = []
    for x in samples:
        x = space.point(x)
        tx = T(x)
        rows.append((space.distance(tx, ty) ** p, space.distance(x, y) ** p,
                     _psi_from_images(space, x, y, tx, ty), delta(space, x, y, tx, ty)))
    return np.array(rows, dtype=float).reshape(-1, 4)


def _pafne_slack(terms, alpha, epsilon):
    dt, d0, ps = terms[:, 0], terms[:, 1], terms[:, 2]
    return float(np.min((1 + epsilon) * d0 - (1 - alpha) / alpha * ps - dt))


def check_pafne(space, T, y, alpha, epsilon, samples):
    """Pointwise almost alpha-firm nonexpansiveness of T at y."""
    _check_constants(alpha, epsilon)
    samples = _samples(samples)
    terms = _firmness_terms(space, T, y, samples)
    return FirmnessCertificate(alpha, epsilon, y, len(samples),
                               _pafne_slack(terms, alpha, epsilon))


def check_pafne_delta_form(space, T, y, alpha, epsilon, samples):
    """The same property written through the four-point quantity:

        (a + (1-a)c/2) d(Tx,Ty)^p + ((1-a)c/2 - a(1+eps)) d(x,y)^p <= 2(1-a) Delta_T

    The slack is divided by alpha so that it coincides with the slack of
    ``check_pafne`` on the same samples.
    """
    _check_constants(alpha, epsilon)
    samples = _samples(samples)
    terms = _firmness_terms(space, T, y, samples)
    dt, d0, dl = terms[:, 0], terms[:, 1], terms[:, 3]
    half_c = 0.5 * space.c
    lhs = (alpha + (1 - alpha) * half_c) * dt + ((1 - alpha) * half_c - alpha * (1 + epsilon)) * d0
    slack = float(np.min(2 * (1 - alpha) * dl - lhs)) / alpha
    return FirmnessCertificate(alpha, epsilon, y, len(samples), slack)


def estimate_alpha(space, T, y, samples, tol=ALPHA_TOL):
    """Smallest alpha (to ``tol``) for which T is pointwise alpha-firm at y
    with epsilon = 0 on the samples, or None if even alpha = 1 fails.

    The valid alphas form an interval [a, 1]; the upper end of the final
    bisection bracket is returned so the result is always itself valid.
    """
    terms = _firmness_terms(space, T, y, _samples(samples))

    def ok(a):
        return _pafne_slack(terms, a, 0.0) >= -SLACK_TOL

    if not ok(1.0):
        return None
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def is_fixed(space, T, y, tol=GEOMETRY_TOL):
    return space.distance(T(y), y) <= tol


def check_p1(space, T, y, alpha, samples):
    """d(Tx,y)^p <= d(x,y)^p - ((1-a)/a)(c/2) d(Tx,x)^p at a fixed point y."""
    _check_constants(alpha, 0.0)
    y = space.point(y)
    if not is_fixed(space, T, y):
        raise DomainError("check_p1 needs a fixed point of T")
    p, d = space.p, space.distance
    k = (1 - alpha) / alpha * 0.5 * space.c
    worst = math.inf
    for x in _samples(samples):
        x = space.point(x)
        tx = T(x)
        worst = min(worst, d(x, y) ** p - k * d(tx, x) ** p - d(tx, y) ** p)
    return worst >= -SLACK_TOL


def check_phi_monotone(space, T, x, y, grid=101):
    """Whether t -> d((1-t)x + tTx, (1-t)y + tTy) is nonincreasing on a grid."""
    if not space.is_cat0:
        raise DomainError("the phi monotonicity test is only meaningful in CAT(0) spaces")
    x, y = space.point(x), space.point(y)
    tx, ty = T(x), T(y)
    ts = np.linspace(0.0, 1.0, max(int(grid), 2))
    phi = [space.distance(space.geodesic_point(x, tx, t), space.geodesic_point(y, ty, t))
           for t in ts]
    return bool(np.all(np.diff(phi) <= SLACK_TOL))


def surrogate(space, T, S, x):
    """((2/c) min_{y in S} psi(x, y))^(1/p); +inf for an empty S.

    When S consists of fixed points this is d(Tx, x).
    """
    S = list(S)
    if not S:
        return math.inf
    x = space.point(x)
    tx = T(x)
    best = min(_psi_from_images(space, x, y, tx, T(y)) for y in S)
    return (2.0 / space.c * max(best, 0.0)) ** (1.0 / space.p)
