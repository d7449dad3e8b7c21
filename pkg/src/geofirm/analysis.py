"""Gauges, error-bound fitting and rate certification for traces.

A gauge rho bounds the distance to the fixed set by the residual,
``d(x, Fix) <= rho(d(Tx, x))``.  Combined with a firmness constant it
induces the contraction gauge

    theta(t) = (t^p - tau * rho^{-1}(t)^p)^(1/p),   tau = c(1 - alpha) / (2 alpha),

and the rate envelope ``s_k = sum_{j >= k} theta^(j)(t0)`` with ``theta^(0)``
the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .quantities import check_pafne, surrogate
from .spaces import SLACK_TOL

GRID_NODES = 1000
TRUNCATION_TOL = 1e-12
ENVELOPE_BUDGET = 100_000
FIT_TOL = 1e-12


@dataclass(frozen=True)
class Gauge:
    """rho(t) = kappa * t (linear) or kappa * t**q (power) on [0, t_max]."""

    family: str
    kappa: float
    q: float = 1.0
    t_max: float = math.inf

    def __post_init__(self):
        if self.family not in ("linear", "power"):
            raise DomainError(f"unknown gauge family {self.family!r}")
        if self.kappa < 0 or self.q <= 0:
            raise DomainError("gauge needs kappa >= 0 and q > 0")

    @property
    def exponent(self):
        return 1.0 if self.family == "linear" else self.q

    def __call__(self, t):
        return self.kappa * np.asarray(t, dtype=float) ** self.exponent

    def inverse(self, s):
        if self.kappa == 0:
            raise DomainError("degenerate gauge (kappa = 0) has no inverse")
        return (np.asarray(s, dtype=float) / self.kappa) ** (1.0 / self.exponent)


class NumericGauge:
    """rho = (Id - theta)^(-1), evaluated by bisection."""

    family = "numeric"

    def __init__(self, theta, t_max, tol=1e-12):
        self.theta = theta
        self.t_max = t_max
        self.tol = tol

    def inverse(self, t):
        return np.asarray(t, dtype=float) - self.theta(t)

    def _solve(self, s):
        if s <= 0:
            return 0.0
        hi = max(s, self.tol)
        for _ in range(200):
            if float(self.inverse(hi)) >= s:
                break
            hi *= 2.0
        else:
            raise DomainError("Id - theta does not reach the requested value")
        lo = 0.0
        while hi - lo > self.tol:
            mid = 0.5 * (lo + hi)
            if float(self.inverse(mid)) < s:
                lo = mid
            else:
                hi = mid
        return hi

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if s.ndim == 0:
            return self._solve(float(s))
        return np.array([self._solve(float(v)) for v in s])


@dataclass(frozen=True)
class SubregularityReport:
    gauge: Gauge
    worst_violation: float
    count: int
    degenerate: bool = False

    @property
    def valid(self):
        return self.worst_violation >= -SLACK_TOL


def fit_gauge(pairs, family="linear"):
    """Smallest gauge of the family with e <= rho(r) on all (r, e) pairs."""
    data = np.asarray(list(pairs), dtype=float).reshape(-1, 2)
    r, e = data[:, 0], data[:, 1]
    if np.any(r < 0) or np.any(e < 0):
        raise DomainError("residuals and distances must be nonnegative")
    pos = r > 0
    if not np.any(pos):
        raise DomainError("all residuals are zero; nothing to fit")
    if np.count_nonzero(pos) < 3:
        raise DomainError("need at least 3 pairs with positive residual")
    q = 1.0
    if family == "power":
        both = pos & (e > 0)
        if np.count_nonzero(both) >= 2:
            slope = np.polyfit(np.log(r[both]), np.log(e[both]), 1)[0]
            q = float(slope) if slope > 0 else 1.0
    elif family != "linear":
        raise DomainError(f"unknown gauge family {family!r}")
    kappa = float(np.max(e[pos] / r[pos] ** q))
    gauge = Gauge(family, kappa, q, t_max=float(np.max(r)))
    violation = float(np.min(gauge(r) + FIT_TOL - e))
    return SubregularityReport(gauge, violation, len(data), degenerate=kappa == 0)


class Theta:
    """Contraction gauge induced by rho, tau and p (or given directly)."""

    def __init__(self, fn, rho=None, tau=None, p=2.0, note="", power=None):
        self._fn = fn
        self.rho = rho
        self.tau = tau
        self.p = p
        self.note = note
        # (a, m) with theta(t) <= t - a t^m, for sublinear tails
        self.power = power

    @classmethod
    def from_function(cls, fn):
        return cls(lambda t: np.asarray(fn(np.asarray(t, dtype=float)), dtype=float))

    def __call__(self, t):
        out = self._fn(np.asarray(t, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    def conditions(self, t0, nodes=GRID_NODES):
        """Grid check of theta(0) = 0, 0 <= theta(t) < t and summability on [0, t0].

        ``positive`` (theta > 0 on the open interval) is reported separately
        since theta = 0 is an admissible, one-step gauge.
        """
        ts = np.linspace(0.0, t0, nodes)
        th = np.asarray(self(ts), dtype=float)
        inner = ts[1:]
        ok_sum = True
        try:
            self.tail_bound(t0)
        except DomainError:
            ok_sum = False
        return {
            "zero_at_zero": abs(float(th[0])) <= 1e-15,
            "below_identity": bool(np.all(th[1:] < inner)) if t0 > 0 else True,
            "nonnegative": bool(np.all(th >= 0)),
            "positive": bool(np.all(th[1:-1] > 0)),
            "summable": ok_sum,
        }

    def tail_bound(self, t, nodes=GRID_NODES):
        """Upper bound on sum_{j >= 1} theta^(j)(t)."""
        if t == 0:
            return 0.0
        if self.power is not None:
            # theta(t) / t -> 1 at 0; compare the iteration with t' = t - a t^m
            a, m = self.power
            if m < 2:
                return t ** (2.0 - m) / (a * (2.0 - m))
            raise DomainError("theta is not summable: power-law decay too slow")
        ts = np.linspace(0.0, t, nodes)[1:]
        gamma = float(np.max(np.asarray(self(ts)) / ts))
        if gamma < 1.0:
            return t * gamma / (1.0 - gamma)
        raise DomainError("theta is not summable: no contraction ratio below 1")


def _power_radicand_scale(tau, kappa, p, q):
    return tau * kappa ** (-p / q)


def theta_from_rho(rho, tau, p=2.0, t_max=None):
    """theta(t) = (t^p - tau * rho^{-1}(t)^p)^(1/p).

    When rho is too small for tau (the radicand turns negative on the working
    domain) kappa is enlarged to the smallest admissible value and the
    enlargement is recorded in ``note``.
    """
    if tau < 0:
        raise DomainError("tau must be nonnegative")
    t_max = rho.t_max if t_max is None else t_max
    q = rho.exponent
    kappa = rho.kappa
    note = ""
    if rho.family == "linear":
        floor = tau ** (1.0 / p)
        if kappa < floor:
            note = f"gauge incompatible with tau: kappa enlarged from {kappa!r} to {floor!r}"
            kappa = floor
        rad = 1.0 - tau / kappa ** p if kappa > 0 else 1.0
        # kappa = tau^(1/p) round-trips with a few ulps of radicand left over
        factor = rad ** (1.0 / p) if rad > 8 * np.finfo(float).eps else 0.0
        rho_used = Gauge("linear", kappa, 1.0, t_max)
        return Theta(lambda t: factor * t, rho_used, tau, p, note)
    if q > 1 and tau > 0:
        raise DomainError("gauge incompatible with tau: power gauges need q <= 1")
    if not math.isfinite(t_max):
        raise DomainError("power gauges need a finite working domain")
    if q < 1:
        floor = tau ** (q / p) * t_max ** (1.0 - q)
        if kappa < floor:
            note = f"gauge incompatible with tau: kappa enlarged from {kappa!r} to {floor!r}"
            kappa = floor
    b = _power_radicand_scale(tau, kappa, p, q)
    s = p / q - p

    def fn(t):
        rad = np.maximum(1.0 - b * t ** s, 0.0) if s > 0 else np.full_like(t, 1.0 - b)
        return t * rad ** (1.0 / p)

    rho_used = Gauge("power", kappa, q, t_max)
    # (1 - u)^(1/p) <= 1 - u/p gives theta(t) <= t - (b/p) t^(1+s)
    power = (b / p, 1.0 + s) if s > 0 and b > 0 else None
    return Theta(fn, rho_used, tau, p, note, power)


def rho_from_theta(theta, t_max=1.0, nodes=GRID_NODES):
    """rho = (Id - theta)^(-1) after a grid check that Id - theta is
    strictly increasing and vanishes at 0."""
    ts = np.linspace(0.0, t_max, nodes)
    g = ts - np.asarray(theta(ts), dtype=float)
    if abs(g[0]) > 1e-15:
        raise DomainError("Id - theta does not vanish at 0")
    if not np.all(np.diff(g) > 0):
        raise DomainError("Id - theta is not strictly increasing on the grid")
    return NumericGauge(theta, t_max)


def rate_envelope(theta, t0, K):
    """s_k(t0) for k = 0..K, each including a certified bound on the
    truncated tail (below 1e-12)."""
    if t0 < 0 or K < 0:
        raise DomainError("rate_envelope needs t0 >= 0 and K >= 0")
    values = [float(t0)]
    tail = math.inf
    while len(values) <= ENVELOPE_BUDGET:
        t = values[-1]
        if t == 0.0:
            tail = 0.0
        elif len(values) > K:
            tail = theta.tail_bound(t)
        if len(values) > K and tail < TRUNCATION_TOL:
            break
        values.append(float(theta(t)))
    else:
        raise DomainError("rate envelope not summable within the iteration budget")
    sums = np.cumsum(np.asarray(values)[::-1])[::-1] + tail
    return [float(v) for v in sums[: K + 1]]


def check_gauge_monotone(trace_or_dists, theta, tol=SLACK_TOL):
    """(ok, first k with e_{k+1} > theta(e_k) + tol, or None)."""
    e = getattr(trace_or_dists, "dist_to_fix", trace_or_dists)
    if e is None:
        raise DomainError("trace carries no distances to the fixed set")
    e = [float(v) for v in e]
    for k in range(len(e) - 1):
        if e[k + 1] > theta(e[k]) + tol:
            return False, k
    return True, None


@dataclass
class CertificationRecord:
    certified: bool
    reason: str
    alpha: float
    tau: float = None
    family: str = None
    kappa: float = None
    q: float = None
    worst_violation: float = None
    monotone_violation: int = None
    note: str = ""
    margins: list = field(default_factory=list)

    def lines(self):
        out = [
            f"certified,{self.certified}",
            f"reason,{self.reason}",
            f"alpha,{self.alpha!r}",
            f"tau,{self.tau!r}",
            f"family,{self.family}",
            f"kappa,{self.kappa!r}",
            f"q,{self.q!r}",
            f"worst_violation,{self.worst_violation!r}",
            f"monotone_violation,{self.monotone_violation}",
        ]
        if self.note:
            out.append(f"note,{self.note}")
        out.extend(f"margin,{k},{m!r}" for k, m in enumerate(self.margins))
        return out

    def to_text(self):
        return "\n".join(self.lines()) + "\n"


def certify(trace, alpha, p=2.0, c=2.0, T=None, S=None, family="linear"):
    """Certify a convergence rate for ``trace`` from firmness constant alpha.

    With ``T`` and a finite fixed-set approximation ``S`` the firmness of T
    is checked at every point of S (samples: the iterates), residuals come
    from the surrogate and distances from S.  Otherwise the trace's own
    residuals and ``dist_to_fix`` are used.
    """
    rec = CertificationRecord(False, "", alpha)
    space = trace.space
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    rec.tau = tau = c * (1 - alpha) / (2 * alpha)
    if T is not None and S is not None:
        S = list(S)
        for y in S:
            if not check_pafne(space, T, y, alpha, 0.0, trace.iterates).valid:
                rec.reason = "firmness check failed"
                return rec
        r = [surrogate(space, T, S, x) for x in trace.iterates]
        e = [min(space.distance(x, y) for y in S) for x in trace.iterates]
    else:
        if trace.dist_to_fix is None:
            raise DomainError("certify needs distances to the fixed set")
        r = list(trace.residuals) + [math.nan]
        e = list(trace.dist_to_fix)
    pairs = [(ri, ei) for ri, ei in zip(r[:-1], e[:-1])]
    if e[0] == 0.0:
        rec.certified, rec.reason = True, "start point is fixed"
        return rec
    if tau == 0:
        rec.reason = "alpha = 1 gives no contraction"
        return rec
    try:
        report = fit_gauge(pairs, family)
    except DomainError as exc:
        rec.reason = f"gauge fit failed: {exc}"
        return rec
    g = report.gauge
    rec.family, rec.kappa, rec.q, rec.worst_violation = g.family, g.kappa, g.q, report.worst_violation
    if not report.valid:
        rec.reason = "error bound violated on the data"
        return rec
    try:
        theta = theta_from_rho(Gauge(g.family, g.kappa, g.q, t_max=e[0]), tau, p)
        rec.note = theta.note
        ok, k = check_gauge_monotone(e, theta)
        rec.monotone_violation = k
        if not ok:
            rec.reason = f"gauge monotonicity violated at k={k}"
            return rec
        s = rate_envelope(theta, e[0], len(e) - 1)
    except DomainError as exc:
        rec.reason = str(exc)
        return rec
    a = tau ** (-1.0 / p)
    x_star = trace.final
    rec.margins = [a * sk - space.distance(x, x_star) for sk, x in zip(s, trace.iterates)]
    if min(rec.margins) < -SLACK_TOL:
        rec.reason = "rate envelope violated"
        return rec
    rec.certified, rec.reason = True, "ok"
    return rec
