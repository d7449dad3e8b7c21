"""Fixed-point iteration drivers: plain iteration, cyclic projections,
proximal splitting and metric projected gradients."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GeofirmError, SolverError
from .operators import Projector, Prox, compose, km_relax
from .spaces import Euclidean, point_from_coords


@dataclass
class StopRule:
    residual_tol: float = 1e-10
    max_iters: int = 100_000
    target: object = None
    target_tol: float = 1e-10

    def __post_init__(self):
        if self.residual_tol < 0 or self.target_tol < 0:
            raise DomainError("stopping tolerances must be nonnegative")
        if int(self.max_iters) != self.max_iters or self.max_iters < 0:
            raise DomainError("max_iters must be a nonnegative integer")
        self.max_iters = int(self.max_iters)


@dataclass
class Trace:
    space: object
    iterates: list
    residuals: list
    dist_to_fix: list = None
    wall_clock: float = 0.0
    stop_reason: str = ""
    operator: object = field(default=None, repr=False, compare=False)

    @property
    def final(self):
        return self.iterates[-1]

    def __len__(self):
        return len(self.iterates)

    def with_fixed_set(self, S):
        """Fill ``dist_to_fix`` as the distance to the nearest point of ``S``."""
        S = list(S)
        if not S:
            raise DomainError("fixed-set approximation is empty")
        d = self.space.distance
        self.dist_to_fix = [min(d(x, y) for y in S) for x in self.iterates]
        return self

    # -- CSV ------------------------------------------------------------
    def write_csv(self, out):
        """Write the trace; wall-clock time is left out so output is reproducible."""
        coords = [self.space.coords(x) for x in self.iterates]
        width = len(coords[0]) if coords else 0
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["iter", "residual", "dist_to_fix"] + [f"x{i}" for i in range(width)])
        for k, xs in enumerate(coords):
            res = repr(float(self.residuals[k])) if k < len(self.residuals) else ""
            dist = repr(float(self.dist_to_fix[k])) if self.dist_to_fix is not None else ""
            writer.writerow([k, res, dist] + [repr(v) for v in xs])

    def to_csv(self):
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    @classmethod
    def read_csv(cls, source, space=None):
        rows = list(csv.reader(source))
        if not rows or rows[0][:3] != ["iter", "residual", "dist_to_fix"]:
            raise DomainError("not a trace file: missing header")
        body = [r for r in rows[1:] if r]
        if space is None:
            space = Euclidean(len(rows[0]) - 3)
        iterates = [point_from_coords(space, [float(v) for v in r[3:]]) for r in body]
        residuals = [float(r[1]) for r in body if r[1] != ""]
        dist = [float(r[2]) for r in body] if body and all(r[2] != "" for r in body) else None
        return cls(space, iterates, residuals, dist, stop_reason="loaded")


def iterate(space, T, x0, rule=None, fixed_set=None):
    """Run x_{k+1} = T x_k until a bound in ``rule`` fires.

    ``fixed_set`` is a finite approximation of Fix T used for
    ``dist_to_fix``; ``"auto"`` uses T applied to the final iterate.
    """
    rule = StopRule() if rule is None else rule
    x = space.point(x0)
    iterates, residuals = [x], []
    reason = "max_iters"
    start = time.perf_counter()
    for k in range(rule.max_iters):
        try:
            y = T(x)
        except (GeofirmError, ArithmeticError, ValueError) as exc:
            raise SolverError(f"operator evaluation failed at iteration {k}: {exc}",
                              iteration=k) from exc
        residuals.append(space.distance(x, y))
        iterates.append(y)
        x = y
        if residuals[-1] <= rule.residual_tol:
            reason = "residual"
            break
        if rule.target is not None and rule.target.distance(space, y) <= rule.target_tol:
            reason = "target"
            break
    trace = Trace(space, iterates, residuals, wall_clock=time.perf_counter() - start,
                  stop_reason=reason, operator=T)
    if fixed_set is not None:
        trace.with_fixed_set([T(trace.final)] if fixed_set == "auto" else fixed_set)
    return trace


def cyclic_projections(space, sets, x0, rule=None, fixed_set=None):
    """Iterate P_{C_N} ... P_{C_1}; the first set is projected onto first."""
    sets = list(sets)
    if not sets:
        raise DomainError("cyclic projections need at least one set")
    T = compose([Projector(space, C) for C in reversed(sets)])
    return iterate(space, T, x0, rule, fixed_set)


def proximal_splitting(space, fs, lams, x0, rule=None, fixed_set=None):
    """Iterate prox_{f_N} ... prox_{f_1}."""
    fs, lams = list(fs), list(lams)
    if not fs or len(fs) != len(lams):
        raise DomainError("proximal splitting needs one parameter per function")
    T = compose([Prox(space, f, lam) for f, lam in zip(reversed(fs), reversed(lams))])
    return iterate(space, T, x0, rule, fixed_set)


def projected_gradient(space, f, C, lam, tau, x0, rule=None, fixed_set=None):
    """Iterate P_C((1 - tau) Id + tau prox_{f, lam}); CAT(0) spaces only."""
    if not space.is_cat0:
        raise DomainError("metric projected gradients are defined on CAT(0) spaces")
    if not 0 < tau < 1:
        raise DomainError(f"step parameter must lie in (0, 1), got {tau}")
    T = compose([Projector(space, C), km_relax(Prox(space, f, lam), tau)])
    return iterate(space, T, x0, rule, fixed_set)


@dataclass(frozen=True)
class RegularityProfile:
    steps: int
    last_above_tol: int | None
    decreasing: bool
    first_non_decrease: int | None
    final_residual: float | None


def asymptotic_regularity_profile(trace, tol=1e-10):
    r = np.asarray(trace.residuals, dtype=float)
    if r.size == 0:
        return RegularityProfile(0, None, True, None, None)
    above = np.flatnonzero(r > tol)
    # a zero residual is a fixed point; later ties are not stalls
    bad = np.flatnonzero((np.diff(r) >= 0) & (r[1:] > 0))
    return RegularityProfile(
        steps=int(r.size),
        last_above_tol=int(above[-1]) if above.size else None,
        decreasing=bad.size == 0,
        first_non_decrease=int(bad[0]) + 1 if bad.size else None,
        final_residual=float(r[-1]),
    )


def fejer_slack(trace, y):
    """min_k d(x_k, y) - d(x_{k+1}, y); nonnegative for Fejer monotone traces."""
    d = [trace.space.distance(x, y) for x in trace.iterates]
    if len(d) < 2:
        return 0.0
    return float(np.min(np.asarray(d[:-1]) - np.asarray(d[1:])))
