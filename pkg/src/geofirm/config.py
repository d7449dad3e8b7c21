"""Experiment configuration: a flat ``key = value`` text format.

Keys are dotted paths (``space.kind``, ``sets.0.radius``); vectors are
comma-separated numbers; ``#`` starts a comment.  Every key must be consumed
by the builder, so typos are reported with their line number.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .algorithms import StopRule, cyclic_projections, iterate, projected_gradient, proximal_splitting
from .errors import ConfigError, DomainError
from .operators import (DistPower, GeodesicBall, GeodesicSegment, Halfspace, Indicator,
                        LinearMap, SquaredDistance, Subtree, WeightedSum, rotation)
from .spaces import SPACE_KINDS, point_from_coords

SEED_ENV = "GEOFIRM_SEED"
ALGORITHMS = ("cyclic_projections", "proximal_splitting", "projected_gradient", "iterate")


class Config:
    def __init__(self, entries, prefix=""):
        # key -> (raw value, line number); shared with sub-views
        self._entries = entries
        self._prefix = prefix
        self._used = set() if not prefix else None

    @classmethod
    def parse(cls, text):
        entries = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
            key, value = (s.strip() for s in line.split("=", 1))
            if not key or any(not part for part in key.split(".")):
                raise ConfigError(f"malformed key {key!r}", lineno)
            if key in entries:
                raise ConfigError(f"duplicate key {key!r}", lineno)
            entries[key] = (value, lineno)
        cfg = cls(entries)
        cfg._used = set()
        return cfg

    @classmethod
    def from_pairs(cls, pairs):
        """Build from ``key=value`` command-line arguments."""
        lines = []
        for i, item in enumerate(pairs, start=1):
            if "=" not in item:
                raise ConfigError(f"argument {i}: expected key=value, got {item!r}")
            lines.append(item)
        return cls.parse("\n".join(lines))

    def _root_used(self):
        return self._used if self._used is not None else self._root._used

    def sub(self, name):
        child = Config(self._entries, self._prefix + name + ".")
        child._root = self if self._used is not None else self._root
        return child

    def _full(self, key):
        return self._prefix + key

    def has(self, key):
        full = self._full(key)
        return full in self._entries or any(k.startswith(full + ".") for k in self._entries)

    def line(self, key):
        entry = self._entries.get(self._full(key))
        return entry[1] if entry else None

    def raw(self, key, default=None, required=False):
        full = self._full(key)
        if full not in self._entries:
            if required:
                raise ConfigError(f"missing required key {full!r}")
            return default
        self._root_used().add(full)
        return self._entries[full][0]

    def error(self, key, message):
        return ConfigError(f"{self._full(key)}: {message}", self.line(key))

    def str(self, key, default=None, required=False):
        return self.raw(key, default, required)

    def float(self, key, default=None, required=False):
        value = self.raw(key, None, required)
        if value is None:
            return default
        try:
            return float(value)
        except ValueError:
            raise self.error(key, f"expected a number, got {value!r}") from None

    def int(self, key, default=None, required=False):
        value = self.float(key, None, required)
        if value is None:
            return default
        if value != int(value):
            raise self.error(key, f"expected an integer, got {value!r}")
        return int(value)

    def bool(self, key, default=False):
        value = self.raw(key)
        if value is None:
            return default
        if value.lower() in ("true", "yes", "1", "on"):
            return True
        if value.lower() in ("false", "no", "0", "off"):
            return False
        raise self.error(key, f"expected true/false, got {value!r}")

    def vector(self, key, default=None, required=False):
        value = self.raw(key, None, required)
        if value is None:
            return default
        try:
            return [float(v) for v in value.split(",") if v.strip()]
        except ValueError:
            raise self.error(key, f"expected comma-separated numbers, got {value!r}") from None

    def indices(self, name):
        """Sorted integer children of ``name`` (``sets.0``, ``sets.1`` ...)."""
        full = self._full(name) + "."
        found = set()
        for key, (_, line) in self._entries.items():
            if key.startswith(full):
                head = key[len(full):].split(".", 1)[0]
                if not head.isdigit():
                    raise ConfigError(f"{full}{head}: expected an integer index", line)
                found.add(int(head))
        if found and found != set(range(len(found))):
            raise ConfigError(f"{name}: indices must run 0..n-1, got {sorted(found)}")
        return sorted(found)

    def unused(self):
        used = self._root_used()
        return [(k, line) for k, (_, line) in self._entries.items() if k not in used]


def _guard(cfg, key, fn):
    try:
        return fn()
    except ConfigError:
        raise
    except (DomainError, TypeError, ValueError) as exc:
        raise cfg.error(key, str(exc)) from exc


def build_space(cfg):
    kind = cfg.str("kind", required=True)
    if kind not in SPACE_KINDS:
        raise cfg.error("kind", f"unknown space kind {kind!r}; expected one of {sorted(SPACE_KINDS)}")
    args = {}
    if kind in ("euclidean", "poincare_disk", "spherical_cap") and cfg.has("dim"):
        args["dim"] = cfg.int("dim")
    if kind == "spherical_cap":
        for key in ("kappa", "epsilon"):
            if cfg.has(key):
                args[key] = cfg.float(key)
    if kind == "star_tree" and cfg.has("edges"):
        args["edges"] = tuple(cfg.vector("edges"))
    return _guard(cfg, "kind", lambda: SPACE_KINDS[kind](**args))


def build_point(cfg, key, space):
    values = cfg.vector(key, required=True)
    return _guard(cfg, key, lambda: point_from_coords(space, values))


def build_set(cfg, space):
    kind = cfg.str("kind", required=True)
    if kind == "ball":
        C = GeodesicBall(build_point(cfg, "center", space), cfg.float("radius", required=True))
    elif kind == "halfspace":
        C = Halfspace(np.asarray(cfg.vector("normal", required=True)), cfg.float("offset", 0.0))
    elif kind == "segment":
        C = GeodesicSegment(build_point(cfg, "start", space), build_point(cfg, "end", space))
    elif kind == "subtree":
        edges = tuple(int(e) for e in cfg.vector("edges", required=True))
        cuts = cfg.vector("cuts")
        if cuts is not None and len(cuts) != len(edges):
            raise cfg.error("cuts", "need one cut per edge")
        C = Subtree(edges, dict(zip(edges, cuts)) if cuts is not None else None)
    else:
        raise cfg.error("kind", f"unknown set kind {kind!r}")
    _guard(cfg, "kind", lambda: C.validate(space))
    return C


def build_function(cfg, space):
    kind = cfg.str("kind", required=True)
    if kind == "squared_distance":
        f = SquaredDistance(build_point(cfg, "point", space), cfg.float("weight", 0.5))
    elif kind == "dist_power":
        f = DistPower(build_set(cfg.sub("set"), space), cfg.float("power", 2.0))
    elif kind == "indicator":
        f = Indicator(build_set(cfg.sub("set"), space))
    elif kind == "weighted_sum":
        terms = [build_function(cfg.sub(f"terms.{i}"), space) for i in cfg.indices("terms")]
        weights = cfg.vector("weights")
        f = WeightedSum(tuple(terms), tuple(weights) if weights is not None else None)
    else:
        raise cfg.error("kind", f"unknown function kind {kind!r}")
    _guard(cfg, "kind", lambda: f.validate(space))
    return f


def build_operator(cfg, space):
    kind = cfg.str("kind", required=True)
    if kind == "rotation":
        return _guard(cfg, "kind", lambda: rotation(space, cfg.float("angle", required=True)))
    if kind == "linear":
        flat = cfg.vector("matrix", required=True)
        n = getattr(space, "dim", 0)
        if len(flat) != n * n:
            raise cfg.error("matrix", f"expected {n * n} entries (row-major)")
        offset = cfg.vector("offset")
        return _guard(cfg, "kind", lambda: LinearMap(space, np.reshape(flat, (n, n)), offset))
    raise cfg.error("kind", f"unknown operator kind {kind!r}")


@dataclass
class Experiment:
    space: object
    algorithm: str
    runner: object
    x0: object
    rule: StopRule
    fixed_set: object
    certify: bool
    alpha: float
    seed: int
    output: str

    def run(self):
        return self.runner(self.x0, self.rule, self.fixed_set)


def _seed(cfg):
    env = os.environ.get(SEED_ENV)
    if env is not None:
        cfg.raw("seed")  # overridden, but still a known key
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    seed = cfg.int("seed")
    if seed is None:
        raise ConfigError(f"missing required key 'seed' (or set {SEED_ENV})")
    return seed


def build_experiment(cfg):
    seed = _seed(cfg)
    space = build_space(cfg.sub("space"))
    algorithm = cfg.str("algorithm", required=True)
    if algorithm not in ALGORITHMS:
        raise cfg.error("algorithm", f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")

    if algorithm == "cyclic_projections":
        sets = [build_set(cfg.sub(f"sets.{i}"), space) for i in cfg.indices("sets")]
        if not sets:
            raise ConfigError("cyclic_projections needs sets.0, sets.1, ...")

        def runner(x0, rule, S):
            return cyclic_projections(space, sets, x0, rule, S)
    elif algorithm == "proximal_splitting":
        fs = [build_function(cfg.sub(f"functions.{i}"), space) for i in cfg.indices("functions")]
        lams = cfg.vector("lams", [1.0] * len(fs))
        if not fs or len(lams) != len(fs):
            raise cfg.error("lams", "need functions.0, ... and one lam per function")

        def runner(x0, rule, S):
            return proximal_splitting(space, fs, lams, x0, rule, S)
    elif algorithm == "projected_gradient":
        f = build_function(cfg.sub("function"), space)
        C = build_set(cfg.sub("set"), space)
        lam, tau = cfg.float("lam", 1.0), cfg.float("tau", 0.5)
        if not space.is_cat0:
            raise cfg.error("algorithm", "projected_gradient needs a CAT(0) space")
        if lam <= 0 or not 0 < tau < 1:
            raise cfg.error("tau", "need lam > 0 and tau in (0, 1)")

        def runner(x0, rule, S):
            return projected_gradient(space, f, C, lam, tau, x0, rule, S)
    else:
        T = build_operator(cfg.sub("operator"), space)

        def runner(x0, rule, S):
            return iterate(space, T, x0, rule, S)

    if cfg.str("x0") == "random":
        x0 = space.sample(np.random.default_rng(seed))
    else:
        x0 = build_point(cfg, "x0", space)

    stop = cfg.sub("stop")
    rule = _guard(cfg, "stop.max_iters", lambda: StopRule(
        residual_tol=stop.float("residual_tol", 1e-10),
        max_iters=stop.int("max_iters", 100_000)))

    fixed = cfg.str("fixed_set")
    if fixed in ("auto", "none"):
        fixed_set = None if fixed == "none" else "auto"
    elif fixed is not None:
        fixed_set = [build_point(cfg, "fixed_set", space)]
    else:
        idx = cfg.indices("fixed_set")
        fixed_set = [build_point(cfg, f"fixed_set.{i}", space) for i in idx] or None

    certify = cfg.bool("certify", False)
    alpha = cfg.float("certify_alpha")
    if certify and fixed_set is None:
        raise cfg.error("certify", "certification needs fixed_set")
    output = cfg.str("output")

    leftover = cfg.unused()
    if leftover:
        key, line = leftover[0]
        raise ConfigError(f"unknown key {key!r}", line)
    return Experiment(space, algorithm, runner, x0, rule, fixed_set, certify, alpha, seed, output)


def load_experiment(text):
    return build_experiment(Config.parse(text))
