"""Command-line entry point: ``geofirm run|verify|certify|presets``.

Exit codes: 0 ok, 2 configuration error, 3 solver failure,
4 certification (or verification) failed.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from .analysis import certify
from .config import SEED_ENV, Config, build_space, load_experiment
from .errors import ConfigError, DomainError, SolverError
from .presets import PRESETS, preset_text
from .algorithms import Trace

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_CERT = 0, 2, 3, 4


def _write(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)


def run_experiment(text, stdout=sys.stdout, stderr=sys.stderr):
    """Run one configuration; returns (exit code, trace, certification record)."""
    try:
        exp = load_experiment(text)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG, None, None
    try:
        trace = exp.run()
    except (SolverError, DomainError) as exc:
        where = f" (iteration {exc.iteration})" if getattr(exc, "iteration", None) is not None else ""
        print(f"solver failure{where}: {exc}", file=stderr)
        return EXIT_SOLVER, None, None

    csv_text = trace.to_csv()
    if exp.output:
        _write(exp.output, csv_text)
    else:
        stdout.write(csv_text)
    print(f"{exp.algorithm}: {len(trace.residuals)} steps, stop={trace.stop_reason}, "
          f"final residual={trace.residuals[-1] if trace.residuals else 0.0!r}", file=stderr)

    record = None
    if exp.certify:
        T = trace.operator
        alpha = exp.alpha if exp.alpha is not None else T.predicted_alpha
        if alpha is None or (T.predicted_epsilon or 0) != 0:
            print("config error: no firmness constant known for this operator; set certify_alpha",
                  file=stderr)
            return EXIT_CONFIG, trace, None
        S = [T(trace.final)] if exp.fixed_set == "auto" else exp.fixed_set
        try:
            record = certify(trace, alpha, exp.space.p, exp.space.c, T=T, S=S)
        except DomainError as exc:
            print(f"certification error: {exc}", file=stderr)
            return EXIT_CERT, trace, None
        cert_text = record.to_text()
        if exp.output:
            _write(exp.output + ".cert", cert_text)
        print(f"certified={record.certified} ({record.reason})", file=stderr)
        if not record.certified:
            return EXIT_CERT, trace, record
    return EXIT_OK, trace, record


# -- verify ---------------------------------------------------------------

def _default_spaces():
    from .spaces import Euclidean, PoincareDisk, SphericalCap, StarTree

    return [Euclidean(2), Euclidean(3), PoincareDisk(), SphericalCap(1.0, 0.3), StarTree()]


def _sample_set(space, rng):
    from .operators import GeodesicBall

    center = space.sample(rng, 0.3) if space.kind != "star_tree" else space.sample(rng)
    return GeodesicBall(center, 0.4 * float(rng.random()) + 0.1)


def verify_suite(spaces=None, n_samples=1000, seed=0):
    """Sampled sweeps of the core invariants; one row per (space, invariant)."""
    from .operators import Projector
    from .quantities import check_pafne, delta, psi
    from .spaces import verify_p_convexity

    spaces = _default_spaces() if spaces is None else spaces
    if n_samples <= 0:
        return []
    checks = ["p_convexity", "geodesic_split", "projector_firmness", "psi_nonnegative", "four_point"]
    streams = iter(np.random.SeedSequence(seed).spawn(len(spaces) * len(checks)))
    rows = []
    for space in spaces:
        for name in checks:
            rng = np.random.default_rng(next(streams))
            if name in ("psi_nonnegative", "four_point") and not space.is_cat0:
                continue
            if name == "p_convexity":
                worst = verify_p_convexity(space, n_samples, rng)
            elif name == "geodesic_split":
                worst = np.inf
                for _ in range(n_samples):
                    x, y, t = space.sample(rng), space.sample(rng), float(rng.random())
                    m, d = space.geodesic_point(x, y, t), space.distance(x, y)
                    err = max(abs(space.distance(x, m) - t * d), abs(space.distance(m, y) - (1 - t) * d))
                    worst = min(worst, -err)
            elif name == "projector_firmness":
                C = _sample_set(space, rng)
                P = Projector(space, C)
                worst = np.inf
                per = max(1, n_samples // 10)
                for _ in range(10):
                    y = C.sample(space, rng)
                    xs = [space.sample(rng) for _ in range(per)]
                    worst = min(worst, check_pafne(space, P, y, 0.5, 0.0, xs).worst_slack)
            elif name == "psi_nonnegative":
                P = Projector(space, _sample_set(space, rng))
                worst = min(psi(space, P, space.sample(rng), space.sample(rng))
                            for _ in range(n_samples))
            else:
                worst = np.inf
                for _ in range(n_samples):
                    x, y, u, v = (space.sample(rng) for _ in range(4))
                    bound = space.distance(x, y) * space.distance(u, v)
                    worst = min(worst, bound - delta(space, x, y, u, v))
            tol = 1e-10 if name == "geodesic_split" else 1e-9
            rows.append({"space": repr(space), "invariant": name, "n_samples": n_samples,
                         "worst_slack": float(worst), "passed": bool(worst >= -tol)})
    return rows


def _print_rows(rows, out):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["space", "invariant", "n_samples", "worst_slack", "passed"])
    for r in rows:
        writer.writerow([r["space"], r["invariant"], r["n_samples"], repr(r["worst_slack"]), r["passed"]])


# -- argument handling ------------------------------------------------------

def _parser():
    ap = argparse.ArgumentParser(prog="geofirm", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config", nargs="?", help="config file")
    run.add_argument("--preset", help="run a named preset instead of a file")
    run.add_argument("--output", help="trace CSV path (overrides the config)")

    ver = sub.add_parser("verify", help="sweep the sampled invariants")
    ver.add_argument("--samples", type=int, default=1000)
    ver.add_argument("--seed", type=int, default=None)

    cert = sub.add_parser("certify", help="certify a trace CSV")
    cert.add_argument("trace")
    cert.add_argument("params", nargs="*", help="key=value: alpha, p, c, family, space.*")

    pre = sub.add_parser("presets", help="list presets")
    pre.add_argument("action", choices=["list", "show"])
    pre.add_argument("name", nargs="?")
    return ap


def _cmd_run(args):
    if args.preset:
        if args.preset not in PRESETS:
            print(f"config error: unknown preset {args.preset!r}", file=sys.stderr)
            return EXIT_CONFIG
        text = preset_text(args.preset)
    elif args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        print("config error: give a config file or --preset", file=sys.stderr)
        return EXIT_CONFIG
    if args.output:
        text = "\n".join(l for l in text.splitlines() if not l.strip().startswith("output"))
        text += f"\noutput = {args.output}\n"
    return run_experiment(text)[0]


def _cmd_verify(args):
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get(SEED_ENV, "0"))
    rows = verify_suite(n_samples=args.samples, seed=seed)
    _print_rows(rows, sys.stdout)
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_CERT


def _cmd_certify(args):
    try:
        cfg = Config.from_pairs(args.params)
        alpha = cfg.float("alpha", required=True)
        space = build_space(cfg.sub("space")) if cfg.has("space") else None
        p = cfg.float("p", space.p if space else 2.0)
        c = cfg.float("c", space.c if space else 2.0)
        family = cfg.str("family", "linear")
        leftover = cfg.unused()
        if leftover:
            raise ConfigError(f"unknown parameter {leftover[0][0]!r}")
        with open(args.trace, newline="") as fh:
            trace = Trace.read_csv(fh, space)
    except (ConfigError, DomainError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        record = certify(trace, alpha, p, c, family=family)
    except DomainError as exc:
        print(f"certification error: {exc}", file=sys.stderr)
        return EXIT_CERT
    sys.stdout.write(record.to_text())
    return EXIT_OK if record.certified else EXIT_CERT


def _cmd_presets(args):
    if args.action == "list":
        for name, (desc, _) in PRESETS.items():
            print(f"{name}\t{desc}")
        return EXIT_OK
    if args.name not in PRESETS:
        print(f"config error: unknown preset {args.name!r}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(preset_text(args.name))
    return EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    handler = {"run": _cmd_run, "verify": _cmd_verify, "certify": _cmd_certify,
               "presets": _cmd_presets}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
