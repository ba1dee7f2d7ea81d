"""Batch experiment front-end.

Subcommands: estimate, sweep, shape, pyramid, defects, selftest. Every run
needs an explicit --seed; outputs embed the fully resolved config, so a run
is reproducible from any of its artifacts. Exit codes: 0 success, 1 usage or
config error, 2 runtime failure (truncation cap or unbounded shape).
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
import time
from fractions import Fraction

import numpy as np

from .dist import PointMass, dist_from_json
from .env import HalfPlane, Homogeneous, Site, WeightField, env_from_json, env_to_json
from .estimate import axis_constant, directional_sweep, homogeneous_mu, radial_estimate
from .defects import defect_sandwich, report_meta, sweep_csv_rows
from .fpp import (
    Box,
    Inconclusive,
    NotContained,
    TruncationFailure,
    brute_force_passage,
    passage_time,
    variation_check,
)
from .shape import (
    GadgetSpec,
    InvalidGadget,
    Polygon,
    SeminormEval,
    UnboundedShape,
    empirical_growth,
    hausdorff,
    mubar_eval,
    polygon_csv_rows,
    polygon_svg,
    pyramid_test,
)

SCHEMA_VERSION = 1
SELFTEST_BUDGET_S = 300.0


class _Parser(argparse.ArgumentParser):
    # usage/config problems are exit code 1, not argparse's default 2
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_json_arg(s: str) -> dict:
    s = s.strip()
    if s.startswith("{"):
        return json.loads(s)
    with open(s) as fh:
        return json.load(fh)


def _parse_direction(s: str) -> tuple[Fraction, Fraction]:
    try:
        xs, ys = s.split(",")
        return Fraction(xs.strip()), Fraction(ys.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad --dir {s!r}: expected X,Y with rational parts") from exc


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(out_dir: str, name: str, text: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        fh.write(text)
    return path


def _estimate_row(direction, est, seed: int) -> str:
    upper = "" if est.certified_upper is None else repr(est.certified_upper)
    return (f"{float(direction[0])!r},{float(direction[1])!r},{est.n},{est.reps},"
            f"{est.point!r},{est.stderr!r},{upper},{est.confidence!r},{seed}")

_EST_HEADER = "direction_x,direction_y,n,reps,point,stderr,certified_upper,confidence,seed"


def _est_json(est) -> dict:
    return {"point": est.point, "stderr": est.stderr, "reps": est.reps, "n": est.n,
            "certified_upper": est.certified_upper, "confidence": est.confidence,
            "low_reps": est.reps < 30}


def _cmd_estimate(args) -> int:
    spec = env_from_json(_load_json_arg(args.spec))
    x = _parse_direction(args.dir)
    config = {"schema": SCHEMA_VERSION, "command": "estimate",
              "spec": env_to_json(spec), "dir": [str(x[0]), str(x[1])],
              "n": args.n, "reps": args.reps, "seed": args.seed,
              "confidence": args.confidence,
              "box_margin_cap": args.box_margin_cap}
    kw = dict(confidence=args.confidence, margin_cap=args.box_margin_cap,
              threads=args.threads)
    if (x[0], x[1]) in ((Fraction(0), Fraction(1)), (Fraction(0), Fraction(-1))):
        est = axis_constant(spec, args.n, args.reps, args.seed, **kw)
    elif isinstance(spec, Homogeneous) and (abs(x[0]), abs(x[1])) == (Fraction(1), Fraction(0)):
        est = homogeneous_mu(spec.F, (int(x[0]), int(x[1])), args.n, args.reps, args.seed, **kw)
    else:
        est = radial_estimate(spec, x, args.n, args.reps, args.seed, **kw)
    if args.format == "csv":
        text = f"# config: {json.dumps(config, sort_keys=True)}\n{_EST_HEADER}\n"
        text += _estimate_row((float(x[0]), float(x[1])), est, args.seed) + "\n"
        path = _write(args.out, "estimate.csv", text)
    else:
        path = _write(args.out, "estimate.json",
                      _dump_json({"config": config, "result": _est_json(est)}))
    print(path)
    return 0


def _cmd_sweep(args) -> int:
    spec = env_from_json(_load_json_arg(args.spec))
    config = {"schema": SCHEMA_VERSION, "command": "sweep", "spec": env_to_json(spec),
              "m": args.m, "n": args.n, "reps": args.reps, "seed": args.seed,
              "confidence": args.confidence,
              "box_margin_cap": args.box_margin_cap}
    out = directional_sweep(spec, args.m, args.n, args.reps, args.seed,
                            confidence=args.confidence, threads=args.threads,
                            margin_cap=args.box_margin_cap)
    if args.format == "csv":
        text = f"# config: {json.dumps(config, sort_keys=True)}\n{_EST_HEADER}\n"
        for direction, est in out:
            text += _estimate_row(direction, est, args.seed) + "\n"
        path = _write(args.out, "sweep.csv", text)
    else:
        path = _write(args.out, "sweep.json", _dump_json(
            {"config": config,
             "results": [{"direction": list(d), **_est_json(e)} for d, e in out]}))
    print(path)
    return 0


def _point_mass_prediction(spec) -> Polygon | None:
    if isinstance(spec, Homogeneous) and isinstance(spec.F, PointMass) and spec.F.value > 0:
        r = 1.0 / spec.F.value
        return Polygon.from_points([(r, 0), (0, r), (-r, 0), (0, -r)])
    return None


def _cmd_shape(args) -> int:
    spec = env_from_json(_load_json_arg(args.spec))
    config = {"schema": SCHEMA_VERSION, "command": "shape", "spec": env_to_json(spec),
              "t": args.t, "seed": args.seed, "grid": args.grid}
    rows = empirical_growth(spec, args.t, args.seed, grid=args.grid)
    poly = Polygon.from_points([(x / args.t, y / args.t) for x, y, _ in rows])
    stamp = None if args.no_timestamp else datetime.datetime.now().isoformat()
    result = {"config": config, "vertices": [list(v) for v in poly.vertices]}
    drawn = [(poly, "#225588")]
    pred = _point_mass_prediction(spec)
    if pred is not None:
        result["hausdorff_to_prediction"] = hausdorff(poly, pred)
        result["prediction_vertices"] = [list(v) for v in pred.vertices]
        drawn.append((pred, "#cc3333"))
    _write(args.out, "shape.svg", polygon_svg(drawn, timestamp=stamp))
    _write(args.out, "shape_vertices.csv",
           f"# config: {json.dumps(config, sort_keys=True)}\nx,y\n"
           + "\n".join(polygon_csv_rows(poly)) + "\n")
    _write(args.out, "growth.csv",
           f"# config: {json.dumps(config, sort_keys=True)}\nx,y,time\n"
           + "\n".join(f"{x},{y},{t!r}" for x, y, t in rows) + "\n")
    path = _write(args.out, "shape.json", _dump_json(result))
    print(path)
    return 0


def _cmd_pyramid(args) -> int:
    g = GadgetSpec(y=args.y, p=args.p, K=args.K, z_high=args.z_high)
    config = {"schema": SCHEMA_VERSION, "command": "pyramid",
              "y": args.y, "p": args.p, "K": args.K, "z_high": args.z_high,
              "n": args.n, "reps": args.reps, "seed": args.seed,
              "confidence": args.confidence,
              "mirror": args.mirror, "box_margin_cap": args.box_margin_cap}
    verdict = pyramid_test(g, args.n, args.reps, args.seed, args.confidence,
                           threads=args.threads, mirror=args.mirror,
                           margin_cap=args.box_margin_cap)
    path = _write(args.out, "pyramid.json",
                  _dump_json({"config": config, "result": verdict.to_json()}))
    print(path)
    return 0


def _cmd_defects(args) -> int:
    f = dist_from_json(_load_json_arg(args.f))
    f0 = dist_from_json(_load_json_arg(args.f0))
    eps = [float(e) for e in args.eps.split(",")]
    config = {"schema": SCHEMA_VERSION, "command": "defects", **report_meta(f, f0),
              "eps": eps, "n": args.n, "reps": args.reps, "seed": args.seed,
              "confidence": args.confidence,
              "exact": not args.no_exact, "cylinder_k": args.cylinder_k,
              "box_margin_cap": args.box_margin_cap}
    kw = dict(confidence=args.confidence, threads=args.threads,
              exact=not args.no_exact, margin_cap=args.box_margin_cap)
    reports = [defect_sandwich(f, f0, e, args.n, args.reps, args.seed,
                               cylinder_k=args.cylinder_k, **kw) for e in eps]
    payload = {"config": config, "reports": [r.to_json() for r in reports]}
    path = _write(args.out, "defects.json", _dump_json(payload))
    if len(eps) > 1:
        sweep = [(r.epsilon, r.estimate) for r in reports]
        _write(args.out, "defects_sweep.csv",
               f"# config: {json.dumps(config, sort_keys=True)}\n"
               + "\n".join(sweep_csv_rows(sweep)) + "\n")
    print(path)
    return 0


class _CorruptArrays:
    """Selftest fault hook: vectorized weights disagree with scalar ones."""

    def __init__(self, base):
        self.base = base
        self.spec = base.spec
        self.seed = base.seed

    def weight(self, e):
        return self.base.weight(e)

    def weight_arrays(self, x_lo, x_hi, y_lo, y_hi):
        h_w, v_w = self.base.weight_arrays(x_lo, x_hi, y_lo, y_hi)
        h_w = h_w.copy()
        h_w[h_w.shape[0] // 2, h_w.shape[1] // 2] *= 1.5
        return h_w, v_w


def run_selftest(fault: str | None = None) -> dict:
    """Oracle, coupling, variation-identity and seminorm suites at small
    scale; returns a machine-readable failure list."""
    from .dist import FiniteAtoms, combine_sub_dom
    t0 = time.perf_counter()
    failures = []
    rng = np.random.default_rng(20240)
    atoms = FiniteAtoms(((0.2, 0.4), (4.0, 0.6)))
    mild = FiniteAtoms(((0.5, 0.5), (1.5, 0.5)))

    # oracle equivalence on small boxes
    for k in range(40):
        spec = HalfPlane(atoms, mild) if k % 2 else Homogeneous(mild)
        field = WeightField(spec, int(rng.integers(1 << 48)))
        if fault == "weight":
            field = _CorruptArrays(field)
        box = Box(-1, 2, -1, 2)
        u = Site(int(rng.integers(-1, 3)), int(rng.integers(-1, 3)))
        v = Site(int(rng.integers(-1, 3)), int(rng.integers(-1, 3)))
        if abs(passage_time(field, u, v, box).time
               - brute_force_passage(field, u, v, box)) > 1e-12:
            failures.append({"invariant": "oracle-equivalence",
                             "seed": field.seed, "u": list(u), "v": list(v)})
            break

    # shared-seed coupling order
    f_sub, f_dom = combine_sub_dom(atoms, PointMass(1.0))
    for seed in range(10):
        box = Box(-8, 8, -8, 8)
        mid = passage_time(WeightField(HalfPlane(atoms, PointMass(1.0)), seed),
                           (0, 0), (4, 5), box).time
        lo = passage_time(WeightField(Homogeneous(f_sub), seed), (0, 0), (4, 5), box).time
        hi = passage_time(WeightField(Homogeneous(f_dom), seed), (0, 0), (4, 5), box).time
        if not lo <= mid <= hi:
            failures.append({"invariant": "coupling-order", "seed": seed})
            break

    # variation identity
    for seed in range(20):
        field = WeightField(HalfPlane(mild, FiniteAtoms(((0.8, 0.5), (1.3, 0.5)))), seed)
        m = 12
        ok = None
        while m <= 96:
            try:
                ok = variation_check(field, (5, 3), Box(-m, m, -m, m))
                break
            except Inconclusive:
                m *= 2
        if ok is not True:
            failures.append({"invariant": "variation-identity", "seed": seed})
            break

    # seminorm properties of the variational evaluator
    s_minus, s_plus = SeminormEval.scaled_l1(1.1), SeminormEval.scaled_l1(0.9)
    for _ in range(60):
        x = tuple(rng.uniform(-4, 4, size=2))
        y = tuple(rng.uniform(-4, 4, size=2))
        lam = float(rng.uniform(0, 2))
        f = lambda p: mubar_eval(s_minus, s_plus, 0.7, p)
        if abs(f((lam * x[0], lam * x[1])) - lam * f(x)) > 1e-8 or \
           f((x[0] + y[0], x[1] + y[1])) > f(x) + f(y) + 1e-7:
            failures.append({"invariant": "seminorm-properties", "x": list(x)})
            break

    elapsed = time.perf_counter() - t0
    out = {"failures": failures, "elapsed_s": round(elapsed, 3)}
    if elapsed > SELFTEST_BUDGET_S:
        out["warning"] = f"selftest exceeded the {SELFTEST_BUDGET_S:.0f}s soft budget"
    return out


def _cmd_selftest(args) -> int:
    result = run_selftest(fault=args.fault)
    print(json.dumps(result, sort_keys=True))
    return 0 if not result["failures"] else 1


def _add_common(p, with_spec=True):
    if with_spec:
        p.add_argument("--spec", required=True, help="EnvSpec JSON (path or inline)")
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", default=".")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--box-margin-cap", type=int, default=4096)


def build_parser() -> _Parser:
    parser = _Parser(prog="fpp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="radial passage-time estimate")
    p.add_argument("--dir", required=True, help="direction X,Y (rationals)")
    p.add_argument("--n", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("sweep", help="directional sweep of the radial limit")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("shape", help="empirical growth shape with SVG export")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--out", default=".")
    p.add_argument("--no-timestamp", action="store_true",
                   help="omit the SVG timestamp comment (byte-stable output)")
    p.set_defaults(func=_cmd_shape)

    p = sub.add_parser("pyramid", help="gadget run certifying the axis speed-up")
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--z-high", type=float, default=4.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mirror", action="store_true")
    _add_common(p, with_spec=False)
    p.set_defaults(func=_cmd_pyramid)

    p = sub.add_parser("defects", help="random columnar defect reports")
    p.add_argument("--f", required=True, help="bulk Dist JSON (path or inline)")
    p.add_argument("--f0", required=True, help="defect Dist JSON (path or inline)")
    p.add_argument("--eps", required=True, help="comma-separated intensities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cylinder-k", type=int, default=None)
    p.add_argument("--no-exact", action="store_true",
                   help="box-truncated upper bounds instead of certified values")
    _add_common(p, with_spec=False)
    p.set_defaults(func=_cmd_defects)

    p = sub.add_parser("selftest", help="oracle/coupling/identity/seminorm suites")
    p.add_argument("--fault", default=None,
                   help="inject a named fault (test hook): 'weight'")
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except (TruncationFailure, UnboundedShape, NotContained) as exc:
        print(f"fpp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, InvalidGadget, OSError, json.JSONDecodeError) as exc:
        print(f"fpp: config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
