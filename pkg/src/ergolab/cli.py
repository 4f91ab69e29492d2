"""Command-line scenario runner.

Exit codes: 0 when every asserted check passes, 1 when a check fails,
2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import io as eio
from .io import ScenarioError, dec_str, frac_str

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class Report:
    def __init__(self, name, summary, checks, csv_header=None, csv_rows=None, extra_files=None):
        self.name = name
        self.summary = summary
        self.checks = checks
        self.csv_header = csv_header
        self.csv_rows = csv_rows or []
        self.extra_files = extra_files or {}

    @property
    def ok(self):
        return all(self.checks.values())

    def as_json(self):
        out = {"scenario": self.name, "ok": self.ok, "checks": dict(sorted(self.checks.items()))}
        out.update(self.summary)
        return out


def _num(q):
    return [frac_str(q), dec_str(q)]


def _get(scn, key, default=None, required=False):
    if key in scn:
        return scn[key]
    if required:
        raise ScenarioError(f"scenario is missing {key!r}")
    return default


def _int(v, what):
    if isinstance(v, bool) or not isinstance(v, int):
        try:
            v = int(str(v))
        except ValueError:
            raise ScenarioError(f"{what} must be an integer") from None
    return v


# --- scenario handlers ------------------------------------------------------


def run_example_scenario(scn):
    from .counterexamples import run_example

    name = _get(scn, "name", required=True)
    horizon = _int(_get(scn, "horizon", 50 if name == "cant-take-limsups" else 1024), "horizon")
    try:
        rep = run_example(name, horizon)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    header = ["k", "value", "value_dec"] + rep.header[2:]
    rows = [[r[0], *_num(r[1]), *r[2:]] for r in rep.rows]
    return Report(name, {"horizon": horizon, **rep.summary}, rep.checks, header, rows)


def _measure_for(scn, point):
    from .measure import Bernoulli, LebesgueCircle
    from .space import CirclePoint

    if "measure" in scn:
        return eio.parse_measure(scn["measure"])
    return LebesgueCircle() if isinstance(point, CirclePoint) else Bernoulli.uniform(2)


def run_sandwich(scn):
    from .construct import limit_set_estimate, sandwich_compile
    from .measure import InfeasibleRatios

    x = eio.parse_point_literal(_get(scn, "x", required=True))
    y = eio.parse_point_literal(_get(scn, "y", required=True))
    mu = _measure_for(scn, x)
    f = eio.parse_function(_get(scn, "f", required=True), getattr(mu, "A", 2))
    K = eio.parse_target_set(_get(scn, "K", required=True))
    horizon = _int(_get(scn, "horizon", 1024), "horizon")
    b = _int(_get(scn, "b", 2), "b")
    eps = eio.parse_rational(_get(scn, "eps", "1/20"))
    tail = eio.parse_rational(_get(scn, "tail_fraction", "1/2"))
    try:
        plan = sandwich_compile(mu, x, y, f, K, horizon, b=b)
    except InfeasibleRatios as exc:
        raise ScenarioError(f"infeasible ratios: {exc}") from None
    except (ValueError, TypeError) as exc:
        raise ScenarioError(str(exc)) from None
    est = limit_set_estimate(plan.series, eps, tail)
    checks = {"certificates": plan.ok}
    if plan.K.points_only:
        targets = sorted(plan.K.distinct_points())
        checks["cluster_count"] = len(est) == len(targets)
        checks["clusters_near_targets"] = len(est) == len(targets) and all(
            abs(c - t) <= eps for c, t in zip(est.centers, targets))
    rows = [[s.k, s.i, frac_str(s.t), frac_str(s.radii[0]), frac_str(s.radii[1]),
             *_num(s.value), frac_str(s.bound)] for s in plan.steps]
    summary = {
        "u": plan.u, "v": plan.v, "horizon": horizon, "eps": eps,
        "clusters": [{"center": c, "center_dec": dec_str(c), "multiplicity": m}
                     for c, m in zip(est.centers, est.multiplicities)],
    }
    return Report("sandwich", summary, checks,
                  ["k", "i", "t", "r", "s", "value", "value_dec", "bound"], rows)


def _parse_chase_target(obj, mu, b):
    from .construct import FiniteHull, WholeSimplex
    from .measure import PeriodicOrbit
    from .space import parse_word

    key, val = eio._expect_dict(obj, "chase target")
    kind = mu.kind
    A = b if kind == "circle" else getattr(mu, "A", 2)
    if key == "hull":
        try:
            thetas = [PeriodicOrbit(parse_word(w), kind=kind, b=b, A=A) for w in val["thetas"]]
            weights = [[eio.parse_rational(v) for v in vec] for vec in val["weights"]]
            return FiniteHull(thetas, weights)
        except (KeyError, ValueError, TypeError) as exc:
            raise ScenarioError(f"bad hull target: {exc}") from None
    if key == "whole_simplex":
        return WholeSimplex(kind, b, A)
    raise ScenarioError(f"unknown chase target {key!r}")


def run_chase(scn):
    from .construct import chase_compile
    from .measure import InfeasibleRatios, LebesgueCircle

    mu = eio.parse_measure(scn["measure"]) if "measure" in scn else LebesgueCircle()
    b = _int(_get(scn, "b", 2), "b")
    target = _parse_chase_target(_get(scn, "target", required=True), mu, b)
    horizon = _int(_get(scn, "horizon", 256), "horizon")
    M = _int(_get(scn, "M", 6), "M")
    classes = _get(scn, "classes")
    if classes is not None:
        classes = range(1, _int(classes, "classes") + 1)
    try:
        res = chase_compile(mu, target, horizon, b=b, M=M, classes=classes)
    except InfeasibleRatios as exc:
        raise ScenarioError(f"infeasible ratios: {exc}") from None
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    checks = {"certificates": res.ok}
    thr = _get(scn, "threshold")
    if thr is not None:
        thr = eio.parse_rational(thr)
        for i in sorted({r.i for r in res.table}):
            checks[f"class_{i}_below_threshold"] = res.rows(i)[-1].hi < thr
    rows = [[r.i, r.ell, r.k, frac_str(r.lo), frac_str(r.hi), dec_str(r.hi), frac_str(r.envelope)]
            for r in res.table]
    summary = {"horizon": horizon, "M": M,
               "targets": {str(i): repr(nu) for i, nu in sorted(res.targets.items())}}
    return Report("chase", summary, checks,
                  ["i", "ell", "k", "dist_lo", "dist_hi", "dist_hi_dec", "envelope"], rows)


def run_ergopt(scn):
    from .ergopt import jenkinson_check

    sft = eio.parse_sft(_get(scn, "sft"))
    A = sft.A if sft is not None else _int(_get(scn, "A", 2), "A")
    f = eio.parse_function(_get(scn, "f", required=True), A)
    K = _int(_get(scn, "K", 64), "K")
    pts = [eio.parse_point_literal(p) for p in _get(scn, "typical_points", [])]
    try:
        rep = jenkinson_check(f, sft, K=K, typical_points=pts)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    summary = rep.to_json()
    checks = summary.pop("checks")
    expect = _get(scn, "expect_abar")
    if expect is not None:
        checks["abar_expected"] = rep.abar == eio.parse_rational(expect)
    rows = [[k, frac_str(d), frac_str(u)] for k, (d, u) in enumerate(zip(rep.dbar_series, rep.dunder_series), 1)]
    return Report("ergopt", summary, checks, ["k", "dbar", "dunder"], rows)


def run_trace(scn):
    from .space import SFT, ShiftPoint
    from .specification import (
        SpecificationPlan,
        is_delta_tracing,
        modulus_custom,
        modulus_sft,
        trace_point,
    )

    delta = eio.parse_rational(_get(scn, "delta", required=True))
    sft = eio.parse_sft(_get(scn, "sft"))
    try:
        segs = []
        for seg in _get(scn, "segments", required=True):
            a, b, lit = seg
            x = eio.parse_point_literal(lit)
            if not isinstance(x, ShiftPoint):
                raise ScenarioError("tracing works on the shift")
            segs.append((_int(a, "a"), _int(b, "b"), x))
        xi = SpecificationPlan(segs)
        if sft is None:
            A = max(max(x.preperiod + x.period) for _, _, x in segs) + 1
            sft = SFT.full(max(A, 2))
        gaps = _get(scn, "gaps")
        modulus = modulus_custom(delta, gaps) if gaps else modulus_sft(sft, delta)
        y = trace_point(xi, delta, modulus, sft)
    except (ValueError, TypeError) as exc:
        raise ScenarioError(str(exc)) from None
    checks = {"delta_tracing": is_delta_tracing(y, xi, delta), "in_subshift": sft.point_admissible(y)}
    return Report("trace", {"y": str(y), "M": modulus.M, "depth": modulus.depth}, checks)


def _parse_targets(obj):
    if not isinstance(obj, list) or not obj:
        raise ScenarioError("targets must be a nonempty list of invariant-measure literals")
    return [eio.parse_invariant(t) for t in obj]


def run_oscillate(scn):
    from .specification import li_wu_check, oscillation_compile, parse_poly

    targets = _parse_targets(_get(scn, "targets", required=True))
    polys = _get(scn, "poly", ["t"])
    if isinstance(polys, str):
        polys = [p for p in polys.split(",") if p.strip()]
    try:
        Pi = [parse_poly(p) for p in polys]
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    horizon = _int(_get(scn, "horizon", 10000), "horizon")
    growth = _int(_get(scn, "growth", 12), "growth")
    try:
        res = oscillation_compile(targets, Pi, horizon, growth=growth)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    checks = {"checkpoints_certified": res.ok}
    summary = {"horizon": horizon, "prefix_length": len(res.prefix),
               "blocks": [list(b) for b in res.blocks]}
    lw = _get(scn, "li_wu")
    if lw is not None:
        f = eio.parse_function(lw["f"])
        tol = eio.parse_rational(lw.get("tol", "1/20"))
        rep = li_wu_check(res.prefix, f, horizon=horizon)
        summary["li_wu"] = {"abar": rep.abar, "aunder": rep.aunder, "gap_max": rep.gap_max,
                            "gap_min": rep.gap_min, "burn_in": rep.burn_in}
        checks["li_wu_gaps"] = rep.ok(tol)
    rows = [[c.ell, c.poly, c.k, c.pi_k, frac_str(c.lo), frac_str(c.hi), dec_str(c.hi), frac_str(c.bound)]
            for c in res.checkpoints]
    return Report("oscillate", summary, checks,
                  ["ell", "pi", "k", "pi_k", "dist_lo", "dist_hi", "dist_hi_dec", "bound"], rows,
                  extra_files={"prefix": res.prefix_str() + "\n"})


def _radius_fn(expr):
    import sympy

    k = sympy.Symbol("k")
    try:
        e = sympy.sympify(expr.replace("^", "**"), locals={"k": k})
    except (sympy.SympifyError, TypeError) as exc:
        raise ScenarioError(f"bad radius expression {expr!r}: {exc}") from None

    def r(n):
        v = sympy.simplify(e.subs(k, sympy.Integer(n)))
        if not v.is_Rational or v <= 0:
            raise ScenarioError(f"radius expression {expr!r} is not a positive rational at k={n}")
        return Fraction(int(v.p), int(v.q))

    return r


def run_decay(scn):
    from .averaging import decay_fast_check
    from .space import MoHoC

    base = _int(_get(scn, "base", 2), "base")
    exprs = _get(scn, "radii", ["2^-k"])
    fns = [_radius_fn(e) for e in exprs]
    deltas = [eio.parse_rational(d) for d in _get(scn, "deltas", ["1/2", "1/4"])]
    K = _int(_get(scn, "horizon", 64), "horizon")
    rep = decay_fast_check(MoHoC(base), lambda k: [fn(k) for fn in fns], deltas, K)
    checks = {"consistent_with_fast_decay": rep.consistent}
    rows = [[d, h, k, frac_str(v)] for (d, h, k), v in sorted(rep.fractions.items())
            if k in (K // 2, K)]
    rows = [[frac_str(r[0]), *r[1:]] for r in rows]
    return Report("decay-check", {"horizon": K, "base": base}, checks,
                  ["delta", "ball", "k", "fraction"], rows)


HANDLERS = {
    "example": run_example_scenario,
    "sandwich": run_sandwich,
    "chase": run_chase,
    "ergopt": run_ergopt,
    "trace": run_trace,
    "oscillate": run_oscillate,
    "decay": run_decay,
    "decay-check": run_decay,
}


def run_scenario(scn) -> Report:
    if not isinstance(scn, dict):
        raise ScenarioError("scenario must be a JSON object")
    kind = scn.get("construct")
    if kind not in HANDLERS:
        raise ScenarioError(f"unknown construct {kind!r}")
    return HANDLERS[kind](scn)


def load_scenario(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path} is not valid JSON: {exc}") from None


# --- output -----------------------------------------------------------------


def write_outputs(report: Report, out):
    """`out` is a directory, or "a.json", or comma-separated explicit paths
    (prefix/summary/CSV chosen by extension)."""
    if not out:
        return
    paths = [p for p in out.split(",") if p]
    if len(paths) == 1 and not os.path.splitext(paths[0])[1]:
        d = paths[0]
        os.makedirs(d, exist_ok=True)
        eio.emit_json(os.path.join(d, f"{report.name}.json"), report.as_json())
        if report.csv_header is not None:
            eio.emit_csv(os.path.join(d, f"{report.name}.csv"), report.csv_header, report.csv_rows)
        for key, text in report.extra_files.items():
            with open(os.path.join(d, f"{report.name}.{key}.txt"), "w", encoding="utf-8") as fh:
                fh.write(text)
        return
    for p in paths:
        ext = os.path.splitext(p)[1].lower()
        if ext == ".csv":
            eio.emit_csv(p, report.csv_header or [], report.csv_rows)
        elif ext == ".json":
            eio.emit_json(p, report.as_json())
        else:
            text = next(iter(report.extra_files.values()), eio.dumps_json(report.as_json()))
            with open(p, "w", encoding="utf-8") as fh:
                fh.write(text)


# --- argument parsing -------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--horizon", type=int, help="override the scenario horizon")
    common.add_argument("--out", help="output directory or comma-separated file paths")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads (results do not depend on it)")
    common.add_argument("--seed", type=int, default=0, help="fuzzing seed; never affects scenario results")

    p = argparse.ArgumentParser(prog="ergolab", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("example", parents=[common], help="run a worked example")
    ex.add_argument("name", help="cant-take-limsups or give-and-take")

    for name, helptext in [("sandwich", "scalar limit-set sandwich"),
                           ("chase", "measure chase over multi-balls"),
                           ("trace", "build a delta-tracing point"),
                           ("run", "dispatch on the scenario's 'construct' key")]:
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("scenario", help="scenario JSON file")

    eo = sub.add_parser("ergopt", parents=[common], help="ergodic optimisation report")
    eo.add_argument("scenario", nargs="?", help="scenario JSON file")
    eo.add_argument("--f", help="function literal (JSON), e.g. '{\"cylinder\": \"01\"}'")
    eo.add_argument("--K", type=int, help="length of the dbar/dunder series")

    osc = sub.add_parser("oscillate", parents=[common], help="compile an oscillation point")
    osc.add_argument("scenario", nargs="?", help="scenario JSON file")
    osc.add_argument("--targets", help="JSON file with a list of invariant-measure literals")
    osc.add_argument("--poly", help="comma-separated sampling polynomials, e.g. 't,t^2'")
    osc.add_argument("--li-wu", dest="li_wu", help="function literal for the Li-Wu extremes check")

    dc = sub.add_parser("decay-check", parents=[common], help="finite check of fast decay")
    dc.add_argument("scenario", nargs="?", help="scenario JSON file")
    dc.add_argument("--base", type=int, help="Lipschitz base L(j) = base^j")
    dc.add_argument("--radius", action="append", help="radius expression in k, e.g. '2^-k'")
    dc.add_argument("--deltas", help="comma-separated deltas")
    return p


def _scenario_from_args(args):
    cmd = args.command
    scn = load_scenario(args.scenario) if getattr(args, "scenario", None) else {}
    if cmd == "example":
        scn = {"construct": "example", "name": args.name}
    elif cmd in ("sandwich", "chase", "trace"):
        if scn.get("construct", cmd) != cmd:
            raise ScenarioError(f"scenario is a {scn['construct']!r} scenario, not {cmd!r}")
        scn["construct"] = cmd
    elif cmd == "ergopt":
        scn.setdefault("construct", "ergopt")
        if args.f:
            try:
                scn["f"] = json.loads(args.f)
            except json.JSONDecodeError as exc:
                raise ScenarioError(f"--f is not valid JSON: {exc}") from None
        if args.K:
            scn["K"] = args.K
    elif cmd == "oscillate":
        scn.setdefault("construct", "oscillate")
        if args.targets:
            scn["targets"] = load_scenario(args.targets)
        if args.poly:
            scn["poly"] = args.poly
        if args.li_wu:
            try:
                scn["li_wu"] = {"f": json.loads(args.li_wu)}
            except json.JSONDecodeError as exc:
                raise ScenarioError(f"--li-wu is not valid JSON: {exc}") from None
    elif cmd == "decay-check":
        scn.setdefault("construct", "decay")
        if args.base:
            scn["base"] = args.base
        if args.radius:
            scn["radii"] = args.radius
        if args.deltas:
            scn["deltas"] = args.deltas.split(",")
    if args.horizon is not None:
        scn["horizon"] = args.horizon
    return scn


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    start = time.perf_counter()
    try:
        report = run_scenario(_scenario_from_args(args))
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        write_outputs(report, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(eio.dumps_json(report.as_json()))
    # wall time goes to stderr so that report files stay byte-identical
    print(f"{report.name}: {'pass' if report.ok else 'FAIL'} in {time.perf_counter() - start:.2f}s",
          file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
