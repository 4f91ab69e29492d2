"""Literal parsers for scenario files and deterministic CSV/JSON emitters."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

from .functions import LocallyConstantFn, PiecewiseLinearFn
from .measure import Bernoulli, Convex, LebesgueCircle, Markov, PeriodicOrbit
from .space import parse_fraction, parse_point, parse_word


class ScenarioError(ValueError):
    """Malformed scenario or literal (exit code 2 at the CLI)."""


# --- number formatting ------------------------------------------------------


def frac_str(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def dec_str(q, digits=12) -> str:
    """Fixed-point decimal with `digits` places, rounding half to even."""
    q = Fraction(q)
    scaled = q * 10 ** digits
    n, rem = divmod(scaled.numerator, scaled.denominator)
    twice = 2 * rem
    if twice > scaled.denominator or (twice == scaled.denominator and n % 2):
        n += 1
    sign = "-" if n < 0 else ""
    n = abs(n)
    whole, frac = divmod(n, 10 ** digits)
    return f"{sign}{whole}.{frac:0{digits}d}" if digits else f"{sign}{whole}"


def jsonable(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return str(obj)


def dumps_json(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, ensure_ascii=False) + "\n"


def dumps_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([frac_str(v) if isinstance(v, Fraction) else v for v in row])
    return buf.getvalue()


def emit_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_json(obj))


def emit_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_csv(header, rows))


def value_columns(q):
    """[exact, decimal] pair used in every CSV."""
    return [frac_str(q), dec_str(q)]


# --- literal parsing --------------------------------------------------------


def _expect_dict(obj, what):
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ScenarioError(f"{what} literal must be a one-key object, got {obj!r}")
    return next(iter(obj.items()))


def parse_rational(v):
    try:
        return parse_fraction(v)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None


def parse_point_literal(text):
    if not isinstance(text, str):
        raise ScenarioError(f"point literal must be a string, got {text!r}")
    try:
        return parse_point(text)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None


def parse_measure(obj):
    key, val = _expect_dict(obj, "measure")
    try:
        if key == "bernoulli":
            return Bernoulli([parse_rational(v) for v in val])
        if key == "markov":
            P = [[parse_rational(v) for v in row] for row in val["P"]]
            pi0 = val.get("pi0")
            return Markov(P, None if pi0 is None else [parse_rational(v) for v in pi0])
        if key == "lebesgue_circle":
            return LebesgueCircle()
    except ScenarioError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise ScenarioError(f"bad {key} measure: {exc}") from None
    raise ScenarioError(f"unknown measure kind {key!r}")


def parse_invariant(obj, kind="shift", b=2, A=None):
    key, val = _expect_dict(obj, "invariant measure")
    try:
        if key == "orbit":
            return PeriodicOrbit(parse_word(val), kind=kind, b=b, A=A)
        if key == "convex":
            ws = [parse_rational(w) for w, _ in val]
            parts = [PeriodicOrbit(parse_word(word), kind=kind, b=b, A=A) for _, word in val]
            return Convex(ws, parts)
    except ScenarioError:
        raise
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"bad {key} literal: {exc}") from None
    raise ScenarioError(f"unknown invariant measure kind {key!r}")


def parse_function(obj, A=2):
    """{"cylinder": "01"}, {"constant": "1/2"}, {"table": {"depth": 2, "values": [...]}},
    {"pwl": {"breakpoints": [...], "values": [...]}}, {"hat": {"center": c, "half_width": w}}."""
    key, val = _expect_dict(obj, "function")
    try:
        if key == "cylinder":
            return LocallyConstantFn.indicator(parse_word(val), A)
        if key == "constant":
            return LocallyConstantFn.constant(parse_rational(val), A)
        if key == "table":
            values = val["values"]
            if isinstance(values, dict):
                table = {parse_word(w): parse_rational(v) for w, v in values.items()}
            else:
                table = [parse_rational(v) for v in values]
            return LocallyConstantFn(int(val["depth"]), table, int(val.get("A", A)))
        if key == "pwl":
            return PiecewiseLinearFn([parse_rational(v) for v in val["breakpoints"]],
                                     [parse_rational(v) for v in val["values"]])
        if key == "hat":
            return PiecewiseLinearFn.hat(parse_rational(val["center"]), parse_rational(val["half_width"]))
    except ScenarioError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise ScenarioError(f"bad {key} function: {exc}") from None
    raise ScenarioError(f"unknown function kind {key!r}")


def parse_target_set(items):
    from .construct import TargetSetK

    if not isinstance(items, list) or not items:
        raise ScenarioError("K must be a nonempty list")
    comps = []
    for c in items:
        if isinstance(c, list):
            comps.append([parse_rational(v) for v in c])
        else:
            comps.append(parse_rational(c))
    try:
        return TargetSetK(comps)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None


def parse_sft(obj):
    from .space import SFT

    if obj is None:
        return None
    try:
        if isinstance(obj, int):
            return SFT.full(obj)
        return SFT(obj)
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"bad subshift: {exc}") from None
