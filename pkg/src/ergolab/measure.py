"""Ambient measures with exact ball measures, ratio targeting, invariant and
empirical measures, and the truncated weak* distance."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .functions import circle_family, shift_family
from .space import (
    CirclePoint,
    ShiftPoint,
    ball_as_cylinder,
    format_word,
    rho,
)


class InfeasibleRatios(ValueError):
    """No admissible radii reach the requested ratios."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


def _solve_stationary(P):
    """Exact solution of pi P = pi, sum(pi) = 1 by Gauss-Jordan elimination."""
    n = len(P)
    # unknowns pi_0..pi_{n-1}; rows: (P^T - I) pi = 0, last row replaced by sum = 1
    rows = [[P[j][i] - (1 if i == j else 0) for j in range(n)] + [Fraction(0)] for i in range(n)]
    rows[-1] = [Fraction(1)] * n + [Fraction(1)]
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if piv is None:
            raise ValueError("transition matrix has no unique stationary vector")
        rows[col], rows[piv] = rows[piv], rows[col]
        pv = rows[col][col]
        rows[col] = [v / pv for v in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return tuple(rows[i][n] for i in range(n))


class Bernoulli:
    kind = "shift"

    def __init__(self, p):
        p = tuple(Fraction(v) for v in p)
        if len(p) < 2 or any(v <= 0 for v in p) or sum(p) != 1:
            raise ValueError("Bernoulli weights must be positive and sum to 1")
        self.p = p

    @classmethod
    def uniform(cls, A=2):
        return cls([Fraction(1, A)] * A)

    @property
    def A(self):
        return len(self.p)

    @property
    def pi0(self):
        return self.p

    def row(self, a):
        return self.p

    def __eq__(self, other):
        return isinstance(other, Bernoulli) and other.p == self.p

    def __hash__(self):
        return hash(("bernoulli", self.p))

    def __repr__(self):
        return f"Bernoulli({', '.join(map(str, self.p))})"


class Markov:
    kind = "shift"

    def __init__(self, P, pi0=None):
        P = tuple(tuple(Fraction(v) for v in row) for row in P)
        n = len(P)
        if n < 2 or any(len(row) != n for row in P):
            raise ValueError("transition matrix must be square")
        if any(v < 0 for row in P for v in row) or any(sum(row) != 1 for row in P):
            raise ValueError("transition matrix must be row-stochastic")
        pi = _solve_stationary(P) if pi0 is None else tuple(Fraction(v) for v in pi0)
        if sum(pi) != 1 or any(v < 0 for v in pi):
            raise ValueError("stationary vector must be a probability vector")
        if any(sum(pi[i] * P[i][j] for i in range(n)) != pi[j] for j in range(n)):
            raise ValueError("pi0 is not stationary for P")
        self.P = P
        self.pi0 = pi

    @property
    def A(self):
        return len(self.P)

    def row(self, a):
        return self.P[a]

    def support(self):
        from .space import SFT

        return SFT([[1 if v else 0 for v in row] for row in self.P])

    def __eq__(self, other):
        return isinstance(other, Markov) and (other.P, other.pi0) == (self.P, self.pi0)

    def __hash__(self):
        return hash(("markov", self.P))

    def __repr__(self):
        return f"Markov(A={self.A})"


class LebesgueCircle:
    kind = "circle"

    def __eq__(self, other):
        return isinstance(other, LebesgueCircle)

    def __hash__(self):
        return hash("lebesgue")

    def __repr__(self):
        return "LebesgueCircle()"


def cylinder_measure(mu, w) -> Fraction:
    if getattr(mu, "kind", None) != "shift":
        raise TypeError("cylinder measures need a shift measure")
    w = tuple(w)
    if not w:
        return Fraction(1)
    m = mu.pi0[w[0]]
    # group equal factors so deep cylinders cost one power per transition type
    if isinstance(mu, Bernoulli):
        for a, n in Counter(w[1:]).items():
            m *= mu.p[a] ** n
        return m
    for (a, b), n in Counter(zip(w, w[1:])).items():
        m *= mu.row(a)[b] ** n
    return m


def prefix_measures(mu, x: ShiftPoint, depth):
    """mu([x_0..x_{d-1}]) for d = 0..depth."""
    out = [Fraction(1)]
    prev = None
    for i in range(depth):
        s = x[i]
        out.append(out[-1] * (mu.pi0[s] if prev is None else mu.row(prev)[s]))
        prev = s
    return out


def ball_measure(mu, x, r) -> Fraction:
    r = Fraction(r)
    if r <= 0:
        raise ValueError("radius must be positive")
    if mu.kind == "circle":
        return min(2 * r, Fraction(1))
    return cylinder_measure(mu, ball_as_cylinder(x, r))


def _atom(mu, x: ShiftPoint):
    cycle = x.period + x.period[:1]
    loop = Fraction(1)
    for a, b in zip(cycle, cycle[1:]):
        loop *= mu.row(a)[b]
    if loop != 1:
        return Fraction(0)
    return cylinder_measure(mu, x.preperiod + x.period)


def shell_measure(mu, x, r) -> Fraction:
    """mu({y : rho(x, y) = r})."""
    r = Fraction(r)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if mu.kind == "circle":
        return Fraction(0)
    if r == 0:
        return _atom(mu, x)
    n, d = r.numerator, r.denominator
    if n != 1 or d < 2 or d & (d - 1):
        return Fraction(0)
    ell = d.bit_length() - 1  # r = 2**-ell, ell >= 1
    return cylinder_measure(mu, x.prefix(ell - 1)) - cylinder_measure(mu, x.prefix(ell))


def neglects_shells(mu, search_depth=8) -> bool:
    if mu.kind == "circle":
        return True
    for a in range(mu.A):
        x = ShiftPoint((), (a,))
        for d in range(search_depth):
            if shell_measure(mu, x, Fraction(1, 2 ** (d + 1))) > 0:
                return False
    return True


# --- ratio targeting -------------------------------------------------------


def _check_weights(lam):
    lam = [Fraction(v) for v in lam]
    if not lam or any(v <= 0 for v in lam) or sum(lam) != 1:
        raise ValueError("weights must be positive and sum to 1")
    return lam


def target_ratios_circle(centers, lam, caps):
    """Radii r_h < cap_h with 2 r_h / sum_u 2 r_u = lam_h and disjoint arcs.

    Caps are first reduced to half the smallest pairwise distance (and to
    1/2), which keeps the arcs disjoint.
    """
    lam = _check_weights(lam)
    centers = [c if isinstance(c, CirclePoint) else CirclePoint(c) for c in centers]
    caps = [Fraction(c) for c in caps]
    if len(centers) != len(lam) or len(caps) != len(lam):
        raise ValueError("centers, weights and caps must have equal length")
    if any(c <= 0 for c in caps):
        raise InfeasibleRatios("caps must be positive")
    if len(set(centers)) != len(centers):
        raise ValueError("duplicate centers")
    limit = Fraction(1, 2)
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            limit = min(limit, rho(centers[i], centers[j]) / 2)
    caps = [min(c, limit) for c in caps]
    t = min(c / l for c, l in zip(caps, lam)) / 2
    return [t * l for l in lam]


@dataclass(frozen=True)
class ShiftRatios:
    depths: tuple
    ratios: tuple
    error: Fraction


def target_ratios_shift(mu, centers, lam, tolerance, depth_cap, min_depth=0):
    """Cylinder depths whose measure ratios are within `tolerance` (l1) of lam.

    The cylinders are required to be pairwise disjoint.  Among admissible
    depth vectors the smallest error wins, then the smallest total depth.
    """
    lam = _check_weights(lam)
    tolerance = Fraction(tolerance)
    if mu.kind != "shift":
        raise TypeError("shift ratio targeting needs a shift measure")
    n = len(centers)
    if n != len(lam):
        raise ValueError("centers and weights must have equal length")
    if depth_cap < min_depth:
        raise ValueError("depth_cap below min_depth")
    if len(set(centers)) != n:
        raise ValueError("duplicate centers")
    masses = [prefix_measures(mu, c, depth_cap) for c in centers]
    prefixes = [c.prefix(depth_cap) for c in centers]
    best = None
    for depths in product(range(min_depth, depth_cap + 1), repeat=n):
        if not _disjoint_prefixes([p[:d] for p, d in zip(prefixes, depths)]):
            continue
        ms = [masses[h][d] for h, d in enumerate(depths)]
        total = sum(ms)
        if total == 0:
            continue
        ratios = tuple(m / total for m in ms)
        err = sum(abs(a - b) for a, b in zip(ratios, lam))
        key = (err, sum(depths), depths)
        if best is None or key < best[0]:
            best = (key, ShiftRatios(tuple(depths), ratios, err))
    if best is None:
        raise InfeasibleRatios("no disjoint cylinders within depth cap")
    result = best[1]
    if result.error > tolerance:
        shown = ", ".join(map(str, result.ratios))
        raise InfeasibleRatios(
            f"best achievable ratios ({shown}) miss the target by {result.error} > {tolerance}",
            best=result,
        )
    return result


def _disjoint_prefixes(words):
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            a, b = words[i], words[j]
            n = min(len(a), len(b))
            if a[:n] == b[:n]:
                return False
    return True


# --- invariant and empirical measures --------------------------------------


def _least_rotation(word):
    return min(word[i:] + word[:i] for i in range(len(word)))


class PeriodicOrbit:
    """Uniform measure on the orbit of a periodic point.

    On the shift the point is word^inf; on the circle with the map x b it is
    the rational whose base-b expansion is word repeated.
    """

    def __init__(self, word, kind="shift", b=2, A=None):
        word = tuple(word)
        if not word:
            raise ValueError("orbit word must be nonempty")
        if ShiftPoint((), word).period != word:
            raise ValueError("orbit word must be primitive")
        self.word = _least_rotation(word)
        self.kind = kind
        self.b = b
        self.A = A if A is not None else max(2, max(self.word) + 1)
        if kind == "circle" and max(self.word) >= b:
            raise ValueError("digit exceeds the circle base")

    def point(self, shift=0):
        n = len(self.word)
        s = shift % n
        w = self.word[s:] + self.word[:s]
        if self.kind == "shift":
            return ShiftPoint((), w)
        num = 0
        for a in w:
            num = num * self.b + a
        return CirclePoint(Fraction(num, self.b ** n - 1))

    def points(self):
        pts = []
        for i in range(len(self.word)):
            p = self.point(i)
            if p not in pts:
                pts.append(p)
        return pts

    @property
    def typical_point(self):
        return self.point(0)

    def integrate(self, f):
        if self.kind == "shift":
            w = self.word
            n = len(w)
            m = f.depth
            ext = w * (m // n + 2)
            return sum(f.on_word(ext[i:i + m]) for i in range(n)) / n
        # the circle orbit has exactly len(word) points for a primitive word,
        # except when the word collapses (e.g. all digits b-1)
        pts = [self.point(i) for i in range(len(self.word))]
        return sum(f(p) for p in pts) / len(pts)

    def as_convex(self):
        return Convex([Fraction(1)], [self])

    def key(self):
        return (self.kind, self.b, self.word) if self.kind == "shift" else (
            self.kind, self.b, frozenset(self.points()))

    def __eq__(self, other):
        return isinstance(other, PeriodicOrbit) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"orbit({format_word(self.word)})"


class Convex:
    def __init__(self, weights, parts):
        weights = [Fraction(w) for w in weights]
        parts = list(parts)
        if len(weights) != len(parts) or not parts:
            raise ValueError("weights and parts must match")
        if any(w <= 0 for w in weights) or sum(weights) != 1:
            raise ValueError("weights must be positive and sum to 1")
        self.weights = tuple(weights)
        self.parts = tuple(parts)
        self.kind = parts[0].kind

    def integrate(self, f):
        return sum(w * p.integrate(f) for w, p in zip(self.weights, self.parts))

    def as_convex(self):
        return self

    def key(self):
        acc = {}
        for w, p in zip(self.weights, self.parts):
            acc[p.key()] = acc.get(p.key(), 0) + w
        return frozenset(acc.items())

    def __eq__(self, other):
        return hasattr(other, "as_convex") and self.key() == other.as_convex().key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        inner = " + ".join(f"{w}*{p!r}" for w, p in zip(self.weights, self.parts))
        return f"Convex({inner})"


def integrate_invariant(nu, f):
    return nu.integrate(f)


class EmpiricalMeasure:
    """mu_{x,k} = (1/k) sum_{j<k} delta_{T_j x}."""

    def __init__(self, x, k, b=2):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.x = x
        self.k = k
        self.b = b
        self.kind = "shift" if isinstance(x, ShiftPoint) else "circle"

    def integrate(self, f):
        from .averaging import birkhoff_avg

        return birkhoff_avg(f, self.x, self.k, b=self.b)

    def __repr__(self):
        return f"EmpiricalMeasure({self.x}, k={self.k})"


def integrate_empirical(m: EmpiricalMeasure, f):
    return m.integrate(f)


# --- weak* distance --------------------------------------------------------


@dataclass(frozen=True)
class WeakStarInterval:
    lo: Fraction
    hi: Fraction
    M: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty enclosure")

    @property
    def width(self):
        return self.hi - self.lo


def default_family(kind, M, A=2):
    return circle_family(M) if kind == "circle" else shift_family(M, A)


def weakstar_dist(beta1, beta2, M, family=None, A=2) -> WeakStarInterval:
    """Enclosure of sum_h 2^-h min(|int f_h d(beta1 - beta2)|, 1)."""
    if M < 0:
        raise ValueError("M must be nonnegative")
    if beta1.kind != beta2.kind:
        raise TypeError("measures live on different backends")
    fs = family if family is not None else default_family(beta1.kind, M, A)
    if len(fs) < M:
        raise ValueError("family shorter than the truncation depth")
    s = Fraction(0)
    for h, f in enumerate(fs[:M], start=1):
        diff = abs(beta1.integrate(f) - beta2.integrate(f))
        s += min(diff, Fraction(1)) / 2 ** h
    return WeakStarInterval(s, s + Fraction(1, 2 ** M), M)
