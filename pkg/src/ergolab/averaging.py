"""Temporal averages along orbits and exact spatial averages of them over
multi-balls."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .functions import LocallyConstantFn, PiecewiseLinearFn
from .measure import cylinder_measure
from .space import (
    CirclePoint,
    MoHoC,
    MultiBall,
    ShiftPoint,
    ball_as_cylinder,
    multiball_dedupe,
    multiball_pairwise_disjoint,
)


# --- trajectories ----------------------------------------------------------


class Trajectory:
    """Values f(T_j x) split into a transient part and a cycle, with prefix
    sums so that any Birkhoff sum costs O(1)."""

    def __init__(self, head, cycle, head_points=None, cycle_points=None):
        self.head = head
        self.cycle = cycle
        self.head_points = head_points
        self.cycle_points = cycle_points
        self._hs = _prefix_sums(head)
        self._cs = _prefix_sums(cycle)

    def value(self, j):
        n = len(self.head)
        if j < n:
            return self.head[j]
        return self.cycle[(j - n) % len(self.cycle)]

    def point(self, j):
        n = len(self.head)
        if j < n:
            return self.head_points[j]
        return self.cycle_points[(j - n) % len(self.cycle)]

    def sum(self, k):
        n = len(self.head)
        if k <= n:
            return self._hs[k]
        q, r = divmod(k - n, len(self.cycle))
        return self._hs[n] + q * self._cs[-1] + self._cs[r]

    @property
    def limit(self):
        return self._cs[-1] / len(self.cycle)


def _prefix_sums(values):
    out = [Fraction(0)]
    for v in values:
        out.append(out[-1] + v)
    return out


@lru_cache(maxsize=4096)
def trajectory(f, x, b=2):
    if isinstance(x, ShiftPoint):
        if not isinstance(f, LocallyConstantFn):
            raise TypeError("shift points need a locally constant function")
        m, pre, per = f.depth, len(x.preperiod), len(x.period)
        seq = x.prefix(pre + per + m)
        vals = [f.on_word(seq[j:j + m]) for j in range(pre + per)]
        return Trajectory(vals[:pre], vals[pre:])
    if isinstance(x, CirclePoint):
        if not isinstance(f, PiecewiseLinearFn):
            raise TypeError("circle points need a piecewise linear function")
        seen = {}
        pts = []
        t = x.value
        while t not in seen:
            seen[t] = len(pts)
            pts.append(t)
            t = (t * b) % 1
        start = seen[t]
        vals = [f.value(p) for p in pts]
        return Trajectory(vals[:start], vals[start:], pts[:start], pts[start:])
    raise TypeError(f"unsupported point {x!r}")


def birkhoff_sum(f, x, k, b=2):
    if k < 0:
        raise ValueError("k must be nonnegative")
    return trajectory(f, x, b).sum(k)


def birkhoff_avg(f, x, k, b=2) -> Fraction:
    """(1/k) sum_{j<k} f(T_j x)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return birkhoff_sum(f, x, k, b) / k


def birkhoff_limit_periodic(f, x, b=2) -> Fraction:
    """Exact limit of the Birkhoff averages along the eventual cycle."""
    return trajectory(f, x, b).limit


def word_birkhoff_sums(f, word):
    """Running sums of f over the windows of a finite word (len - m + 1 of them)."""
    m = f.depth
    out = [Fraction(0)]
    for j in range(len(word) - m + 1):
        out.append(out[-1] + f.on_word(word[j:j + m]))
    return out


# --- spatial averages on the shift ----------------------------------------


def _antichain(words):
    words = sorted(set(words), key=len)
    keep = []
    for w in words:
        if not any(w[:len(u)] == u for u in keep):
            keep.append(w)
    return keep


def _step(dist, mu):
    A = len(dist)
    return tuple(sum(dist[a] * mu.row(a)[b] for a in range(A)) for b in range(A))


def _window_expectation(f, mu, known, dist):
    """E f(known + free) where the free symbols start with law `dist`
    (or follow known[-1] when dist is None) and continue as the chain."""
    m = f.depth
    L = m - len(known)
    if L == 0:
        return f.on_word(known)
    total = Fraction(0)
    for tail in product(range(mu.A), repeat=L):
        if dist is not None:
            p = dist[tail[0]]
        else:
            p = mu.row(known[-1])[tail[0]]
        for a, b in zip(tail, tail[1:]):
            if not p:
                break
            p *= mu.row(a)[b]
        if p:
            total += p * f.on_word(known + tail)
    return total


def cylinder_birkhoff_sum(mu, center: ShiftPoint, w, f, k):
    """sum_{j<k} of the conditional expectation of f o T_j on [w]."""
    d, m = len(w), f.depth
    direct = max(0, min(k, d - m + 1))
    total = trajectory(f, center).sum(direct)
    if direct == k:
        return total
    stationary = None
    dist = None
    for j in range(direct, k):
        if j < d:
            total += _window_expectation(f, mu, tuple(w[j:]), None)
            continue
        # window entirely in free coordinates; x_j has law dist
        if dist is None:
            dist = tuple(mu.pi0) if d == 0 else tuple(mu.row(w[-1]))
            for _ in range(j - d):
                dist = _step(dist, mu)
        if dist == tuple(mu.pi0):
            if stationary is None:
                stationary = _window_expectation(f, mu, (), dist)
            total += (k - j) * stationary
            break
        total += _window_expectation(f, mu, (), dist)
        dist = _step(dist, mu)
    return total


# --- spatial averages on the circle ----------------------------------------


def _interval_mean_sum(f, lo, hi, k, b):
    """sum_{j<k} mean of f o T_j over the real interval (lo, hi)."""
    total = Fraction(0)
    length = hi - lo
    scale = 1
    for _ in range(k):
        total += f.integral(scale * lo, scale * hi) / (scale * length)
        scale *= b
    return total


def ball_mean_sum(f: PiecewiseLinearFn, c: CirclePoint, r, k, b=2):
    """sum_{j<k} of the mean of f o T_j over the arc (c - r, c + r), r < 1/2.

    Along the orbit z_j of c the image arc is centred at z_j with half-width
    h_j = b^j r.  While no kink other than z_j lies within h_j the mean is
    f(z_j) + kink(z_j) h_j / 4 exactly; later steps integrate directly.
    """
    r = Fraction(r)
    traj = trajectory(f, c, b)
    orbit = list(traj.head_points) + list(traj.cycle_points)
    gap = min(f.kink_gap(z) for z in orbit)
    # first j with b^j r > gap
    bound = (gap / r).__floor__()
    J, power = 0, 1
    while J < k and power <= bound:
        power *= b
        J += 1
    total = traj.sum(J)
    if any(f.kink_at(z) for z in orbit):
        acc = Fraction(0)
        power = 1
        for j in range(J):
            kj = f.kink_at(traj.point(j))
            if kj:
                acc += power * kj
            power *= b
        total += acc * r / 4
    power = b ** J
    for j in range(J, k):
        z = traj.point(j)
        h = power * r
        if h <= f.kink_gap(z):
            total += f.value(z) + f.kink_at(z) * h / 4
        else:
            total += (f.antiderivative(z + h) - f.antiderivative(z - h)) / (2 * h)
        power *= b
    return total


def _merge_arcs(balls):
    ivs = []
    for c, r in balls:
        lo, hi = c.value - r, c.value + r
        ivs.append((lo, hi))
        # keep a copy shifted by one so wrap-around overlaps are caught
        ivs.append((lo + 1, hi + 1))
    ivs.sort()
    merged = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    # restrict to one period [s, s + 1) starting at the smallest left end
    s = merged[0][0]
    out = []
    for lo, hi in merged:
        if lo >= s + 1:
            break
        out.append((lo, min(hi, s + 1)))
    return out


# --- the spatial-temporal average -----------------------------------------


@dataclass(frozen=True)
class TSAvgSample:
    k: int
    C: MultiBall
    value: Fraction


def _shift_ts_sum(mu, C, f, k):
    cyl = {}
    for c, r in C:
        w = ball_as_cylinder(c, r)
        cyl.setdefault(w, c)
    words = _antichain(cyl)
    num = Fraction(0)
    den = Fraction(0)
    for w in words:
        m = cylinder_measure(mu, w)
        if m:
            num += m * cylinder_birkhoff_sum(mu, cyl[w], w, f, k)
            den += m
    return num, den


def _circle_ts_sum(C, f, k, b):
    if any(r >= Fraction(1, 2) for _, r in C):
        return k * f.total, Fraction(1)
    if multiball_pairwise_disjoint(C):
        num = sum(2 * r * ball_mean_sum(f, c, r, k, b) for c, r in C)
        den = sum(2 * r for _, r in C)
        return num, den
    num = Fraction(0)
    den = Fraction(0)
    for lo, hi in _merge_arcs(C):
        num += (hi - lo) * _interval_mean_sum(f, lo, hi, k, b)
        den += hi - lo
    return num, den


def spatial_temporal_avg(mu, C, f, k, b=2) -> TSAvgSample:
    """alpha_C(Avg_k f) = (1/mu(C)) int_C (1/k) sum_{j<k} f o T_j dmu."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not isinstance(C, MultiBall):
        C = MultiBall(C)
    C = multiball_dedupe(C)
    if mu.kind == "shift":
        num, den = _shift_ts_sum(mu, C, f, k)
    else:
        num, den = _circle_ts_sum(C, f, k, b)
    if den == 0:
        raise ValueError("multi-ball has measure zero")
    return TSAvgSample(k, C, num / (den * k))


class TSMeasure:
    """The functional f -> alpha_C(Avg_k f), viewed as a probability measure."""

    def __init__(self, mu, C, k, b=2):
        self.mu, self.C, self.k, self.b = mu, C, k, b
        self.kind = mu.kind

    def integrate(self, f):
        return spatial_temporal_avg(self.mu, self.C, f, self.k, self.b).value


def multiball_decompose(mu, C, f, k, b=2):
    """[(mu(B_h)/mu(C), alpha_{B_h}(Avg_k f))] for pairwise disjoint balls."""
    if not isinstance(C, MultiBall):
        C = MultiBall(C)
    if not multiball_pairwise_disjoint(C):
        raise ValueError("balls are not pairwise disjoint")
    from .measure import ball_measure

    masses = [ball_measure(mu, c, r) for c, r in C]
    if any(m == 0 for m in masses):
        raise ValueError("ball of measure zero")
    total = sum(masses)
    return [
        (m / total, spatial_temporal_avg(mu, MultiBall([(c, r)]), f, k, b).value)
        for m, (c, r) in zip(masses, C)
    ]


# --- rapid decay and Hölder bounds ----------------------------------------


@dataclass
class DecayReport:
    fractions: dict = field(default_factory=dict)  # (delta, h, k) -> Fraction
    max_radius: dict = field(default_factory=dict)  # k -> Fraction
    horizon: int = 0
    consistent: bool = False

    def fraction(self, delta, h, k):
        return self.fractions[(Fraction(delta), h, k)]


def _count_large(mohoc, r, delta, k):
    """|{j < k : L(j) r^H(j) > delta}| for L increasing and H = 1."""
    j, L = 0, Fraction(1)
    while j < k and L * r <= delta:
        j += 1
        L = mohoc.L(j)
    return k - j


def decay_fast_check(mohoc: MoHoC, radii, deltas, K) -> DecayReport:
    """Defining fractions of rapid decay (strict '>') for k <= K."""
    deltas = [Fraction(d) for d in deltas]
    rep = DecayReport(horizon=K)
    for k in range(1, K + 1):
        rs = [Fraction(r) for r in radii(k)]
        rep.max_radius[k] = max(rs)
        for d in deltas:
            for h, r in enumerate(rs):
                rep.fractions[(d, h, k)] = Fraction(_count_large(mohoc, r, d, k), k)
    half = max(1, K // 2)
    ok = K > 1 and rep.max_radius[K] < rep.max_radius[half]
    for (d, h, k), v in rep.fractions.items():
        if k == K:
            ok = ok and v <= rep.fractions[(d, h, half)] and v <= Fraction(1, 2)
    rep.consistent = ok
    return rep


def holder_gap_bound(c, beta, mohoc: MoHoC, k, r) -> Fraction:
    """(c/k) sum_{j<k} L(j)^beta r^beta for integer beta >= 1."""
    beta = Fraction(beta)
    if c <= 0 or beta <= 0 or beta.denominator != 1:
        raise ValueError("need c > 0 and a positive integer exponent")
    e = beta.numerator
    r = Fraction(r)
    return Fraction(c) * sum(mohoc.L(j) ** e for j in range(k)) * r ** e / k


def pointwise_reduction_gap(mu, x, r, f, k, b=2) -> Fraction:
    ts = spatial_temporal_avg(mu, MultiBall([(x, r)]), f, k, b).value
    return abs(ts - birkhoff_avg(f, x, k, b))


def blended_limit_predict(C_values, D_weights) -> Fraction:
    C = [Fraction(v) for v in C_values]
    D = [Fraction(v) for v in D_weights]
    if len(C) != len(D) or not D or any(d < 0 for d in D) or sum(D) != 1:
        raise ValueError("weights must be nonnegative, sum to 1 and match values")
    return sum(c * d for c, d in zip(C, D))
