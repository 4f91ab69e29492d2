"""Compilers for prescribed limit sets: scalar sandwiching between two
periodic limits, and chasing invariant measures with multi-balls."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count, product

from .averaging import (
    TSMeasure,
    birkhoff_avg,
    birkhoff_limit_periodic,
    spatial_temporal_avg,
)
from .measure import (
    Convex,
    InfeasibleRatios,
    PeriodicOrbit,
    ball_measure,
    target_ratios_circle,
    target_ratios_shift,
    weakstar_dist,
)
from .space import MultiBall, multiball_pairwise_disjoint


def as_fraction(v):
    if isinstance(v, float):
        return Fraction(str(v))
    return Fraction(v)


# --- schedules and dense enumerations --------------------------------------


def two_adic_valuation(k):
    return (k & -k).bit_length() - 1


def schedule_partition(class_count, k):
    """i(k) = 1 + v2(k); with finitely many classes the last absorbs the rest."""
    if k < 1:
        raise ValueError("k must be >= 1")
    i = 1 + two_adic_valuation(k)
    if class_count is not None:
        if class_count < 1:
            raise ValueError("need at least one class")
        i = min(i, class_count)
    return i


def fiber_element(class_count, i, ell):
    """The ell-th k (1-based) with schedule_partition(class_count, k) == i."""
    if ell < 1 or i < 1:
        raise ValueError("indices start at 1")
    if class_count is not None and i == class_count:
        return ell * 2 ** (i - 1)
    return 2 ** (i - 1) * (2 * ell - 1)


def fiber_index(class_count, k):
    """(i, ell) with fiber_element(class_count, i, ell) == k."""
    i = schedule_partition(class_count, k)
    q = k >> (i - 1)
    if class_count is not None and i == class_count:
        return i, q
    return i, (q + 1) // 2


def dyadic_bfs(idx):
    """0, 1, 1/2, 1/4, 3/4, 1/8, 3/8, ... (0-based index)."""
    if idx == 0:
        return Fraction(0)
    if idx == 1:
        return Fraction(1)
    idx -= 2
    level = 1
    while idx >= 2 ** (level - 1):
        idx -= 2 ** (level - 1)
        level += 1
    return Fraction(2 * idx + 1, 2 ** level)


@dataclass(frozen=True)
class TargetSetK:
    """Finite union of closed intervals (lo, hi) and points (p,)."""

    components: tuple

    def __init__(self, components):
        comps = []
        for c in components:
            if isinstance(c, (list, tuple)) and len(c) == 2:
                lo, hi = as_fraction(c[0]), as_fraction(c[1])
                if lo > hi:
                    raise ValueError("interval with lo > hi")
                comps.append((lo, hi) if lo < hi else (lo,))
            elif isinstance(c, (list, tuple)) and len(c) == 1:
                comps.append((as_fraction(c[0]),))
            else:
                comps.append((as_fraction(c),))
        if not comps:
            raise ValueError("target set must be nonempty")
        object.__setattr__(self, "components", tuple(comps))

    @property
    def points_only(self):
        return all(len(c) == 1 for c in self.components)

    @property
    def lo(self):
        return min(c[0] for c in self.components)

    @property
    def hi(self):
        return max(c[-1] for c in self.components)

    def distinct_points(self):
        out = []
        for c in self.components:
            if c[0] not in out:
                out.append(c[0])
        return out


def dense_enumerate(K: TargetSetK, i):
    """p_i (1-based): round-robin over components, dyadic BFS in intervals."""
    if i < 1:
        raise ValueError("i must be >= 1")
    comps = K.components
    comp = comps[(i - 1) % len(comps)]
    idx = (i - 1) // len(comps)
    if len(comp) == 1:
        return comp[0]
    lo, hi = comp
    return lo + (hi - lo) * dyadic_bfs(idx)


# --- limit-set estimate -----------------------------------------------------


@dataclass(frozen=True)
class LimitSetEstimate:
    centers: tuple
    multiplicities: tuple
    eps: Fraction
    tail_start: int

    def __len__(self):
        return len(self.centers)


def limit_set_estimate(series, eps, tail_fraction=Fraction(1, 2)) -> LimitSetEstimate:
    """Greedy cover of the tail values by clusters of width at most 2 eps;
    each center (midpoint of its members) lies within eps of them."""
    eps = as_fraction(eps)
    tail_fraction = as_fraction(tail_fraction)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail fraction must lie in (0, 1]")
    values = [as_fraction(v) for v in series]
    if not values:
        raise ValueError("empty series")
    n = len(values)
    take = -(-n * tail_fraction.numerator // tail_fraction.denominator)
    start = n - take
    tail = sorted(values[start:])
    centers, mult = [], []
    i = 0
    while i < len(tail):
        j = i
        while j < len(tail) and tail[j] <= tail[i] + 2 * eps:
            j += 1
        centers.append((tail[i] + tail[j - 1]) / 2)
        mult.append(j - i)
        i = j
    return LimitSetEstimate(tuple(centers), tuple(mult), eps, start + 1)


# --- sandwiching ------------------------------------------------------------


@dataclass
class BlendStep:
    k: int
    i: int
    p: Fraction
    lam: Fraction
    t: Fraction
    delta: Fraction
    radii: tuple
    value: Fraction
    bound: Fraction
    loose_bound: Fraction
    certificates: dict

    @property
    def ok(self):
        return all(self.certificates.values())


@dataclass
class BlendSchedule:
    x: object
    y: object
    u: Fraction
    v: Fraction
    K: TargetSetK
    steps: list = field(default_factory=list)

    @property
    def series(self):
        return [s.value for s in self.steps]

    @property
    def ok(self):
        return all(s.ok for s in self.steps)


def _cap(k, Lambda, lipschitz=1):
    """delta_k with max_{j<k} Lambda^j delta_k = 1/(2k lip) < 1/k."""
    return Fraction(1, 2 * k) / (max(Fraction(1), Fraction(lipschitz)) * Fraction(Lambda) ** (k - 1))


def _depth_below(delta):
    """Smallest d with 2^-d < delta."""
    d = 0
    while Fraction(1, 2 ** d) >= delta:
        d += 1
    return d


def _blend_weight(lam, k):
    if 0 < lam < 1:
        return lam
    return Fraction(k, k + 1) if lam == 1 else Fraction(1, k + 1)


def sandwich_compile(mu, x, y, f, K, horizon, b=2, depth_span=16) -> BlendSchedule:
    """Radii (r_k, s_k) about x and y whose spatial-temporal averages have
    limit set K, a subset of [u, v] with u, v the Birkhoff limits at x, y."""
    if not isinstance(K, TargetSetK):
        K = TargetSetK(K)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if x == y:
        raise ValueError("x and y must differ")
    u = birkhoff_limit_periodic(f, x, b)
    v = birkhoff_limit_periodic(f, y, b)
    if u > v:
        raise ValueError(f"need u <= v, got u={u}, v={v}; swap x and y")
    if K.lo < u or K.hi > v:
        raise ValueError(f"target set not inside [{u}, {v}]")
    classes = len(K.distinct_points()) if K.points_only else None
    if classes is not None:
        K = TargetSetK(K.distinct_points())
    plan = BlendSchedule(x, y, u, v, K)
    circle = mu.kind == "circle"
    for k in range(1, horizon + 1):
        i = schedule_partition(classes, k)
        p = dense_enumerate(K, i)
        lam = (v - p) / (v - u) if v > u else Fraction(1, 2)
        certs = {}
        if circle:
            delta = _cap(k, b, f.lipschitz)
            t = _blend_weight(lam, k)
            r, s = target_ratios_circle([x, y], [t, 1 - t], [delta, delta])
            mx, my = ball_measure(mu, x, r), ball_measure(mu, y, s)
            certs["ratio_exact"] = mx / (mx + my) == t
        else:
            delta = _cap(k, 2)
            depth = max(k + f.depth - 1, _depth_below(delta))
            t0 = _blend_weight(lam, k)
            try:
                res = target_ratios_shift(mu, [x, y], [t0, 1 - t0], Fraction(2, k),
                                          depth + depth_span, min_depth=depth)
            except InfeasibleRatios as exc:
                raise InfeasibleRatios(f"step k={k}: {exc}", best=exc.best) from None
            t = res.ratios[0]
            r, s = (Fraction(1, 2 ** d) for d in res.depths)
            certs["ratio_exact"] = ball_measure(mu, x, r) / (
                ball_measure(mu, x, r) + ball_measure(mu, y, s)) == t
        C = MultiBall([(x, r), (y, s)])
        certs["weight_within_1/k"] = abs(t - lam) <= Fraction(1, k)
        certs["radii_below_cap"] = r < delta and s < delta
        certs["cap_holder"] = Fraction(b if circle else 2) ** (k - 1) * delta < Fraction(1, k)
        certs["disjoint"] = multiball_pairwise_disjoint(C)
        value = spatial_temporal_avg(mu, C, f, k, b).value
        ax, ay = birkhoff_avg(f, x, k, b), birkhoff_avg(f, y, k, b)
        slack = abs(u - ax) + abs(v - ay)
        bound = (abs(u) + abs(v) + 1) / k + slack
        loose = (abs(u) + abs(v) + 2) / k + slack
        certs["series_bound"] = abs(value - p) <= bound
        plan.steps.append(BlendStep(k, i, p, lam, t, delta, (r, s), value, bound, loose, certs))
    return plan


# --- measure chasing --------------------------------------------------------


def lyndon_words(A=2):
    """Primitive necklace representatives in length-then-lexicographic order."""
    for n in count(1):
        for w in product(range(A), repeat=n):
            if all(w < w[i:] + w[:i] for i in range(1, n)):
                yield w


def stern_brocot(depth):
    """Fractions of the Stern-Brocot tree on (0, 1) down to `depth`, level order."""
    out = []
    frontier = [(0, 1, 1, 1)]  # (a, b, c, d): interval a/b .. c/d
    for _ in range(depth):
        nxt = []
        for a, b, c, d in frontier:
            m = Fraction(a + c, b + d)
            out.append(m)
            nxt.append((a, b, a + c, b + d))
            nxt.append((a + c, b + d, c, d))
        frontier = nxt
    return out


def dense_orbits(kind="shift", b=2, A=2):
    """Periodic-orbit measures in length-lex order of their Lyndon words; on
    the circle the all-(b-1) words duplicate the fixed point 0 and are skipped."""
    alphabet = b if kind == "circle" else A
    for w in lyndon_words(alphabet):
        if kind == "circle" and len(w) and all(a == b - 1 for a in w):
            continue
        yield PeriodicOrbit(w, kind=kind, b=b, A=alphabet)


def enumerate_dense_measures(kind="shift", b=2, A=2):
    """The countable family of rational convex combinations of periodic-orbit
    measures, by levels L = 1, 2, ...: the L-th orbit, then the pairs among
    the first L orbits with Stern-Brocot weights of depth < L."""
    orbits = []
    source = dense_orbits(kind, b, A)
    seen = set()
    for L in count(1):
        orbits.append(next(source))
        batch = [Convex([1], [orbits[-1]])]
        weights = stern_brocot(L - 1)
        for hi in range(1, L):
            for lo in range(hi):
                for s in weights:
                    batch.append(Convex([s, 1 - s], [orbits[lo], orbits[hi]]))
        for nu in batch:
            key = nu.key()
            if key not in seen:
                seen.add(key)
                yield nu


@dataclass(frozen=True)
class FiniteHull:
    thetas: tuple
    weights: tuple

    def __init__(self, thetas, weights):
        thetas = tuple(thetas)
        if len(set(thetas)) != len(thetas):
            raise ValueError("duplicate orbit measures")
        ws = []
        for vec in weights:
            vec = tuple(as_fraction(v) for v in vec)
            if len(vec) != len(thetas) or any(v < 0 for v in vec) or sum(vec) != 1:
                raise ValueError("weight vectors must be nonnegative and sum to 1")
            ws.append(vec)
        if not ws:
            raise ValueError("need at least one weight vector")
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "weights", tuple(ws))

    @property
    def class_count(self):
        return len(self.weights)

    def target(self, i):
        vec = self.weights[i - 1]
        pairs = [(w, th) for w, th in zip(vec, self.thetas) if w > 0]
        return Convex([w for w, _ in pairs], [th for _, th in pairs])


class WholeSimplex:
    """Cursor over the enumeration of the dense family."""

    class_count = None

    def __init__(self, kind="circle", b=2, A=2):
        self.kind, self.b, self.A = kind, b, A
        self._gen = enumerate_dense_measures(kind, b, A)
        self._cache = []

    def target(self, i):
        while len(self._cache) < i:
            self._cache.append(next(self._gen))
        return self._cache[i - 1]


@dataclass
class ChaseStep:
    k: int
    i: int
    centers: tuple
    radii: tuple
    t: tuple
    lam: tuple
    certificates: dict

    @property
    def multiball(self):
        return MultiBall(zip(self.centers, self.radii))

    @property
    def ok(self):
        return all(self.certificates.values())


@dataclass
class DistRow:
    i: int
    ell: int
    k: int
    lo: Fraction
    hi: Fraction
    envelope: Fraction = None  # max of hi over this and every later checkpoint


@dataclass
class ChaseResult:
    steps: list
    table: list
    targets: dict

    @property
    def ok(self):
        return all(s.ok for s in self.steps)

    def rows(self, i):
        return [r for r in self.table if r.i == i]


def _balls_for(mu, centers, lam, k, b, depth_span):
    n = len(centers)
    if mu.kind == "circle":
        delta = _cap(k, b)
        t = tuple(lam)
        radii = tuple(target_ratios_circle(centers, t, [delta] * n))
        return delta, t, radii
    delta = _cap(k, 2)
    depth = _depth_below(delta)
    if n == 1:
        return delta, (Fraction(1),), (Fraction(1, 2 ** depth),)
    res = target_ratios_shift(mu, centers, lam, Fraction(1, k), depth + depth_span, min_depth=depth)
    return delta, res.ratios, tuple(Fraction(1, 2 ** d) for d in res.depths)


def default_checkpoints(class_count, i, horizon):
    """ell = 1, 2, 4, ... and the last ell whose step fits the horizon."""
    ells = []
    ell = 1
    while fiber_element(class_count, i, ell) <= horizon:
        ells.append(ell)
        ell *= 2
    last = 0
    lo, hi = 1, horizon
    while lo <= hi:
        mid = (lo + hi) // 2
        if fiber_element(class_count, i, mid) <= horizon:
            last, lo = mid, mid + 1
        else:
            hi = mid - 1
    if last and last not in ells:
        ells.append(last)
    return ells


def _dist_table(mu, steps, targets, classes, class_count, horizon, b, M, A):
    table = []
    by_k = {s.k: s for s in steps}
    for i in classes:
        nu = targets[i]
        for ell in default_checkpoints(class_count, i, horizon):
            k = fiber_element(class_count, i, ell)
            step = by_k[k]
            ts = TSMeasure(mu, step.multiball, k, b)
            enc = weakstar_dist(ts, nu, M, A=A)
            table.append(DistRow(i, ell, k, enc.lo, enc.hi))
    for i in classes:
        env = None
        for row in reversed([r for r in table if r.i == i]):
            env = row.hi if env is None else max(env, row.hi)
            row.envelope = env
    return table


def chase_compile(mu, target, horizon, b=2, M=6, classes=None, depth_span=12) -> ChaseResult:
    """Multi-balls C_k around typical points of the scheduled target's orbits,
    weighted as the target, with a weak* distance table along each fiber."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    class_count = target.class_count
    if classes is None:
        classes = range(1, class_count + 1) if class_count is not None else range(1, 5)
    classes = list(classes)
    A = getattr(target, "A", None) or getattr(mu, "A", 2)
    steps = []
    targets = {}
    for k in range(1, horizon + 1):
        i = schedule_partition(class_count, k)
        nu = targets.setdefault(i, target.target(i))
        lam = nu.weights
        centers = [th.typical_point for th in nu.parts]
        if len(set(centers)) != len(centers):
            raise ValueError("orbit measures share a typical point")
        delta, t, radii = _balls_for(mu, centers, lam, k, b, depth_span)
        certs = {
            "weights_within_1/k": sum(abs(a - c) for a, c in zip(t, lam)) < Fraction(1, k),
            "radii_below_cap": all(r < delta for r in radii),
            "disjoint": multiball_pairwise_disjoint(MultiBall(zip(centers, radii))),
        }
        masses = [ball_measure(mu, c, r) for c, r in zip(centers, radii)]
        certs["weights_exact"] = tuple(m / sum(masses) for m in masses) == tuple(t)
        steps.append(ChaseStep(k, i, tuple(centers), radii, tuple(t), tuple(lam), certs))
    for i in classes:
        targets.setdefault(i, target.target(i))
    table = _dist_table(mu, steps, targets, classes, class_count, horizon, b, M, A)
    return ChaseResult(steps, table, targets)


def extreme_points_chase(mu, targets, horizon, b=2, M=6) -> ChaseResult:
    """Single balls B(x_k; r_k) centred at the scheduled orbit's periodic point."""
    uniq = []
    for th in targets:
        if th not in uniq:
            uniq.append(th)
    n = len(uniq)
    steps = []
    for k in range(1, horizon + 1):
        i = schedule_partition(n, k)
        c = uniq[i - 1].typical_point
        delta, t, radii = _balls_for(mu, [c], [Fraction(1)], k, b, 0)
        steps.append(ChaseStep(k, i, (c,), radii, t, (Fraction(1),),
                               {"radii_below_cap": radii[0] < delta}))
    nus = {i: uniq[i - 1].as_convex() for i in range(1, n + 1)}
    A = getattr(mu, "A", 2)
    table = _dist_table(mu, steps, nus, range(1, n + 1), n, horizon, b, M, A)
    return ChaseResult(steps, table, nus)
