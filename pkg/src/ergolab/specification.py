"""Specification machinery: moduli, delta-tracing points, sampling
polynomials, block plans and the greedy oscillation-point compiler."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, isqrt

from .functions import LocallyConstantFn, shift_family
from .measure import Convex, PeriodicOrbit, WeakStarInterval
from .space import SFT, ShiftPoint, rho, shift_apply


# --- moduli -----------------------------------------------------------------


def tracing_depth(delta) -> int:
    """d(delta) = min{d >= 0 : 2^-(d+1) < delta}."""
    delta = Fraction(delta)
    if not 0 < delta:
        raise ValueError("delta must be positive")
    d = 0
    while Fraction(1, 2 ** (d + 1)) >= delta:
        d += 1
    return d


@dataclass(frozen=True)
class SpecModulus:
    """Gap requirement j -> M(j); constant unless `gaps` is given."""

    delta: Fraction
    depth: int
    constant: int
    gaps: tuple = ()

    def gap(self, j):
        if self.gaps:
            return self.gaps[min(j, len(self.gaps)) - 1]
        return self.constant

    @property
    def M(self):
        return self.constant


def modulus_full_shift(delta) -> SpecModulus:
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    d = tracing_depth(delta)
    return SpecModulus(delta, d, d + 1)


def modulus_sft(sft: SFT, delta) -> SpecModulus:
    """Full shift: d + 1.  Proper mixing SFT: d + 1 + primitivity index."""
    base = modulus_full_shift(delta)
    if sft.is_full():
        return base
    p = sft.primitivity_index()
    if p is None:
        raise ValueError("subshift is not mixing; no constant modulus")
    return SpecModulus(base.delta, base.depth, base.constant + p)


def modulus_custom(delta, gaps) -> SpecModulus:
    """User-supplied per-index gaps M(1), M(2), ... (last value repeats)."""
    delta = Fraction(delta)
    gaps = tuple(int(g) for g in gaps)
    if not gaps or any(g < 0 for g in gaps):
        raise ValueError("gaps must be a nonempty list of nonnegative integers")
    return SpecModulus(delta, tracing_depth(delta), max(gaps), gaps)


# --- specifications and tracing --------------------------------------------


@dataclass(frozen=True)
class SpecificationPlan:
    segments: tuple  # ((a, b, x), ...)

    def __init__(self, segments):
        segs = []
        for a, b, x in segments:
            if not isinstance(x, ShiftPoint):
                raise TypeError("segment points must be shift points")
            a, b = int(a), int(b)
            if b < a:
                raise ValueError("segment with b < a")
            if segs and a <= segs[-1][1]:
                raise ValueError("segments must be strictly increasing")
            segs.append((a, b, x))
        if not segs:
            raise ValueError("empty specification")
        if segs[0][0] < 0:
            raise ValueError("a_1 must be nonnegative")
        object.__setattr__(self, "segments", tuple(segs))

    def __len__(self):
        return len(self.segments)

    def is_spaced(self, modulus: SpecModulus):
        return all(a - pb >= modulus.gap(j)
                   for j, ((_, pb, _), (a, _, _)) in enumerate(zip(self.segments, self.segments[1:]), 2))


def _exact_paths(sft, target, steps):
    """reach[t][s]: s reaches `target` in exactly t steps."""
    A = sft.A
    reach = [[s == target for s in range(A)]]
    for _ in range(steps):
        prev = reach[-1]
        reach.append([any(prev[b] for b in sft.successors(s)) for s in range(A)])
    return reach


def _connect(sft, start, target, steps):
    """Least symbols filling the open gap of a path start -> target of `steps` steps."""
    reach = _exact_paths(sft, target, steps)
    if not reach[steps][start]:
        raise ValueError(f"no connecting path of length {steps} from {start} to {target}")
    out, s = [], start
    for t in range(steps - 1, 0, -1):
        s = next(b for b in sft.successors(s) if reach[t][b])
        out.append(s)
    return out


def _lead_in(sft, target, length):
    """Least-predecessor walk of `length` symbols ending just before `target`."""
    out, s = [], target
    for _ in range(length):
        s = next(a for a in range(sft.A) if sft.allowed(a, s))
        out.append(s)
    return out[::-1]


def _tail(sft, last):
    """Eventually periodic continuation by least successors."""
    seen, walk, s = {}, [], last
    while s not in seen:
        seen[s] = len(walk)
        walk.append(s)
        s = sft.successors(s)[0]
    i = seen[s]
    if i == 0:
        return [], walk[1:] + walk[:1]
    return walk[1:i], walk[i:]


def trace_point(xi: SpecificationPlan, delta, modulus: SpecModulus | None = None, sft: SFT | None = None) -> ShiftPoint:
    """Copy x_j onto positions a_j .. b_j + d(delta), connect the gaps and end
    in an eventually periodic tail (0^inf on the full shift)."""
    delta = Fraction(delta)
    if sft is None:
        A = max(max(x.preperiod + x.period) for _, _, x in xi.segments) + 1
        sft = SFT.full(max(A, 2))
    if modulus is None:
        modulus = modulus_sft(sft, delta)
    d = tracing_depth(delta)
    p = 1 if sft.is_full() else sft.primitivity_index()
    if p is None:
        raise ValueError("subshift is not mixing; connectors need not exist")
    segs = xi.segments
    for j, ((_, pb, _), (a, _, _)) in enumerate(zip(segs, segs[1:]), 2):
        need = max(modulus.gap(j), d + p)
        if a - pb < need:
            raise ValueError(f"spacing violated at segment {j}: gap {a - pb} < {need}")
    for _, _, x in segs:
        if not sft.point_admissible(x):
            raise ValueError(f"segment point {x} is not in the subshift")
    word = []
    for idx, (a, b, x) in enumerate(segs):
        block = list(x.prefix(b - a + d + 1))
        if idx == 0:
            word.extend(_lead_in(sft, block[0], a))
        else:
            word.extend(_connect(sft, word[-1], block[0], a - len(word) + 1))
        word.extend(block)
    head, cycle = _tail(sft, word[-1])
    return ShiftPoint(word + head, cycle)


def is_delta_tracing(y: ShiftPoint, xi: SpecificationPlan, delta) -> bool:
    delta = Fraction(delta)
    for a, b, x in xi.segments:
        for i in range(b - a + 1):
            if rho(shift_apply(i, x), shift_apply(a + i, y)) >= delta:
                return False
    return True


# --- sampling polynomials ---------------------------------------------------


def _poly_eval(coeffs, t):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def _cauchy_bound(coeffs):
    """All real roots lie in |t| < 1 + max |a_i / a_n|."""
    lead = coeffs[-1]
    return 1 + max((abs(c / lead) for c in coeffs[:-1]), default=Fraction(0))


@dataclass(frozen=True)
class SamplingPoly:
    binomial: tuple  # pi(t) = sum_j c_j C(t, j)
    monomial: tuple  # rational coefficients, lowest degree first
    k_min: int       # pi strictly increasing on k >= k_min
    label: str = ""

    @property
    def degree(self):
        return len(self.binomial) - 1

    def __call__(self, k):
        return sum(c * comb(k, j) for j, c in enumerate(self.binomial))

    def __str__(self):
        return self.label or "+".join(f"{c}*C(t,{j})" for j, c in enumerate(self.binomial) if c)

    def largest_k_below(self, T):
        """Largest k >= k_min with pi(k) <= T, or None."""
        if self(self.k_min) > T:
            return None
        lo, hi = self.k_min, self.k_min
        while self(hi) <= T:
            lo, hi = hi, 2 * hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self(mid) <= T:
                lo = mid
            else:
                hi = mid
        return lo


def sampling_poly_validate(coeffs, label="") -> SamplingPoly:
    """Accept integer-valued, nonconstant pi with pi(k) >= 1 for all k >= 1."""
    c = [Fraction(v) for v in coeffs]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    n = len(c) - 1
    if n < 1:
        raise ValueError("sampling polynomial must be nonconstant")
    # finite differences at 0 give the binomial-basis coefficients
    vals = [_poly_eval(c, t) for t in range(n + 1)]
    binom = []
    for _ in range(n + 1):
        binom.append(vals[0])
        vals = [b - a for a, b in zip(vals, vals[1:])]
    if any(v.denominator != 1 for v in binom):
        raise ValueError("polynomial is not integer valued")
    if c[-1] <= 0:
        raise ValueError("polynomial takes negative values on N")
    shifted = c[:]
    shifted[0] -= 1
    R = _cauchy_bound(shifted) if n else Fraction(0)
    for k in range(1, int(R) + 2):
        if _poly_eval(c, k) < 1:
            raise ValueError(f"pi({k}) = {_poly_eval(c, k)} < 1")
    # pi(t+1) - pi(t) has degree n-1 and positive leading coefficient
    diff = [Fraction(0)] * n
    for j, a in enumerate(c):
        for i in range(j):
            diff[i] += a * comb(j, i)
    k_min = 1
    if n > 1:
        Rd = int(_cauchy_bound(diff)) + 1
        for k in range(Rd, 0, -1):
            if _poly_eval(diff, k) <= 0:
                k_min = k + 1
                break
    return SamplingPoly(tuple(int(v) for v in binom), tuple(c), k_min, label)


def parse_poly(text) -> SamplingPoly:
    """Parse a polynomial in t such as "t^2" or "t(t+1)/2"."""
    import sympy
    from sympy.parsing.sympy_parser import (
        implicit_multiplication_application,
        parse_expr,
        standard_transformations,
    )

    t = sympy.Symbol("t")
    src = str(text).strip()
    try:
        expr = parse_expr(src.replace("^", "**"), local_dict={"t": t},
                          transformations=standard_transformations + (implicit_multiplication_application,))
        poly = sympy.Poly(sympy.expand(expr), t)
    except Exception as exc:  # sympy raises a zoo of exception types
        raise ValueError(f"bad polynomial {text!r}: {exc}") from None
    if poly.free_symbols - {t}:
        raise ValueError(f"polynomial {text!r} has symbols other than t")
    coeffs = [Fraction(int(sympy.fraction(a)[0]), int(sympy.fraction(a)[1]))
              for a in reversed(poly.all_coeffs())]
    return sampling_poly_validate(coeffs, label=src)


# --- finite-word empirical measures ----------------------------------------


class WordEmpirical:
    """Empirical measure of the first T shifts of a finite word (windows must fit)."""

    kind = "shift"

    def __init__(self, word, T):
        self.word = tuple(word)
        self.T = T
        self._counts = {}

    def window_counts(self, m):
        if m not in self._counts:
            if self.T + m - 1 > len(self.word):
                raise ValueError("word too short for this window")
            w = self.word
            self._counts[m] = Counter(w[j:j + m] for j in range(self.T))
        return self._counts[m]

    def integrate(self, f):
        counts = self.window_counts(f.depth)
        return sum((f.on_word(u) * n for u, n in counts.items()), Fraction(0)) / self.T


def word_sums(word, f):
    """Prefix sums S_T = sum_{j<T} f(word[j:j+m]) for every T that fits."""
    m = f.depth
    out = [Fraction(0)]
    acc = Fraction(0)
    for j in range(len(word) - m + 1):
        acc += f.on_word(word[j:j + m])
        out.append(acc)
    return out


def _as_weights(nu):
    """(p_i, q, thetas) with nu = sum (p_i / q) theta_i."""
    nu = nu.as_convex() if isinstance(nu, PeriodicOrbit) else nu
    if not isinstance(nu, Convex) or any(not isinstance(th, PeriodicOrbit) or th.kind != "shift" for th in nu.parts):
        raise ValueError("target must be a convex combination of shift periodic orbits")
    q = 1
    for w in nu.weights:
        q = q * w.denominator // _gcd(q, w.denominator)
    return [int(w * q) for w in nu.weights], q, list(nu.parts)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def segment_table(P, N, K, p):
    """Explicit block positions after a prefix of length P (P = 1 is the
    single-coordinate prefix segment [0, 0])."""
    segs = []
    acc = 0
    for i, pi in enumerate(p):
        a = (P - 1) + (i + 1) * N + K * acc
        acc += pi
        b = (P - 1) + (i + 1) * N - 1 + K * acc
        segs.append((a, b))
    return segs


def _uniform_delta(functions):
    """delta with rho < delta forcing equal values of every (locally constant) f_h."""
    L = max(f.depth for f in functions)
    return Fraction(1, 2 ** L)


# --- block plans ------------------------------------------------------------


@dataclass
class BlockCheck:
    k: int
    pi_k: int
    K: int
    errors: list          # |Avg_{pi(k)} f_h(y) - int f_h dnu|
    claim_i: list         # (value, bound)
    claim_ii: list
    claim_iii: list

    @property
    def ok(self):
        return all(v <= b for v, b in self.claim_i) and all(
            v < b for v, b in self.claim_ii) and all(v <= b for v, b in self.claim_iii)


@dataclass
class OscillationPlan:
    nu: object
    eps: Fraction
    functions: list
    pi: SamplingPoly
    p: list
    q: int
    thetas: list
    N: int
    delta: Fraction
    x: ShiftPoint
    threshold: int
    k0: int
    checks: dict = field(default_factory=dict)

    @property
    def I(self):
        return len(self.p)

    def K(self, k):
        return (self.pi(k) - self.I * self.N - 1) // self.q

    def segments(self, K):
        return segment_table(1, self.N, K, self.p)

    def specification(self, K):
        segs = [(0, 0, self.x)]
        for (a, b), th in zip(self.segments(K), self.thetas):
            segs.append((a, b, th.typical_point))
        return SpecificationPlan(segs)

    def point(self, K):
        return trace_point(self.specification(K), self.delta, modulus_full_shift(self.delta))

    def evaluate(self, k) -> BlockCheck:
        K = self.K(k)
        if K < 1:
            raise ValueError(f"pi({k}) too small for a block")
        T = self.pi(k)
        y = self.point(K)
        word = y.prefix(T + max(f.depth for f in self.functions))
        segs = self.segments(K)
        osc_bound_n = (2 * self.I * self.N + self.q + 2)
        errors, ci, cii, ciii = [], [], [], []
        for f in self.functions:
            S = word_sums(word, f)
            avg = S[T] / T
            target = self.nu.integrate(f)
            errors.append(abs(avg - target))
            block = sum(S[b + 1] - S[a] for a, b in segs) / (K * self.q)
            factor = 1 if f.nonnegative else 2
            ci.append((abs(avg - block), factor * osc_bound_n * f.max_abs / T))
            ideal = sum(Fraction(pi, self.q) * _orbit_window_avg(f, th, K * pi)
                        for pi, th in zip(self.p, self.thetas))
            cii.append((abs(block - ideal), self.eps / 3))
            ciii.append((abs(ideal - target), _claim_iii_bound(f, self.thetas, K, self.q)))
        return BlockCheck(k, T, K, errors, ci, cii, ciii)


def _orbit_window_avg(f, theta, L):
    from .averaging import birkhoff_avg

    return birkhoff_avg(f, theta.typical_point, L)


def _claim_iii_bound(f, thetas, K, q):
    osc = f.max - f.min
    return sum(len(th.word) - 1 for th in thetas) * osc / (K * q)


def block_plan(nu, eps, H, k0, pi: SamplingPoly, delta=None, functions=None, x=None, A=2) -> OscillationPlan:
    """Plan of specifications xi^(K) whose tracing points have pi(k)-averages
    eps-close to int f_h dnu for h <= H once k passes the reported threshold."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    p, q, thetas = _as_weights(nu)
    nu = nu.as_convex()
    fs = list(functions) if functions is not None else shift_family(H, A)
    if not all(isinstance(f, LocallyConstantFn) for f in fs):
        raise TypeError("block plans use locally constant functions")
    need = _uniform_delta(fs)
    delta = need if delta is None else min(Fraction(delta), need)
    N = modulus_full_shift(delta).M
    I = len(p)
    x = x if x is not None else ShiftPoint((), (0,))
    k = max(1, k0, pi.k_min)
    while (pi(k) - I * N - 1) // q < 1:
        k += 1
    trivial = all(eps > f.max - f.min for f in fs)
    if not trivial:
        # both analytic bounds fall like 1/pi(k) and 1/K; walk to the first k meeting eps/3
        def fine(k):
            K = (pi(k) - I * N - 1) // q
            T = pi(k)
            for f in fs:
                factor = 1 if f.nonnegative else 2
                if factor * (2 * I * N + q + 2) * f.max_abs / T > eps / 3:
                    return False
                if _claim_iii_bound(f, thetas, K, q) > eps / 3:
                    return False
            return True

        step = 1
        while not fine(k + step - 1):
            step *= 2
        lo, hi = k + step // 2 - 1 if step > 1 else k, k + step - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if fine(mid):
                hi = mid
            else:
                lo = mid + 1
        k = lo
    plan = OscillationPlan(nu, eps, fs, pi, p, q, thetas, N, delta, x, k, k0)
    return plan


# --- oscillation compiler ---------------------------------------------------


@dataclass
class Checkpoint:
    ell: int
    poly: str
    k: int
    pi_k: int
    lo: Fraction
    hi: Fraction

    @property
    def bound(self):
        return Fraction(1, self.ell)

    @property
    def certified(self):
        return self.hi < self.bound


@dataclass
class OscillationResult:
    prefix: tuple
    checkpoints: list
    blocks: list  # (ell, start, end, K)

    @property
    def ok(self):
        return all(c.certified for c in self.checkpoints)

    def prefix_str(self):
        from .space import format_word

        return format_word(self.prefix)


def checkpoint_M(ell):
    """ceil(log2(4 ell))."""
    return (4 * ell - 1).bit_length()


def _dist_word(word, T, nu, M, A):
    fam = shift_family(M, A)
    emp = WordEmpirical(word, T)
    s = Fraction(0)
    for h, f in enumerate(fam, 1):
        s += min(abs(emp.integrate(f) - nu.integrate(f)), Fraction(1)) / 2 ** h
    return WeakStarInterval(s, s + Fraction(1, 2 ** M), M)


def _family_delta(M, A):
    return _uniform_delta(shift_family(M, A))


def oscillation_compile(targets, Pi, horizon, growth=12, A=2, max_doublings=24) -> OscillationResult:
    """Greedy prefix: for ell = 1, 2, ... append a gap and a block realising
    nu_ell (scheduled cyclically from `targets`) until every polynomial in Pi
    has a sample time inside the block with dist(mu_{x, pi(k)}, nu_ell) < 1/ell.
    Committed symbols are never changed."""
    if not targets:
        raise ValueError("need at least one target")
    if not Pi:
        raise ValueError("need at least one sampling polynomial")
    targets = [t.as_convex() for t in targets]
    prefix = []
    checkpoints, blocks = [], []
    ell = 0
    while len(prefix) < horizon:
        ell += 1
        nu = targets[(ell - 1) % len(targets)]
        p, q, thetas = _as_weights(nu)
        M = checkpoint_M(ell)
        delta = _family_delta(M, A)
        N = modulus_full_shift(delta).M
        P = len(prefix)
        K = max(1, -(-growth * P // q))
        for _ in range(max_doublings):
            segs = segment_table(P, N, K, p)
            spec = [(0, P - 1, ShiftPoint(prefix, (0,)))] if P else []
            spec += [(a, b, th.typical_point) for (a, b), th in zip(segs, thetas)]
            y = trace_point(SpecificationPlan(spec), delta, modulus_full_shift(delta))
            end = segs[-1][1]
            word = y.prefix(end + tracing_depth(delta) + 1)
            assert list(word[:P]) == prefix
            rows = []
            for poly in Pi:
                k = poly.largest_k_below(end + 1)
                if k is None:
                    rows = None
                    break
                T = poly(k)
                enc = _dist_word(word, T, nu, M, A)
                rows.append(Checkpoint(ell, str(poly), k, T, enc.lo, enc.hi))
            if rows and all(r.certified for r in rows):
                break
            K *= 2
        else:
            raise RuntimeError(f"could not certify checkpoint {ell}")
        if ell == 1 and len(word) > horizon:
            raise ValueError(f"horizon {horizon} too small for the first checkpoint ({len(word)} symbols)")
        prefix = list(word)
        checkpoints.extend(rows)
        blocks.append((ell, segs[0][0], end, K))
    return OscillationResult(tuple(prefix), checkpoints, blocks)


# --- Li-Wu style extremes ---------------------------------------------------


@dataclass
class LiWuReport:
    abar: Fraction
    aunder: Fraction
    horizon: int
    burn_in: int
    running_max: Fraction
    running_min: Fraction
    trace: list  # (T, max gap, min gap) at powers of two and the horizon

    @property
    def gap_max(self):
        return abs(self.running_max - self.abar)

    @property
    def gap_min(self):
        return abs(self.running_min - self.aunder)

    def ok(self, tol):
        tol = Fraction(tol)
        return self.gap_max < tol and self.gap_min < tol


def li_wu_check(prefix, f, sft=None, horizon=None) -> LiWuReport:
    """Running extremes of the Birkhoff averages along a finite prefix against
    the ergodic-optimisation values; averages before isqrt(horizon) are skipped."""
    from .ergopt import max_mean_cycle, min_mean_cycle

    abar, _ = max_mean_cycle(f, sft)
    aunder, _ = min_mean_cycle(f, sft)
    S = word_sums(tuple(prefix), f)
    n = len(S) - 1
    N = n if horizon is None else min(horizon, n)
    if N < 1:
        raise ValueError("prefix too short")
    burn = max(1, isqrt(N))
    hi = lo = None
    trace = []
    mark = 1
    for T in range(burn, N + 1):
        v = S[T] / T
        hi = v if hi is None or v > hi else hi
        lo = v if lo is None or v < lo else lo
        while mark < T:
            mark *= 2
        if T == mark or T == N:
            trace.append((T, abs(hi - abar), abs(lo - aunder)))
    return LiWuReport(abar, aunder, N, burn, hi, lo, trace)
