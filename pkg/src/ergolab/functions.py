"""Observables: locally constant functions on the shift, piecewise linear
functions on the circle, and the enumerated dense families used by the weak*
metric."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from fractions import Fraction
from itertools import count, product
from math import floor

from .space import CirclePoint, ShiftPoint, format_word


class LocallyConstantFn:
    """f(x) = table[x[0..m-1]] on A^N."""

    def __init__(self, depth, table, A=2):
        if depth < 1:
            raise ValueError("depth must be >= 1")
        self.depth = depth
        self.A = A
        n = A ** depth
        if callable(table):
            values = [table(w) for w in product(range(A), repeat=depth)]
        elif isinstance(table, dict):
            values = [table[w] for w in product(range(A), repeat=depth)]
        else:
            values = list(table)
        if len(values) != n:
            raise ValueError(f"table needs {n} entries, got {len(values)}")
        self.table = tuple(Fraction(v) for v in values)

    @classmethod
    def indicator(cls, word, A=2):
        word = tuple(word)
        return cls(len(word), lambda w: 1 if w == word else 0, A)

    @classmethod
    def constant(cls, c, A=2):
        return cls(1, [c] * A, A)

    def index(self, word):
        i = 0
        for s in word:
            i = i * self.A + s
        return i

    def on_word(self, word):
        return self.table[self.index(word)]

    def __call__(self, x):
        if not isinstance(x, ShiftPoint):
            raise TypeError("locally constant functions live on the shift")
        return self.on_word(x.prefix(self.depth))

    def lift(self, depth):
        """Same function viewed as depending on `depth` >= m coordinates."""
        if depth < self.depth:
            raise ValueError("cannot lower the depth")
        m = self.depth
        return LocallyConstantFn(depth, lambda w: self.on_word(w[:m]), self.A)

    @property
    def max(self):
        return max(self.table)

    @property
    def min(self):
        return min(self.table)

    @property
    def max_abs(self):
        return max(abs(v) for v in self.table)

    @property
    def nonnegative(self):
        return self.min >= 0

    def __eq__(self, other):
        return isinstance(other, LocallyConstantFn) and (self.A, self.table) == (other.A, other.table)

    def __hash__(self):
        return hash((self.A, self.table))

    def __repr__(self):
        return f"LocallyConstantFn(depth={self.depth}, A={self.A})"


class PiecewiseLinearFn:
    """Continuous piecewise linear function on R/Z given by breakpoints
    0 = s_0 < ... < s_n = 1 and values with v_0 = v_n."""

    def __init__(self, breakpoints, values):
        s = [Fraction(b) for b in breakpoints]
        v = [Fraction(y) for y in values]
        if len(s) != len(v) or len(s) < 2:
            raise ValueError("need matching breakpoints and values")
        if s[0] != 0 or s[-1] != 1 or any(a >= b for a, b in zip(s, s[1:])):
            raise ValueError("breakpoints must increase from 0 to 1")
        if v[0] != v[-1]:
            raise ValueError("values must agree at 0 and 1")
        self.breakpoints = tuple(s)
        self.values = tuple(v)
        self.slopes = tuple((v[i + 1] - v[i]) / (s[i + 1] - s[i]) for i in range(len(s) - 1))
        cum = [Fraction(0)]
        for i in range(len(s) - 1):
            cum.append(cum[-1] + (v[i] + v[i + 1]) * (s[i + 1] - s[i]) / 2)
        self._cum = tuple(cum)
        kinks = {}
        for i in range(len(s) - 1):
            left = self.slopes[i - 1] if i > 0 else self.slopes[-1]
            jump = self.slopes[i] - left
            if jump:
                kinks[s[i]] = jump
        self.kinks = kinks
        self._kink_points = tuple(sorted(kinks))

    @classmethod
    def sample(cls, func, breakpoints):
        pts = sorted({Fraction(0), Fraction(1), *(Fraction(b) % 1 for b in breakpoints)})
        vals = [func(p % 1) for p in pts]
        return cls(pts, vals)

    @classmethod
    def hat(cls, center, half_width):
        """max(0, 1 - rho(u, center)/half_width), half_width <= 1/2."""
        c, w = Fraction(center) % 1, Fraction(half_width)
        if not 0 < w <= Fraction(1, 2):
            raise ValueError("half width must lie in (0, 1/2]")

        def h(u):
            d = abs(u - c)
            d = min(d, 1 - d)
            return max(Fraction(0), 1 - d / w)

        return cls.sample(h, [c - w, c, c + w])

    @classmethod
    def constant(cls, c):
        return cls([0, 1], [c, c])

    def value(self, t):
        t = Fraction(t) % 1
        s = self.breakpoints
        i = bisect_right(s, t) - 1
        if i >= len(s) - 1:
            return self.values[-1]
        return self.values[i] + self.slopes[i] * (t - s[i])

    def __call__(self, x):
        if isinstance(x, CirclePoint):
            return self.value(x.value)
        if isinstance(x, ShiftPoint):
            raise TypeError("piecewise linear functions live on the circle")
        return self.value(x)

    @property
    def total(self):
        return self._cum[-1]

    def _partial(self, t):
        # integral of f over [0, t] for t in [0, 1]
        s = self.breakpoints
        i = min(bisect_right(s, t) - 1, len(s) - 2)
        dt = t - s[i]
        return self._cum[i] + self.values[i] * dt + self.slopes[i] * dt * dt / 2

    def antiderivative(self, X):
        """F(X) = integral of the periodic extension over [0, X], X real."""
        X = Fraction(X)
        n = floor(X)
        return n * self.total + self._partial(X - n)

    def integral(self, a, b):
        return self.antiderivative(b) - self.antiderivative(a)

    def kink_at(self, t):
        return self.kinks.get(Fraction(t) % 1, Fraction(0))

    def kink_gap(self, t):
        """Circular distance from t to the nearest kink other than t itself."""
        t = Fraction(t) % 1
        pts = self._kink_points
        if not pts or pts == (t,):
            return Fraction(1, 2)
        i = bisect_left(pts, t)
        best = Fraction(1, 2)
        for j in (i - 1, i, i + 1):
            p = pts[j % len(pts)]
            if p == t:
                continue
            d = abs(p - t)
            best = min(best, d, 1 - d)
        return best

    @property
    def lipschitz(self):
        return max(abs(m) for m in self.slopes)

    @property
    def max(self):
        return max(self.values)

    @property
    def min(self):
        return min(self.values)

    @property
    def max_abs(self):
        return max(abs(v) for v in self.values)

    @property
    def nonnegative(self):
        return self.min >= 0

    def __eq__(self, other):
        return isinstance(other, PiecewiseLinearFn) and (
            (self.breakpoints, self.values) == (other.breakpoints, other.values))

    def __hash__(self):
        return hash((self.breakpoints, self.values))

    def __repr__(self):
        return f"PiecewiseLinearFn({len(self.breakpoints)} breakpoints)"


def constant_like(f, c):
    if isinstance(f, LocallyConstantFn):
        return LocallyConstantFn.constant(c, f.A)
    return PiecewiseLinearFn.constant(c)


def compose_shift(f):
    """f o T as a function of one more coordinate."""
    if isinstance(f, LocallyConstantFn):
        return LocallyConstantFn(f.depth + 1, lambda w: f.on_word(w[1:]), f.A)
    raise TypeError("compose_shift is defined for locally constant functions")


# --- dense families --------------------------------------------------------


def cylinder_words(A=2):
    """Nonempty words in length-then-lexicographic order."""
    for n in count(1):
        yield from product(range(A), repeat=n)


def shift_family(M, A=2):
    """First M cylinder indicators."""
    out = []
    for w in cylinder_words(A):
        if len(out) == M:
            break
        out.append(LocallyConstantFn.indicator(w, A))
    return out


def circle_family(M):
    """First M dyadic hat functions, coarse levels first."""
    out = []
    for level in count(1):
        w = Fraction(1, 2 ** level)
        for i in range(2 ** level):
            if len(out) == M:
                return out
            out.append(PiecewiseLinearFn.hat(i * w, w))
    return out


def family_for(point_or_kind, M, A=2):
    if isinstance(point_or_kind, CirclePoint) or point_or_kind == "circle":
        return circle_family(M)
    return shift_family(M, A)


def describe_family_member(f):
    if isinstance(f, LocallyConstantFn):
        nz = [w for w in product(range(f.A), repeat=f.depth) if f.on_word(w)]
        if len(nz) == 1:
            return "chi[" + format_word(nz[0]) + "]"
    return repr(f)
