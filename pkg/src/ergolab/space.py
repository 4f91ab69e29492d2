"""Points, metrics, maps and balls for the symbolic and circle backends.

Shift points live in A^N (0-based coordinates internally, so ``x[0]`` is the
first symbol).  The metric is rho(x, y) = 2**-l where l is the 1-based index
of the first disagreement, so the ball B(x; 2**-k) is the cylinder fixed by
the first k symbols.  Circle points are reduced rationals in [0, 1) with the
arc-length metric and the map t -> b*t mod 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

MAX_ALPHABET = 16
DIGITS = "0123456789abcdef"


def _primitive_root(word):
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


def canonical_form(preperiod, period):
    """Primitive period and minimal preperiod describing the same sequence."""
    pre = tuple(preperiod)
    per = _primitive_root(tuple(period))
    if not per:
        raise ValueError("period must be nonempty")
    # strip matching symbols off the end of the preperiod, rotating the period
    L, n = len(per), 0
    while n < len(pre) and pre[-1 - n] == per[(-1 - n) % L]:
        n += 1
    s = n % L
    if s:
        per = per[-s:] + per[:-s]
    return pre[:len(pre) - n], per


@dataclass(frozen=True, init=False)
class ShiftPoint:
    """Eventually periodic sequence preperiod . period . period . ..."""

    preperiod: tuple
    period: tuple

    def __init__(self, preperiod: Sequence[int] = (), period: Sequence[int] = (0,)):
        for s in tuple(preperiod) + tuple(period):
            if not (isinstance(s, int) and 0 <= s < MAX_ALPHABET):
                raise ValueError(f"symbol out of range: {s!r}")
        pre, per = canonical_form(preperiod, period)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    @classmethod
    def periodic(cls, word):
        return cls((), tuple(word))

    def __getitem__(self, i):
        n = len(self.preperiod)
        if i < n:
            return self.preperiod[i]
        return self.period[(i - n) % len(self.period)]

    def prefix(self, n):
        """First n symbols as a tuple."""
        pre = self.preperiod
        if n <= len(pre):
            return pre[:n]
        per = self.period
        rest = n - len(pre)
        reps = rest // len(per) + 1
        return pre + (per * reps)[:rest]

    def symbols(self):
        i = 0
        while True:
            yield self[i]
            i += 1

    def __str__(self):
        return format_word(self.preperiod) + "|" + format_word(self.period)

    def __repr__(self):
        return f"ShiftPoint({self})"


@dataclass(frozen=True, init=False)
class CirclePoint:
    value: Fraction

    def __init__(self, value):
        v = Fraction(value) % 1
        object.__setattr__(self, "value", v)

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return f"CirclePoint({self.value})"


def format_word(word):
    return "".join(DIGITS[s] for s in word)


def parse_word(text):
    try:
        return tuple(DIGITS.index(c) for c in text.strip().lower())
    except ValueError:
        raise ValueError(f"bad word literal {text!r}") from None


def parse_point(text):
    """Parse "pre|per" as a shift point or "p/q" as a circle point."""
    text = text.strip()
    if "|" in text:
        pre, per = text.split("|", 1)
        return ShiftPoint(parse_word(pre), parse_word(per))
    return CirclePoint(parse_fraction(text))


def parse_fraction(text):
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    s = str(text).strip()
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad rational literal {text!r}") from None


# --- dynamics -------------------------------------------------------------


def shift_apply(j: int, x: ShiftPoint) -> ShiftPoint:
    """T_j x: drop the first j symbols."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    pre, per = x.preperiod, x.period
    if j <= len(pre):
        return ShiftPoint(pre[j:], per)
    s = (j - len(pre)) % len(per)
    return ShiftPoint((), per[s:] + per[:s])


def circle_apply(j: int, b: int, t) -> CirclePoint:
    t = t.value if isinstance(t, CirclePoint) else Fraction(t)
    return CirclePoint(t * pow(b, j))


def first_difference(x: ShiftPoint, y: ShiftPoint):
    """0-based index of the first disagreement, or None when x == y."""
    if x == y:
        return None
    p, q = len(x.period), len(y.period)
    # Fine-Wilf: sequences agreeing this far agree forever.
    bound = max(len(x.preperiod), len(y.preperiod)) + p + q - gcd(p, q)
    for i in range(bound + 1):
        if x[i] != y[i]:
            return i
    raise AssertionError("canonical forms differ but sequences agree")


def rho(x, y) -> Fraction:
    if isinstance(x, ShiftPoint) and isinstance(y, ShiftPoint):
        i = first_difference(x, y)
        return Fraction(0) if i is None else Fraction(1, 2 ** (i + 1))
    if isinstance(x, CirclePoint) and isinstance(y, CirclePoint):
        d = abs(x.value - y.value)
        return min(d, 1 - d)
    raise TypeError("points from different backends")


def cylinder_depth(r) -> int:
    """max{i >= 0 : 2**-i >= r}, clamped to 0 for r >= 1."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError("radius must be positive")
    if r >= 1:
        return 0
    return (r.denominator // r.numerator).bit_length() - 1


def ball_as_cylinder(x: ShiftPoint, r) -> tuple:
    return x.prefix(cylinder_depth(r))


def in_cylinder(w, y: ShiftPoint) -> bool:
    return y.prefix(len(w)) == tuple(w)


# --- Hölder modulus and Følner sets ----------------------------------------


@dataclass(frozen=True)
class MoHoC:
    """Modulus of Hölder continuity with H(j) = 1 and L(j) = base**j."""

    base: Fraction = Fraction(2)

    def __post_init__(self):
        object.__setattr__(self, "base", Fraction(self.base))
        if self.base < 1:
            raise ValueError("base must be >= 1")

    def L(self, j):
        return self.base ** j

    def H(self, j):
        return 1


def folner(k: int) -> range:
    if k < 1:
        raise ValueError("k must be >= 1")
    return range(k)


# --- multi-balls -----------------------------------------------------------


@dataclass(frozen=True, init=False)
class MultiBall:
    entries: tuple

    def __init__(self, entries: Iterable):
        items = tuple((c, Fraction(r)) for c, r in entries)
        if not items:
            raise ValueError("multi-ball needs at least one ball")
        if any(r <= 0 for _, r in items):
            raise ValueError("radii must be positive")
        object.__setattr__(self, "entries", items)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def centers(self):
        return [c for c, _ in self.entries]

    @property
    def radii(self):
        return [r for _, r in self.entries]

    def contains(self, y):
        return any(rho(c, y) < r for c, r in self.entries)


def multiball_dedupe(mb: MultiBall) -> MultiBall:
    best = {}
    for c, r in mb:
        if c not in best or r > best[c]:
            best[c] = r
    return MultiBall(best.items())


def multiball_pairwise_disjoint(mb: MultiBall) -> bool:
    items = list(mb)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            (c1, r1), (c2, r2) = items[i], items[j]
            if isinstance(c1, ShiftPoint):
                w1, w2 = ball_as_cylinder(c1, r1), ball_as_cylinder(c2, r2)
                n = min(len(w1), len(w2))
                if w1[:n] == w2[:n]:
                    return False
            else:
                if r1 >= Fraction(1, 2) or r2 >= Fraction(1, 2):
                    return False
                if rho(c1, c2) < r1 + r2:
                    return False
    return True


# --- subshifts of finite type ---------------------------------------------


@dataclass(frozen=True, init=False)
class SFT:
    """One-step subshift given by a 0/1 transition matrix."""

    matrix: tuple

    def __init__(self, matrix):
        rows = tuple(tuple(1 if v else 0 for v in row) for row in matrix)
        A = len(rows)
        if not 2 <= A <= MAX_ALPHABET or any(len(row) != A for row in rows):
            raise ValueError("transition matrix must be square of size 2..16")
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def full(cls, A=2):
        return cls([[1] * A for _ in range(A)])

    @property
    def A(self):
        return len(self.matrix)

    def allowed(self, a, b):
        return bool(self.matrix[a][b])

    def admissible(self, word):
        return all(self.matrix[a][b] for a, b in zip(word, word[1:]))

    def point_admissible(self, x: ShiftPoint):
        w = x.preperiod + x.period + x.period[:1]
        return self.admissible(w)

    def successors(self, a):
        return [b for b in range(self.A) if self.matrix[a][b]]

    def is_full(self):
        return all(all(row) for row in self.matrix)

    def primitivity_index(self):
        """Least n with M**n > 0 entrywise; None when M is not primitive."""
        A = self.A
        bound = (A - 1) ** 2 + 1  # Wielandt
        P = [list(r) for r in self.matrix]
        for n in range(1, bound + 1):
            if all(all(row) for row in P):
                return n
            P = [[1 if any(P[i][k] and self.matrix[k][j] for k in range(A)) else 0
                  for j in range(A)] for i in range(A)]
        return None

    def is_mixing(self):
        return self.primitivity_index() is not None
