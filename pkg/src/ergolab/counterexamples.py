"""The two worked examples on the fair coin-tossing shift: a constant
spatial-temporal series next to points with limsup 1, and a two-point
multi-ball whose weights swing between the points."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .averaging import birkhoff_avg, spatial_temporal_avg
from .construct import limit_set_estimate
from .functions import LocallyConstantFn
from .measure import Bernoulli
from .space import MultiBall, ShiftPoint


@dataclass
class ExampleReport:
    name: str
    horizon: int
    rows: list            # (k, value, extra...) per step
    header: list
    checks: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks.values())


def block_lengths(n):
    """c_1 = 1, c_n = (n-1) s_{n-1}, so s_n = n! and c_n / s_n = (n-1)/n."""
    return [1] + [(i - 1) * factorial(i - 1) for i in range(2, n + 1)]


def limsup_points(n_blocks=9):
    """x = 0^{c_1} 1^{c_2} 0^{c_3} ... exact through s_{n_blocks}; the tail
    continues the next block forever, which is exact through s_{n_blocks+1}."""
    word = []
    for i, c in enumerate(block_lengths(n_blocks)):
        word.extend([i % 2] * c)
    tail = (n_blocks % 2,)
    x = ShiftPoint(word, tail)
    y = ShiftPoint([1 - a for a in word], (1 - tail[0],))
    return x, y


def cant_take_limsups(horizon=50, n_max=5) -> ExampleReport:
    if horizon < 4:
        raise ValueError("horizon must be >= 4")
    mu = Bernoulli.uniform(2)
    f = LocallyConstantFn.indicator((0,))
    x, y = limsup_points(2 * n_max - 1)
    rows = []
    for k in range(1, horizon + 1):
        r = Fraction(1, 2 ** k)
        v = spatial_temporal_avg(mu, MultiBall([(x, r), (y, r)]), f, k).value
        rows.append((k, v))
    samples = []
    for n in range(1, n_max + 1):
        s = factorial(2 * n - 1)
        samples.append((n, s, birkhoff_avg(f, x, s), Fraction(2 * n - 2, 2 * n - 1)))
    report = ExampleReport("cant-take-limsups", horizon, rows, ["k", "value"])
    report.checks["all_half"] = all(v == Fraction(1, 2) for _, v in rows)
    report.checks["limsup_samples"] = all(a >= b for _, _, a, b in samples)
    report.summary["samples"] = [
        {"n": n, "s": s, "avg": a, "lower_bound": b} for n, s, a, b in samples]
    return report


def give_and_take_depths(k):
    """(p_k, q_k): the favoured point's cylinder has depth base_k, the other
    base_k + d_k with d_k = ceil(log2(3k)), so its weight is below 1/(3k)."""
    base = 1
    for j in range(1, k):
        base += (3 * j - 1).bit_length() + 1
    d = (3 * k - 1).bit_length()
    return (base, base + d) if k % 2 else (base + d, base)


def give_and_take(horizon=1024, eps=Fraction(1, 20)) -> ExampleReport:
    if horizon < 4:
        raise ValueError("horizon must be >= 4")
    mu = Bernoulli.uniform(2)
    f = LocallyConstantFn.indicator((0,))
    x = ShiftPoint((), (1, 0))       # limit 1/2
    y = ShiftPoint((), (1, 1, 0))    # limit 1/3
    rows = []
    within = True
    for k in range(1, horizon + 1):
        p, q = give_and_take_depths(k)
        v = spatial_temporal_avg(mu, MultiBall([(x, Fraction(1, 2 ** p)), (y, Fraction(1, 2 ** q))]), f, k).value
        target = Fraction(1, 2) if k % 2 else Fraction(1, 3)
        if k >= 10 and abs(v - target) > Fraction(1, k):
            within = False
        rows.append((k, v, p, q))
    est = limit_set_estimate([v for _, v, _, _ in rows], eps)
    report = ExampleReport("give-and-take", horizon, rows, ["k", "value", "p_k", "q_k"])
    report.checks["within_1/k"] = within
    report.checks["two_clusters"] = len(est) == 2 and all(
        abs(c - t) <= eps for c, t in zip(est.centers, (Fraction(1, 3), Fraction(1, 2))))
    report.checks["depths_increasing"] = all(
        a[2] < b[2] and a[3] < b[3] for a, b in zip(rows, rows[1:]))
    report.summary["clusters"] = [
        {"center": c, "multiplicity": m} for c, m in zip(est.centers, est.multiplicities)]
    return report


EXAMPLES = {"cant-take-limsups": cant_take_limsups, "give-and-take": give_and_take}


def run_example(name, horizon) -> ExampleReport:
    if name not in EXAMPLES:
        raise ValueError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    return EXAMPLES[name](horizon)
