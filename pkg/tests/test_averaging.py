from fractions import Fraction

import pytest
from conftest import circle_points, shift_points
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import birkhoff_brute, circle_ts_brute, shift_ts_brute

from ergolab.averaging import (
    TSMeasure,
    birkhoff_avg,
    birkhoff_limit_periodic,
    blended_limit_predict,
    decay_fast_check,
    holder_gap_bound,
    multiball_decompose,
    pointwise_reduction_gap,
    spatial_temporal_avg,
)
from ergolab.functions import LocallyConstantFn, PiecewiseLinearFn
from ergolab.measure import Bernoulli, EmpiricalMeasure, LebesgueCircle, integrate_empirical
from ergolab.space import CirclePoint, MoHoC, MultiBall, multiball_pairwise_disjoint, parse_point

F = Fraction
UNIFORM = Bernoulli.uniform(2)
LEB = LebesgueCircle()
chi0 = LocallyConstantFn.indicator((0,))
HAT = PiecewiseLinearFn.hat(F(1, 2), F(1, 2))


def tables(A=2, m=2):
    return st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5),
                    min_size=A ** m, max_size=A ** m).map(lambda v: LocallyConstantFn(m, v, A))


def test_birkhoff_avg_examples():
    alt = parse_point("|01")          # 0 exactly at even indices
    assert birkhoff_avg(chi0, alt, 4) == F(1, 2)
    thirds = parse_point("|011")      # 0 at multiples of 3
    assert birkhoff_avg(chi0, thirds, 6) == F(1, 3)
    c = LocallyConstantFn.constant(F(5, 7))
    assert all(birkhoff_avg(c, thirds, k) == F(5, 7) for k in range(1, 20))
    with pytest.raises(ValueError):
        birkhoff_avg(chi0, alt, 0)


@given(shift_points(), st.integers(1, 40), tables())
def test_birkhoff_avg_matches_direct_sum(x, k, f):
    assert birkhoff_avg(f, x, k) == birkhoff_brute(f, x, k)
    assert integrate_empirical(EmpiricalMeasure(x, k), f) == birkhoff_avg(f, x, k)


def test_birkhoff_limit_examples():
    assert birkhoff_limit_periodic(chi0, parse_point("|01")) == F(1, 2)
    assert birkhoff_limit_periodic(chi0, parse_point("|0")) == 1
    assert birkhoff_limit_periodic(chi0, parse_point("0|1")) == chi0(parse_point("|1")) == 0


@given(shift_points(), tables())
def test_birkhoff_limit_is_limit(x, f):
    period = len(x.period)
    n = len(x.preperiod) + f.depth
    L = birkhoff_limit_periodic(f, x)
    big = 50 * period
    # the tail average over whole periods is exactly the limit
    assert (birkhoff_avg(f, x, n + big) * (n + big) - birkhoff_avg(f, x, n) * n) / big == L


def test_circle_birkhoff():
    t = CirclePoint(F(1, 3))
    assert birkhoff_limit_periodic(HAT, t) == (HAT.value(F(1, 3)) + HAT.value(F(2, 3))) / 2
    assert birkhoff_avg(HAT, CirclePoint(F(1, 4)), 3) == (HAT.value(F(1, 4)) + HAT.value(F(1, 2)) + HAT.value(0)) / 3


def test_ts_avg_whole_space_and_constant():
    x = parse_point("0|1")
    for k in range(1, 15):
        assert spatial_temporal_avg(UNIFORM, MultiBall([(x, 1)]), chi0, k).value == F(1, 2)
        c = LocallyConstantFn.constant(F(-2, 3))
        assert spatial_temporal_avg(UNIFORM, MultiBall([(x, F(1, 8))]), c, k).value == F(-2, 3)
    assert spatial_temporal_avg(LEB, MultiBall([(CirclePoint(0), F(1, 9))]),
                                PiecewiseLinearFn.constant(3), 5).value == 3


@settings(max_examples=60)
@given(st.lists(shift_points(max_pre=3, max_per=3), min_size=1, max_size=3),
       st.lists(st.integers(0, 5), min_size=3, max_size=3),
       st.integers(1, 6), tables(), st.integers(1, 5))
def test_shift_ts_avg_matches_enumeration(centers, depths, k, f, n):
    mu = Bernoulli([F(n, 6), 1 - F(n, 6)])
    balls = list(zip(centers, [F(1, 2 ** d) for d in depths]))
    value = spatial_temporal_avg(mu, MultiBall(balls), f, k).value
    # union of the cylinders as a prefix-free list
    words = sorted({c.prefix(d) for c, d in zip(centers, depths)}, key=len)
    keep = []
    for w in words:
        if not any(w[:len(u)] == u for u in keep):
            keep.append(w)
    assert value == shift_ts_brute(mu.p, keep, f, k)


@settings(max_examples=60)
@given(st.lists(circle_points(32), min_size=1, max_size=3, unique=True),
       st.integers(3, 200), st.integers(1, 6), st.sampled_from([2, 3]),
       st.integers(0, 15), st.integers(1, 8))
def test_circle_ts_avg_matches_trapezoids(centers, rden, k, b, c, w):
    f = PiecewiseLinearFn.hat(F(c, 16), F(w, 16))
    r = F(1, rden)
    mb = MultiBall([(x, r) for x in centers])
    if not multiball_pairwise_disjoint(mb):
        return
    assert spatial_temporal_avg(LEB, mb, f, k, b).value == circle_ts_brute(f, list(mb), k, b)


def test_overlapping_arcs_are_merged():
    mb = MultiBall([(CirclePoint(0), F(1, 8)), (CirclePoint(F(1, 16)), F(1, 8))])
    merged = [(CirclePoint(F(1, 32)), F(1, 8) + F(1, 32))]
    assert spatial_temporal_avg(LEB, mb, HAT, 4).value == circle_ts_brute(HAT, merged, 4)


def test_multiball_decompose_examples():
    x, y = parse_point("|01"), parse_point("|011")
    eq = multiball_decompose(UNIFORM, MultiBall([(x, F(1, 8)), (y, F(1, 8))]), chi0, 5)
    assert [w for w, _ in eq] == [F(1, 2), F(1, 2)]
    p, q = 3, 7
    gt = multiball_decompose(UNIFORM, MultiBall([(x, F(1, 2 ** p)), (y, F(1, 2 ** q))]), chi0, 5)
    s = F(1, 2 ** p) + F(1, 2 ** q)
    assert [w for w, _ in gt] == [F(1, 2 ** p) / s, F(1, 2 ** q) / s]
    (single,) = multiball_decompose(UNIFORM, MultiBall([(x, F(1, 4))]), chi0, 5)
    assert single[0] == 1
    with pytest.raises(ValueError):
        multiball_decompose(UNIFORM, MultiBall([(x, F(1, 2)), (parse_point("|0"), F(1, 4))]), chi0, 5)


@settings(max_examples=40)
@given(st.integers(1, 8), st.integers(2, 9), st.integers(2, 9), tables())
def test_decompose_recombines_exactly(k, p, q, f):
    x, y = parse_point("|01"), parse_point("1|0")
    mb = MultiBall([(x, F(1, 2 ** p)), (y, F(1, 2 ** q))])
    parts = multiball_decompose(UNIFORM, mb, f, k)
    assert sum(w for w, _ in parts) == 1
    assert sum(w * a for w, a in parts) == spatial_temporal_avg(UNIFORM, mb, f, k).value


def test_circle_decompose_recombines():
    mb = MultiBall([(CirclePoint(F(1, 7)), F(1, 100)), (CirclePoint(F(1, 3)), F(1, 50))])
    parts = multiball_decompose(LEB, mb, HAT, 6)
    assert [w for w, _ in parts] == [F(1, 3), F(2, 3)]
    assert sum(w * a for w, a in parts) == TSMeasure(LEB, mb, 6).integrate(HAT)


def test_decay_dyadic_radii():
    rep = decay_fast_check(MoHoC(2), lambda k: [F(1, 2 ** k)], [F(1, 8)], 40)
    for k in range(1, 41):
        assert rep.fraction(F(1, 8), 0, k) <= F(3, k)
    assert rep.consistent


def test_decay_quartic_radii_vanish():
    delta = F(1, 16)
    rep = decay_fast_check(MoHoC(2), lambda k: [F(1, 4 ** k)], [delta], 30)
    for k in range(5, 31):
        assert rep.fraction(delta, 0, k) == 0


def test_decay_constant_radius_fails():
    delta = F(1, 64)
    rep = decay_fast_check(MoHoC(2), lambda k: [F(1, 2)], [delta], 40)
    # 2^j / 2 > 1/64 exactly for j >= 0, so every j counts
    assert rep.fraction(delta, 0, 40) == 1
    assert not rep.consistent


def test_decay_is_strict():
    # L(0) r = 1/2 equals delta: not counted under the strict inequality
    rep = decay_fast_check(MoHoC(2), lambda k: [F(1, 2)], [F(1, 2)], 1)
    assert rep.fraction(F(1, 2), 0, 1) == 0


def test_holder_gap_bound_examples():
    assert holder_gap_bound(1, 1, MoHoC(2), 1, F(1, 4)) == F(1, 4)
    assert holder_gap_bound(1, 1, MoHoC(2), 3, F(1, 32)) == F(7, 96)
    assert holder_gap_bound(1, 1, MoHoC(2), 3, F(1, 10 ** 12)) < F(1, 10 ** 11)


def test_pointwise_reduction_gap_examples():
    c = PiecewiseLinearFn.constant(F(1, 3))
    assert pointwise_reduction_gap(LEB, CirclePoint(F(1, 5)), F(1, 64), c, 7) == 0
    r = F(1, 256)
    gap = pointwise_reduction_gap(LEB, CirclePoint(0), r, HAT, 3)
    oracle = abs(circle_ts_brute(HAT, [(CirclePoint(0), r)], 3) - birkhoff_avg(HAT, CirclePoint(0), 3))
    assert gap == oracle == F(7, 768)
    assert gap <= holder_gap_bound(HAT.lipschitz, 1, MoHoC(2), 3, r) == F(7, 384)
    for k in range(1, 10):
        m = 1
        assert pointwise_reduction_gap(UNIFORM, parse_point("01|1"), F(1, 2 ** (k + m)), chi0, k) == 0


@settings(max_examples=40)
@given(circle_points(64), st.integers(6, 14), st.integers(1, 6), st.integers(0, 15), st.integers(1, 8))
def test_pointwise_gap_below_holder_bound(x, e, k, c, w):
    f = PiecewiseLinearFn.hat(F(c, 16), F(w, 16))
    r = F(1, 2 ** e)
    assert pointwise_reduction_gap(LEB, x, r, f, k) <= holder_gap_bound(f.lipschitz, 1, MoHoC(2), k, r)


def test_blended_limit_predict():
    assert blended_limit_predict([F(1, 3), F(1, 2)], [1, 0]) == F(1, 3)
    assert blended_limit_predict([F(1, 3), F(1, 2)], [F(1, 2), F(1, 2)]) == F(5, 12)
    assert blended_limit_predict([F(2, 9)], [1]) == F(2, 9)
    with pytest.raises(ValueError):
        blended_limit_predict([1, 2], [F(1, 2), F(1, 3)])


def test_multi_local_convergence_horizon_30():
    """Equal periodic limits and radii 4^-k: the gap to the common limit is at
    most the worst pointwise gap, which tends to zero."""
    x, y = parse_point("|01"), parse_point("|0011")
    f = chi0
    C = F(1, 2)
    gaps = []
    for k in range(1, 31):
        r = F(1, 4 ** k)
        v = spatial_temporal_avg(UNIFORM, MultiBall([(x, r), (y, r)]), f, k).value
        bound = max(abs(birkhoff_avg(f, x, k) - C), abs(birkhoff_avg(f, y, k) - C))
        assert abs(v - C) <= bound <= F(1, k)
        gaps.append(bound)
    env = [max(gaps[i:]) for i in range(len(gaps))]
    assert all(a >= b for a, b in zip(env, env[1:])) and env[-1] <= F(1, 30)
