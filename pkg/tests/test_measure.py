from fractions import Fraction
from itertools import product

import pytest
from conftest import circle_points, shift_points, words
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import markov_word_measure, word_measure

from ergolab.averaging import birkhoff_avg
from ergolab.functions import LocallyConstantFn, PiecewiseLinearFn, compose_shift
from ergolab.measure import (
    Bernoulli,
    Convex,
    EmpiricalMeasure,
    InfeasibleRatios,
    LebesgueCircle,
    Markov,
    PeriodicOrbit,
    ball_measure,
    cylinder_measure,
    integrate_empirical,
    integrate_invariant,
    neglects_shells,
    shell_measure,
    target_ratios_circle,
    target_ratios_shift,
    weakstar_dist,
)
from ergolab.space import CirclePoint, ShiftPoint, parse_point, rho

F = Fraction
UNIFORM = Bernoulli.uniform(2)
MARKOV = Markov([[F(1, 2), F(1, 2)], [F(1, 4), F(3, 4)]])
chi0 = LocallyConstantFn.indicator((0,))


def test_cylinder_measure_examples():
    assert cylinder_measure(UNIFORM, (0, 1, 1)) == F(1, 8)
    assert cylinder_measure(MARKOV, ()) == 1
    assert cylinder_measure(Bernoulli([F(1, 3), F(2, 3)]), (0, 1)) == F(2, 9)
    with pytest.raises(TypeError):
        cylinder_measure(LebesgueCircle(), (0,))


def test_markov_stationary_vector():
    assert list(MARKOV.pi0) == [F(1, 3), F(2, 3)]


@given(words(2, 0, 8), st.integers(1, 5))
def test_cylinder_additivity(w, n):
    p = F(n, 6)
    for mu in (Bernoulli([p, 1 - p]), MARKOV, UNIFORM):
        assert sum(cylinder_measure(mu, w + (a,)) for a in range(2)) == cylinder_measure(mu, w)


@given(words(3, 0, 6))
def test_cylinder_measure_matches_products(w):
    mu = Bernoulli([F(1, 6), F(1, 3), F(1, 2)])
    assert cylinder_measure(mu, w) == word_measure(mu.p, w)
    P = [[F(1, 2), F(1, 4), F(1, 4)], [F(0), F(1, 3), F(2, 3)], [F(1, 5), F(2, 5), F(2, 5)]]
    mk = Markov(P)
    assert cylinder_measure(mk, w) == markov_word_measure(mk.pi0, P, w)


def test_ball_measure_examples():
    for t in (0, F(1, 3), F(9, 10)):
        assert ball_measure(LebesgueCircle(), CirclePoint(t), F(1, 4)) == F(1, 2)
        assert ball_measure(LebesgueCircle(), CirclePoint(t), F(3, 4)) == 1
    x = parse_point("0|1")
    for k in range(8):
        assert ball_measure(UNIFORM, x, F(1, 2 ** k)) == F(1, 2 ** k)
    with pytest.raises(ValueError):
        ball_measure(UNIFORM, x, 0)


def _shell_brute(mu, x, k):
    """mass of {y : first disagreement with x at index k-1}, via depth-(k+1) words."""
    total = F(0)
    for z in product(range(mu.A), repeat=k + 1):
        y = ShiftPoint(z, (0,))
        idx = next((i for i in range(k + 1) if z[i] != x[i]), None)
        if idx == k - 1:
            total += cylinder_measure(mu, z)
        assert (idx == k - 1) == (idx is not None and rho(x, y) == F(1, 2 ** k))
    return total


@pytest.mark.parametrize("k", range(1, 8))
def test_shell_measure_uniform_by_brute_force(k):
    x = parse_point("01|1")
    assert shell_measure(UNIFORM, x, F(1, 2 ** k)) == _shell_brute(UNIFORM, x, k) == F(1, 2 ** k)


def test_shell_measure_markov_by_brute_force():
    x = parse_point("|01")
    for k in range(1, 6):
        assert shell_measure(MARKOV, x, F(1, 2 ** k)) == _shell_brute(MARKOV, x, k)


def test_shell_measure_off_grid_and_circle():
    assert shell_measure(UNIFORM, parse_point("|0"), F(3, 5)) == 0
    assert shell_measure(LebesgueCircle(), CirclePoint(F(1, 3)), F(1, 7)) == 0


def test_neglects_shells():
    assert neglects_shells(LebesgueCircle())
    assert not neglects_shells(UNIFORM)
    assert not neglects_shells(MARKOV)


@given(circle_points(), st.integers(1, 200), st.integers(1, 200))
def test_circle_ball_measure_piecewise_linear(c, n, d):
    r = F(n, d)
    assert ball_measure(LebesgueCircle(), c, r) == min(2 * r, 1)
    assert shell_measure(LebesgueCircle(), c, min(r, F(49, 100))) == 0


def test_target_ratios_circle_examples():
    c = [CirclePoint(0), CirclePoint(F(1, 2))]
    r = target_ratios_circle(c, [F(1, 3), F(2, 3)], [F(1, 8), F(1, 8)])
    m = [ball_measure(LebesgueCircle(), x, s) for x, s in zip(c, r)]
    assert m[1] == 2 * m[0]
    assert all(s < F(1, 8) for s in r)
    (one,) = target_ratios_circle([CirclePoint(F(1, 5))], [1], [F(1, 10)])
    assert 0 < one < F(1, 10)
    a, b = target_ratios_circle(c, [F(1, 2), F(1, 2)], [F(1, 16), F(1, 16)])
    assert a == b
    with pytest.raises(ValueError):
        target_ratios_circle([CirclePoint(0), CirclePoint(0)], [F(1, 2)] * 2, [F(1, 8)] * 2)
    with pytest.raises(InfeasibleRatios):
        target_ratios_circle(c, [F(1, 2)] * 2, [0, F(1, 8)])


@given(st.lists(st.integers(0, 63), min_size=1, max_size=5, unique=True),
       st.lists(st.integers(1, 9), min_size=5, max_size=5),
       st.lists(st.integers(1, 64), min_size=5, max_size=5))
def test_target_ratios_circle_contract(nums, wts, caps):
    n = len(nums)
    centers = [CirclePoint(F(v, 64)) for v in nums]
    lam = [F(w, sum(wts[:n])) for w in wts[:n]]
    caps = [F(c, 256) for c in caps[:n]]
    radii = target_ratios_circle(centers, lam, caps)
    masses = [ball_measure(LebesgueCircle(), c, r) for c, r in zip(centers, radii)]
    assert [m / sum(masses) for m in masses] == lam
    assert all(r < c for r, c in zip(radii, caps))
    for i in range(n):
        for j in range(i + 1, n):
            assert rho(centers[i], centers[j]) >= radii[i] + radii[j]


def test_target_ratios_shift_examples():
    x, y = parse_point("|01"), parse_point("|1")
    res = target_ratios_shift(UNIFORM, [x, y], [F(3, 4), F(1, 4)], F(1, 10), 10)
    p, q = res.depths
    assert q - p == 2 and res.ratios[0] == F(4, 5)
    half = target_ratios_shift(UNIFORM, [x, y], [F(1, 2), F(1, 2)], F(1, 100), 10)
    assert half.depths[0] == half.depths[1]


def test_target_ratios_shift_unreachable():
    x, y = parse_point("|01"), parse_point("|1")
    with pytest.raises(InfeasibleRatios) as err:
        target_ratios_shift(UNIFORM, [x, y], [F(2, 5), F(3, 5)], F(1, 100), 10)
    # enumerating d <= 10: the closest dyadic split 1/(1 + 2^d) is 1/3
    best = min((F(1, 1 + F(2) ** d) for d in range(-10, 11)), key=lambda t: abs(t - F(2, 5)))
    assert err.value.best.ratios[0] == best == F(1, 3)


def test_integrate_invariant_examples():
    assert integrate_invariant(PeriodicOrbit((0,)), chi0) == 1
    assert integrate_invariant(PeriodicOrbit((0, 1)), chi0) == F(1, 2)
    nu = Convex([F(1, 3), F(2, 3)], [PeriodicOrbit((0,)), PeriodicOrbit((1,))])
    assert integrate_invariant(nu, chi0) == F(1, 3)
    with pytest.raises(ValueError):
        PeriodicOrbit((0, 1, 0, 1))


def test_circle_orbit_points():
    nu = PeriodicOrbit((0, 1), kind="circle", b=2)
    assert {p.value for p in nu.points()} == {F(1, 3), F(2, 3)}


def test_integrate_empirical_examples():
    x = parse_point("|01")
    assert integrate_empirical(EmpiricalMeasure(x, 1), chi0) == chi0(x)
    assert integrate_empirical(EmpiricalMeasure(x, 4), chi0) == F(1, 2)
    assert integrate_empirical(EmpiricalMeasure(x, 7), LocallyConstantFn.constant(F(2, 7))) == F(2, 7)


@settings(max_examples=60)
@given(shift_points(), st.integers(1, 60), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_empirical_telescoping(x, k, m, seed):
    vals = [F((seed >> i) % 7 - 3, 1 + (seed >> (i + 3)) % 3) for i in range(2 ** m)]
    f = LocallyConstantFn(m, vals)
    emp = EmpiricalMeasure(x, k)
    gap = abs(integrate_empirical(emp, compose_shift(f)) - integrate_empirical(emp, f))
    assert gap == abs(birkhoff_avg(f, x, k + 1) * (k + 1) - f(x) - birkhoff_avg(f, x, k) * k) / k
    assert gap <= 2 * f.max_abs / k


def test_weakstar_dist_examples():
    o0, o1 = PeriodicOrbit((0,)), PeriodicOrbit((1,))
    same = weakstar_dist(o0, o0, 5)
    assert same.lo == 0 and same.hi == F(1, 32)
    enc = weakstar_dist(o0, o1, 4)
    # family chi[0], chi[1], chi[00], chi[01]: differences 1, 1, 1, 0
    assert enc.lo == F(1, 2) + F(1, 4) + F(1, 8)
    x = parse_point("|01")
    nu = PeriodicOrbit((0, 1))
    M = 6
    for k in (8, 64, 512):
        e = weakstar_dist(EmpiricalMeasure(x, k), nu, M)
        # each family member has depth <= 2, so the empirical error is at most 2/k per member
        assert e.lo <= F(2, k)


@settings(max_examples=40)
@given(st.lists(st.sampled_from([(0,), (1,), (0, 1), (0, 0, 1), (0, 1, 1)]), min_size=3, max_size=3),
       st.integers(1, 8))
def test_weakstar_width_symmetry_triangle(parts, M):
    a, b, c = (PeriodicOrbit(w) for w in parts)
    ab, ba = weakstar_dist(a, b, M), weakstar_dist(b, a, M)
    bc, ac = weakstar_dist(b, c, M), weakstar_dist(a, c, M)
    assert ab.width <= F(1, 2 ** M) and ab.lo == ba.lo
    assert ac.lo <= ab.hi + bc.hi


def test_weakstar_circle_family():
    a = PeriodicOrbit((0, 1), kind="circle")
    b = PeriodicOrbit((0,), kind="circle")
    assert weakstar_dist(a, b, 3).lo > 0
    assert weakstar_dist(a, a, 3).lo == 0


def test_pwl_validation():
    with pytest.raises(ValueError):
        PiecewiseLinearFn([0, 1], [0, 1])
    assert PiecewiseLinearFn.hat(F(1, 2), F(1, 2)).lipschitz == 2
