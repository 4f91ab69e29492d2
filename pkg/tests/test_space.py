from fractions import Fraction
from itertools import product

import pytest
from conftest import circle_points, shift_points
from hypothesis import given
from hypothesis import strategies as st
from oracles import rho_brute

from ergolab.space import (
    SFT,
    CirclePoint,
    MoHoC,
    MultiBall,
    ShiftPoint,
    ball_as_cylinder,
    canonical_form,
    circle_apply,
    cylinder_depth,
    folner,
    in_cylinder,
    multiball_dedupe,
    multiball_pairwise_disjoint,
    parse_point,
    rho,
    shift_apply,
)

P = parse_point


def test_canonical_form_examples():
    assert canonical_form((), (0, 1, 0, 1)) == ((), (0, 1))
    assert canonical_form((1, 0), (1, 0)) == ((), (1, 0))
    assert ShiftPoint((0, 1, 1), (1,)) == ShiftPoint((0,), (1, 1))
    assert str(ShiftPoint((0,), (1, 1))) == "0|1"


@given(shift_points())
def test_canonicalization_idempotent(x):
    assert ShiftPoint(x.preperiod, x.period) == x
    assert canonical_form(x.preperiod, x.period) == (x.preperiod, x.period)


def test_shift_apply_examples():
    assert shift_apply(0, P("|01")) == P("|01")
    assert shift_apply(1, P("|01")) == P("|10")
    assert shift_apply(3, P("0|1")) == P("|1")


@given(shift_points(), st.integers(0, 12), st.integers(0, 12))
def test_shift_apply_is_monoid_action(x, i, j):
    assert shift_apply(i, shift_apply(j, x)) == shift_apply(i + j, x)
    assert [shift_apply(j, x)[n] for n in range(10)] == [x[j + n] for n in range(10)]


def test_rho_examples():
    assert rho(P("|0"), P("|0")) == 0
    assert rho(P("|0"), P("1|0")) == Fraction(1, 2)
    assert rho(CirclePoint(Fraction(1, 8)), CirclePoint(Fraction(7, 8))) == Fraction(1, 4)
    with pytest.raises(TypeError):
        rho(P("|0"), CirclePoint(0))


@given(shift_points(), shift_points())
def test_rho_matches_coordinatewise_scan(x, y):
    assert rho(x, y) == rho_brute(x, y)


@given(shift_points(), shift_points(), shift_points())
def test_shift_metric_is_ultrametric(x, y, z):
    assert rho(x, z) <= max(rho(x, y), rho(y, z))
    assert rho(x, y) == rho(y, x)


@given(circle_points(), circle_points(), circle_points())
def test_circle_metric_triangle(s, t, u):
    assert rho(s, u) <= rho(s, t) + rho(t, u)
    assert 0 <= rho(s, t) <= Fraction(1, 2)


@given(shift_points(), shift_points(), st.integers(0, 8))
def test_shift_holder_law(x, y, j):
    L = MoHoC(2).L(j)
    assert rho(shift_apply(j, x), shift_apply(j, y)) <= L * rho(x, y)


@given(circle_points(), circle_points(), st.integers(0, 6), st.sampled_from([2, 3, 5]))
def test_circle_holder_law(s, t, j, b):
    assert rho(circle_apply(j, b, s), circle_apply(j, b, t)) <= MoHoC(b).L(j) * rho(s, t)


def test_circle_apply_examples():
    assert circle_apply(0, 2, Fraction(1, 3)).value == Fraction(1, 3)
    assert circle_apply(1, 2, Fraction(1, 3)).value == Fraction(2, 3)
    assert circle_apply(2, 2, Fraction(5, 8)).value == Fraction(1, 2)


def test_ball_as_cylinder_examples():
    assert ball_as_cylinder(P("0|1"), Fraction(1, 8)) == (0, 1, 1)
    # 2^-1 >= 3/4 fails, 2^0 >= 3/4 holds: depth 0
    assert cylinder_depth(Fraction(3, 4)) == 0
    assert ball_as_cylinder(P("0|1"), 1) == ()
    with pytest.raises(ValueError):
        cylinder_depth(0)


def test_ball_three_quarters_by_brute_force_membership():
    x = P("0|1")
    w = ball_as_cylinder(x, Fraction(3, 4))
    for z in product((0, 1), repeat=4):
        y = ShiftPoint(z, (0,))
        assert in_cylinder(w, y) == (rho(x, y) < Fraction(3, 4))


@given(shift_points(), shift_points(), st.integers(1, 200), st.integers(1, 200))
def test_ball_membership_equivalence(x, y, n, d):
    r = Fraction(min(n, d), d)
    assert in_cylinder(ball_as_cylinder(x, r), y) == (rho(x, y) < r)


def test_folner_intervals():
    assert list(folner(3)) == [0, 1, 2]
    assert set(folner(3)) < set(folner(4))
    with pytest.raises(ValueError):
        folner(0)


def test_multiball_dedupe_examples():
    x, y = P("|01"), P("|1")
    q, e = Fraction(1, 4), Fraction(1, 8)
    assert multiball_dedupe(MultiBall([(x, q), (x, e)])).entries == ((x, q),)
    assert multiball_dedupe(MultiBall([(x, q)])).entries == ((x, q),)
    mb = MultiBall([(x, e), (y, e), (x, Fraction(1, 2))])
    out = multiball_dedupe(mb)
    assert dict(out.entries) == {x: Fraction(1, 2), y: e}
    for z in product((0, 1), repeat=5):
        pt = ShiftPoint(z, (0,))
        assert out.contains(pt) == mb.contains(pt)


def test_multiball_rejects_bad_radii():
    with pytest.raises(ValueError):
        MultiBall([(P("|0"), 0)])
    with pytest.raises(ValueError):
        MultiBall([])


def test_pairwise_disjoint_examples():
    half = Fraction(1, 2)
    assert multiball_pairwise_disjoint(MultiBall([(P("|0"), half), (P("|1"), half)]))
    assert multiball_pairwise_disjoint(MultiBall([(P("|01"), 1)]))
    q = Fraction(1, 4)
    assert not multiball_pairwise_disjoint(MultiBall([(CirclePoint(0), q), (CirclePoint(Fraction(1, 8)), q)]))
    assert multiball_pairwise_disjoint(MultiBall([(CirclePoint(0), q), (CirclePoint(Fraction(1, 2)), q)]))


def test_sft_primitivity():
    assert SFT.full(2).primitivity_index() == 1
    assert SFT([[1, 1, 0], [0, 1, 1], [1, 0, 1]]).primitivity_index() == 2
    assert not SFT([[0, 1], [1, 0]]).is_mixing()


def test_point_literals():
    assert P("0|1") == ShiftPoint((0,), (1,))
    assert P("3/8") == CirclePoint(Fraction(3, 8))
    with pytest.raises(ValueError):
        P("1/0")
