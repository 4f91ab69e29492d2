"""
Steering averages on the circle
===============================

Doubling map, Lebesgue measure and a hat function f. The orbits of 0
and 1/3 give f the averages 0 and 2/3. Small arcs around the two points
are weighted so that the averaged Birkhoff averages follow a chosen
target set, here {2/9, 2/3}, and the sequence keeps returning to both.
"""

from fractions import Fraction as F

from ergolab.construct import limit_set_estimate, sandwich_compile
from ergolab.functions import PiecewiseLinearFn
from ergolab.measure import LebesgueCircle
from ergolab.space import CirclePoint

f = PiecewiseLinearFn.hat(F(1, 2), F(1, 2))
x, y = CirclePoint(0), CirclePoint(F(1, 3))

plan = sandwich_compile(LebesgueCircle(), x, y, f, [F(2, 9), F(2, 3)], 256)
print("limits along the two orbits:", plan.u, plan.v)
print("all certificates hold:", plan.ok)

for s in plan.steps[-6:]:
    print(f"k={s.k:>3}  mix t={s.t}  value={float(s.value):.4f}  bound={float(s.bound):.4f}")

est = limit_set_estimate(plan.series, F(1, 20))
print("clusters:", [f"{float(c):.4f}" for c in est.centers])
