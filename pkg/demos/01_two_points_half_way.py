"""
Two points whose averages never settle
======================================

Two complementary binary sequences built from factorial-length blocks.
Along one of them the running average of chi[0] keeps swinging between
near 0 and near 1, yet averaging over two equal balls around the pair
gives exactly one half at every scale.
"""

from fractions import Fraction
from math import factorial

from ergolab.averaging import birkhoff_avg
from ergolab.counterexamples import block_lengths, cant_take_limsups, limsup_points
from ergolab.functions import LocallyConstantFn

chi0 = LocallyConstantFn.indicator((0,))

# block n has length (n-1)*(n-1)!, so it dominates everything before it
print("block lengths:", block_lengths(7))

x, y = limsup_points(9)
print("x starts", "".join(map(str, x.prefix(40))))
print("y starts", "".join(map(str, y.prefix(40))))

# sample the average at the ends of the odd blocks
for n in range(1, 6):
    s = factorial(2 * n - 1)
    print(f"Avg at s={s:>6}: {float(birkhoff_avg(chi0, x, s)):.4f}")

# the two-ball spatial average of the same temporal averages
rep = cant_take_limsups(30)
print("ball averages k=1..30 all equal to 1/2:", all(v == Fraction(1, 2) for _, v in rep.rows))
