"""
A point that visits both extremes
=================================

Concatenating ever longer runs of the two extremal orbits for chi[01]
gives a point whose empirical measures come back near each orbit, along
both k and k^2 sampling. Its Birkhoff averages therefore keep touching
the largest and smallest possible values.
"""

from ergolab.ergopt import max_mean_cycle, min_mean_cycle
from ergolab.functions import LocallyConstantFn
from ergolab.measure import PeriodicOrbit
from ergolab.specification import li_wu_check, oscillation_compile, parse_poly

chi01 = LocallyConstantFn.indicator((0, 1))
targets = [PeriodicOrbit(max_mean_cycle(chi01)[1]), PeriodicOrbit(min_mean_cycle(chi01)[1])]

res = oscillation_compile(targets, [parse_poly("t"), parse_poly("t^2")], 10 ** 4)
print("prefix length:", len(res.prefix))
for c in res.checkpoints[:8]:
    print(f"ell={c.ell}  {c.poly:<4} sample k={c.pi_k:>6}  dist <= {float(c.hi):.4f}")

lw = li_wu_check(res.prefix, chi01, horizon=10 ** 4)
print(f"running max {float(lw.running_max):.4f} vs {lw.abar}")
print(f"running min {float(lw.running_min):.4f} vs {lw.aunder}")
