"""
Extremal averages of a cylinder indicator
=========================================

For a function depending on the first m symbols, the largest and smallest
invariant integrals are mean-cycle values on the de Bruijn graph. The
finite-horizon sup of Birkhoff averages approaches the largest one from
above at rate 1/k.
"""

from ergolab.ergopt import jenkinson_check, max_mean_cycle, min_mean_cycle
from ergolab.functions import LocallyConstantFn
from ergolab.space import parse_point

chi01 = LocallyConstantFn.indicator((0, 1))
print("max mean cycle:", max_mean_cycle(chi01))
print("min mean cycle:", min_mean_cycle(chi01))

rep = jenkinson_check(chi01, K=64, typical_points=[parse_point("|01"), parse_point("|0")])
for k in (1, 2, 4, 8, 16, 32, 64):
    print(f"k={k:>2}  sup of k-averages = {rep.dbar_series[k - 1]}")
print("checks:", rep.to_json()["checks"])
