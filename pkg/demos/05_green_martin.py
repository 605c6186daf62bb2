"""
Green functions and Martin ratios
=================================

Truncated Green sums are exact; ratios G(x, y_r) / G((1,1), y_r) along a
ray approach V(x) / V(1,1) = ij.
"""

from conewalk.green import green, green_split, martin_ratio
from conewalk.model import bundled

m = bundled("simple")
est = green(m, (1, 1), (1, 1), N_max=400)
print([float(s) for s in est.partial_sums], float(est.tail_estimate))

for r in martin_ratio(m, (2, 2), (1, 1), (1, 1), [4, 8, 12], N_max=400):
    print(r.radius, r.target, float(r.ratio))

s = green_split(m, (1, 1), (5, 5), N_max=400)
print(s.threshold, float(s.ratio))
