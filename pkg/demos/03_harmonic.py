"""
Discrete harmonic functions
===========================

Exact checks for closed forms, and a ratio-limit estimate of the
positive harmonic function from survival probabilities.
"""

from conewalk.fields import LatticeField
from conewalk.harmonic import harmonic_by_ratio, harnack_diagnostic, verify_harmonic
from conewalk.model import bundled

m = bundled("simple")
ij = LatticeField.from_function(lambda i, j: i * j, (0, 0), (51, 51), m.cone)
print(verify_harmonic(m, ij).max_residual)  # exactly 0

# h = i is not harmonic: the neighbour below row j = 1 is killed
i_only = LatticeField.from_function(lambda i, j: i, (0, 0), (10, 10), m.cone)
rep = verify_harmonic(m, i_only)
print(rep.max_residual, rep.worst_point)

# V(x) ~ P_x(tau > N) / P_(1,1)(tau > N), extrapolated in N
est = harmonic_by_ratio(m, ((0, 0), (4, 4)), N_schedule=(125, 250, 500, 1000))
print(float(est.extrapolated[(2, 2)]), float(est.extrapolated[(2, 3)]), [float(s) for s in est.spreads])

# Harnack constant of ij on a ball of radius 3
print(harnack_diagnostic(m, ij, (10, 10), 3).interior)
