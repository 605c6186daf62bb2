"""
Counting walks that stay in the quadrant
========================================

Exact counts of confined walks, survival probabilities, and the
finite-horizon conditioned kernel.
"""

from conewalk.enumeration import count_from, finite_horizon_conditioned_kernel, local_counts, survival
from conewalk.model import bundled

m = bundled("simple")

# endpoints of the 18 three-step walks from (1,1) that never touch an axis
table = count_from(m, (1, 1), 3)
print(sorted(table.counts.items()))

# exact survival probabilities P(tau > n)
seq = survival(m, (1, 1), 8)
print([str(p) for p in seq.values])

# returns to the start: c((1,1) -> (1,1); n)
print(local_counts(m, (1, 1), (1, 1), 10))

# one step from (2,1) conditioned on surviving 200 steps
print(float(finite_horizon_conditioned_kernel(m, (2, 1), (3, 1), 0, 200)))
