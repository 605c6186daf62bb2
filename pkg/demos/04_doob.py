"""
Conditioning on never leaving the quadrant
==========================================

The Doob transform by h = ij, sampled paths, and the convergence of the
finite-horizon kernel.
"""

import numpy as np

from conewalk.conditioned import conditioned_vs_finite_horizon, doob_kernel, sample_paths
from conewalk.fields import LatticeField
from conewalk.model import bundled

m = bundled("simple")
h = LatticeField.from_function(lambda i, j: i * j, (0, 0), (80, 80), m.cone)
k = doob_kernel(m, h)
print(k.stochastic, {y: str(p) for y, p in k.row((2, 2)).items()})

# 1000 conditioned paths of 60 steps; none touches an axis
paths = sample_paths(k, (1, 1), 60, 1000, seed=1)
print(paths.min(), np.linalg.norm(paths[:, -1], axis=1).mean())

# P( . | tau > N) approaches the Doob row roughly like 1/(4N)
for N in (100, 200, 400):
    print(N, float(conditioned_vs_finite_horizon(m, h, (2, 1), N).deviation))
