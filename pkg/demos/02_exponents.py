"""
Critical exponents from the step set
====================================

Tilt to zero drift, decorrelate, read off the cone angle and
p = pi / arccos(-rho).
"""

from conewalk.model import bundled, exponent_report, tilt_to_zero_drift

for name in ("simple", "tandem-like", "fig4-middle", "fig3-right"):
    rep = exponent_report(bundled(name))
    print(f"{name:12s} a={rep.a}  p={rep.p}  {rep.rationality}")

# the tilted weights of the tandem-like walk are recognized as rationals
tilted, u = tilt_to_zero_drift(bundled("tandem-like"))
print([str(w) for w in tilted.stepset.weights], [float(c) for c in u])
