"""
Growth rates and exponents from exact counts
============================================

Fit c_n ~ K r^n n^alpha to exact survival and excursion counts and compare
with alpha = -p/2 and -p-1.
"""

from conewalk.asymptotics import classify, confront_theory, fit_growth
from conewalk.enumeration import local_counts, survival_counts
from conewalk.model import bundled

m = bundled("simple")

# parity oscillations call for period 2; period=None picks it automatically
fit = fit_growth(survival_counts(m, (1, 1), 1000), period=None)
print(fit.period, float(fit.r), float(fit.alpha), fit.converging())
print(float(confront_theory(m, fit, "survival", counts=True).alpha_deviation))

fit = fit_growth(local_counts(m, (1, 1), (1, 1), 1000), period=2, offset=0)
print(float(fit.alpha))

print(classify(bundled("fig4-middle")))
