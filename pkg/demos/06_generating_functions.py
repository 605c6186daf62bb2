"""
The kernel functional equation
==============================

Generating functions of harmonic functions satisfy
K H = K(x,0) H(x,0) + K(0,y) H(0,y) - K(0,0) H(0,0), checked bit for bit.
"""

from conewalk.fields import LatticeField
from conewalk.genfun import curve_points, kernel, series_from_field, verify_functional_equation
from conewalk.model import bundled

m = bundled("simple")
print(kernel(m).pretty())

D = 20
for label, f in [("ij", lambda i, j: i * j), ("ij(i2-j2)", lambda i, j: i * j * (i * i - j * j)), ("i", lambda i, j: i)]:
    field = LatticeField.from_function(f, (0, 0), (D + 2, D + 2), m.cone)
    print(label, verify_functional_equation(m, series_from_field(field, D)).zero)

# points of {|x| = |y| <= 1, K(x, y) = 0}; write them out for plotting
cloud = curve_points(m, 200, 64)
print(len(cloud.points), cloud.max_kernel_residual)
