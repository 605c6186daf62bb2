"""Private high-precision context shared by the package.

A dedicated :class:`mpmath.MPContext` keeps working precision local to this
package, so callers' ``mpmath.mp`` settings are never touched.
"""

from fractions import Fraction

import mpmath

hp = mpmath.MPContext()
hp.dps = 72


def to_hp(value):
    """Convert an int, Fraction, float or mpf to a package-precision real."""
    if isinstance(value, Fraction):
        return hp.mpf(value.numerator) / value.denominator
    return hp.mpf(value)


def is_exact(value):
    return isinstance(value, (int, Fraction))


def fmt_real(value, digits=17):
    """Serialize a real as a decimal string with ``digits`` significant digits."""
    return mpmath.nstr(hp.mpf(value), digits, min_fixed=-5, max_fixed=20)
