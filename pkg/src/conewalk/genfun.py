"""Generating functions of quadrant harmonic functions.

A function ``h`` on the positive quadrant is encoded as
``H(x, y) = sum h(i, j) x**(i-1) y**(j-1)``.  For walks with small
positive jumps its harmonicity (with the Dirichlet condition) is
equivalent to the kernel equation

    K(x, y) H(x, y) = K(x, 0) H(x, 0) + K(0, y) H(0, y) - K(0, 0) H(0, 0),

with ``K(x, y) = sum f(k, l) x**(1-k) y**(1-l) - x y``.  Truncated series
are exact, so that identity is checked bit for bit.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from ._hp import fmt_real, hp, to_hp
from .fields import LatticeField
from .model import ModelError, WalkModel, as_fraction


class BivariateSeries:
    """Power series in ``x, y`` truncated at total degree ``D``.

    Coefficients are exact rationals keyed by ``(i, j)`` with ``i + j <= D``;
    zero coefficients are not stored.
    """

    def __init__(self, coeffs, D: int):
        self.D = int(D)
        self.coeffs = {}
        for (i, j), c in dict(coeffs).items():
            if i < 0 or j < 0:
                raise ValueError("negative exponents are not series terms")
            c = as_fraction(c)
            if i + j <= self.D and c != 0:
                self.coeffs[(i, j)] = c

    @classmethod
    def zero(cls, D):
        return cls({}, D)

    @classmethod
    def one(cls, D):
        return cls({(0, 0): 1}, D)

    @classmethod
    def from_function(cls, func, D):
        """Series with coefficient ``func(i, j)`` at ``x**i y**j``."""
        return cls({(i, k - i): func(i, k - i) for k in range(D + 1) for i in range(k + 1)}, D)

    def __getitem__(self, key):
        return self.coeffs.get(tuple(key), Fraction(0))

    def _common(self, other):
        if isinstance(other, BivariateSeries):
            return other, min(self.D, other.D)
        return BivariateSeries({(0, 0): other}, self.D), self.D

    def __add__(self, other):
        other, D = self._common(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return BivariateSeries(out, D)

    __radd__ = __add__

    def __neg__(self):
        return BivariateSeries({k: -c for k, c in self.coeffs.items()}, self.D)

    def __sub__(self, other):
        other, _ = self._common(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, BivariateSeries):
            c = as_fraction(other)
            return BivariateSeries({k: c * v for k, v in self.coeffs.items()}, self.D)
        D = min(self.D, other.D)
        out = {}
        for (i, j), a in self.coeffs.items():
            if i + j > D:
                continue
            for (k, l), b in other.coeffs.items():
                if i + j + k + l <= D:
                    out[(i + k, j + l)] = out.get((i + k, j + l), 0) + a * b
        return BivariateSeries(out, D)

    __rmul__ = __mul__

    def inverse(self):
        """Multiplicative inverse; the constant term must be nonzero."""
        c0 = self[(0, 0)]
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv = {(0, 0): 1 / c0}
        terms = [(k, c) for k, c in self.coeffs.items() if k != (0, 0)]
        for deg in range(1, self.D + 1):
            for i in range(deg + 1):
                j = deg - i
                acc = 0
                for (a, b), c in terms:
                    g = inv.get((i - a, j - b))
                    if g:
                        acc += c * g
                if acc:
                    inv[(i, j)] = -acc / c0
        return BivariateSeries(inv, self.D)

    def __truediv__(self, other):
        if isinstance(other, BivariateSeries):
            return self * other.inverse()
        return self * (1 / as_fraction(other))

    def __eq__(self, other):
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        D = min(self.D, other.D)
        return self.truncate(D).coeffs == other.truncate(D).coeffs

    def truncate(self, D):
        return BivariateSeries(self.coeffs, min(D, self.D))

    def is_zero(self):
        return not self.coeffs

    def section_x(self):
        """``H(x, 0)``."""
        return BivariateSeries({k: c for k, c in self.coeffs.items() if k[1] == 0}, self.D)

    def section_y(self):
        """``H(0, y)``."""
        return BivariateSeries({k: c for k, c in self.coeffs.items() if k[0] == 0}, self.D)

    def max_degree(self):
        return max((i + j for i, j in self.coeffs), default=-1)

    def __repr__(self):
        return f"BivariateSeries({len(self.coeffs)} terms, D={self.D})"

    def to_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "coeff"])
        for k in range(self.D + 1):
            for i in range(k + 1):
                c = self[(i, k - i)]
                if c:
                    w.writerow([i, k - i, str(c)])

    @classmethod
    def from_csv(cls, fh, D=None):
        rows = [r for r in csv.reader(fh)][1:]
        coeffs = {(int(i), int(j)): Fraction(c) for i, j, c in (r for r in rows if r)}
        if D is None:
            D = max((i + j for i, j in coeffs), default=0)
        return cls(coeffs, D)


@dataclass
class QuadrantKernel:
    """``K(x, y) = sum f(k, l) x**(1-k) y**(1-l) - x y`` as exact coefficients."""

    coeffs: dict

    def series(self, D):
        return BivariateSeries(self.coeffs, D)

    def section_x(self):
        """Coefficients of ``K(x, 0)``."""
        return {k: c for k, c in self.coeffs.items() if k[1] == 0}

    def section_y(self):
        """Coefficients of ``K(0, y)``."""
        return {k: c for k, c in self.coeffs.items() if k[0] == 0}

    @property
    def constant(self):
        """``K(0, 0) = f(1, 1)``."""
        return self.coeffs.get((0, 0), Fraction(0))

    @property
    def vanishes_at_origin(self):
        return self.constant == 0

    @property
    def degree(self):
        return max(i + j for i, j in self.coeffs)

    def __call__(self, x, y):
        if isinstance(x, (hp.mpf, hp.mpc)) or isinstance(y, (hp.mpf, hp.mpc)):
            return hp.fsum(to_hp(c) * x**i * y**j for (i, j), c in self.coeffs.items())
        return sum(c * x**i * y**j for (i, j), c in self.coeffs.items())

    def y_polynomial(self, x, high_precision=False):
        """Coefficients in ``y`` (highest power first) at a numeric ``x``."""
        top = max(j for _, j in self.coeffs)
        out = [0] * (top + 1)
        for (i, j), c in self.coeffs.items():
            out[top - j] += (to_hp(c) if high_precision else float(c)) * x**i
        return out

    def pretty(self):
        def mono(i, j):
            parts = [v if e == 1 else f"{v}^{e}" for v, e in (("x", i), ("y", j)) if e]
            return "*".join(parts) or "1"

        keys = sorted(self.coeffs, key=lambda k: (k[0] + k[1], k))
        return " + ".join(f"({self.coeffs[k]})*{mono(*k)}" for k in keys)


def kernel(model: WalkModel) -> QuadrantKernel:
    """The kernel of a planar walk with jumps at most one in each positive direction."""
    if model.dimension != 2:
        raise ModelError("the kernel is defined for planar walks")
    coeffs = {}
    for (k, l), w in model.stepset.normalized():
        if k > 1 or l > 1:
            raise ModelError(f"step {(k, l)} has a positive jump larger than one")
        key = (1 - k, 1 - l)
        coeffs[key] = coeffs.get(key, 0) + w
    coeffs[(1, 1)] = coeffs.get((1, 1), 0) - 1
    return QuadrantKernel({k: c for k, c in coeffs.items() if c != 0})


def series_from_field(field: LatticeField, D: int) -> BivariateSeries:
    """``sum_{i, j >= 1} h(i, j) x**(i-1) y**(j-1)`` truncated at degree ``D``."""
    if field.dimension != 2:
        raise ModelError("generating functions are built from planar fields")
    need = [(i + 1, k - i + 1) for k in range(D + 1) for i in range(k + 1)]
    missing = [p for p in need if p not in field]
    if missing:
        raise ValueError(f"field window misses {missing[0]} needed for degree {D}")
    return BivariateSeries({(i - 1, j - 1): field[(i, j)] for i, j in need}, D)


@dataclass
class FunctionalEquationCheck:
    """``K H - K(x,0) H(x,0) - K(0,y) H(0,y) + K(0,0) H(0,0)``, exact to ``valid_degree``."""

    residual: BivariateSeries
    valid_degree: int
    kernel_vanishes_at_origin: bool

    @property
    def zero(self):
        return self.residual.is_zero()


def verify_functional_equation(model: WalkModel, H: BivariateSeries) -> FunctionalEquationCheck:
    """Residual of the kernel equation for the truncated series ``H``.

    All monomials of ``K`` have nonnegative degree, so every coefficient of
    the residual up to the truncation degree of ``H`` is exact.
    """
    K = kernel(model)
    D = H.D
    kx = BivariateSeries(K.section_x(), D)
    ky = BivariateSeries(K.section_y(), D)
    res = K.series(D) * H - kx * H.section_x() - ky * H.section_y() + H.section_x().section_y() * K.constant
    return FunctionalEquationCheck(res, D, K.vanishes_at_origin)


@dataclass
class CurveCloud:
    """Points ``(x, y)`` with ``|x| = |y| <= 1`` and ``K(x, y) = 0``."""

    points: list
    max_kernel_residual: float
    max_modulus_gap: float

    def xs(self):
        return [x for x, _ in self.points]

    def to_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re_x", "im_x", "re_y", "im_y"])
        for x, y in self.points:
            w.writerow([fmt_real(x.real), fmt_real(x.imag), fmt_real(y.real), fmt_real(y.imag)])


def _moduli(K, xs):
    """Sorted root moduli of ``K(x, .)`` for each ``x`` in ``xs`` (NaN-padded)."""
    xs = np.atleast_1d(np.asarray(xs, dtype=complex))
    top = max(j for _, j in K.coeffs)
    poly = np.zeros((top + 1, xs.size), dtype=complex)
    for (i, j), c in K.coeffs.items():
        poly[j] += float(c) * xs**i
    out = np.full((xs.size, top), np.nan)
    lead = poly[top]
    ok = np.abs(lead) > 1e-14
    if top == 0 or not ok.any():
        return out
    # companion matrices of the monic polynomials, eigenvalues in one batch
    comp = np.zeros((int(ok.sum()), top, top), dtype=complex)
    comp[:, 0, :] = -(poly[top - 1::-1, ok] / lead[ok]).T
    if top > 1:
        comp[:, np.arange(1, top), np.arange(top - 1)] = 1
    out[ok] = np.sort(np.abs(np.linalg.eigvals(comp)), axis=1)
    return out


def _polish(K, r, theta):
    """Roots ``y`` of ``K(x, y)`` at ``x = r e^{i theta}`` in high precision."""
    x = hp.mpf(r) * hp.expjpi(hp.mpf(theta) / hp.pi)
    coeffs = K.y_polynomial(x, high_precision=True)
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
    if len(coeffs) < 2:
        return x, []
    return x, hp.polyroots(coeffs, maxsteps=200, extraprec=200)


def _crossings(values, grid, refine):
    """Grid points and refined roots where ``values`` changes sign."""
    out = []
    for a in range(len(grid) - 1):
        ga, gb = values[a], values[a + 1]
        if np.isnan(ga) or np.isnan(gb):
            continue
        if ga == 0:
            out.append(grid[a])
        elif ga * gb < 0:
            out.append(brentq(refine, grid[a], grid[a + 1], xtol=1e-13))
    return out


def _gap(K, r, theta, k):
    return _moduli(K, [r * complex(math.cos(theta), math.sin(theta))])[0, k] - r


def curve_points(model: WalkModel, n_theta: int = 180, n_radius: int = 64, tol: float = 1e-9) -> CurveCloud:
    """Sample the curve ``{|x| = |y| <= 1, K(x, y) = 0}``.

    With ``x = r e^{i theta}``, the sorted root moduli ``|y_k|`` of
    ``K(x, .)`` are compared with ``r``.  Sign changes of ``|y_k| - r`` are
    searched along radii (fixed ``theta``, ``n_theta`` phases) and along
    circles (fixed ``r``, ``n_radius`` moduli ending at ``r = 1``), located
    with Brent's method, and every candidate is recomputed in high
    precision.  Only pairs with ``||y| - |x|| < tol`` and ``|K| < tol`` are
    kept.
    """
    K = kernel(model)
    radii = np.linspace(0, 1, n_radius + 1)[1:]
    thetas = 2 * np.pi * np.arange(n_theta) / n_theta
    top = max(j for _, j in K.coeffs)
    candidates = []
    phase = np.exp(1j * thetas)
    g_all = _moduli(K, np.outer(phase, radii).ravel()).reshape(n_theta, n_radius, top) - radii[None, :, None]
    for a, theta in enumerate(thetas):
        for k in range(top):
            g = g_all[a, :, k]
            for r in _crossings(g, radii, lambda r, k=k, t=theta: _gap(K, r, t, k)):
                candidates.append((r, theta))
            if abs(g[-1]) < 1e-6:
                candidates.append((1.0, theta))
    circle = np.append(thetas, 2 * np.pi)
    g_all = _moduli(K, np.outer(radii, np.exp(1j * circle)).ravel()).reshape(n_radius, n_theta + 1, top) - radii[:, None, None]
    for b, r in enumerate(radii):
        for k in range(top):
            g = g_all[b, :, k]
            for t in _crossings(g, circle, lambda t, k=k, r=r: _gap(K, r, t, k)):
                candidates.append((r, t % (2 * np.pi)))
    best = {}
    for r, theta in candidates:
        x, ys = _polish(K, r, theta)
        for y in ys:
            gap = abs(abs(y) - abs(x))
            if gap >= tol:
                continue
            kv = abs(K(x, y))
            if kv >= tol:
                continue
            key = tuple(round(float(v), 9) for v in (x.real, x.imag, y.real, y.imag))
            if key not in best or gap < best[key][2]:
                best[key] = (x, y, gap, kv)
    pts = [best[k] for k in sorted(best)]
    return CurveCloud(
        [(x, y) for x, y, _, _ in pts],
        max((float(kv) for *_, kv in pts), default=0.0),
        max((float(g) for _, _, g, _ in pts), default=0.0),
    )
