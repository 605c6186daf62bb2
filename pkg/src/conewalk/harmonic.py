"""Discrete lambda-harmonic functions of confined walks.

A function ``h`` vanishing outside the cone is lambda-harmonic when
``h(x) = lambda * sum_y k(x, y) h(y)`` at every cone point.  The tools
here check that identity exactly on a finite window, estimate the
harmonic function of zero-drift walks as a limit of survival ratios, and
produce the comparison diagnostics against exponential, product-form and
continuous (reduite) harmonic functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import NamedTuple

from ._hp import hp, is_exact, to_hp
from .enumeration import survival_counts_grid
from .fields import LatticeField
from .model import ConeSpec, ModelError, WalkModel, laplace_transform, moments


@dataclass
class HarmonicityReport:
    """Outcome of a harmonicity check on a window.

    ``max_residual`` is the largest ``|h(x) - lambda * sum_y k(x, y) h(y)|``
    over the checked points (exact for exact fields).  Checks that reduce
    to a one-dimensional relation also fill ``reduced_residual``.
    """

    lam: object
    max_residual: object
    interior_points_checked: int
    worst_point: tuple | None = None
    reduced_residual: object = None
    residuals: dict = field(default_factory=dict, repr=False)

    @property
    def harmonic(self):
        return self.interior_points_checked > 0 and self.max_residual == 0


def _checkable(model, fld, x):
    for s in model.stepset.offsets:
        y = tuple(a + b for a, b in zip(x, s))
        if not fld.in_window(y) and model.cone.contains(y):
            return False
    return True


def residual_field(model: WalkModel, fld: LatticeField, lam=1):
    """Signed residuals ``h(x) - lam * sum_y k(x, y) h(y)`` at checkable cone points."""
    kern = model.stepset.normalized()
    out = {}
    for x in fld.points():
        if not model.cone.contains(x) or not _checkable(model, fld, x):
            continue
        acc = 0
        for s, w in kern:
            y = tuple(a + b for a, b in zip(x, s))
            if model.cone.contains(y):
                acc += w * fld[y]
        out[x] = fld[x] - lam * acc
    return out


def verify_harmonic(model: WalkModel, fld: LatticeField, lam=1) -> HarmonicityReport:
    """Exact harmonicity check of ``fld`` at every checkable window point.

    A point is checkable when each one-step neighbor inside the cone also
    lies in the window; neighbors outside the cone contribute zero.
    """
    res = residual_field(model, fld, lam)
    if not res:
        raise ValueError("window too small: no point has all its neighbors inside")
    worst = max(res, key=lambda p: abs(res[p]))
    return HarmonicityReport(lam, abs(res[worst]), len(res), worst, residuals=res)


@dataclass
class RatioEstimate:
    """Survival-ratio estimates of the harmonic function, normalized at ``x0``.

    ``fields[N]`` holds the exact ratios ``P(tau_y > N-1) / P(tau_x0 > N-1)``;
    ``lambdas[N]`` the raw quotient ``P(tau_x0 > N-1) / P(tau_x0 > N)``.
    ``extrapolated`` is one Richardson step assuming an ``O(1/N)`` correction
    (a pragmatic order: the true rate is not known in general) and
    ``spread`` the per-point gap between the last two schedule values.
    """

    x0: tuple
    schedule: list
    fields: dict
    lambdas: dict
    extrapolated: LatticeField
    spread: dict
    spreads: list
    extrapolation_order: str = "O(1/N), assumed"

    @property
    def max_spread(self):
        return max(self.spread.values())


def harmonic_by_ratio(model: WalkModel, window, x0=None, N_schedule=(250, 500, 1000, 2000), method="auto"):
    """Estimate the positive harmonic function of a zero-drift walk.

    ``window`` is ``(lo, hi)``.  Survival probabilities are exact; only the
    limit ``N -> infinity`` is approximated.
    """
    drift, _ = moments(model)
    if any(c != 0 for c in drift):
        raise ModelError("ratio limits are estimated for zero-drift walks only")
    lo, hi = window
    x0 = tuple([1] * model.dimension) if x0 is None else tuple(x0)
    if not model.cone.contains(x0):
        raise ModelError(f"normalization point {x0} is outside the cone")
    schedule = sorted(N_schedule)
    if len(schedule) < 2:
        raise ValueError("need at least two horizons")
    base = LatticeField(lo, hi, {}, model.cone)
    pts = [p for p in base.points() if model.cone.contains(p)]
    horizons = [n - 1 for n in schedule] + list(schedule)
    counts = survival_counts_grid(model, pts + [x0], horizons, method)
    ints, _ = model.stepset.integer_weights()
    total = sum(ints)
    fields, lambdas = {}, {}
    for n in schedule:
        c = counts[n - 1]
        ref = c[x0]
        fields[n] = LatticeField(lo, hi, {p: Fraction(c[p], ref) for p in pts}, model.cone)
        lambdas[n] = Fraction(total * ref, counts[n][x0])
    n1, n2 = schedule[-2], schedule[-1]
    f1, f2 = fields[n1], fields[n2]
    extra = {p: to_hp(n2 * f2[p] - n1 * f1[p]) / (n2 - n1) for p in pts}
    extra[x0] = hp.mpf(1)
    spread = {p: abs(to_hp(f2[p] - f1[p])) for p in pts}
    spreads = [
        max(abs(to_hp(fields[b][p] - fields[a][p])) for p in pts)
        for a, b in zip(schedule, schedule[1:])
    ]
    return RatioEstimate(
        x0, schedule, fields, lambdas,
        LatticeField(lo, hi, extra, model.cone), spread, spreads,
    )


def exponential_harmonic(model: WalkModel, u, window=None):
    """The exponential ``h(x) = exp(<u, x>)`` and its full-plane harmonicity.

    At every lattice point the residual equals ``h(x) (1 - L(u))``, so the
    report carries relative residuals ``|residual / h(x)|``; they agree
    with ``|L(u) - 1|`` (exactly zero when ``u = 0``).
    Returns ``(field, report)``.
    """
    d = model.dimension
    full = model.with_cone(ConeSpec.full(d))
    if window is None:
        m = max(model.stepset.max_step())
        window = (tuple([-m - 1] * d), tuple([m + 1] * d))
    lo, hi = window
    if all(c == 0 for c in u):
        func = lambda *x: Fraction(1)  # noqa: E731
    else:
        uu = [to_hp(c) for c in u]
        func = lambda *x: hp.exp(hp.fsum(a * b for a, b in zip(uu, x)))  # noqa: E731
    fld = LatticeField.from_function(func, lo, hi)
    res = residual_field(full, fld, 1)
    if not res:
        raise ValueError("window too small for the step set")
    rel = {p: abs(r / fld[p]) for p, r in res.items()}
    worst = max(rel, key=rel.get)
    lap = laplace_transform(model, u)
    report = HarmonicityReport(1, rel[worst], len(rel), worst, reduced_residual=abs(lap - 1), residuals=rel)
    return fld, report


def product_form_check(model: WalkModel, h0, u, i_range=3) -> HarmonicityReport:
    """Check ``h(i, j) = exp(u i) h0(j)`` on the half-plane ``j > 0``.

    ``h0`` is a sequence indexed by ``j`` (``h0[0]`` is ignored; the
    boundary value is zero).  The 2-D check runs over ``|i| <= i_range``;
    ``reduced_residual`` is the residual of the induced 1-D relation
    ``h0(j) = sum_(k,l) f(k,l) exp(u k) h0(j + l)``.
    """
    if model.dimension != 2:
        raise ModelError("product forms are checked on planar walks")
    cone = model.cone
    if len(cone.normals) != 1 or cone.normals[0][0] != 0 or cone.normals[0][1] <= 0:
        raise ModelError("product_form_check needs the half-plane {j > 0}")
    jmax = len(h0) - 1
    exact = u == 0
    eu = (lambda i: Fraction(1)) if exact else (lambda i: hp.exp(to_hp(u) * i))
    vals = lambda j: Fraction(0) if j <= 0 else h0[j]  # noqa: E731
    fld = LatticeField.from_function(lambda i, j: eu(i) * vals(j), (-i_range, 1), (i_range, jmax), cone)
    res = residual_field(model, fld, 1)
    if not res:
        raise ValueError("window too small for the step set")
    worst = max(res, key=lambda p: abs(res[p]))
    kern = model.stepset.normalized()
    up = max(s[1] for s in model.stepset.offsets)
    reduced = {}
    for j in range(1, jmax - max(up, 0) + 1):
        acc = sum(w * eu(s[0]) * vals(j + s[1]) for s, w in kern)
        reduced[j] = vals(j) - acc
    red = max((abs(v) for v in reduced.values()), default=None)
    return HarmonicityReport(1, abs(res[worst]), len(res), worst, reduced_residual=red, residuals=reduced)


def reduite(model: WalkModel):
    """The continuous harmonic ``u(x) = rho**(pi/theta) sin(t pi/theta)``.

    Coordinates are decorrelated with covariance scaled to unit
    determinant (the reduite is defined up to a constant, so only the shape
    of the covariance matters).  Returns ``(u, distance, theta)``: callables
    giving the reduite and the relative distance ``d(x, boundary) / |x|`` in
    decorrelated coordinates, and the opening angle.
    """
    if model.dimension != 2:
        raise ModelError("the reduite comparison is planar")
    drift, cov = moments(model)
    if any(c != 0 for c in drift):
        raise ModelError("the reduite comparison needs a zero-drift walk")
    c = hp.matrix([[to_hp(v) for v in row] for row in cov])
    lch = hp.cholesky(c)
    m = hp.inverse(lch) * hp.sqrt(lch[0, 0] * lch[1, 1])
    r1, r2 = model.cone.planar_rays()
    v1 = m * hp.matrix([to_hp(v) for v in r1])
    theta = _angle(v1, m * hp.matrix([to_hp(v) for v in r2]))
    expo = hp.pi / theta

    def polar(x):
        z = m * hp.matrix([to_hp(v) for v in x])
        return hp.sqrt(z[0] ** 2 + z[1] ** 2), _angle(v1, z)

    def u(x):
        rho, t = polar(x)
        return rho**expo * hp.sin(t * expo)

    def distance(x):
        rho, t = polar(x)
        if not 0 < t < theta:
            return hp.mpf(0)
        d1 = hp.sin(t) if t < hp.pi / 2 else hp.mpf(1)
        d2 = hp.sin(theta - t) if theta - t < hp.pi / 2 else hp.mpf(1)
        return min(d1, d2)

    return u, distance, theta


def _angle(v1, v2):
    ang = hp.atan2(v1[0] * v2[1] - v1[1] * v2[0], v1[0] * v2[0] + v1[1] * v2[1])
    return ang if ang >= 0 else ang + 2 * hp.pi


def reduite_compare(model: WalkModel, fld: LatticeField, epsilon):
    """Ratios ``field(x) / u(x)`` away from the boundary, sorted by ``|x|``.

    Only points with ``d(x, boundary) >= epsilon |x|`` (decorrelated
    coordinates) are kept; a flattening ratio indicates ``V ~ c u``.
    """
    u, distance, _ = reduite(model)
    eps = to_hp(epsilon) - hp.mpf(10) ** -40
    out = []
    for p in fld.points():
        if not model.cone.contains(p) or distance(p) < eps:
            continue
        out.append((p, to_hp(fld[p]) / u(p)))
    if not out:
        raise ValueError("no window point passes the distance filter")
    out.sort(key=lambda item: (sum(c * c for c in item[0]), item[0]))
    return out


class HarnackConstants(NamedTuple):
    interior: object
    boundary: object


def harnack_diagnostic(model: WalkModel, fld: LatticeField, x, R: int, reference=None) -> HarnackConstants:
    """Empirical Harnack constants on the lattice box ``|z - x|_inf <= R``.

    ``interior`` is ``max f / min f`` over the box when it sits inside the
    cone (else None).  ``boundary`` is the largest
    ``(f(z)/g(z)) / (f(e)/g(e))`` over box points ``z`` adjacent to the
    boundary, with ``e`` the box point deepest inside the cone and ``g``
    the ``reference`` field (``g = 1`` when omitted); None when no box
    point touches the boundary.  These are numbers for inspection, not
    bounds.
    """
    x = tuple(x)
    ball = [tuple(a + b for a, b in zip(x, off)) for off in product(range(-R, R + 1), repeat=len(x))]
    inside = [z for z in ball if model.cone.contains(z)]
    if any(not fld.in_window(z) for z in inside):
        raise ValueError(f"the box of radius {R} around {x} leaves the field window")
    if any(fld[z] <= 0 for z in inside):
        raise ValueError("the field must be positive on the cone part of the box")
    interior = None
    if len(inside) == len(ball):
        vals = [fld[z] for z in inside]
        q = max(vals) / min(vals)
        interior = q if is_exact(q) else to_hp(q)
    touching = [
        z for z in inside
        if any(not model.cone.contains(tuple(a + b for a, b in zip(z, s))) for s in model.stepset.offsets)
    ]
    boundary = None
    if touching:
        e = max(inside, key=lambda z: (model.cone.distance_to_boundary(z), tuple(-c for c in z)))
        g = reference if reference is not None else None
        ratio = (lambda z: fld[z] / g[z]) if g is not None else (lambda z: fld[z])
        boundary = max(ratio(z) for z in touching) / ratio(e)
    return HarnackConstants(interior, boundary)
