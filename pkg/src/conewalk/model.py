"""Walk models: weighted step sets confined to open polyhedral cones.

A :class:`WalkModel` bundles a finite step set with exact rational weights
and an open cone of :math:`\\mathbb{Z}^d`.  This module also holds the
model-level analysis: moments, the Laplace transform of the step
distribution, exponential tilting to zero drift, the critical exponent
``p = pi / arccos(a)`` of planar quadrant walks and the level curve
``L(u, v) = 1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from ._hp import hp, is_exact, to_hp


class ModelError(ValueError):
    """Invalid step set, cone or model file."""


class ModelFormatError(ModelError):
    """Malformed model file; ``line`` carries the offending line when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class TiltError(ArithmeticError):
    """The drift cannot be removed by an exponential change of measure."""


def as_fraction(value) -> Fraction:
    """Parse ``3``, ``"3/8"``, ``"0.25"`` or a Fraction into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ModelError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ModelError(f"malformed rational {value!r}") from exc
    raise ModelError(f"weights must be exact rationals, got {value!r}")


def _rank(rows) -> int:
    """Exact rank of a list of rational vectors (Gaussian elimination)."""
    m = [[Fraction(v) for v in row] for row in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


class StepSet:
    """Finite set of lattice steps with nonnegative weights.

    Weights are exact Fractions for every user-built model.  Tilted models
    whose weights could not be recognized as rationals carry high-precision
    reals instead (see :func:`tilt_to_zero_drift`); such step sets cannot be
    enumerated exactly.
    """

    def __init__(self, steps):
        items = []
        for offset, weight in steps:
            off = tuple(int(c) for c in offset)
            if any(off[i] != offset[i] for i in range(len(off))):
                raise ModelError(f"step offsets must be integers: {offset!r}")
            w = weight if not is_exact(weight) else as_fraction(weight)
            if w < 0:
                raise ModelError(f"negative weight {weight!r} for step {off}")
            items.append((off, w))
        if not items:
            raise ModelError("empty step set")
        offs = [o for o, _ in items]
        if len(set(offs)) != len(offs):
            raise ModelError("step offsets must be pairwise distinct")
        if len({len(o) for o in offs}) != 1:
            raise ModelError("all step offsets must have the same length")
        if not any(w > 0 for _, w in items):
            raise ModelError("at least one weight must be positive")
        self._steps = tuple(items)

    @classmethod
    def uniform(cls, offsets, weight=None):
        offsets = list(offsets)
        w = Fraction(1, len(offsets)) if weight is None else weight
        return cls([(o, w) for o in offsets])

    def __iter__(self):
        return iter(self._steps)

    def __len__(self):
        return len(self._steps)

    def __eq__(self, other):
        return isinstance(other, StepSet) and self._steps == other._steps

    def __hash__(self):
        return hash(self._steps)

    def __repr__(self):
        body = ", ".join(f"{o}: {w}" for o, w in self._steps)
        return f"StepSet({{{body}}})"

    @property
    def offsets(self):
        return [o for o, _ in self._steps]

    @property
    def weights(self):
        return [w for _, w in self._steps]

    @property
    def dimension(self):
        return len(self._steps[0][0])

    @property
    def exact(self):
        return all(is_exact(w) for w in self.weights)

    def total(self):
        return sum(self.weights, Fraction(0) if self.exact else hp.mpf(0))

    def normalized(self):
        """Return ``[(offset, w / total)]``."""
        tot = self.total()
        return [(o, w / tot) for o, w in self._steps]

    def integer_weights(self):
        """Primitive integer weights and the unit they are measured in.

        Returns ``(ints, unit)`` with ``weight = int * unit`` for every step
        and ``gcd(ints) = 1``.  Uniform step sets get ``ints`` all equal to 1,
        so weighted counts built from ``ints`` are plain path counts.
        """
        if not self.exact:
            raise ModelError("integer weights need exact rational weights")
        den = 1
        for w in self.weights:
            den = den * w.denominator // math.gcd(den, w.denominator)
        scaled = [int(w * den) for w in self.weights]
        g = 0
        for s in scaled:
            g = math.gcd(g, s)
        return [s // g for s in scaled], Fraction(g, den)

    def max_step(self):
        """Largest absolute coordinate of any step, per axis."""
        d = self.dimension
        return tuple(max(abs(o[i]) for o in self.offsets) for i in range(d))


@dataclass(frozen=True)
class ConeSpec:
    """Open polyhedral cone ``{x : <a_i, x> > 0 for every normal a_i}``.

    ``kind`` is one of ``quadrant``, ``orthant``, ``half-space``,
    ``polyhedral`` or ``full`` (no constraint at all, used for the
    unconstrained kernel).  Membership is decided in exact arithmetic.
    """

    kind: str
    dimension: int
    normals: tuple = ()

    @classmethod
    def quadrant(cls):
        return cls("quadrant", 2, ((1, 0), (0, 1)))

    @classmethod
    def orthant(cls, d):
        normals = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
        return cls("orthant", d, normals)

    @classmethod
    def half_space(cls, normal):
        normal = tuple(as_fraction(c) for c in normal)
        if all(c == 0 for c in normal):
            raise ModelError("half-space normal must be nonzero")
        return cls("half-space", len(normal), (normal,))

    @classmethod
    def polyhedral(cls, normals):
        normals = tuple(tuple(as_fraction(c) for c in n) for n in normals)
        if not normals:
            raise ModelError("polyhedral cone needs at least one normal")
        if len({len(n) for n in normals}) != 1:
            raise ModelError("normals must share one dimension")
        if any(all(c == 0 for c in n) for n in normals):
            raise ModelError("normals must be nonzero")
        return cls("polyhedral", len(normals[0]), normals)

    @classmethod
    def full(cls, d):
        return cls("full", d, ())

    def contains(self, x) -> bool:
        return all(sum(a * c for a, c in zip(n, x)) > 0 for n in self.normals)

    def is_orthant(self):
        """True for the quadrant/orthant ``x_i > 0`` (whatever the ``kind`` label)."""
        if len(self.normals) != self.dimension:
            return False
        unit = {tuple(int(i == j) for j in range(self.dimension)) for i in range(self.dimension)}
        return {tuple(n) for n in self.normals} == unit

    def distance_to_boundary(self, x):
        """Euclidean distance from an interior point to the cone boundary."""
        if not self.normals:
            return hp.inf
        return min(
            to_hp(sum(a * c for a, c in zip(n, x))) / hp.sqrt(to_hp(sum(a * a for a in n)))
            for n in self.normals
        )

    def lower_bounds(self):
        """Per-axis lower bounds implied by orthant-type normals (or None)."""
        lows = [None] * self.dimension
        for n in self.normals:
            nz = [i for i, c in enumerate(n) if c != 0]
            if len(nz) == 1 and n[nz[0]] > 0:
                lows[nz[0]] = 1
        return lows

    def planar_rays(self):
        """Boundary rays ``(r1, r2)`` of a planar cone, counterclockwise order."""
        if self.dimension != 2 or not 1 <= len(self.normals) <= 2:
            raise ModelError("boundary rays are defined for planar cones with one or two facets")
        n1 = self.normals[0]
        if len(self.normals) == 1:
            r1 = (n1[1], -n1[0])
            return r1, (-r1[0], -r1[1])
        n2 = self.normals[1]
        # each ray lies on one facet line and inside the other half-plane
        ra = (n1[1], -n1[0])
        if ra[0] * n2[0] + ra[1] * n2[1] < 0:
            ra = (-ra[0], -ra[1])
        rb = (n2[1], -n2[0])
        if rb[0] * n1[0] + rb[1] * n1[1] < 0:
            rb = (-rb[0], -rb[1])
        if ra[0] * rb[1] - ra[1] * rb[0] < 0:
            ra, rb = rb, ra
        return ra, rb

    def to_json(self):
        if self.kind == "quadrant":
            return {"type": "quadrant"}
        if self.kind == "orthant":
            return {"type": "orthant", "dimension": self.dimension}
        if self.kind == "full":
            return {"type": "full", "dimension": self.dimension}
        if self.kind == "half-space":
            return {"type": "half-space", "normal": [str(c) for c in self.normals[0]]}
        return {"type": "polyhedral", "normals": [[str(c) for c in n] for n in self.normals]}


@dataclass(frozen=True)
class WalkModel:
    """A step set, an open cone and the shared dimension."""

    stepset: StepSet
    cone: ConeSpec
    name: str = ""

    def __post_init__(self):
        if self.stepset.dimension != self.cone.dimension:
            raise ModelError(
                f"step dimension {self.stepset.dimension} != cone dimension {self.cone.dimension}"
            )

    @property
    def dimension(self):
        return self.stepset.dimension

    @property
    def probabilistic(self):
        return self.stepset.exact and self.stepset.total() == 1

    def kernel(self):
        """Normalized one-step probabilities ``{offset: probability}``."""
        return dict(self.stepset.normalized())

    def with_cone(self, cone):
        return WalkModel(self.stepset, cone, self.name)

    def to_json(self):
        return {
            "dimension": self.dimension,
            "steps": [{"offset": list(o), "weight": str(w)} for o, w in self.stepset],
            "cone": self.cone.to_json(),
        }


def moments(model: WalkModel):
    """Drift vector and covariance matrix of the normalized step distribution.

    Both are exact Fractions for rational weights.
    """
    steps = model.stepset.normalized()
    d = model.dimension
    zero = Fraction(0) if model.stepset.exact else hp.mpf(0)
    drift = tuple(sum((w * o[i] for o, w in steps), zero) for i in range(d))
    cov = tuple(
        tuple(
            sum((w * (o[i] - drift[i]) * (o[j] - drift[j]) for o, w in steps), zero)
            for j in range(d)
        )
        for i in range(d)
    )
    return drift, cov


def laplace_transform(model: WalkModel, u):
    """``L(u) = sum_s f(s) exp(<u, s>)`` for the normalized step distribution.

    Exact (a Fraction) when every coordinate of ``u`` is zero.
    """
    if all(c == 0 for c in u):
        return sum((w for _, w in model.stepset.normalized()), Fraction(0))
    uu = [to_hp(c) for c in u]
    return hp.fsum(
        to_hp(w) * hp.exp(hp.fsum(a * b for a, b in zip(uu, o)))
        for o, w in model.stepset.normalized()
    )


def _laplace_derivatives(steps, u):
    d = len(u)
    val = hp.mpf(0)
    grad = [hp.mpf(0)] * d
    hess = hp.zeros(d, d)
    for o, w in steps:
        e = w * hp.exp(hp.fsum(a * b for a, b in zip(u, o)))
        val += e
        for i in range(d):
            grad[i] += e * o[i]
            for j in range(d):
                hess[i, j] += e * o[i] * o[j]
    return val, grad, hess


def _mpf_to_fraction(x):
    m, e = x.man, x.exp
    return Fraction(int(m) * 2**e) if e >= 0 else Fraction(int(m), 2**-e)


def _recognize_rationals(values, max_den=10**12, tol=None):
    """Return Fractions matching ``values`` to ``tol`` (default 1e-40), or None."""
    tol = hp.mpf(10) ** -40 if tol is None else tol
    out = []
    for v in values:
        q = _mpf_to_fraction(hp.mpf(v)).limit_denominator(max_den)
        if abs(to_hp(q) - v) > tol:
            return None
        out.append(q)
    return out


def _drift_is_removable(offsets):
    """False when all steps lie in a closed half-space with some step off its boundary."""
    s = np.array(offsets, dtype=float)
    d = s.shape[1]
    res = linprog(
        np.zeros(d),
        A_ub=-s,
        b_ub=np.zeros(len(s)),
        A_eq=s.sum(axis=0, keepdims=True),
        b_eq=[1.0],
        bounds=[(None, None)] * d,
        method="highs",
    )
    return res.status != 0


def tilt_to_zero_drift(model: WalkModel, tol=None, max_iter=200):
    """Exponentially tilt the steps so that the drift vanishes.

    Minimizes the strictly convex Laplace transform by damped Newton from
    ``u = 0``; the tilted weights are ``w * exp(<u*, s>) / L(u*)``.  When the
    tilted weights are recognized as rationals (checked to 40 digits, and
    their drift is verified to vanish exactly) the returned model carries
    exact Fractions.

    Returns ``(tilted_model, u_star)``.  Raises :class:`TiltError` when the
    infimum of ``L`` is not attained or the step support does not affinely
    span the space.
    """
    drift, _ = moments(model)
    d = model.dimension
    if all(c == 0 for c in drift):
        return model, tuple(hp.mpf(0) for _ in range(d))
    offsets = model.stepset.offsets
    if not _drift_is_removable(offsets):
        raise TiltError("infimum of the Laplace transform is not attained: drift cannot be removed")
    if _rank([[a - b for a, b in zip(o, offsets[0])] for o in offsets[1:]] or [[0] * d]) < d:
        raise TiltError("step support does not affinely span the space")
    tol = hp.mpf(10) ** -50 if tol is None else tol
    steps = [(o, to_hp(w)) for o, w in model.stepset.normalized()]
    u = [hp.mpf(0)] * d
    for _ in range(max_iter):
        val, grad, hess = _laplace_derivatives(steps, u)
        if hp.sqrt(hp.fsum(g * g for g in grad)) < tol:
            break
        delta = hp.lu_solve(hess, hp.matrix([-g for g in grad]))
        slope = hp.fsum(grad[i] * delta[i] for i in range(d))
        t = hp.mpf(1)
        while True:
            cand = [u[i] + t * delta[i] for i in range(d)]
            if _laplace_derivatives(steps, cand)[0] <= val + t * slope / 4 or t < hp.mpf(10) ** -30:
                break
            t /= 2
        u = cand
    else:
        raise TiltError(f"Newton iteration did not converge in {max_iter} steps")
    val = _laplace_derivatives(steps, u)[0]
    tilted = [w * hp.exp(hp.fsum(a * b for a, b in zip(u, o))) / val for o, w in steps]
    exact = _recognize_rationals(tilted)
    if exact is not None and sum(exact) == 1:
        if all(sum(w * o[i] for o, w in zip(offsets, exact)) == 0 for i in range(d)):
            tilted = exact
    new = WalkModel(StepSet(zip(offsets, tilted)), model.cone, model.name)
    return new, tuple(u)


@dataclass
class ExponentReport:
    """Critical exponent data of a planar walk.

    ``a`` is a Fraction when rational, otherwise a high-precision real with
    ``a_squared`` exact whenever the tilted weights are rational.
    ``angle_over_pi`` is set (and ``p`` is a Fraction) exactly when the
    opening angle is a rational multiple of pi.
    """

    tilt: tuple
    tilted_weights: list
    drift: tuple
    covariance: tuple
    correlation: object
    a: object
    a_squared: object
    angle: object
    angle_from_rays: object
    angle_over_pi: Fraction | None
    p: object
    rationality: str
    continued_fraction: list = field(default_factory=list)

    def summary(self):
        return {
            "rationality": self.rationality,
            "a": self.a,
            "angle": self.angle,
            "p": self.p,
        }


def _exact_sqrt(q: Fraction):
    if q < 0:
        return None
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


NIVEN_VALUES = frozenset({Fraction(0), Fraction(1, 2), Fraction(-1, 2), Fraction(1), Fraction(-1)})


def continued_fraction(x, terms=12):
    """First partial quotients of a positive real ``x``."""
    x = hp.mpf(x)
    out = []
    for _ in range(terms):
        near = hp.nint(x)
        a = int(near) if abs(x - near) < hp.mpf(10) ** -40 else int(hp.floor(x))
        out.append(a)
        frac = x - a
        if frac < hp.mpf(10) ** -40:
            break
        x = 1 / frac
    return out


def decorrelation_matrix(cov):
    """Inverse Cholesky factor ``M`` with ``M cov M^T = I``."""
    c = hp.matrix([[to_hp(v) for v in row] for row in cov])
    return hp.inverse(hp.cholesky(c))


def transformed_opening_angle(cone: ConeSpec, cov):
    """Opening angle of the planar cone after decorrelating the walk."""
    r1, r2 = cone.planar_rays()
    m = decorrelation_matrix(cov)
    v1 = m * hp.matrix([to_hp(c) for c in r1])
    v2 = m * hp.matrix([to_hp(c) for c in r2])
    dot = v1[0] * v2[0] + v1[1] * v2[1]
    cross = v1[0] * v2[1] - v1[1] * v2[0]
    ang = hp.atan2(cross, dot)
    return ang if ang > 0 else ang + 2 * hp.pi


def exponent_report(model: WalkModel) -> ExponentReport:
    """Tilt to zero drift, decorrelate and compute ``p = pi / arccos(a)``.

    For the quadrant ``a = -rho`` with ``rho`` the correlation of the tilted
    steps; the angle is computed both as ``arccos(a)`` and as the angle
    between the decorrelated boundary rays, and the two must agree.
    Rationality of ``p`` is decided by Niven's theorem whenever ``a**2`` is
    an exact rational: ``cos(2 * angle) = 2 a**2 - 1`` is then rational, and
    ``angle / pi`` is rational iff that value is in ``{0, +-1/2, +-1}``.
    Other planar polyhedral cones get the transformed opening angle only.
    """
    if model.dimension != 2:
        raise ModelError("exponent reports are defined for planar walks only")
    tilted, u = tilt_to_zero_drift(model)
    drift, cov = moments(tilted)
    det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0]
    if det == 0 or abs(to_hp(det)) < hp.mpf(10) ** -50:
        raise ModelError("degenerate covariance: the walk is not truly two-dimensional")
    weights = tilted.stepset.weights
    angle_rays = transformed_opening_angle(tilted.cone, cov) if tilted.cone.normals else None
    if not tilted.cone.is_orthant():
        return ExponentReport(
            tilt=u, tilted_weights=weights, drift=drift, covariance=cov,
            correlation=None, a=None, a_squared=None, angle=angle_rays,
            angle_from_rays=angle_rays, angle_over_pi=None, p=None,
            rationality="undetermined",
        )

    exact = is_exact(cov[0][1])
    if exact:
        rho_sq = cov[0][1] ** 2 / (cov[0][0] * cov[1][1])
        rho_abs = _exact_sqrt(rho_sq)
        if rho_abs is not None:
            rho = rho_abs if cov[0][1] >= 0 else -rho_abs
            a, a_sq = -rho, rho_sq
            a_hp = to_hp(a)
        else:
            rho = to_hp(cov[0][1]) / hp.sqrt(to_hp(cov[0][0]) * to_hp(cov[1][1]))
            a, a_sq = -rho, rho_sq
            a_hp = a
    else:
        rho = cov[0][1] / hp.sqrt(cov[0][0] * cov[1][1])
        a = a_hp = -rho
        a_sq = None
    angle = hp.acos(a_hp)
    if abs(angle - angle_rays) > hp.mpf(10) ** -30:
        raise ArithmeticError(f"angle mismatch: arccos(a)={angle}, rays={angle_rays}")

    angle_over_pi = None
    if a_sq is not None:
        if 2 * a_sq - 1 in NIVEN_VALUES:
            q = _mpf_to_fraction(angle / hp.pi).limit_denominator(12)
            if abs(to_hp(q) * hp.pi - angle) < hp.mpf(10) ** -50:
                angle_over_pi = q
        rationality = "rational" if angle_over_pi is not None else "irrational_by_niven"
    else:
        rationality = "undetermined"
    if angle_over_pi is not None:
        angle = angle_over_pi.numerator * hp.pi / angle_over_pi.denominator
        p = 1 / angle_over_pi
        cf = continued_fraction(to_hp(p))
    else:
        p = hp.pi / angle
        cf = continued_fraction(p)
    return ExponentReport(
        tilt=u, tilted_weights=weights, drift=drift, covariance=cov,
        correlation=rho, a=a, a_squared=a_sq, angle=angle, angle_from_rays=angle_rays,
        angle_over_pi=angle_over_pi, p=p, rationality=rationality, continued_fraction=cf,
    )


@dataclass
class LevelCurve:
    points: list
    degenerate: bool
    center: tuple


def level_curve_points(model: WalkModel, n_samples: int) -> LevelCurve:
    """Sample ``n_samples`` points of the curve ``L(u, v) = 1``.

    Points are found by 1-D root solves along rays from the minimizer of
    ``L``.  The first ray passes through the origin, so ``(0, 0)`` (where
    ``L = 1`` always) is the first sample.  Zero-drift walks give the
    degenerate curve ``{(0, 0)}``.
    """
    if model.dimension != 2:
        raise ModelError("level curves are computed for planar walks")
    drift, _ = moments(model)
    zero = (hp.mpf(0), hp.mpf(0))
    if all(c == 0 for c in drift):
        return LevelCurve([zero], True, zero)
    _, center = tilt_to_zero_drift(model)
    if n_samples <= 0:
        return LevelCurve([], False, center)
    steps = [(o, to_hp(w)) for o, w in model.stepset.normalized()]

    def lap(p):
        return hp.fsum(w * hp.exp(p[0] * o[0] + p[1] * o[1]) for o, w in steps)

    theta0 = hp.atan2(-center[1], -center[0])
    r0 = hp.sqrt(center[0] ** 2 + center[1] ** 2)
    points = [zero]
    for k in range(1, n_samples):
        theta = theta0 + 2 * hp.pi * k / n_samples
        c, s = hp.cos(theta), hp.sin(theta)

        def g(t, c=c, s=s):
            return lap((center[0] + t * c, center[1] + t * s)) - 1

        hi = r0
        while g(hi) < 0:
            hi *= 2
        lo = hp.mpf(0)
        t = hp.findroot(g, (lo, hi), solver="anderson")
        points.append((center[0] + t * c, center[1] + t * s))
    return LevelCurve(points, False, center)


# -- bundled models and JSON ------------------------------------------------

def _uniform(name, offsets):
    return WalkModel(StepSet.uniform(offsets), ConeSpec.quadrant(), name)


BUNDLED = {
    "simple": _uniform("simple", [(1, 0), (-1, 0), (0, 1), (0, -1)]),
    "fig2-hennequin": WalkModel(
        StepSet(
            [
                ((1, 0), Fraction(1, 6)),
                ((-1, 0), Fraction(1, 3)),
                ((0, 1), Fraction(3, 8)),
                ((0, -1), Fraction(1, 8)),
            ]
        ),
        ConeSpec.quadrant(),
        "fig2-hennequin",
    ),
    "fig4-middle": _uniform("fig4-middle", [(1, 1), (1, 0), (0, -1), (-1, 1), (-1, -1)]),
    "tandem-like": _uniform("tandem-like", [(0, 1), (-2, 1), (1, -2)]),
    "fig3-right": _uniform("fig3-right", [(-1, 1), (1, 0), (0, -1)]),
}


def bundled(name) -> WalkModel:
    try:
        return BUNDLED[name]
    except KeyError:
        raise ModelError(f"unknown bundled model {name!r}; known: {sorted(BUNDLED)}") from None


def _line_of(text, needle):
    if text is None:
        return None
    idx = text.find(needle)
    return None if idx < 0 else text.count("\n", 0, idx) + 1


def _parse_cone(spec, dim):
    kind = spec.get("type")
    if kind == "quadrant":
        return ConeSpec.quadrant()
    if kind == "orthant":
        return ConeSpec.orthant(int(spec.get("dimension", dim)))
    if kind == "full":
        return ConeSpec.full(int(spec.get("dimension", dim)))
    if kind == "half-space":
        return ConeSpec.half_space(spec["normal"])
    if kind == "polyhedral":
        return ConeSpec.polyhedral(spec["normals"])
    raise ModelFormatError(f"unknown cone type {kind!r}")


def model_from_json(data, text=None, name="") -> WalkModel:
    """Build a model from the JSON schema (weights are fraction strings)."""
    try:
        dim = int(data["dimension"])
        raw_steps = data["steps"]
        cone_spec = data.get("cone", {"type": "orthant", "dimension": dim})
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"missing field {exc}") from exc
    steps = []
    for entry in raw_steps:
        off, weight = entry.get("offset"), entry.get("weight")
        try:
            w = as_fraction(weight)
        except ModelError as exc:
            raise ModelFormatError(str(exc), _line_of(text, json.dumps(weight))) from exc
        steps.append((tuple(off), w))
    try:
        stepset = StepSet(steps)
        if stepset.dimension != dim:
            raise ModelFormatError(f"declared dimension {dim} but steps have {stepset.dimension}")
        return WalkModel(stepset, _parse_cone(cone_spec, dim), name or data.get("name", ""))
    except ModelFormatError:
        raise
    except (ModelError, KeyError, TypeError) as exc:
        raise ModelFormatError(str(exc)) from exc


def load_model(source) -> WalkModel:
    """Load a bundled model by name or a JSON model file by path."""
    if source in BUNDLED:
        return BUNDLED[source]
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ModelFormatError(f"cannot read model {source!r}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(exc.msg, exc.lineno) from exc
    return model_from_json(data, text=text)


def dumps_model(model: WalkModel) -> str:
    return json.dumps(model.to_json(), indent=2)
