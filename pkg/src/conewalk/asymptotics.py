"""Growth constants and critical exponents of enumeration sequences.

Sequences are assumed to behave like ``c_n ~ K r**n n**alpha``.  With
``l_n = log c_n`` the second difference ``l_n - 2 l_{n-1} + l_{n-2}``
does not involve ``K`` or ``r``; divided by the same difference of
``log n`` it gives a local exponent ``alpha_n = alpha + O(1/n)``.  The
local values are extrapolated to ``1/n -> 0`` (Neville-Richardson on the
nodes ``n, n/2, n/4, n/8``), which removes the constant as well as the
first correction terms without any regression.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ._hp import hp, is_exact, to_hp
from .model import ModelError, WalkModel, exponent_report, laplace_transform, tilt_to_zero_drift

MIN_LENGTH = 16


@dataclass
class FitResult:
    """Fitted ``r`` and ``alpha`` with the estimates they come from.

    ``diagnostics`` holds one ``(n, alpha, r)`` triple per window prefix
    (each extrapolated from that prefix alone); ``alpha_spread`` is the
    range of alpha over the last three windows.
    """

    r: object
    alpha: object
    diagnostics: list
    method: str
    period: int
    alpha_spread: object
    local_alpha: list = field(default_factory=list, repr=False)

    @property
    def window_alphas(self):
        return [a for _, a, _ in self.diagnostics]

    def converging(self):
        """True when the last three window estimates move monotonically with shrinking steps."""
        a = self.window_alphas[-3:]
        if len(a) < 3:
            return False
        d1, d2 = a[1] - a[0], a[2] - a[1]
        return d1 * d2 >= 0 and abs(d2) <= abs(d1)


def _logs(seq):
    out = []
    for c in seq:
        if c <= 0:
            raise ValueError("terms must be positive")
        if isinstance(c, Fraction):
            out.append(hp.log(c.numerator) - hp.log(c.denominator))
        else:
            out.append(hp.log(to_hp(c)))
    return out


def _local(logs, n, P):
    """Local ``(alpha, log r)`` at index ``n`` from terms ``n, n-P, n-2P``."""
    l0, l1, l2 = logs[n - 2 * P], logs[n - P], logs[n]
    g0, g1, g2 = (hp.log(m) for m in (n - 2 * P, n - P, n))
    alpha = (l2 - 2 * l1 + l0) / (g2 - 2 * g1 + g0)
    log_r = ((l2 - l1) - alpha * (g2 - g1)) / P
    return alpha, log_r


def _neville(nodes, values):
    """Polynomial extrapolation in ``1/n`` to ``1/n = 0``."""
    xs = [1 / hp.mpf(n) for n in nodes]
    p = list(values)
    m = len(xs)
    for k in range(1, m):
        for i in range(m - k):
            p[i] = (xs[i] * p[i + 1] - xs[i + k] * p[i]) / (xs[i] - xs[i + k])
    return p[0]


def _aitken(values):
    a, b, c = values[-3:]
    den = c - 2 * b + a
    return c if den == 0 else c - (c - b) ** 2 / den


def _estimate(logs, top, P, offset, method):
    nodes = []
    n = top
    while len(nodes) < 4:
        m = n - ((n - offset) % P)
        if m - 2 * P < max(offset, 1):
            break
        nodes.append(m)
        n //= 2
    if len(nodes) < 3:
        return None
    loc = [_local(logs, m, P) for m in nodes]
    if method == "aitken":
        seq = list(reversed(loc))
        return _aitken([a for a, _ in seq]), _aitken([b for _, b in seq]), nodes
    return _neville(nodes, [a for a, _ in loc]), _neville(nodes, [b for _, b in loc]), nodes


def fit_growth(seq, period: int | None = 1, offset: int | None = None, method: str = "richardson") -> FitResult:
    """Fit ``c_n ~ K r**n n**alpha`` to a positive sequence ``c_0, c_1, ...``.

    ``period`` thins the sequence to indices ``offset + period * m``
    (use 2 for walks with a parity constraint; zero terms off the
    subsequence are allowed).  Corrections that oscillate with the parity of
    ``n`` also call for ``period=2``; ``period=None`` tries 1 and 2 and keeps
    the fit whose last window estimates agree best.  ``method`` is ``"richardson"`` (default)
    or ``"aitken"``, the latter applying one Aitken delta-squared step to
    the last three local values.
    """
    seq = list(seq)
    if period is None:
        fits = []
        for P in (1, 2):
            try:
                fits.append(fit_growth(seq, P, offset, method))
            except ValueError:
                continue
        if not fits:
            raise ValueError("no period gives a usable fit")
        return min(fits, key=lambda f: f.alpha_spread)
    P = int(period)
    if P < 1:
        raise ValueError("period must be positive")
    if len(seq) < MIN_LENGTH:
        raise ValueError(f"need at least {MIN_LENGTH} terms")
    if method not in ("richardson", "aitken"):
        raise ValueError(f"unknown method {method!r}")
    top = len(seq) - 1
    if offset is None:
        offset = top % P
    idx = [n for n in range(len(seq)) if n % P == offset % P and n > 0]
    sub = {n: seq[n] for n in idx}
    if any(c <= 0 for c in sub.values()):
        raise ValueError("terms on the fitted subsequence must be positive")
    logs = [None] * len(seq)
    for n, l in zip(idx, _logs([sub[n] for n in idx])):
        logs[n] = l
    windows = []
    m = top
    while m >= MIN_LENGTH * P and len(windows) < 6:
        windows.append(m)
        m //= 2
    windows.reverse()
    diagnostics = []
    for w in windows:
        est = _estimate(logs, w, P, offset % P, method)
        if est is not None:
            diagnostics.append((w, est[0], hp.exp(est[1])))
    if not diagnostics:
        raise ValueError("sequence too short for the requested period")
    local = [(n, _local(logs, n, P)[0]) for n in idx if n - 2 * P >= 1 and logs[n - 2 * P] is not None]
    last = [a for _, a, _ in diagnostics[-3:]]
    spread = max(last) - min(last)
    _, alpha, r = diagnostics[-1]
    return FitResult(r, alpha, diagnostics, method, P, spread, local)


@dataclass
class TheoryComparison:
    kind: str
    predicted_alpha: object
    fitted_alpha: object
    alpha_deviation: object
    predicted_r: object
    fitted_r: object
    r_deviation: object
    p: object


def confront_theory(model: WalkModel, fit: FitResult, kind: str, counts: bool = False) -> TheoryComparison:
    """Compare a fit with ``alpha = -p/2`` (survival) or ``-p - 1`` (excursion).

    The predicted growth is ``min L`` for probabilities and ``W * min L``
    for the integer counts of :mod:`conewalk.enumeration`, ``W`` the sum of
    the primitive integer step weights (``|S|`` for uniform step sets) and
    ``L`` the Laplace transform at the zero-drift tilt.
    """
    if kind not in ("survival", "excursion"):
        raise ValueError("kind must be 'survival' or 'excursion'")
    rep = exponent_report(model)
    if rep.p is None:
        raise ModelError("the exponent p is not defined for this cone")
    p = to_hp(rep.p)
    pred_alpha = -p / 2 if kind == "survival" else -p - 1
    _, u = tilt_to_zero_drift(model)
    lmin = laplace_transform(model, u)
    pred_r = to_hp(lmin)
    if counts:
        pred_r *= sum(model.stepset.integer_weights()[0])
    fa, fr = to_hp(fit.alpha), to_hp(fit.r)
    return TheoryComparison(
        kind, pred_alpha, fa, abs(fa - pred_alpha) / abs(pred_alpha),
        pred_r, fr, abs(fr - pred_r) / pred_r, rep.p if is_exact(rep.p) else p,
    )


@dataclass
class ClassificationNote:
    """D-finiteness verdict drawn from the exponent report.

    ``not_dfinite`` is only ever stated when ``p`` (hence ``alpha = -p - 1``
    for excursions) is certified irrational; otherwise the necessary
    condition gives no obstruction.
    """

    alpha_rationality: str
    dfinite_verdict: str
    p: object
    reason: str


def classify(model: WalkModel) -> ClassificationNote:
    rep = exponent_report(model)
    if rep.rationality == "irrational_by_niven":
        return ClassificationNote(
            "irrational", "not_dfinite", rep.p,
            "excursion exponent -p-1 is irrational; a D-finite series would force it rational",
        )
    if rep.rationality == "rational":
        return ClassificationNote("rational", "no_obstruction", rep.p, "exponent is rational")
    return ClassificationNote("undetermined", "no_obstruction", rep.p, "rationality of the exponent is not certified")
