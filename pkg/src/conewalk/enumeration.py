"""Exact enumeration of walks confined to a cone.

Weighted counts are carried as big integers: every model is rescaled to
primitive integer step weights (see :meth:`StepSet.integer_weights`), so a
table of counts ``c`` at horizon ``n`` represents the weighted sum
``c * unit**n``.  For uniform step sets the integers are plain path counts.
Probabilities divide once, at read-out, by ``W**n`` with ``W`` the sum of
the integer weights.

Two exact engines are available:

* ``dp`` -- a dense dynamic programme over the reachable window (the box
  ``x +- n * max_step`` cut down to the cone and one killing layer), with
  an explicit in-cone mask.  Works for any polyhedral cone.
* ``separable`` -- for orthant walks whose steps each move a single
  coordinate, the coordinates are independent one-dimensional confined
  walks interleaved freely, so ``c(x; n) = sum_k C(n, k) a_k b_{n-k}``
  (a binomial convolution over axes).  Cost is quadratic in ``n`` instead
  of cubic, which makes horizons in the thousands practical.

``method="auto"`` picks ``separable`` whenever it applies.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .model import ModelError, WalkModel


@dataclass
class CountTable:
    """Confined weighted counts ``c(x, y; n)`` from a fixed origin."""

    origin: tuple
    n: int
    counts: dict
    unit: Fraction
    mode: str
    killed: list = field(default_factory=list)

    def count(self, y) -> int:
        return self.counts.get(tuple(y), 0)

    def value(self, y) -> Fraction:
        """Weighted count at ``y`` (a probability for probabilistic models)."""
        return self.count(y) * self.unit**self.n

    @property
    def values(self):
        scale = self.unit**self.n
        return {y: c * scale for y, c in self.counts.items()}

    def total_count(self) -> int:
        return sum(self.counts.values())

    def total(self) -> Fraction:
        return self.total_count() * self.unit**self.n

    def killed_mass(self) -> Fraction:
        """Cumulative mass killed at the boundary, in the units of :meth:`total`.

        Only meaningful for probabilistic models, where
        ``total() + killed_mass() == 1``.
        """
        return sum((k * self.unit**i for i, k in enumerate(self.killed, start=1)), Fraction(0))

    def support(self):
        return sorted(self.counts)

    def to_csv(self, fh):
        d = len(self.origin)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{i}" for i in range(d)] + ["value"])
        for y in self.support():
            w.writerow(list(y) + [str(self.value(y))])


@dataclass
class SurvivalSequence:
    """``P(tau_x > n)`` for ``n = 0..N`` together with the integer counts."""

    origin: tuple
    counts: list
    base: int

    @property
    def values(self):
        return [Fraction(c, self.base**n) for n, c in enumerate(self.counts)]

    def __getitem__(self, n):
        return Fraction(self.counts[n], self.base**n)

    def __len__(self):
        return len(self.counts)


def _integer_steps(model: WalkModel):
    ints, unit = model.stepset.integer_weights()
    steps = [(o, c) for o, c in zip(model.stepset.offsets, ints) if c]
    return steps, unit, sum(ints)


def _require_in_cone(model, x):
    if len(x) != model.dimension:
        raise ModelError(f"point {x} has wrong dimension")
    if not model.cone.contains(x):
        raise ModelError(f"start point {tuple(x)} is outside the open cone")


def _integer_normals(cone):
    out = []
    for nrm in cone.normals:
        den = 1
        for c in nrm:
            den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
        out.append([int(Fraction(c) * den) for c in nrm])
    return out


# -- dense DP ----------------------------------------------------------------


class _Window:
    """Dense box around ``x`` with the in-cone mask, one killing layer wide."""

    def __init__(self, model, x, n):
        m = model.stepset.max_step()
        lows = model.cone.lower_bounds()
        self.lo = []
        self.hi = []
        for i, xi in enumerate(x):
            lo = xi - n * m[i]
            if lows[i] is not None:
                lo = max(lo, lows[i] - m[i])
            self.lo.append(lo)
            self.hi.append(xi + n * m[i])
        self.shape = tuple(h - l + 1 for l, h in zip(self.lo, self.hi))
        grids = np.meshgrid(
            *[np.arange(l, h + 1, dtype=object) for l, h in zip(self.lo, self.hi)], indexing="ij"
        )
        mask = np.ones(self.shape, dtype=bool)
        for nrm in _integer_normals(model.cone):
            dot = sum(a * g for a, g in zip(nrm, grids))
            mask &= (dot > 0).astype(bool)
        self.mask = mask

    def index(self, y):
        return tuple(c - l for c, l in zip(y, self.lo))

    def point(self, idx):
        return tuple(int(i + l) for i, l in zip(idx, self.lo))


def _shift_slices(shape, s):
    dst, src = [], []
    for size, k in zip(shape, s):
        if k >= 0:
            dst.append(slice(k, size))
            src.append(slice(0, size - k))
        else:
            dst.append(slice(0, size + k))
            src.append(slice(-k, size))
    return tuple(dst), tuple(src)


def _dp_forward(model, x, n, record=None):
    """Dense DP from ``x``; yields the integer array after each step.

    ``record`` is called as ``record(k, array, killed_k)`` for ``k = 0..n``.
    Returns the final array and the window.
    """
    steps, _, _ = _integer_steps(model)
    win = _Window(model, x, n)
    cur = np.zeros(win.shape, dtype=object)
    cur[win.index(x)] = 1
    if record:
        record(0, cur, 0)
    shifts = [(_shift_slices(win.shape, s), c) for s, c in steps]
    for k in range(1, n + 1):
        new = np.zeros(win.shape, dtype=object)
        for (dst, src), c in shifts:
            if c == 1:
                new[dst] += cur[src]
            else:
                new[dst] += c * cur[src]
        killed = int(new[~win.mask].sum()) if (~win.mask).any() else 0
        new[~win.mask] = 0
        cur = new
        if record:
            record(k, cur, killed)
    return cur, win


def _table_from_array(arr, win):
    out = {}
    for idx in zip(*np.nonzero(arr)):
        out[win.point(idx)] = int(arr[idx])
    return out


# -- separable fast path -------------------------------------------------------


def axis_groups(model: WalkModel):
    """Per-axis 1-D step lists when the separable engine applies, else None.

    Returns ``(groups, stay)`` with ``groups[i]`` the list of
    ``(displacement, integer_weight)`` of steps moving axis ``i`` only and
    ``stay`` the integer weight of the zero step.
    """
    if not model.cone.is_orthant() or not model.stepset.exact:
        return None
    steps, _, _ = _integer_steps(model)
    groups = [[] for _ in range(model.dimension)]
    stay = 0
    for o, c in steps:
        nz = [i for i, v in enumerate(o) if v]
        if not nz:
            stay += c
        elif len(nz) == 1:
            groups[nz[0]].append((o[nz[0]], c))
        else:
            return None
    return groups, stay


def _line_walk(steps, start, horizon, targets=()):
    """1-D confined walk on ``{1, 2, ...}`` from ``start``.

    Returns ``(survival, locals)``: ``survival[k]`` is the weighted count of
    ``k``-step walks staying positive, ``locals[t][k]`` the count ending at
    ``t``.
    """
    up = max([s for s, _ in steps if s > 0], default=0)
    down = max([-s for s, _ in steps if s < 0], default=0)
    size = start + horizon * up + 1
    cur = np.zeros(size, dtype=object)
    cur[start] = 1
    surv = [1]
    loc = {t: [int(t == start)] for t in targets}
    lo, hi = start, start
    for k in range(1, horizon + 1):
        nlo, nhi = max(1, lo - down), min(size - 1, hi + up)
        new = np.zeros(size, dtype=object)
        for s, c in steps:
            a, b = max(nlo, lo + s), min(nhi, hi + s)
            if a > b:
                continue
            seg = cur[a - s:b - s + 1]
            new[a:b + 1] += seg if c == 1 else c * seg
        cur, lo, hi = new, nlo, nhi
        surv.append(int(cur[lo:hi + 1].sum()))
        for t in targets:
            loc[t].append(int(cur[t]) if t < size else 0)
    return surv, loc


def _binomial_convolution(a, b, horizon):
    """``out[n] = sum_k C(n, k) a[k] b[n-k]`` for ``n <= horizon``."""
    a = np.array(a[: horizon + 1], dtype=object)
    b = np.array(b[: horizon + 1], dtype=object)
    out = []
    row = np.array([1], dtype=object)
    for n in range(horizon + 1):
        if n:
            nxt = np.empty(n + 1, dtype=object)
            nxt[0] = nxt[n] = 1
            nxt[1:n] = row[:-1] + row[1:]
            row = nxt
        out.append(int(np.dot(row * a[: n + 1], b[n::-1])))
    return out


def _binomial_at(a, b, n):
    total = 0
    c = 1
    for k in range(n + 1):
        total += c * a[k] * b[n - k]
        c = c * (n - k) // (k + 1)
    return total


def _identity(horizon):
    return [1] + [0] * horizon


def _separable_factors(model, x, horizon, target=None):
    groups, stay = axis_groups(model)
    factors = []
    for i, steps in enumerate(groups):
        if not steps:
            if target is not None and target[i] != x[i]:
                return [[0] * (horizon + 1)]
            factors.append(_identity(horizon))
            continue
        surv, loc = _line_walk(steps, x[i], horizon, () if target is None else (target[i],))
        factors.append(surv if target is None else loc[target[i]])
    if stay:
        factors.append([stay**k for k in range(horizon + 1)])
    return factors


def _combine(factors, horizon):
    seq = factors[0]
    for f in factors[1:]:
        seq = _binomial_convolution(seq, f, horizon)
    return seq


def _combine_at(factors, n):
    seqs = [list(f) for f in factors]
    if len(seqs) == 1:
        return seqs[0][n]
    if len(seqs) == 2:
        return _binomial_at(seqs[0], seqs[1], n)
    return _combine(seqs, n)[n]


def _resolve_method(model, method):
    if method == "auto":
        return "separable" if axis_groups(model) is not None else "dp"
    if method == "separable" and axis_groups(model) is None:
        raise ModelError("separable engine needs an orthant cone and single-axis steps")
    if method not in ("dp", "separable"):
        raise ValueError(f"unknown method {method!r}")
    return method


# -- public operations ---------------------------------------------------------


def count_from(model: WalkModel, x, n: int) -> CountTable:
    """Table of confined weighted counts ``c(x, y; n)`` over all ``y``.

    One DP sweep per step; walks are killed the first time they leave the
    open cone.  ``c(x; n)`` is ``table.total_count()``.
    """
    x = tuple(x)
    _require_in_cone(model, x)
    if n < 0:
        raise ValueError("horizon must be nonnegative")
    _, unit, _ = _integer_steps(model)
    killed = []
    arr, win = _dp_forward(model, x, n, record=lambda k, a, kk: killed.append(kk) if k else None)
    mode = "probabilistic" if model.probabilistic else "weighted"
    return CountTable(x, n, _table_from_array(arr, win), unit, mode, killed)


def survival_counts(model: WalkModel, x, horizon: int, method="auto"):
    """Integer weighted counts ``c(x; n)`` for ``n = 0..horizon``."""
    x = tuple(x)
    _require_in_cone(model, x)
    if _resolve_method(model, method) == "separable":
        return _combine(_separable_factors(model, x, horizon), horizon)
    totals = []
    _dp_forward(model, x, horizon, record=lambda k, a, kk: totals.append(int(a.sum())))
    return totals


def survival(model: WalkModel, x, N: int, method="auto") -> SurvivalSequence:
    """Exact survival probabilities ``P(tau_x > n)``, ``n = 0..N``."""
    _, _, base = _integer_steps(model)
    return SurvivalSequence(tuple(x), survival_counts(model, x, N, method), base)


def local_counts(model: WalkModel, x, y, horizon: int, method="auto"):
    """Integer weighted counts ``c(x, y; n)`` for ``n = 0..horizon``."""
    x, y = tuple(x), tuple(y)
    _require_in_cone(model, x)
    if not model.cone.contains(y):
        return [0] * (horizon + 1)
    if _resolve_method(model, method) == "separable":
        return _combine(_separable_factors(model, x, horizon, target=y), horizon)
    out = []
    win = _Window(model, x, horizon)
    idx = win.index(y)
    inside = all(0 <= i < s for i, s in zip(idx, win.shape))
    _dp_forward(model, x, horizon, record=lambda k, a, kk: out.append(int(a[idx]) if inside else 0))
    return out


def local_probability(model: WalkModel, x, y, n: int, method="auto") -> Fraction:
    """Exact ``P(x + S_n = y, tau_x > n)``."""
    _, _, base = _integer_steps(model)
    return Fraction(local_counts(model, x, y, n, method)[n], base**n)


def survival_counts_grid(model: WalkModel, points, horizons, method="auto"):
    """``{n: {y: c(y; n)}}`` for many start points and several horizons.

    One-dimensional factors (separable engine) or the backward DP (dense
    engine) are computed once, up to the largest horizon.
    """
    points = [tuple(p) for p in points]
    horizons = sorted(set(int(h) for h in horizons))
    out = {h: {p: 0 for p in points} for h in horizons}
    inside = list(dict.fromkeys(p for p in points if model.cone.contains(p)))
    if not inside or not horizons:
        return out
    top = horizons[-1]
    if _resolve_method(model, method) == "separable":
        groups, stay = axis_groups(model)
        cache = {}
        for p in inside:
            factors = []
            for i, steps in enumerate(groups):
                if not steps:
                    factors.append(_identity(top))
                    continue
                key = (tuple(steps), p[i])
                if key not in cache:
                    cache[key] = _line_walk(steps, p[i], top)[0]
                factors.append(cache[key])
            if stay:
                factors.append([stay**k for k in range(top + 1)])
            for h in horizons:
                out[h][p] = _combine_at(factors, h)
        return out
    for h, vals in _survival_backward(model, inside, horizons).items():
        out[h].update(vals)
    return out


def survival_counts_at(model: WalkModel, points, n: int, method="auto"):
    """``{y: c(y; n)}`` for many start points at one horizon."""
    return survival_counts_grid(model, points, [n], method)[n]


def _survival_backward(model, points, horizons):
    steps, _, _ = _integer_steps(model)
    m = model.stepset.max_step()
    d = model.dimension
    n = horizons[-1]
    lows = model.cone.lower_bounds()
    lo = [min(p[i] for p in points) - n * m[i] for i in range(d)]
    hi = [max(p[i] for p in points) + n * m[i] for i in range(d)]
    for i in range(d):
        if lows[i] is not None:
            lo[i] = max(lo[i], lows[i] - m[i])
    shape = tuple(h - l + 1 for l, h in zip(lo, hi))
    grids = np.meshgrid(*[np.arange(l, h + 1, dtype=object) for l, h in zip(lo, hi)], indexing="ij")
    mask = np.ones(shape, dtype=bool)
    for nrm in _integer_normals(model.cone):
        mask &= (sum(a * g for a, g in zip(nrm, grids)) > 0).astype(bool)
    idx = {p: tuple(c - l for c, l in zip(p, lo)) for p in points}
    cur = np.where(mask, 1, 0).astype(object)
    out = {}
    wanted = set(horizons)
    for k in range(n + 1):
        if k:
            new = np.zeros(shape, dtype=object)
            for s, c in steps:
                # new[y] += c * cur[y + s]
                dst, src = _shift_slices(shape, tuple(-v for v in s))
                new[dst] += c * cur[src]
            new[~mask] = 0
            cur = new
        if k in wanted:
            out[k] = {p: int(cur[i]) for p, i in idx.items()}
    return out


def finite_horizon_row(model: WalkModel, x, remaining: int, method="auto"):
    """One-step law from ``x`` conditioned on surviving ``remaining`` more steps.

    ``{y: k(x, y) P(tau_y > remaining - 1) / P(tau_x > remaining)}``; the
    values sum to one.
    """
    x = tuple(x)
    if remaining < 1:
        raise ValueError("the conditioning horizon must be at least one step")
    steps, _, _ = _integer_steps(model)
    targets = [tuple(a + b for a, b in zip(x, s)) for s, _ in steps]
    surv = survival_counts_at(model, targets + [x], remaining - 1, method)
    denom = survival_counts_at(model, [x], remaining, method)[x]
    if denom == 0:
        raise ZeroDivisionError("the conditioning event has probability zero")
    return {t: Fraction(c * surv[t], denom) for t, (_, c) in zip(targets, steps) if surv[t]}


def finite_horizon_conditioned_kernel(model: WalkModel, x, y, n: int, N: int, method="auto") -> Fraction:
    """``P(x0 + S_{n+1} = y | x0 + S_n = x, tau > N)``, exactly.

    Equals ``k(x, y) P(tau_y > N - n - 1) / P(tau_x > N - n)``.
    """
    if not 0 <= n < N:
        raise ValueError("need 0 <= n < N")
    x, y = tuple(x), tuple(y)
    _require_in_cone(model, x)
    step = tuple(b - a for a, b in zip(x, y))
    if step not in model.kernel():
        return Fraction(0)
    return finite_horizon_row(model, x, N - n, method).get(y, Fraction(0))
