"""Truncated Green functions and Martin-kernel ratios of confined walks.

``G(x, y) = sum_n P(x + S_n = y, tau > n)`` is accumulated exactly up to a
truncation horizon.  Ratios ``G(x, y_r) / G(x0, y_r)`` along a ray probe
the Martin kernel: for zero-drift walks they approach ``V(x) / V(x0)``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from ._hp import hp, to_hp
from .enumeration import local_counts
from .model import ModelError, WalkModel, as_fraction, exponent_report, moments

DEFAULT_SCHEDULE = (100, 200, 400, 800)


@dataclass
class GreenEstimate:
    """Exact truncated sums ``sum_{n <= N} P(x + S_n = y, tau > n)``.

    ``tail_estimate`` is a heuristic for the missing ``n > N`` mass,
    assuming terms decay like ``C n**-(d/2 + p)`` and fitting ``C`` on
    ``(N/2, N]``; it is None when ``p`` is unavailable.
    """

    x: tuple
    y: tuple
    schedule: list
    partial_sums: list
    tail_estimate: object = None
    tail_exponent: object = None

    @property
    def value(self) -> Fraction:
        return self.partial_sums[-1]

    @property
    def estimate(self):
        tail = self.tail_estimate if self.tail_estimate is not None else 0
        return to_hp(self.value) + tail


def _partial_sums(model, x, y, horizon, method="auto"):
    """All partial sums of the local probabilities, n = 0..horizon."""
    counts = local_counts(model, x, y, horizon, method)
    ints, _ = model.stepset.integer_weights()
    w = sum(ints)
    acc, out, den = 0, [], 1
    for n, c in enumerate(counts):
        if n:
            acc *= w
            den *= w
        acc += c
        out.append(Fraction(acc, den))
    return out, counts, w


def _tail(model, counts, w):
    drift, _ = moments(model)
    if model.dimension != 2 or any(c != 0 for c in drift):
        return None, None
    try:
        p = exponent_report(model).p
    except (ModelError, ArithmeticError):
        return None, None
    if p is None:
        return None, None
    beta = 1 + to_hp(p)
    n_max = len(counts) - 1
    lo = n_max // 2 + 1
    window = range(lo, n_max + 1)
    if not window:
        return None, beta
    scale = hp.mpf(w) ** -n_max
    consts = [to_hp(counts[n] * w ** (n_max - n)) * scale * hp.mpf(n) ** beta for n in window]
    c = hp.fsum(consts) / len(consts)
    return c * hp.zeta(beta, n_max + 1), beta


def green(model: WalkModel, x, y, N_max: int = 800, schedule=None, method="auto") -> GreenEstimate:
    """Truncated Green function with exact partial sums at a horizon schedule."""
    x, y = tuple(x), tuple(y)
    if not model.cone.contains(x) or not model.cone.contains(y):
        raise ModelError("both points must lie in the cone")
    if schedule is None:
        schedule = [n for n in DEFAULT_SCHEDULE if n < N_max] + [N_max]
    schedule = sorted(set(int(n) for n in schedule))
    top = schedule[-1]
    sums, counts, w = _partial_sums(model, x, y, top, method)
    tail, beta = _tail(model, counts, w)
    return GreenEstimate(x, y, schedule, [sums[n] for n in schedule], tail, beta)


def green_value(model: WalkModel, x, y, N: int, method="auto") -> Fraction:
    """``sum_{n <= N} P(x + S_n = y, tau > n)`` as an exact rational."""
    return _partial_sums(model, tuple(x), tuple(y), N, method)[0][-1]


def workers_from_env():
    """Worker count from ``CONEWALK_THREADS`` (default 1: run in process)."""
    try:
        return max(1, int(os.environ.get("CONEWALK_THREADS", "1")))
    except ValueError:
        return 1


def _green_task(args):
    model, x, y, N, method = args
    return green_value(model, x, y, N, method)


def green_values(model: WalkModel, pairs, N: int, method="auto", workers=None):
    """Truncated Green sums for many ``(x, y)`` pairs, in input order.

    With more than one worker the pairs are spread over processes (the
    big-integer work holds the GIL, so threads would not help); results
    are identical either way.
    """
    pairs = [(tuple(x), tuple(y)) for x, y in pairs]
    workers = workers_from_env() if workers is None else workers
    tasks = [(model, x, y, N, method) for x, y in pairs]
    if workers <= 1 or len(tasks) <= 1:
        return [_green_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(_green_task, tasks))


def ray_point(model: WalkModel, x0, direction, r):
    """Target ``floor(r * direction)``, shifted by ``e1`` when ``x0`` cannot reach it.

    Reachability is decided by the lattice generated by the steps; the
    shift is applied once, and an unreachable target after it is an error.
    """
    y = tuple(math.floor(as_fraction(r) * as_fraction(c)) for c in direction)
    if not _reachable(model, x0, y):
        y = (y[0] + 1,) + y[1:]
        if not _reachable(model, x0, y):
            raise ModelError(f"no target near radius {r} is reachable from {tuple(x0)}")
    if not model.cone.contains(y):
        raise ModelError(f"target {y} at radius {r} is outside the cone")
    return y


def _reachable(model, x0, y):
    # membership in the lattice generated by the steps: this is the period
    # obstruction; sign constraints are left to the Green sum itself
    diff = [b - a for a, b in zip(x0, y)]
    steps = model.stepset.offsets
    d = model.dimension
    basis = _hermite_basis([list(s) for s in steps], d)
    rem = list(diff)
    for row in basis:
        piv = next(i for i, c in enumerate(row) if c != 0)
        if rem[piv] % row[piv]:
            return False
        q = rem[piv] // row[piv]
        rem = [a - q * b for a, b in zip(rem, row)]
    return all(c == 0 for c in rem)


def _hermite_basis(rows, d):
    """Row-echelon integer basis of the lattice spanned by ``rows``."""
    rows = [r[:] for r in rows if any(r)]
    basis = []
    for col in range(d):
        live = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = r[col] // piv[col]
                r = [a - q * b for a, b in zip(r, piv)]
                (nxt if r[col] != 0 else rest).append(r)
            live = nxt
        if live:
            basis.append(live[0])
        rows = [r for r in rest if any(r)]
    return basis


@dataclass
class MartinRatio:
    radius: object
    target: tuple
    ratio: Fraction


def martin_ratio(model: WalkModel, x, x0, direction, radii, N_max: int = 800, method="auto", workers=None):
    """``G(x, y_r) / G(x0, y_r)`` at each radius, with truncated Green sums."""
    x, x0 = tuple(x), tuple(x0)
    targets = [ray_point(model, x0, direction, r) for r in radii]
    pairs = [(x0, y) for y in targets] + ([] if x == x0 else [(x, y) for y in targets])
    vals = green_values(model, pairs, N_max, method, workers)
    dens = vals[: len(targets)]
    nums = dens if x == x0 else vals[len(targets):]
    out = []
    for r, y, num, den in zip(radii, targets, nums, dens):
        if den == 0:
            raise ModelError(f"G({x0}, {y}) vanishes at truncation {N_max}")
        out.append(MartinRatio(r, y, num / den))
    return out


@dataclass
class GreenSplit:
    """``G = G_negl + G_fluc`` split at ``n* = |x - y|**2``.

    When ``n* <= 4`` the split is meaningless; ``degenerate`` is set and
    the whole sum is reported as ``fluctuating``.
    """

    threshold: int
    negligible: Fraction
    fluctuating: Fraction
    degenerate: bool

    @property
    def ratio(self):
        return self.negligible / self.fluctuating if self.fluctuating else None


def green_split(model: WalkModel, x, y, N_max: int = 800, method="auto") -> GreenSplit:
    """Split the truncated Green sum into ``n < |x-y|**2`` and the rest."""
    x, y = tuple(x), tuple(y)
    n_star = sum((a - b) ** 2 for a, b in zip(x, y))
    sums, _, _ = _partial_sums(model, x, y, N_max, method)
    total = sums[-1]
    if n_star <= 4:
        return GreenSplit(n_star, Fraction(0), total, True)
    negl = sums[n_star - 1] if n_star - 1 <= N_max else total
    return GreenSplit(n_star, negl, total - negl, False)


def decoupling_check(model: WalkModel, points_x, direction, radii, x0=None, N_max: int = 800, method="auto", workers=None):
    """Martin ratios at the largest radius for each point: estimates of ``V(x)/V(x0)``."""
    x0 = tuple([1] * model.dimension) if x0 is None else tuple(x0)
    y = ray_point(model, x0, direction, max(radii))
    points = [tuple(x) for x in points_x]
    others = [x for x in points if x != x0]
    vals = green_values(model, [(x0, y)] + [(x, y) for x in others], N_max, method, workers)
    den = vals[0]
    if den == 0:
        raise ModelError(f"G({x0}, {y}) vanishes at truncation {N_max}")
    got = dict(zip(others, vals[1:]))
    return {x: Fraction(1) if x == x0 else got[x] / den for x in points}
