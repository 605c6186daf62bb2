"""Doob h-transforms and samplers for walks conditioned to stay in a cone."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._hp import to_hp
from .enumeration import finite_horizon_row
from .fields import LatticeField
from .model import ModelError, WalkModel, as_fraction


class WindowExhausted(RuntimeError):
    """The walker reached a point whose neighbors are not covered by ``h``."""


class DoobKernel:
    """Transition kernel ``k_h(x, y) = lam * h(y) / h(x) * k(x, y)``.

    Rows are defined at cone points with ``h(x) > 0`` whose in-cone
    neighbors all lie in the window of ``h``.  Targets with ``h(y) = 0``
    carry no mass.  Row sums are computed, not renormalized: a kernel built
    from a field that is not exactly harmonic reports its defect through
    :attr:`max_row_defect`.
    """

    def __init__(self, model: WalkModel, h: LatticeField, lam=1):
        lam = as_fraction(lam) if isinstance(lam, (int, Fraction, str)) else to_hp(lam)
        if lam <= 0:
            raise ModelError("lambda must be positive")
        if any(v < 0 for v in h.values.values()):
            raise ModelError("h must be nonnegative")
        self.model = model
        self.h = h
        self.lam = lam
        self._kern = model.stepset.normalized()
        self._rows = {}
        self.row_defects = {}
        for x in h.points():
            if model.cone.contains(x) and h[x] > 0 and self.covers(x):
                self.row_defects[x] = abs(sum(self.row(x).values()) - 1)

    def covers(self, x):
        for s in self.model.stepset.offsets:
            y = tuple(a + b for a, b in zip(x, s))
            if self.model.cone.contains(y) and not self.h.in_window(y):
                return False
        return True

    def row(self, x):
        """``{y: k_h(x, y)}`` over targets with positive mass."""
        x = tuple(x)
        if x in self._rows:
            return self._rows[x]
        if not self.h.in_window(x) or not self.covers(x):
            raise WindowExhausted(f"the field window does not cover the neighbors of {x}")
        hx = self.h[x]
        if hx <= 0:
            raise ModelError(f"h vanishes at the source point {x}")
        out = {}
        for s, w in self._kern:
            y = tuple(a + b for a, b in zip(x, s))
            if not self.model.cone.contains(y):
                continue
            hy = self.h[y]
            if hy != 0:
                out[y] = out.get(y, 0) + self.lam * w * hy / hx
        self._rows[x] = out
        return out

    def transition(self, x, y):
        return self.row(x).get(tuple(y), Fraction(0))

    @property
    def max_row_defect(self):
        return max(self.row_defects.values(), default=0)

    @property
    def stochastic(self):
        """True when every validated row sums to one (exactly, for exact ``h``)."""
        return bool(self.row_defects) and self.max_row_defect == 0


def doob_kernel(model: WalkModel, h: LatticeField, lam=1) -> DoobKernel:
    """Build the Doob transform of ``model`` by ``(h, lam)``."""
    return DoobKernel(model, h, lam)


def _float_rows(kernel: DoobKernel):
    """Dense lookup tables: cumulative row probabilities over the step list."""
    h = kernel.h
    offsets = np.array(kernel.model.stepset.offsets, dtype=np.int64)
    lo = np.array(h.lo, dtype=np.int64)
    shape = tuple(b - a + 1 for a, b in zip(h.lo, h.hi))
    cum = np.full(shape + (len(offsets),), np.nan)
    for x in kernel.row_defects:
        row = kernel.row(x)
        probs = [float(row.get(tuple(int(a + b) for a, b in zip(x, s)), 0)) for s in offsets]
        cum[tuple(np.subtract(x, lo))] = np.cumsum(probs)
    return offsets, lo, cum


def sample_paths(kernel: DoobKernel, x0, length: int, n_paths: int, seed: int, first_index: int = 0):
    """Sample ``n_paths`` conditioned paths of ``length`` steps from ``x0``.

    Path ``i`` uses its own stream ``numpy.random.default_rng([seed, i])``
    (PCG64 seeded through ``SeedSequence``), so any single path can be
    regenerated alone and the result does not depend on how paths are
    batched.  Returns an int array of shape ``(n_paths, length + 1, d)``.
    """
    x0 = tuple(int(c) for c in x0)
    if not kernel.model.cone.contains(x0) or kernel.h[x0] <= 0:
        raise ModelError(f"the start point {x0} must be a cone point with h > 0")
    offsets, lo, cum = _float_rows(kernel)
    u = np.empty((n_paths, length))
    for k in range(n_paths):
        u[k] = np.random.default_rng([seed, first_index + k]).random(length)
    d = len(x0)
    paths = np.empty((n_paths, length + 1, d), dtype=np.int64)
    paths[:, 0] = x0
    shape = np.array(cum.shape[:-1])
    pos = paths[:, 0].copy()
    for t in range(length):
        idx = pos - lo
        if np.any(idx < 0) or np.any(idx >= shape):
            raise WindowExhausted("a walker left the window of h; enlarge the window")
        c = cum[tuple(idx.T)]
        if np.isnan(c[:, 0]).any():
            bad = tuple(int(v) for v in pos[np.isnan(c[:, 0])][0])
            raise WindowExhausted(f"the field window does not cover the neighbors of {bad}")
        # scale by the row total so float round-off never leaves a gap
        choice = (u[:, t, None] * c[:, -1:] >= c).sum(axis=1)
        choice = np.minimum(choice, len(offsets) - 1)
        pos = pos + offsets[choice]
        paths[:, t + 1] = pos
    return paths


def sample_path(kernel: DoobKernel, x0, length: int, seed: int, path_index: int = 0):
    """One conditioned path, identical to row ``path_index`` of :func:`sample_paths`."""
    return sample_paths(kernel, x0, length, 1, seed, first_index=path_index)[0]


@dataclass
class KernelComparison:
    """Finite-horizon versus Doob one-step laws from ``x``.

    ``flagged`` is set when the Doob row does not sum to one, i.e. ``h``
    is not harmonic at ``x`` and no convergence should be expected.
    """

    x: tuple
    N: int
    deviation: object
    finite: dict
    doob: dict
    doob_row_sum: object
    flagged: bool


def conditioned_vs_finite_horizon(model: WalkModel, h: LatticeField, x, N: int, lam=1, method="auto") -> KernelComparison:
    """Max one-step gap between ``P(. | tau > N)`` and the Doob kernel at ``x``."""
    x = tuple(x)
    finite = finite_horizon_row(model, x, N, method)
    kern = DoobKernel(model, h, lam)
    doob = kern.row(x)
    targets = sorted(set(finite) | set(doob))
    dev = max(abs(finite.get(t, 0) - doob.get(t, 0)) for t in targets)
    total = sum(doob.values())
    return KernelComparison(x, N, dev, finite, doob, total, total != 1)


def deviation_schedule(model: WalkModel, h: LatticeField, points, horizons, lam=1, method="auto"):
    """Max deviation over source ``points`` at each horizon.

    Returns ``(deviations, decreasing)`` with ``decreasing`` true when the
    sequence decreases strictly along ``horizons``.
    """
    devs = [
        max(conditioned_vs_finite_horizon(model, h, x, n, lam, method).deviation for x in points)
        for n in horizons
    ]
    return devs, all(b < a for a, b in zip(devs, devs[1:]))
