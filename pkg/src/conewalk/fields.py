"""Functions on a finite box of lattice points."""

from __future__ import annotations

import csv
from fractions import Fraction
from itertools import product

from ._hp import fmt_real, is_exact


class LatticeField:
    """Values on the lattice box ``lo <= x <= hi`` (inclusive, per axis).

    Points of the box outside ``cone`` are stored as zero, which is the
    Dirichlet condition of a walk killed on leaving the cone.  Values are
    exact Fractions or high-precision reals.
    """

    def __init__(self, lo, hi, values, cone=None):
        self.lo = tuple(int(c) for c in lo)
        self.hi = tuple(int(c) for c in hi)
        if len(self.lo) != len(self.hi) or any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"empty window {self.lo}..{self.hi}")
        self.cone = cone
        self.values = {}
        for p in self.points():
            v = values.get(p, 0)
            if cone is not None and not cone.contains(p):
                v = 0
            self.values[p] = Fraction(v) if isinstance(v, int) else v

    @classmethod
    def from_function(cls, func, lo, hi, cone=None):
        pts = product(*[range(a, b + 1) for a, b in zip(lo, hi)])
        return cls(lo, hi, {p: (func(*p) if cone is None or cone.contains(p) else 0) for p in pts}, cone)

    @property
    def dimension(self):
        return len(self.lo)

    def points(self):
        return list(product(*[range(a, b + 1) for a, b in zip(self.lo, self.hi)]))

    def in_window(self, p):
        return all(a <= c <= b for a, c, b in zip(self.lo, p, self.hi))

    def __getitem__(self, p):
        p = tuple(p)
        if p in self.values:
            return self.values[p]
        if self.cone is not None and not self.cone.contains(p):
            return Fraction(0)
        raise KeyError(f"{p} is outside the window {self.lo}..{self.hi}")

    def __contains__(self, p):
        return tuple(p) in self.values

    def map(self, func):
        return LatticeField(self.lo, self.hi, {p: func(v) for p, v in self.values.items()}, self.cone)

    def scaled(self, c):
        return self.map(lambda v: c * v)

    def normalized(self, x0):
        ref = self[x0]
        if ref == 0:
            raise ZeroDivisionError(f"field vanishes at the normalization point {x0}")
        return self.map(lambda v: v / ref)

    def __add__(self, other):
        if (self.lo, self.hi) != (other.lo, other.hi):
            raise ValueError("fields live on different windows")
        return LatticeField(self.lo, self.hi, {p: v + other.values[p] for p, v in self.values.items()}, self.cone)

    def __eq__(self, other):
        return (
            isinstance(other, LatticeField)
            and (self.lo, self.hi) == (other.lo, other.hi)
            and self.values == other.values
        )

    @property
    def exact(self):
        return all(is_exact(v) for v in self.values.values())

    def to_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{i}" for i in range(self.dimension)] + ["value"])
        for p in self.points():
            v = self.values[p]
            w.writerow(list(p) + [str(v) if is_exact(v) else fmt_real(v)])

    @classmethod
    def from_csv(cls, fh, cone=None):
        """Read a field written by :meth:`to_csv` (decimals parse as exact rationals)."""
        rows = list(csv.reader(fh))
        data = {}
        for row in rows[1:]:
            if not row:
                continue
            *coords, value = row
            data[tuple(int(c) for c in coords)] = Fraction(value)
        if not data:
            raise ValueError("empty field file")
        d = len(next(iter(data)))
        lo = tuple(min(p[i] for p in data) for i in range(d))
        hi = tuple(max(p[i] for p in data) for i in range(d))
        return cls(lo, hi, data, cone)
