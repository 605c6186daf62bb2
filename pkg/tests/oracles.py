"""Independent reference computations used by the test-suite."""

from fractions import Fraction
from itertools import product


def brute_force_counts(model, x, n):
    """All ``|S|**n`` step sequences; ``{endpoint: weighted integer count}``."""
    ints, _ = model.stepset.integer_weights()
    steps = list(zip(model.stepset.offsets, ints))
    out = {}
    for seq in product(steps, repeat=n):
        pos, weight = tuple(x), 1
        alive = True
        for s, c in seq:
            pos = tuple(a + b for a, b in zip(pos, s))
            if not model.cone.contains(pos):
                alive = False
                break
            weight *= c
        if alive and weight:
            out[pos] = out.get(pos, 0) + weight
    return out


def brute_force_probability(model, x, y, n):
    counts = brute_force_counts(model, x, n)
    ints, _ = model.stepset.integer_weights()
    return Fraction(counts.get(tuple(y), 0), sum(ints) ** n)
