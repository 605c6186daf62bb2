from fractions import Fraction

import pytest

from conewalk.green import (
    decoupling_check,
    green,
    green_split,
    green_value,
    green_values,
    martin_ratio,
    ray_point,
    workers_from_env,
)
from conewalk.model import ConeSpec, ModelError, StepSet, WalkModel, bundled

from oracles import brute_force_probability

SIMPLE = bundled("simple")


@pytest.mark.parametrize("name", ["simple", "fig4-middle", "fig2-hennequin"])
def test_partial_sums_match_brute_force(name):
    m = bundled(name)
    x, y = (1, 1), (2, 1)
    for N in range(0, 9):
        expected = sum(brute_force_probability(m, x, y, n) for n in range(N + 1))
        assert green_value(m, x, y, N) == expected


def test_partial_sums_nondecreasing_and_stable():
    est = green(SIMPLE, (1, 1), (1, 1), N_max=800)
    sums = est.partial_sums
    assert est.schedule == [100, 200, 400, 800]
    assert all(b >= a for a, b in zip(sums, sums[1:]))
    assert abs(sums[3] - sums[2]) / sums[3] < 0.01
    assert 0 < est.tail_estimate < 1e-4 and est.tail_exponent == 3
    assert abs(est.estimate - sums[3]) < 1e-4


def test_green_is_symmetric_for_symmetric_steps():
    assert green_value(SIMPLE, (1, 2), (4, 3), 120) == green_value(SIMPLE, (4, 3), (1, 2), 120)


def test_parallel_values_preserve_order(monkeypatch):
    pairs = [((1, 1), (3, 3)), ((2, 1), (3, 4)), ((1, 1), (1, 1))]
    serial = green_values(SIMPLE, pairs, 60, workers=1)
    assert green_values(SIMPLE, pairs, 60, workers=2) == serial
    monkeypatch.setenv("CONEWALK_THREADS", "3")
    assert workers_from_env() == 3
    monkeypatch.setenv("CONEWALK_THREADS", "x")
    assert workers_from_env() == 1


def test_points_outside_cone_rejected():
    with pytest.raises(ModelError):
        green(SIMPLE, (0, 1), (1, 1))


def test_ray_point_shifts_to_reachable_parity():
    assert ray_point(SIMPLE, (1, 1), (1, 1), 12) == (12, 12)
    # the simple walk changes i + j parity every step, so every target is reachable
    assert ray_point(SIMPLE, (1, 1), (2, 1), 6) == (12, 6)
    diag = WalkModel(StepSet.uniform([(1, 1), (-1, -1), (1, -1), (-1, 1)]), ConeSpec.quadrant())
    # diagonal steps preserve i + j mod 2
    assert ray_point(diag, (1, 1), (1, 1), 5) == (5, 5)
    assert ray_point(diag, (1, 1), (2, 1), 3) == (7, 3)
    with pytest.raises(ModelError):
        ray_point(diag, (1, 1), (1, 0), 5)


def test_martin_ratio_at_base_point_is_one():
    out = martin_ratio(SIMPLE, (1, 1), (1, 1), (1, 1), [4, 8], N_max=200)
    assert all(r.ratio == 1 for r in out)


def test_martin_ratio_trend_toward_ij():
    out = martin_ratio(SIMPLE, (2, 2), (1, 1), (1, 1), [4, 8, 12], N_max=800)
    gaps = [abs(float(r.ratio) - 4) for r in out]
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 0.4


def test_decoupling_check():
    got = decoupling_check(SIMPLE, [(1, 1), (1, 2), (2, 2)], (1, 1), [10], N_max=400)
    assert got[(1, 1)] == 1
    assert abs(float(got[(1, 2)]) - 2) < 0.1 and abs(float(got[(2, 2)]) - 4) < 0.4


def test_split_consistency_and_unreachable_short_times():
    x, y = (1, 1), (4, 4)
    s = green_split(SIMPLE, x, y, N_max=300)
    assert s.threshold == 18 and not s.degenerate
    assert s.negligible + s.fluctuating == green_value(SIMPLE, x, y, 300)
    # |x - y|_1 = 6, so the first six terms vanish
    assert green_value(SIMPLE, x, y, 5) == 0
    assert s.negligible > 0 and s.ratio == s.negligible / s.fluctuating


def test_split_degenerate_for_close_points():
    s = green_split(SIMPLE, (1, 1), (2, 2), N_max=100)
    assert s.degenerate and s.negligible == 0
    assert s.fluctuating == green_value(SIMPLE, (1, 1), (2, 2), 100)


def test_split_ratio_far_points():
    s = green_split(SIMPLE, (1, 1), (7, 7), N_max=400)
    assert s.threshold == 72
    assert isinstance(s.ratio, Fraction) and 1 < s.ratio < 2


def test_zero_horizon_and_convergence_for_close_pairs():
    assert green_value(SIMPLE, (3, 2), (3, 2), 0) == 1
    for x, y in [((1, 1), (3, 3)), ((2, 1), (4, 3)), ((1, 2), (1, 4))]:
        est = green(SIMPLE, x, y, schedule=[400, 800])
        a, b = est.partial_sums
        assert b >= a and (b - a) / b < Fraction(1, 100)


def test_decoupling_symmetry_and_single_point():
    got = decoupling_check(SIMPLE, [(1, 2), (2, 1)], (1, 1), [8], N_max=300)
    assert got[(1, 2)] == got[(2, 1)]
    assert decoupling_check(SIMPLE, [(1, 1)], (1, 1), [8], N_max=300) == {(1, 1): 1}
    a = martin_ratio(SIMPLE, (1, 2), (1, 1), (2, 1), [6], N_max=300)[0].ratio
    b = martin_ratio(SIMPLE, (2, 1), (1, 1), (1, 2), [6], N_max=300)[0].ratio
    assert a == b
