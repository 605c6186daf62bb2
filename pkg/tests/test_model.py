import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from conewalk._hp import hp, to_hp
from conewalk.model import (
    BUNDLED,
    ConeSpec,
    ModelError,
    ModelFormatError,
    StepSet,
    TiltError,
    WalkModel,
    bundled,
    continued_fraction,
    dumps_model,
    exponent_report,
    laplace_transform,
    level_curve_points,
    load_model,
    model_from_json,
    moments,
    tilt_to_zero_drift,
)


def numpy_exponent(model):
    """Float oracle: scipy tilt, then pi / arccos(-rho)."""
    s = np.array(model.stepset.offsets, dtype=float)
    w = np.array([float(v) for v in model.stepset.weights])
    w /= w.sum()
    res = minimize(lambda u: np.sum(w * np.exp(s @ u)), np.zeros(2), method="BFGS", options={"gtol": 1e-12})
    t = w * np.exp(s @ res.x)
    t /= t.sum()
    mean = t @ s
    cov = (t[:, None] * (s - mean)).T @ (s - mean)
    rho = cov[0, 1] / math.sqrt(cov[0, 0] * cov[1, 1])
    return t, math.pi / math.acos(-rho)


def test_stepset_validation():
    with pytest.raises(ModelError):
        StepSet([])
    with pytest.raises(ModelError):
        StepSet([((1, 0), -1)])
    with pytest.raises(ModelError):
        StepSet([((1, 0), 1), ((1, 0), 2)])
    with pytest.raises(ModelError):
        StepSet([((1, 0), 1), ((1,), 2)])
    with pytest.raises(ModelError):
        StepSet([((1, 0), 0)])


def test_integer_weights_and_units():
    ints, unit = bundled("simple").stepset.integer_weights()
    assert ints == [1, 1, 1, 1] and unit == Fraction(1, 4)
    ints, unit = bundled("fig2-hennequin").stepset.integer_weights()
    assert ints == [4, 8, 9, 3] and unit == Fraction(1, 24)


def test_cone_membership_is_exact():
    q = ConeSpec.quadrant()
    assert q.contains((1, 1)) and not q.contains((0, 1)) and not q.contains((1, -1))
    h = ConeSpec.half_space(("1/3", "1/7"))
    assert h.contains((-1, 3)) and not h.contains((-3, 7))
    assert ConeSpec.full(2).contains((-5, -5))
    assert ConeSpec.orthant(3).is_orthant()


def test_moments_simple_and_fig2():
    drift, cov = moments(bundled("simple"))
    assert drift == (0, 0) and cov == ((Fraction(1, 2), 0), (0, Fraction(1, 2)))
    drift, _ = moments(bundled("fig2-hennequin"))
    assert drift == (Fraction(-1, 6), Fraction(1, 4))


def test_laplace_transform():
    assert laplace_transform(bundled("fig2-hennequin"), (0, 0)) == 1
    v = laplace_transform(bundled("simple"), (hp.log(2), 0))
    assert abs(v - hp.mpf("1.125")) < hp.mpf(10) ** -60
    v = laplace_transform(bundled("simple"), (1, 1))
    assert abs(v - (2 * hp.e + 2 / hp.e) / 4) < hp.mpf(10) ** -60


def test_simple_walk_exponent_is_two():
    rep = exponent_report(bundled("simple"))
    assert rep.p == 2 and rep.rationality == "rational" and rep.a == 0
    assert rep.angle_over_pi == Fraction(1, 2)


def test_fig4_middle_exponent_is_irrational():
    m = bundled("fig4-middle")
    rep = exponent_report(m)
    assert rep.a == Fraction(-1, 4)
    assert rep.rationality == "irrational_by_niven"
    assert abs(rep.p - hp.pi / hp.acos(hp.mpf(-1) / 4)) < hp.mpf(10) ** -60
    _, p_float = numpy_exponent(m)
    assert abs(float(rep.p) - p_float) < 1e-8
    assert rep.continued_fraction[:5] == [1, 1, 2, 1, 1]


def test_tandem_like_tilt_is_exact():
    m = bundled("tandem-like")
    tilted, u = tilt_to_zero_drift(m)
    assert tilted.stepset.weights == [Fraction(1, 2), Fraction(1, 6), Fraction(1, 3)]
    assert all(c == 0 for c in moments(tilted)[0])
    rep = exponent_report(m)
    assert rep.a_squared == Fraction(1, 2)
    assert abs(rep.a - 1 / hp.sqrt(2)) < hp.mpf(10) ** -60
    assert rep.angle_over_pi == Fraction(1, 4) and rep.p == 4
    t_float, p_float = numpy_exponent(m)
    assert np.allclose(t_float, [0.5, 1 / 6, 1 / 3], atol=1e-8)
    assert abs(p_float - 4) < 1e-7


def test_fig3_right_exponent_is_three():
    rep = exponent_report(bundled("fig3-right"))
    assert rep.p == 3 and rep.rationality == "rational"


def test_fig2_tilt_matches_float_oracle():
    m = bundled("fig2-hennequin")
    tilted, u = tilt_to_zero_drift(m)
    assert max(abs(c) for c in moments(tilted)[0]) < hp.mpf(10) ** -45
    # separable steps: u = (log(sqrt(2)), log(sqrt(1/3)))
    assert abs(u[0] - hp.log(2) / 2) < hp.mpf(10) ** -45
    assert abs(u[1] + hp.log(3) / 2) < hp.mpf(10) ** -45
    rep = exponent_report(m)
    assert abs(to_hp(rep.p) - 2) < hp.mpf(10) ** -40


def test_tilt_impossible_when_drift_cannot_be_removed():
    m = WalkModel(StepSet.uniform([(1, 0), (0, 1), (1, 1)]), ConeSpec.quadrant())
    with pytest.raises(TiltError):
        tilt_to_zero_drift(m)


def test_angle_agrees_with_transformed_rays():
    for name in ("simple", "fig4-middle", "tandem-like", "fig3-right"):
        rep = exponent_report(bundled(name))
        assert abs(rep.angle - rep.angle_from_rays) < hp.mpf(10) ** -30


def test_non_orthant_cone_leaves_p_undetermined():
    m = bundled("simple").with_cone(ConeSpec.polyhedral([(1, 0), (1, 1)]))
    rep = exponent_report(m)
    assert rep.p is None and rep.rationality == "undetermined"
    assert abs(rep.angle - 3 * hp.pi / 4) < hp.mpf(10) ** -40


def test_continued_fraction_of_rational():
    assert continued_fraction(hp.mpf(7) / 3) == [2, 3]


def test_level_curve_points_lie_on_curve():
    m = bundled("fig2-hennequin")
    curve = level_curve_points(m, 40)
    assert curve.points[0] == (0, 0)
    for p in curve.points:
        assert abs(to_hp(laplace_transform(m, p)) - 1) < hp.mpf(10) ** -40
    assert level_curve_points(bundled("simple"), 10).degenerate


def test_json_round_trip(tmp_path):
    for name, m in BUNDLED.items():
        text = dumps_model(m)
        again = model_from_json(json.loads(text))
        assert again.stepset == m.stepset and again.cone == m.cone
        path = tmp_path / f"{name}.json"
        path.write_text(text)
        assert load_model(str(path)).stepset == m.stepset


def test_malformed_weight_reports_line():
    text = '{"dimension": 2,\n "steps": [\n {"offset": [1, 0], "weight": "1/2"},\n {"offset": [0, 1], "weight": "1/q"}]}'
    with pytest.raises(ModelFormatError) as err:
        model_from_json(json.loads(text), text=text)
    assert err.value.line == 4


def test_unknown_bundled_model():
    with pytest.raises(ModelError):
        bundled("nope")


weights = st.fractions(min_value=Fraction(1, 20), max_value=5, max_denominator=20)


@settings(max_examples=30, deadline=None)
@given(st.lists(weights, min_size=4, max_size=4))
def test_tilt_removes_drift_for_random_weights(ws):
    m = WalkModel(StepSet(zip([(1, 0), (-1, 0), (0, 1), (0, -1)], ws)), ConeSpec.quadrant())
    tilted, _ = tilt_to_zero_drift(m)
    assert max(abs(to_hp(c)) for c in moments(tilted)[0]) < hp.mpf(10) ** -40
    assert all(w > 0 for w in tilted.stepset.weights)


def test_covariance_is_symmetric_positive_definite():
    for m in BUNDLED.values():
        _, cov = moments(m)
        assert cov[0][1] == cov[1][0]
        assert cov[0][0] > 0 and cov[0][0] * cov[1][1] - cov[0][1] ** 2 > 0


def test_covariance_is_centered():
    # axis steps only, so the mixed moment is -m1 m2
    _, cov = moments(bundled("fig2-hennequin"))
    assert cov[0][1] == Fraction(1, 24)


def test_empty_level_curve_sample():
    assert level_curve_points(bundled("fig2-hennequin"), 0).points == []
