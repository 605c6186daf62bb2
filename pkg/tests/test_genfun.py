import io
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conewalk.fields import LatticeField
from conewalk.genfun import (
    BivariateSeries,
    curve_points,
    kernel,
    series_from_field,
    verify_functional_equation,
)
from conewalk.model import ConeSpec, ModelError, StepSet, WalkModel, bundled

SIMPLE = bundled("simple")
D = 20


def harmonic_series(func, D=D):
    f = LatticeField.from_function(func, (0, 0), (D + 2, D + 2), ConeSpec.quadrant())
    return series_from_field(f, D)


def geometric(D):
    """``1 / (1 - x)`` and ``1 / (1 - y)`` truncated at degree ``D``."""
    gx = BivariateSeries({(i, 0): 1 for i in range(D + 1)}, D)
    gy = BivariateSeries({(0, j): 1 for j in range(D + 1)}, D)
    return gx, gy


def test_simple_kernel():
    K = kernel(SIMPLE)
    q = Fraction(1, 4)
    assert K.coeffs == {(0, 1): q, (1, 0): q, (2, 1): q, (1, 2): q, (1, 1): -1}
    assert K.section_x() == {(1, 0): q} and K.constant == 0 and K.vanishes_at_origin
    assert K(1, 1) == 0 and K(Fraction(1, 2), 2) == Fraction(1, 4)


def test_kernel_with_diagonal_step_and_large_jump():
    m = WalkModel(StepSet.uniform([(1, 1)]), ConeSpec.quadrant())
    K = kernel(m)
    assert K.constant == 1 and not K.vanishes_at_origin
    with pytest.raises(ModelError):
        kernel(WalkModel(StepSet.uniform([(2, 0), (-1, 0)]), ConeSpec.quadrant()))


def test_series_of_closed_forms():
    gx, gy = geometric(D)
    H = harmonic_series(lambda i, j: i * j)
    assert H == gx * gx * gy * gy
    one_minus_x = BivariateSeries({(0, 0): 1, (1, 0): -1}, D)
    one_minus_y = BivariateSeries({(0, 0): 1, (0, 1): -1}, D)
    assert H == BivariateSeries.one(D) / (one_minus_x * one_minus_x * one_minus_y * one_minus_y)
    H2 = harmonic_series(lambda i, j: i * j * (i * i - j * j))
    num = BivariateSeries({(1, 1): 6, (0, 0): -6}, D) * BivariateSeries({(0, 1): 1, (1, 0): -1}, D)
    p4 = gx * gx * gx * gx * gy * gy * gy * gy
    assert H2 == num * p4
    assert harmonic_series(lambda i, j: 0).is_zero()


def test_series_window_too_small():
    f = LatticeField.from_function(lambda i, j: i * j, (0, 0), (5, 5), ConeSpec.quadrant())
    with pytest.raises(ValueError):
        series_from_field(f, 10)


@pytest.mark.parametrize("func", [lambda i, j: i * j, lambda i, j: i * j * (i * i - j * j)])
def test_functional_equation_holds(func):
    chk = verify_functional_equation(SIMPLE, harmonic_series(func))
    assert chk.zero and chk.valid_degree == D and chk.kernel_vanishes_at_origin


def test_functional_equation_detects_non_harmonic():
    chk = verify_functional_equation(SIMPLE, harmonic_series(lambda i, j: i))
    assert not chk.zero


def test_quotient_form_solves_equation():
    # K(0, 0) != 0, so (F(x) + G(y)) / K is a genuine series
    m = WalkModel(StepSet.uniform([(1, 1), (-1, 0), (0, -1)]), ConeSpec.quadrant())
    K = kernel(m)
    F = BivariateSeries({(0, 0): 2, (1, 0): Fraction(-1, 3), (3, 0): 5}, D)
    G = BivariateSeries({(0, 1): 7, (2, 0): 0, (0, 4): Fraction(1, 9)}, D)
    H = (F + G) / K.series(D)
    assert verify_functional_equation(m, H).zero
    assert not verify_functional_equation(m, H + BivariateSeries({(1, 1): 1}, D)).zero


def test_division_by_non_unit_fails():
    with pytest.raises(ZeroDivisionError):
        BivariateSeries.one(4) / BivariateSeries({(1, 0): 1}, 4)


def test_series_csv_round_trip():
    H = harmonic_series(lambda i, j: Fraction(i, j), 6)
    buf = io.StringIO()
    H.to_csv(buf)
    buf.seek(0)
    assert BivariateSeries.from_csv(buf, 6) == H


coeff = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 12))
series = st.dictionaries(
    st.tuples(st.integers(0, 5), st.integers(0, 5)), coeff, max_size=8
).map(lambda c: BivariateSeries(c, 6))


@settings(max_examples=40, deadline=None)
@given(series, series, series)
def test_series_ring_laws(a, b, c):
    assert a + b == b + a and a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == BivariateSeries.zero(6)
    assert a * BivariateSeries.one(6) == a


@settings(max_examples=40, deadline=None)
@given(series, coeff.filter(lambda c: c != 0))
def test_inverse_of_unit(a, c0):
    u = a + BivariateSeries({(0, 0): c0 - a[(0, 0)]}, 6)
    assert u * u.inverse() == BivariateSeries.one(6)


@settings(max_examples=25, deadline=None)
@given(series, series, coeff)
def test_residual_is_linear(a, b, t):
    r = lambda H: verify_functional_equation(SIMPLE, H).residual  # noqa: E731
    assert r(a + b * t) == r(a) + r(b) * t


def test_simple_walk_curve():
    cloud = curve_points(SIMPLE, 600, 128)
    assert len(cloud.points) >= 500
    assert cloud.max_kernel_residual < 1e-9 and cloud.max_modulus_gap < 1e-9
    assert any(abs(x - 1) < 1e-12 and abs(y - 1) < 1e-12 for x, y in cloud.points)
    assert all(abs(x) <= 1 + 1e-12 for x in cloud.xs())
    # the kernel is symmetric in x and y and in complex conjugation
    assert any(abs(x.imag) > 0.1 for x in cloud.xs())


def test_curve_for_three_step_model():
    cloud = curve_points(bundled("fig3-right"), 120, 48)
    assert cloud.points and cloud.max_kernel_residual < 1e-9
    assert all(abs(x) <= 1 + 1e-12 and abs(abs(x) - abs(y)) < 1e-9 for x, y in cloud.points)
