"""Acceptance criteria, one test each.

Every test records a ``PASS``/``FAIL`` line with the measured values; the
lines are printed in the "acceptance criteria" section of the pytest
summary.  Runtimes are part of the verdict.
"""

import json
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from conewalk._hp import hp, to_hp
from conewalk.asymptotics import fit_growth
from conewalk.conditioned import deviation_schedule, doob_kernel
from conewalk.enumeration import count_from, local_counts, survival_counts
from conewalk.fields import LatticeField
from conewalk.genfun import BivariateSeries, curve_points, series_from_field, verify_functional_equation
from conewalk.green import decoupling_check, martin_ratio
from conewalk.harmonic import exponential_harmonic, verify_harmonic
from conewalk.model import BUNDLED, bundled, exponent_report, laplace_transform, level_curve_points, moments, tilt_to_zero_drift

from conftest import VERDICTS
from oracles import brute_force_counts

SIMPLE = bundled("simple")


def report(number, title, ok, detail, elapsed):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: {detail} [{elapsed:.2f} s]"
    VERDICTS.append(line)
    assert ok, line


def quadrant_field(func, hi):
    return LatticeField.from_function(func, (0, 0), (hi, hi), SIMPLE.cone)


def test_criterion_01_exact_harmonicity():
    t = time.perf_counter()
    reps = [verify_harmonic(SIMPLE, quadrant_field(f, 51)) for f in (lambda i, j: i * j, lambda i, j: i * j * (i * i - j * j))]
    dt = time.perf_counter() - t
    ok = all(r.max_residual == 0 and r.interior_points_checked == 2500 for r in reps) and dt < 1
    detail = f"residuals {[str(r.max_residual) for r in reps]} over {reps[0].interior_points_checked} points"
    report(1, "exact harmonicity", ok, detail, dt)


def test_criterion_02_functional_equation():
    t = time.perf_counter()
    D = 20
    res = []
    for f in (lambda i, j: i * j, lambda i, j: i * j * (i * i - j * j), lambda i, j: i):
        H = series_from_field(quadrant_field(f, D + 2), D)
        res.append(verify_functional_equation(SIMPLE, H).zero)
    dt = time.perf_counter() - t
    ok = res == [True, True, False] and dt < 5
    report(2, "functional equation", ok, f"zero residual for ij, ij(i2-j2), control i: {res}", dt)


def test_criterion_03_exponent_pipeline():
    checks, times = [], []
    t = time.perf_counter()
    simple = exponent_report(SIMPLE)
    times.append(time.perf_counter() - t)
    checks.append(simple.p == 2 and isinstance(simple.p, (int, Fraction)) and simple.rationality == "rational")
    t = time.perf_counter()
    fig4 = exponent_report(bundled("fig4-middle"))
    times.append(time.perf_counter() - t)
    checks.append(fig4.a == Fraction(-1, 4) and fig4.rationality == "irrational_by_niven")
    t = time.perf_counter()
    tandem = bundled("tandem-like")
    tilted, _ = tilt_to_zero_drift(tandem)
    rep = exponent_report(tandem)
    times.append(time.perf_counter() - t)
    checks.append(
        tilted.stepset.weights == [Fraction(1, 2), Fraction(1, 6), Fraction(1, 3)]
        and rep.a_squared == Fraction(1, 2)
        and abs(rep.a - 1 / hp.sqrt(2)) < hp.mpf(10) ** -60
        and rep.p == 4
    )
    ok = all(checks) and max(times) < 1
    detail = f"simple p={simple.p}; fig4 a={fig4.a} {fig4.rationality}; tandem weights {[str(w) for w in tilted.stepset.weights]} p={rep.p}"
    report(3, "exponent pipeline", ok, detail, max(times))


def test_criterion_04_counting_oracle():
    t = time.perf_counter()
    mismatches, compared = 0, 0
    for name, m in sorted(BUNDLED.items()):
        for x in [(1, 1), (2, 1)]:
            for n in range(9):
                brute = brute_force_counts(m, x, n)
                table = count_from(m, x, n).counts
                mismatches += table != brute
                compared += 1
            # c(x, y; n) for every endpoint reached at n = 8, from the local engine
            for y in list(brute)[:3]:
                mismatches += local_counts(m, x, y, 8)[8] != brute[y]
                compared += 1
    dt = time.perf_counter() - t
    ok = mismatches == 0 and dt < 30
    report(4, "counting oracle", ok, f"{compared} count tables compared, {mismatches} mismatches", dt)


def test_criterion_05_survival_asymptotics():
    t = time.perf_counter()
    counts = survival_counts(SIMPLE, (1, 1), 2000)
    fit = fit_growth(counts, period=None)
    dt = time.perf_counter() - t
    dev = abs(to_hp(fit.alpha) + 1)
    ok = dev < 0.05 and fit.converging() and dt < 120
    last = [f"{float(a):.10f}" for a in fit.window_alphas[-3:]]
    detail = f"alpha={float(fit.alpha):.10f} (period {fit.period}), last windows {last}, converging={fit.converging()}"
    report(5, "survival asymptotics", ok, detail, dt)


def test_criterion_06_excursion_exponent():
    t = time.perf_counter()
    counts = local_counts(SIMPLE, (1, 1), (1, 1), 2000)
    fit = fit_growth(counts, period=2, offset=0)
    dt = time.perf_counter() - t
    rel = abs(to_hp(fit.alpha) + 3) / 3
    ok = rel < 0.07 and dt < 120
    report(6, "excursion exponent", ok, f"alpha={float(fit.alpha):.10f}, relative error {float(rel):.2e}", dt)


def test_criterion_07_doob_convergence():
    t = time.perf_counter()
    k = doob_kernel(SIMPLE, quadrant_field(lambda i, j: i * j, 51))
    stochastic = k.stochastic and len(k.row_defects) == 2500
    h = quadrant_field(lambda i, j: i * j, 8)
    points = [(i, j) for i in (1, 2, 3) for j in (1, 2, 3)]
    devs, decreasing = deviation_schedule(SIMPLE, h, points, [250, 500, 1000, 2000])
    dt = time.perf_counter() - t
    ok = stochastic and decreasing and devs[-1] < Fraction(1, 1000) and dt < 60
    detail = f"rows exact={stochastic}; max deviation over (1..3)^2: {[f'{float(d):.3e}' for d in devs]}"
    report(7, "Doob stochasticity and convergence", ok, detail, dt)


def test_criterion_08_martin_ratio():
    t = time.perf_counter()
    xs = [(1, 2), (2, 2), (3, 3)]
    diag = {x: martin_ratio(SIMPLE, x, (1, 1), (1, 1), [4, 8, 12])[-1].ratio for x in xs}
    other = decoupling_check(SIMPLE, xs, (2, 1), [12])
    dt = time.perf_counter() - t
    near = all(abs(diag[x] - x[0] * x[1]) <= Fraction(1, 10) * x[0] * x[1] for x in xs)
    agree = all(abs(diag[x] - other[x]) <= Fraction(1, 10) * diag[x] for x in xs)
    ok = near and agree and dt < 300
    detail = ", ".join(f"{x}: {float(diag[x]):.4f} / {float(other[x]):.4f}" for x in xs) + " (diagonal / direction (2,1))"
    report(8, "Martin ratio", ok, detail, dt)


def test_criterion_09_level_curve():
    t = time.perf_counter()
    m = bundled("fig2-hennequin")
    exact = laplace_transform(m, (0, 0)) == 1 and moments(m)[0] == (Fraction(-1, 6), Fraction(1, 4))
    curve = level_curve_points(m, 200)
    gaps, residuals = [], []
    for u in curve.points:
        gaps.append(abs(to_hp(laplace_transform(m, u)) - 1))
        _, rep = exponential_harmonic(m, u)
        residuals.append(to_hp(rep.max_residual))
    dt = time.perf_counter() - t
    ok = exact and len(curve.points) == 200 and max(gaps) < 1e-12 and max(residuals) < 1e-12 and dt < 10
    detail = f"L(0,0)=1 and drift (-1/6, 1/4): {exact}; {len(curve.points)} points, max |L-1| {float(max(gaps)):.1e}, max residual {float(max(residuals)):.1e}"
    report(9, "level curve", ok, detail, dt)


def test_criterion_10_curve_k():
    t = time.perf_counter()
    cloud = curve_points(SIMPLE, 600, 128)
    dt = time.perf_counter() - t
    has_one = any(abs(x - 1) < 1e-12 and abs(y - 1) < 1e-12 for x, y in cloud.points)
    ok = len(cloud.points) >= 500 and cloud.max_modulus_gap < 1e-9 and cloud.max_kernel_residual < 1e-9 and has_one and dt < 30
    detail = f"{len(cloud.points)} points, max ||x|-|y|| {cloud.max_modulus_gap:.1e}, max |K| {cloud.max_kernel_residual:.1e}, (1,1) present: {has_one}"
    report(10, "curve K", ok, detail, dt)


def _cli(args):
    return subprocess.run([sys.executable, "-m", "conewalk.cli", *args], capture_output=True, check=True).stdout


def test_criterion_11_property_suites():
    t = time.perf_counter()
    # mass conservation, exact
    mass = all(
        count_from(m, (2, 2), 10).total() + count_from(m, (2, 2), 10).killed_mass() == 1 for m in BUNDLED.values()
    )
    # scale invariance of the Doob transform
    h = quadrant_field(lambda i, j: i * j, 20)
    k1, k2 = doob_kernel(SIMPLE, h), doob_kernel(SIMPLE, h.scaled(Fraction(13, 7)))
    scale = all(k1.row(x) == k2.row(x) for x in k1.row_defects)
    # series ring laws on fixed rational inputs
    D = 8
    a = BivariateSeries({(0, 0): 2, (1, 0): Fraction(-1, 3), (2, 3): 5}, D)
    b = BivariateSeries({(0, 1): Fraction(7, 2), (4, 1): -1}, D)
    c = BivariateSeries({(0, 0): Fraction(-3, 5), (1, 1): 1, (0, 5): 2}, D)
    laws = (
        a * b == b * a and (a * b) * c == a * (b * c) and a * (b + c) == a * b + a * c
        and (a + b) + c == a + (b + c) and a * a.inverse() == BivariateSeries.one(D)
    )
    # CLI determinism
    runs = [
        ["analyze", "fig4-middle"],
        ["doob", "sample", "simple", "--from", "1,1", "--length", "50", "--paths", "4", "--seed", "7", "--hi", "55,55"],
    ]
    det = all(_cli(r) == _cli(r) for r in runs)
    json.loads(_cli(runs[0]))
    dt = time.perf_counter() - t
    ok = mass and scale and laws and det and dt < 60
    report(11, "property suites", ok, f"mass={mass}, doob scale invariance={scale}, series laws={laws}, CLI deterministic={det}", dt)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
