"""Command-line interface: ``conewalk <subcommand> ...``.

Every run prints (or writes to ``--output``) a JSON document whose
``config`` block echoes the fully resolved arguments, so a run can be
repeated exactly; tabular results can be requested as CSV with
``--format csv``.  Exit codes: 0 success, 1 unknown subcommand, 2 invalid
input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import asymptotics, conditioned, enumeration, genfun, green, harmonic, model
from ._hp import fmt_real, hp
from .fields import LatticeField
from .model import ConeSpec, ModelError, as_fraction

EXIT_UNKNOWN, EXIT_INVALID, EXIT_NUMERIC = 1, 2, 3

HARMONIC_FIELDS = {
    "ij": lambda i, j: i * j,
    "ij(i2-j2)": lambda i, j: i * j * (i * i - j * j),
    "i": lambda i, j: i,
    "j": lambda i, j: j,
    "one": lambda i, j: 1,
}


class UsageError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        code = EXIT_UNKNOWN if "invalid choice" in message else EXIT_INVALID
        raise UsageError(f"{self.prog}: error: {message}", code)


# -- serialization -------------------------------------------------------------

def to_jsonable(value):
    """Fractions become ``"a/b"`` strings, reals 17-significant-digit strings."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (float, hp.mpf)):
        return fmt_real(value)
    if isinstance(value, (complex, hp.mpc)):
        return [fmt_real(value.real), fmt_real(value.imag)]
    if isinstance(value, dict):
        return {_key(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return to_jsonable(value.item())
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _key(k):
    if isinstance(k, tuple):
        return ",".join(str(c) for c in k)
    return str(k)


def _dec(v):
    """Decimal companion of an exact value (big Green fractions are unreadable)."""
    return fmt_real(hp.mpf(v.numerator) / v.denominator) if isinstance(v, Fraction) else v


def _cell(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (float, hp.mpf)):
        return fmt_real(v)
    return str(v)


# -- argument helpers ----------------------------------------------------------

def point(text):
    try:
        return tuple(int(c) for c in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer point: {text!r}") from None


def rational_vector(text):
    try:
        return tuple(as_fraction(c) for c in text.split(","))
    except ModelError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def int_list(text):
    try:
        return [int(c) for c in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer list: {text!r}") from None


def point_list(text):
    return [point(p) for p in text.split(";")]


def cone_arg(text):
    kind, _, rest = text.partition(":")
    try:
        if kind == "quadrant":
            return ConeSpec.quadrant()
        if kind == "full":
            return ConeSpec.full(int(rest or 2))
        if kind == "orthant":
            return ConeSpec.orthant(int(rest))
        if kind == "half-space":
            return ConeSpec.half_space([as_fraction(c) for c in rest.split(",")])
    except (ValueError, ModelError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    raise argparse.ArgumentTypeError(f"unknown cone {text!r} (quadrant, full[:d], orthant:d, half-space:n1,n2)")


def _model(args):
    source = args.model_opt or args.model
    if source is None:
        raise ModelError("no model given (positional name/path or --model)")
    m = model.load_model(source)
    if getattr(args, "cone", None) is not None:
        m = m.with_cone(args.cone)
    return m


def _window(args, m, default_hi=20):
    d = m.dimension
    lo = tuple(args.lo) if args.lo else tuple([0] * d)
    hi = tuple(args.hi) if args.hi else tuple([default_hi] * d)
    return lo, hi


def _field(args, m, default_hi=20):
    if args.field:
        with open(args.field, encoding="utf-8") as fh:
            return LatticeField.from_csv(fh, m.cone)
    if args.harmonic not in HARMONIC_FIELDS:
        raise ModelError(f"unknown field {args.harmonic!r}; known: {sorted(HARMONIC_FIELDS)}")
    lo, hi = _window(args, m, default_hi)
    return LatticeField.from_function(HARMONIC_FIELDS[args.harmonic], lo, hi, m.cone)


def _read_sequence(path):
    with open(path, encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and not _is_number(rows[0][-1]):
        rows = rows[1:]
    try:
        return [Fraction(r[-1]) for r in rows]
    except ValueError as exc:
        raise ModelError(f"bad sequence value: {exc}") from None


def _is_number(text):
    try:
        Fraction(text)
        return True
    except ValueError:
        return False


# -- subcommands ---------------------------------------------------------------

def cmd_analyze(args):
    m = _model(args)
    drift, cov = model.moments(m)
    out = {"model": m.to_json(), "drift": drift, "covariance": cov}
    if m.dimension == 2:
        rep = model.exponent_report(m)
        out.update(
            tilt=rep.tilt, tilted_weights=rep.tilted_weights, tilted_covariance=rep.covariance,
            correlation=rep.correlation, a=rep.a, a_squared=rep.a_squared, angle=rep.angle,
            angle_over_pi=rep.angle_over_pi, p=rep.p, rationality=rep.rationality,
            continued_fraction=rep.continued_fraction,
        )
    return out, None


def cmd_count(args):
    m = _model(args)
    table = enumeration.count_from(m, args.start, args.n)
    out = {"n": args.n, "total_count": table.total_count(), "total": table.total(), "unit": table.unit}
    if args.to:
        out["count"] = table.count(args.to)
        out["probability"] = table.value(args.to)
    rows = [list(y) + [table.count(y)] for y in table.support()]
    return out, (["x%d" % i for i in range(m.dimension)] + ["count"], rows)


def cmd_survival(args):
    m = _model(args)
    seq = enumeration.survival(m, args.start, args.N, args.method)
    counts = seq.counts
    out = {"counts": counts, "final_probability": seq[args.N]}
    return out, (["n", "count", "probability"], [[n, c, seq[n]] for n, c in enumerate(counts)])


def cmd_local(args):
    m = _model(args)
    counts = enumeration.local_counts(m, args.start, args.to, args.N, args.method)
    w = sum(m.stepset.integer_weights()[0])
    probs = [Fraction(c, w**n) for n, c in enumerate(counts)]
    return {"counts": counts, "final_probability": probs[-1]}, (
        ["n", "count", "probability"], [[n, c, p] for n, (c, p) in enumerate(zip(counts, probs))]
    )


def _report(rep):
    return {
        "lambda": rep.lam, "max_residual": rep.max_residual,
        "interior_points_checked": rep.interior_points_checked,
        "worst_point": rep.worst_point, "reduced_residual": rep.reduced_residual,
        "harmonic": rep.harmonic,
    }


def cmd_harmonic_verify(args):
    m = _model(args)
    rep = harmonic.verify_harmonic(m, _field(args, m), as_fraction(args.lam))
    return _report(rep), (["point", "residual"], [[_key(p), r] for p, r in sorted(rep.residuals.items())])


def cmd_harmonic_ratio(args):
    m = _model(args)
    est = harmonic.harmonic_by_ratio(m, _window(args, m, 6), args.x0, args.schedule, args.method)
    pts = sorted(p for p in est.extrapolated.points() if m.cone.contains(p))
    out = {
        "x0": est.x0, "schedule": est.schedule, "extrapolation": est.extrapolation_order,
        "lambdas": {n: est.lambdas[n] for n in est.schedule},
        "extrapolated": {p: est.extrapolated[p] for p in pts},
        "spread": {p: est.spread[p] for p in pts}, "spreads": est.spreads,
    }
    rows = [[_key(p), est.extrapolated[p], est.spread[p]] for p in pts]
    return out, (["point", "value", "spread"], rows)


def cmd_harmonic_exp(args):
    m = _model(args)
    _, rep = harmonic.exponential_harmonic(m, args.u)
    out = _report(rep)
    out["laplace_minus_one"] = rep.reduced_residual
    return out, None


def cmd_harmonic_reduite(args):
    m = _model(args)
    ratios = harmonic.reduite_compare(m, _field(args, m), as_fraction(args.epsilon))
    return {"ratios": [[p, r] for p, r in ratios]}, (["point", "ratio"], [[_key(p), r] for p, r in ratios])


def cmd_harmonic_harnack(args):
    m = _model(args)
    res = harmonic.harnack_diagnostic(m, _field(args, m, 40), args.at, args.R)
    return {"interior": res.interior, "boundary": res.boundary}, None


def cmd_doob_kernel(args):
    m = _model(args)
    k = conditioned.doob_kernel(m, _field(args, m), as_fraction(args.lam))
    row = k.row(args.at)
    out = {"row": row, "row_sum": sum(row.values()), "stochastic": k.stochastic, "max_row_defect": k.max_row_defect}
    return out, (["target", "probability"], [[_key(y), p] for y, p in sorted(row.items())])


def cmd_doob_sample(args):
    m = _model(args)
    k = conditioned.doob_kernel(m, _field(args, m, 60), as_fraction(args.lam))
    paths = conditioned.sample_paths(k, args.start, args.length, args.paths, args.seed)
    rows = [[i, t] + [int(c) for c in paths[i, t]] for i in range(paths.shape[0]) for t in range(paths.shape[1])]
    out = {"paths": [[list(map(int, p)) for p in path] for path in paths]}
    return out, (["path", "t"] + ["x%d" % i for i in range(m.dimension)], rows)


def cmd_doob_compare(args):
    m = _model(args)
    f = _field(args, m)
    rows, out = [], {"deviations": {}}
    for n in args.N:
        c = conditioned.conditioned_vs_finite_horizon(m, f, args.at, n, as_fraction(args.lam), args.method)
        out["deviations"][n] = c.deviation
        out["flagged"] = c.flagged
        rows.append([n, c.deviation])
    devs = [out["deviations"][n] for n in args.N]
    out["decreasing"] = all(b < a for a, b in zip(devs, devs[1:]))
    return out, (["N", "deviation"], rows)


def cmd_green_value(args):
    m = _model(args)
    g = green.green(m, args.start, args.to, args.N_max)
    out = {"schedule": g.schedule, "partial_sums": g.partial_sums,
           "partial_sums_decimal": [_dec(v) for v in g.partial_sums], "tail_estimate": g.tail_estimate,
           "tail_exponent": g.tail_exponent, "tail_is_heuristic": True}
    return out, (["N", "partial_sum", "decimal"], [[n, s, _dec(s)] for n, s in zip(g.schedule, g.partial_sums)])


def cmd_green_martin(args):
    m = _model(args)
    res = green.martin_ratio(m, args.x, args.x0, args.direction, args.radii, args.N_max)
    rows = [[r.radius, _key(r.target), r.ratio, _dec(r.ratio)] for r in res]
    out = {"ratios": [{"radius": r.radius, "target": r.target, "ratio": r.ratio, "decimal": _dec(r.ratio)} for r in res]}
    return out, (["radius", "target", "ratio", "decimal"], rows)


def cmd_green_split(args):
    m = _model(args)
    s = green.green_split(m, args.start, args.to, args.N_max)
    return {"threshold": s.threshold, "negligible": s.negligible, "fluctuating": s.fluctuating,
            "negligible_decimal": _dec(s.negligible), "fluctuating_decimal": _dec(s.fluctuating),
            "degenerate": s.degenerate, "ratio": _dec(s.ratio)}, None


def cmd_green_decoupling(args):
    m = _model(args)
    vals = green.decoupling_check(m, args.points, args.direction, args.radii, args.x0, args.N_max)
    out = {"values": vals, "decimal": {p: _dec(v) for p, v in vals.items()}}
    return out, (["point", "value", "decimal"], [[_key(p), v, _dec(v)] for p, v in vals.items()])


def cmd_genfun_kernel(args):
    K = genfun.kernel(_model(args))
    return {"coefficients": K.coeffs, "K(x,0)": K.section_x(), "K(0,y)": K.section_y(),
            "K(0,0)": K.constant, "vanishes_at_origin": K.vanishes_at_origin}, None


def cmd_genfun_series(args):
    m = _model(args)
    H = genfun.series_from_field(_field(args, m, args.degree + 3), args.degree)
    rows = [[i, j, c] for (i, j), c in sorted(H.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))]
    return {"degree": H.D, "coefficients": H.coeffs}, (["i", "j", "coeff"], rows)


def cmd_genfun_verify(args):
    m = _model(args)
    H = genfun.series_from_field(_field(args, m, args.degree + 3), args.degree)
    chk = genfun.verify_functional_equation(m, H)
    nz = sorted(chk.residual.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))
    out = {"degree": args.degree, "residual_zero": chk.zero, "valid_degree": chk.valid_degree,
           "nonzero_residual_terms": len(nz), "residual": dict(nz),
           "kernel_vanishes_at_origin": chk.kernel_vanishes_at_origin}
    return out, (["i", "j", "coeff"], [[i, j, c] for (i, j), c in nz])


def cmd_genfun_curve(args):
    cloud = genfun.curve_points(_model(args), args.n_theta, args.n_radius)
    rows = [[x.real, x.imag, y.real, y.imag] for x, y in cloud.points]
    out = {"points": len(cloud.points), "max_kernel_residual": cloud.max_kernel_residual,
           "max_modulus_gap": cloud.max_modulus_gap, "cloud": [[x, y] for x, y in cloud.points]}
    return out, (["re_x", "im_x", "re_y", "im_y"], rows)


def _fit_out(fit):
    return {"r": fit.r, "alpha": fit.alpha, "alpha_spread": fit.alpha_spread, "method": fit.method,
            "period": fit.period, "converging": fit.converging(),
            "diagnostics": [{"n": n, "alpha": a, "r": r} for n, a, r in fit.diagnostics]}


def cmd_fit(args):
    fit = asymptotics.fit_growth(_read_sequence(args.input), args.period, method=args.fit_method)
    return _fit_out(fit), (["n", "alpha", "r"], [[n, a, r] for n, a, r in fit.diagnostics])


def cmd_confront(args):
    m = _model(args)
    # fail on the theory side before any enumeration
    if model.exponent_report(m).p is None:
        raise ModelError("the exponent p is not defined for this cone")
    model.tilt_to_zero_drift(m)
    start = args.start or tuple([1] * m.dimension)
    counts = True
    if args.input:
        seq, counts = _read_sequence(args.input), not args.probabilities
    elif args.kind == "survival":
        seq = enumeration.survival_counts(m, start, args.N)
    else:
        seq = enumeration.local_counts(m, start, args.to or start, args.N)
    fit = asymptotics.fit_growth(seq, args.period)
    rep = asymptotics.confront_theory(m, fit, args.kind, counts=counts)
    out = {"fit": _fit_out(fit), "kind": rep.kind, "p": rep.p, "predicted_alpha": rep.predicted_alpha,
           "fitted_alpha": rep.fitted_alpha, "alpha_deviation": rep.alpha_deviation,
           "predicted_r": rep.predicted_r, "fitted_r": rep.fitted_r, "r_deviation": rep.r_deviation}
    return out, None


def cmd_classify(args):
    note = asymptotics.classify(_model(args))
    return {"alpha_rationality": note.alpha_rationality, "dfinite_verdict": note.dfinite_verdict,
            "p": note.p, "reason": note.reason}, None


# -- parser --------------------------------------------------------------------

def _common(p, model=True):
    if model:
        p.add_argument("model", nargs="?", help="bundled model name or JSON model file")
        p.add_argument("--model", dest="model_opt", help="same as the positional model")
        p.add_argument("--cone", type=cone_arg, help="override the cone")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--output", "-o", help="write to a file instead of stdout")


def _field_args(p, harmonic_default="ij"):
    p.add_argument("--harmonic", default=harmonic_default, help=f"named field: {', '.join(HARMONIC_FIELDS)}")
    p.add_argument("--field", help="CSV field file (overrides --harmonic)")
    p.add_argument("--lo", type=point, help="window lower corner")
    p.add_argument("--hi", type=point, help="window upper corner")


def build_parser():
    parser = _Parser(prog="conewalk", description="Exact computations for random walks confined to cones.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="drift, tilt, covariance and critical exponent")
    _common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("count", help="confined counts c(x; n), c(x, y; n)")
    _common(p)
    p.add_argument("--from", dest="start", type=point, required=True)
    p.add_argument("--to", type=point)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("survival", help="exact survival probabilities")
    _common(p)
    p.add_argument("--from", dest="start", type=point, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--method", choices=["auto", "dp", "separable"], default="auto")
    p.set_defaults(func=cmd_survival)

    p = sub.add_parser("local", help="exact local probabilities P(x + S_n = y, tau > n)")
    _common(p)
    p.add_argument("--from", dest="start", type=point, required=True)
    p.add_argument("--to", type=point, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--method", choices=["auto", "dp", "separable"], default="auto")
    p.set_defaults(func=cmd_local)

    hp_ = sub.add_parser("harmonic", help="harmonic functions")
    hsub = hp_.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = hsub.add_parser("verify")
    _common(p)
    _field_args(p)
    p.add_argument("--lam", default="1")
    p.set_defaults(func=cmd_harmonic_verify)
    p = hsub.add_parser("ratio")
    _common(p)
    p.add_argument("--lo", type=point)
    p.add_argument("--hi", type=point)
    p.add_argument("--x0", type=point)
    p.add_argument("--schedule", type=int_list, default=[250, 500, 1000, 2000])
    p.add_argument("--method", choices=["auto", "dp", "separable"], default="auto")
    p.set_defaults(func=cmd_harmonic_ratio)
    p = hsub.add_parser("exp")
    _common(p)
    p.add_argument("--u", type=rational_vector, required=True)
    p.set_defaults(func=cmd_harmonic_exp)
    p = hsub.add_parser("reduite")
    _common(p)
    _field_args(p)
    p.add_argument("--epsilon", default="1/10")
    p.set_defaults(func=cmd_harmonic_reduite)
    p = hsub.add_parser("harnack")
    _common(p)
    _field_args(p)
    p.add_argument("--at", type=point, required=True)
    p.add_argument("--R", type=int, required=True)
    p.set_defaults(func=cmd_harmonic_harnack)

    dp_ = sub.add_parser("doob", help="Doob transforms")
    dsub = dp_.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = dsub.add_parser("kernel")
    _common(p)
    _field_args(p)
    p.add_argument("--lam", default="1")
    p.add_argument("--at", type=point, required=True)
    p.set_defaults(func=cmd_doob_kernel)
    p = dsub.add_parser("sample")
    _common(p)
    _field_args(p)
    p.add_argument("--lam", default="1")
    p.add_argument("--from", dest="start", type=point, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--paths", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_doob_sample)
    p = dsub.add_parser("compare")
    _common(p)
    _field_args(p)
    p.add_argument("--lam", default="1")
    p.add_argument("--at", type=point, required=True)
    p.add_argument("--N", type=int_list, default=[250, 500, 1000, 2000])
    p.add_argument("--method", choices=["auto", "dp", "separable"], default="auto")
    p.set_defaults(func=cmd_doob_compare)

    gp_ = sub.add_parser("green", help="Green functions and Martin ratios")
    gsub = gp_.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = gsub.add_parser("value")
    _common(p)
    p.add_argument("--from", dest="start", type=point, required=True)
    p.add_argument("--to", type=point, required=True)
    p.add_argument("--N-max", dest="N_max", type=int, default=800)
    p.set_defaults(func=cmd_green_value)
    p = gsub.add_parser("martin")
    _common(p)
    p.add_argument("--x", type=point, required=True)
    p.add_argument("--x0", type=point, default=(1, 1))
    p.add_argument("--direction", type=rational_vector, default=(1, 1))
    p.add_argument("--radii", type=int_list, default=[4, 8, 12])
    p.add_argument("--N-max", dest="N_max", type=int, default=800)
    p.set_defaults(func=cmd_green_martin)
    p = gsub.add_parser("split")
    _common(p)
    p.add_argument("--from", dest="start", type=point, required=True)
    p.add_argument("--to", type=point, required=True)
    p.add_argument("--N-max", dest="N_max", type=int, default=800)
    p.set_defaults(func=cmd_green_split)
    p = gsub.add_parser("decoupling")
    _common(p)
    p.add_argument("--points", type=point_list, required=True, help="points separated by ';'")
    p.add_argument("--x0", type=point)
    p.add_argument("--direction", type=rational_vector, default=(1, 1))
    p.add_argument("--radii", type=int_list, default=[12])
    p.add_argument("--N-max", dest="N_max", type=int, default=800)
    p.set_defaults(func=cmd_green_decoupling)

    fp_ = sub.add_parser("genfun", help="generating functions and the kernel")
    fsub = fp_.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = fsub.add_parser("kernel")
    _common(p)
    p.set_defaults(func=cmd_genfun_kernel)
    p = fsub.add_parser("series")
    _common(p)
    _field_args(p)
    p.add_argument("--degree", type=int, default=20)
    p.set_defaults(func=cmd_genfun_series)
    for parent in (fsub, sub):
        p = parent.add_parser("verify-fe", help="check the kernel functional equation")
        _common(p)
        _field_args(p)
        p.add_argument("--degree", type=int, default=20)
        p.set_defaults(func=cmd_genfun_verify)
    p = fsub.add_parser("curve")
    _common(p)
    p.add_argument("--n-theta", type=int, default=600)
    p.add_argument("--n-radius", type=int, default=128)
    p.set_defaults(func=cmd_genfun_curve)

    p = sub.add_parser("fit", help="fit growth rate and exponent of a sequence")
    _common(p, model=False)
    p.add_argument("--input", required=True, help="CSV sequence (last column is the value)")
    p.add_argument("--period", type=int, default=None, help="thinning period (default: try 1 and 2)")
    p.add_argument("--fit-method", choices=["richardson", "aitken"], default="richardson")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("confront", help="fitted versus predicted exponents")
    _common(p)
    p.add_argument("--kind", choices=["survival", "excursion"], required=True)
    p.add_argument("--input", help="CSV sequence; computed from the model when omitted")
    p.add_argument("--probabilities", action="store_true", help="the input holds probabilities, not counts")
    p.add_argument("--from", dest="start", type=point)
    p.add_argument("--to", type=point)
    p.add_argument("--N", type=int, default=1000)
    p.add_argument("--period", type=int, default=None)
    p.set_defaults(func=cmd_confront)

    p = sub.add_parser("classify", help="D-finiteness obstruction from the exponent")
    _common(p)
    p.set_defaults(func=cmd_classify)
    return parser


def _config(args):
    skip = {"func", "format", "output"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    if isinstance(cfg.get("cone"), ConeSpec):
        cfg["cone"] = cfg["cone"].to_json()
    cfg["threads"] = green.workers_from_env()
    return to_jsonable(cfg)


def _render(args, result, table):
    if args.format == "csv":
        if table is None:
            raise ModelError(f"{args.command} has no tabular output; use --format json")
        header, rows = table
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()
    doc = {"config": _config(args), "result": to_jsonable(result)}
    return json.dumps(doc, indent=2) + "\n"


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return exc.code
    except SystemExit as exc:  # --help
        return exc.code or 0
    try:
        result, table = args.func(args)
        text = _render(args, result, table)
    except model.ModelFormatError as exc:
        print(f"conewalk: invalid model: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ModelError, ValueError, KeyError) as exc:
        print(f"conewalk: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ArithmeticError, conditioned.WindowExhausted) as exc:
        print(f"conewalk: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
