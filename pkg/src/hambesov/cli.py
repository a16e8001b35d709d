"""Command-line front end.

Exit status: 0 on success, 1 when ``verify`` finds a failing check, 2 when
arguments are rejected. All validation happens before any computation.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import random
import sys
import time
from fractions import Fraction

from .discrepancy import eval_discrepancy, l2_squared_exact, parse_rational
from .hammersley import SignPattern, balanced_pattern, generate, identity_pattern, random_pattern, write_points_csv
from .haar import HaarIndex, classify_regime, coeff_discrepancy_fast, coeff_discrepancy_pointwise, coeff_oracle
from .norms import (
    INTEGRANDS,
    PATTERN_RULES,
    NormParams,
    besov_quasi_norm,
    parseval_l2,
    qmc_series,
    rate_report,
    write_qmc_csv,
)
from .tables import METHODS, coefficient_record, table_records, write_table_jsonl


class UsageError(Exception):
    """Rejected arguments; reported on stderr with exit status 2."""


def _fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _exponent(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'inf', got {text!r}") from None


def _pattern(args) -> SignPattern:
    choice = args.pattern
    n = args.n
    if choice is None or choice == "balanced":
        return balanced_pattern(n)
    if choice == "identity":
        return identity_pattern(n)
    if choice == "random":
        return random_pattern(n, random.Random(args.seed))
    pat = SignPattern.parse(choice)
    if len(pat) != n:
        raise UsageError(f"--pattern {choice} has length {len(pat)} but --n is {n}")
    return pat


def _point_set(args):
    if args.base < 2:
        raise UsageError("--base must be >= 2")
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    return generate(args.base, args.n, _pattern(args))


def _n_range(args) -> range:
    if args.nmin < 1 or args.nmax < args.nmin:
        raise UsageError("need 1 <= --nmin <= --nmax")
    return range(args.nmin, args.nmax + 1)


def _check_plot(args):
    if getattr(args, "plot", None):
        from .plotting import require_matplotlib

        try:
            require_matplotlib()
        except ImportError as exc:
            raise UsageError(str(exc)) from None


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit_json(obj, fh):
    fh.write(json.dumps(obj) + "\n")


# --- subcommands ---------------------------------------------------------------


def cmd_generate(args):
    ps = _point_set(args)
    with _output(args.out) as fh:
        write_points_csv(ps, fh)


def cmd_eval(args):
    ps = _point_set(args)
    try:
        x, y = parse_rational(args.x), parse_rational(args.y)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not (0 <= x <= 1 and 0 <= y <= 1):
        raise UsageError("--x and --y must lie in [0, 1]")
    with _output(args.out) as fh:
        fh.write(_fmt(eval_discrepancy(ps, x, y)) + "\n")


_COEFF = {"fast": coeff_discrepancy_fast, "pointwise": coeff_discrepancy_pointwise, "oracle": coeff_oracle}


def cmd_coeff(args):
    ps = _point_set(args)
    idx = HaarIndex(args.j1, args.j2, args.m1, args.m2, args.l1, args.l2)
    idx.validate(ps.b)
    value = _COEFF[args.method](ps, idx)
    with _output(args.out) as fh:
        _emit_json(coefficient_record(idx, value, classify_regime(idx, ps.n), args.exact), fh)


def cmd_coeffs_table(args):
    ps = _point_set(args)
    if args.jmax < -1:
        raise UsageError("--jmax must be >= -1")
    with _output(args.out) as fh:
        write_table_jsonl(table_records(ps, args.jmax, args.method, args.exact), fh)


def _norm_params(args, J=None) -> NormParams:
    try:
        params = NormParams(args.p, args.q, args.r, J)
        params.check_band()
        return params
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_norm(args):
    ps = _point_set(args)
    J = args.J if args.J is not None else ps.n + 4
    if J < ps.n:
        raise UsageError(f"--J must be >= n = {ps.n}")
    params = _norm_params(args, J)
    res = besov_quasi_norm(ps, params)
    with _output(args.out) as fh:
        _emit_json({"value": res.value, "tail_bound": res.tail_bound, "J": res.J}, fh)


def cmd_l2(args):
    ps = _point_set(args)
    J = args.J if args.J is not None else ps.n + 5
    if J < ps.n:
        raise UsageError(f"--J must be >= n = {ps.n} for the closed-form tail")
    rec = {"parseval": parseval_l2(ps, J, with_tail=True), "J": J}
    if args.exact:
        exact = l2_squared_exact(ps)
        rec["exact"] = _fmt(exact)
        rec["difference"] = rec["parseval"] - float(exact)
    with _output(args.out) as fh:
        _emit_json(rec, fh)


def cmd_scaling(args):
    ns = _n_range(args)
    params = _norm_params(args)
    try:
        params.check_rate_hypothesis()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _check_plot(args)
    report = rate_report(args.base, args.r, args.p, args.q, ns, args.pattern_rule)
    with _output(args.out) as fh:
        report.write_csv(fh)
    if args.plot:
        from .plotting import plot_scaling

        plot_scaling(report, args.plot)


def cmd_integrate(args):
    ns = _n_range(args)
    _check_plot(args)
    rows = qmc_series(args.base, args.f, ns, args.pattern_rule)
    with _output(args.out) as fh:
        write_qmc_csv(rows, fh)
    if args.plot:
        from .plotting import plot_integration

        plot_integration(rows, args.f, args.plot)


def cmd_verify(args):
    from .verify import ACCEPTANCE, INVARIANTS, run_all

    names = set(INVARIANTS) | set(ACCEPTANCE)
    bad = sorted(set(args.skip) - names)
    if bad:
        raise UsageError(f"unknown check(s) {bad}; known: {sorted(names)}")
    scale = "quick" if args.quick else "full"
    failed = 0
    t0 = time.perf_counter()
    with _output(args.out) as fh:
        for check in run_all(scale, args.seed, args.skip):
            failed += not check.passed
            fh.write(check.line() + "\n")
            fh.flush()
        fh.write(f"{failed} failed ({scale} scale, seed {args.seed})\n")
    print(f"verify took {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return 1 if failed else 0


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hambesov",
        description="Hammersley point sets, Haar coefficients of their discrepancy and Besov norms.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for random patterns and sampling")

    points = argparse.ArgumentParser(add_help=False)
    points.add_argument("--base", "-b", type=int, default=2)
    points.add_argument("--n", type=int, required=True)
    points.add_argument(
        "--pattern",
        help="digit maps as a string over I/R (s_1 first), or balanced | identity | random (default balanced)",
    )

    series = argparse.ArgumentParser(add_help=False)
    series.add_argument("--base", "-b", type=int, default=2)
    series.add_argument("--nmin", type=int, required=True)
    series.add_argument("--nmax", type=int, required=True)
    series.add_argument("--pattern-rule", choices=sorted(PATTERN_RULES), default="balanced")
    series.add_argument("--plot", metavar="FILE", help="also render a figure (needs matplotlib)")

    exponents = argparse.ArgumentParser(add_help=False)
    exponents.add_argument("--p", type=_exponent, default=2.0)
    exponents.add_argument("--q", type=_exponent, default=2.0)
    exponents.add_argument("--r", type=float, default=0.0)

    p = sub.add_parser("generate", parents=[common, points], help="dump the point set as CSV")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("eval", parents=[common, points], help="exact discrepancy at one point")
    p.add_argument("--x", required=True, help="num/den")
    p.add_argument("--y", required=True, help="num/den")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("coeff", parents=[common, points], help="one Haar coefficient as a JSON line")
    for name in ("j1", "j2"):
        p.add_argument(f"--{name}", type=int, required=True)
    for name in ("m1", "m2"):
        p.add_argument(f"--{name}", type=int, default=0)
    for name in ("l1", "l2"):
        p.add_argument(f"--{name}", type=int, default=1)
    p.add_argument("--method", choices=METHODS, default="fast")
    p.add_argument("--exact", action="store_true", help="include num_vec/den_vec")
    p.set_defaults(func=cmd_coeff)

    p = sub.add_parser("coeffs-table", parents=[common, points], help="all coefficients up to --jmax")
    p.add_argument("--jmax", type=int, required=True)
    p.add_argument("--method", choices=METHODS, default="fast")
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=cmd_coeffs_table)

    p = sub.add_parser("norm", parents=[common, points, exponents], help="truncated Besov quasi-norm")
    p.add_argument("--J", type=int, help="truncation level (default n + 4)")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("l2", parents=[common, points], help="L2 norm squared via Parseval")
    p.add_argument("--J", type=int, help="truncation level (default n + 5)")
    p.add_argument("--exact", action="store_true", help="also compute the exact rational value")
    p.set_defaults(func=cmd_l2)

    p = sub.add_parser("scaling", parents=[common, series, exponents], help="rate table as CSV")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("integrate", parents=[common, series], help="integration errors as CSV")
    p.add_argument("--f", required=True, choices=sorted(INTEGRANDS))
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("verify", parents=[common], help="run the invariant and acceptance checks")
    p.add_argument("--quick", action="store_true", help="reduced sizes (default: full sizes)")
    p.add_argument("--skip", action="append", default=[], metavar="NAME", help="omit a check (repeatable)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or 0
    except UsageError as exc:
        parser.exit(2, f"{parser.prog} {args.command}: error: {exc}\n")
    except ValueError as exc:
        # domain errors from the library (bad index, pattern length, ...) are argument problems
        parser.exit(2, f"{parser.prog} {args.command}: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
