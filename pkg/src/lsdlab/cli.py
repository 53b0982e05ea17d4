"""Command-line front end: exact counts, predictions and comparison tables.

Tables go to standard output as CSV, single predictions as JSON; diagnostics
go to standard error. Exit codes: 0 success, 2 usage error, 3 numeric
validation failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .errors import CapacityError, DomainError, LsdError, NumericValidationError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

APPLICATIONS = ("restricted", "lstar-div", "lstar-eq", "lprime-ge", "lprime-eq", "sathe-omega", "sathe-Omega")
_KIND = {
    "restricted": "restricted",
    "lstar-div": "lambda_star_divisible",
    "lstar-eq": "lambda_star_equal",
    "lprime-ge": "lambda_prime_at_least",
    "lprime-eq": "lambda_prime_equal",
    "sathe-omega": "omega_hist",
    "sathe-Omega": "Omega_hist",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class ComparisonRow:
    x: int
    quantity: str
    parameters: str
    exact: int
    predicted: float
    rel_error: float | None  # None when exact == 0

    @classmethod
    def build(cls, x, quantity, parameters, exact, predicted):
        rel = predicted / exact - 1 if exact > 0 else None
        return cls(x, quantity, parameters, exact, predicted, rel)

    def cells(self) -> list[str]:
        rel = "NA" if self.rel_error is None else _fmt(self.rel_error)
        return [str(self.x), self.quantity, self.parameters, str(self.exact), _fmt(self.predicted), rel]


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def parse_x_list(text: str) -> list[int]:
    """'1e4,1e5' -> [10000, 100000]; values must be integral."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            value = float(item)
        except ValueError:
            raise UsageError(f"not a number: {item!r}") from None
        if not math.isfinite(value) or value != int(value) or value < 1:
            raise UsageError(f"x must be a positive integer: {item!r}")
        out.append(int(value))
    if not out:
        raise UsageError("empty x list")
    return out


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"not an integer list: {text!r}") from None


# ---------------------------------------------------------------- application glue

@dataclass(frozen=True)
class _Job:
    app: str
    q: int
    residues: tuple[int, ...]
    a: int
    ks: tuple[int, ...]

    @property
    def sathe(self) -> bool:
        return self.app.startswith("sathe")

    def parameters(self, k=None) -> str:
        if self.app == "restricted":
            return f"q={self.q};A={'|'.join(map(str, self.residues))}"
        if self.sathe:
            return f"q={self.q};a={self.a};k={k}"
        return f"q={self.q}"


def _job(args) -> _Job:
    residues = tuple(_int_list(args.A)) if args.A else (1,)
    ks = tuple(_int_list(args.k)) if args.k else (0, 1, 2, 3)
    if any(k < 0 for k in ks):
        raise UsageError("k must be >= 0")
    return _Job(args.application, args.q, residues, args.a, ks)


def _quantity(job: _Job):
    from .counters import Quantity

    return Quantity(_KIND[job.app], job.q, job.residues if job.app == "restricted" else (), job.a)


def _exact(job: _Job, xs, table):
    from .counters import Histogram, count_many

    quantity = _quantity(job)
    counts = count_many(xs, [quantity], table)
    out = {}
    for x in xs:
        value = counts[x][quantity]
        if isinstance(value, Histogram):
            out[x] = {k: value.bins.get(k, 0) for k in job.ks}
        else:
            out[x] = value
    return out


def _predict(job: _Job, x: float, N: int, k=None, with_li: bool = True) -> float:
    from . import predictors as pr

    if job.app == "restricted":
        return pr.predict_restricted(x, job.q, job.residues, N)
    if job.app == "lstar-div":
        return pr.predict_lambda_star_divisible(x, job.q, N)
    if job.app == "lstar-eq":
        return pr.predict_lambda_star_equal(x, job.q, N, with_li=with_li)
    if job.app == "lprime-ge":
        return pr.predict_primary_at_least(x, job.q, N)
    if job.app == "lprime-eq":
        return pr.predict_lambda_prime_equal(x, job.q, N)
    if job.app == "sathe-omega":
        return pr.predict_omega_hist(x, job.q, job.a, k)
    return pr.predict_Omega_hist(x, job.q, job.a, k)


def _coefficients(job: _Job, x: float, N: int, k=None) -> dict:
    from . import predictors as pr

    if job.sathe:
        Y = math.log(math.log(x))
        fn = pr.p0k if job.app == "sathe-omega" else pr.q0k
        return {"Y": Y, "value": fn(Y, k, job.q, job.a)}
    if job.app == "restricted":
        exp = pr.expansion_restricted(job.q, job.residues, N)
    elif job.app.startswith("lstar"):
        exp = pr.expansion_lambda_star(job.q, N)
    else:
        exp = pr.expansion_primary(job.q, N)
    return {
        "alpha0": exp.alpha0.real,
        "c": [[c.real, c.imag] for c in exp.coefficients],
    }


def _table(args, top: int):
    from .arith import sieve_spf, spf_table_for

    if args.spf_cache:
        return spf_table_for(max(top, 2), args.spf_cache)
    return sieve_spf(max(top, 2))


def _writer(out):
    return csv.writer(out, lineterminator="\n")


# ---------------------------------------------------------------- subcommands

def cmd_count(args, out) -> int:
    job = _job(args)
    xs = sorted(set(parse_x_list(args.x)))
    exact = _exact(job, xs, _table(args, xs[-1]))
    w = _writer(out)
    w.writerow(["x", "quantity", "parameters", "value"])
    for x in xs:
        if job.sathe:
            for k in job.ks:
                w.writerow([x, job.app, job.parameters(k), exact[x][k]])
        else:
            w.writerow([x, job.app, job.parameters(), exact[x]])
    return EXIT_OK


def cmd_predict(args, out) -> int:
    job = _job(args)
    xs = parse_x_list(args.x)
    if len(xs) != 1:
        raise UsageError("predict takes a single x")
    x = xs[0]
    k = job.ks[0] if job.sathe else None
    if job.sathe and args.k and len(job.ks) != 1:
        raise UsageError("predict takes a single k")
    record = {
        "application": job.app,
        "parameters": job.parameters(k),
        "x": x,
        "N": args.N,
        "coefficients": _coefficients(job, x, args.N, k),
        "prediction": _predict(job, x, args.N, k, not args.no_li),
    }
    out.write(json.dumps(record, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_compare(args, out) -> int:
    job = _job(args)
    xs = sorted(set(parse_x_list(args.x)))
    exact = _exact(job, xs, _table(args, xs[-1]))
    w = _writer(out)
    w.writerow(["x", "quantity", "parameters", "exact", "predicted", "rel_error"])
    for x in xs:
        if job.sathe:
            for k in job.ks:
                row = ComparisonRow.build(x, job.app, job.parameters(k), exact[x][k], _predict(job, x, args.N, k))
                w.writerow(row.cells())
        else:
            row = ComparisonRow.build(x, job.app, job.parameters(), exact[x],
                                      _predict(job, x, args.N, with_li=not args.no_li))
            w.writerow(row.cells())
    return EXIT_OK


def cmd_chars(args, out) -> int:
    from .characters import build_character_group

    group = build_character_group(args.q)
    w = _writer(out)
    w.writerow(["character", "t", "parity", "order", "a", "angle"])
    for chi in group.characters():
        t = "|".join(map(str, chi.t))
        for a in sorted(int(e) for e in group.elements):
            angle = chi.angle(a)
            w.writerow([chi.flat, t, chi.parity, chi.order, a, _fraction(angle)])
    return EXIT_OK


def _fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def cmd_lvalues(args, out) -> int:
    import numpy as np

    from .characters import build_character_group
    from .lvalues import l_values_all, log_table

    group = build_character_group(args.q)
    values = np.atleast_1d(l_values_all(group, args.s))
    logs = log_table(args.q).at_real(args.s) if args.log else None
    w = _writer(out)
    header = ["character", "t", "parity", "re", "im"]
    if logs is not None:
        header += ["log_re", "log_im"]
    w.writerow(header)
    parities = group.parities()
    for chi in group.characters():
        i = chi.flat
        v = complex(values[i])
        row = [i, "|".join(map(str, chi.t)), int(parities[i]), _fmt(v.real), _fmt(v.imag)]
        if logs is not None:
            row += [_fmt(logs[i].real), _fmt(logs[i].imag)]
        w.writerow(row)
    return EXIT_OK


def cmd_selftest(args, out) -> int:
    from .selftest import run_checks

    results = run_checks()
    failed = 0
    for name, ok, detail in results:
        out.write(f"{'PASS' if ok else 'FAIL'} {name}{(': ' + detail) if detail else ''}\n")
        failed += not ok
    out.write(f"{len(results) - failed}/{len(results)} checks passed\n")
    return EXIT_OK if not failed else EXIT_NUMERIC


# ---------------------------------------------------------------- parser

def _add_application(p, *, need_x=True):
    p.add_argument("application", choices=APPLICATIONS, help="quantity to count or predict")
    p.add_argument("--q", type=int, required=True, help="modulus (required)")
    p.add_argument("--A", default="1", metavar="RESIDUES",
                   help="comma-separated residue set for 'restricted' (default: %(default)s)")
    p.add_argument("--a", type=int, default=1, metavar="A", help="residue class for sathe-* (default: %(default)s)")
    p.add_argument("--k", default=None,
                   help="comma-separated k values for sathe-* (default: 0,1,2,3; predict uses the first)")
    if need_x:
        p.add_argument("--x", required=True, help="comma-separated x values, e.g. 1e4,1e5 (required)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lsdlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--spf-cache", default=None, metavar="PATH",
                        help="smallest-prime-factor table cache file, created when missing (default: none)")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("count", help="exact counts as CSV")
    _add_application(p)
    p.set_defaults(func=cmd_count)

    for name, func, text in (("predict", cmd_predict, "main-term prediction as JSON"),
                             ("compare", cmd_compare, "exact vs predicted as CSV")):
        p = sub.add_parser(name, help=text)
        _add_application(p)
        p.add_argument("--N", type=int, default=0, help="number of secondary terms (default: %(default)s)")
        p.add_argument("--no-li", action="store_true", help="drop the li correction for lstar-eq")
        p.set_defaults(func=func)

    p = sub.add_parser("chars", help="character table with exact angles as CSV")
    p.add_argument("--q", type=int, required=True, help="modulus (required)")
    p.set_defaults(func=cmd_chars)

    p = sub.add_parser("lvalues", help="L(s, chi) for all chi mod q as CSV")
    p.add_argument("--q", type=int, required=True, help="modulus (required)")
    p.add_argument("--s", type=float, default=1.0,
                   help="real point in (0.9, 2]; the principal entry is (s-1) L(s, chi0) (default: %(default)s)")
    p.add_argument("--log", action="store_true", help="also print the continuous logarithm")
    p.set_defaults(func=cmd_lvalues)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        if getattr(args, "N", 0) < 0:
            raise UsageError("N must be >= 0")
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except NumericValidationError as exc:
        err.write(f"numeric validation failed: {exc}\n")
        return EXIT_NUMERIC
    except (DomainError, CapacityError) as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except LsdError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
