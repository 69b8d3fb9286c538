"""Command-line front end: qrecursive VERB TARGET [options].

TARGET is a catalog name, a definition file, or a representation JSON file
(*.json).  Exit status: 0 success, 1 domain error, 2 usage error.
"""

import argparse
import csv
import json
import math
import os
import sys
from fractions import Fraction

from . import __version__
from .asymptotics import (
    DirichletConfig, assemble_expansion, choose_R, empirical_fluctuation, fluctuation_value,
    fourier_coefficients, special_dirichlet,
)
from .builder import (
    build, build_general, build_special, correct_offset, is_special_case, load_identities,
    special_blocks,
)
from .catalog import ENTRIES, analysis_inputs, get_entry
from .core import (
    QRecursiveError, SequenceOracle, format_definition, format_rational, load_definition,
    load_rep, rep_check, rep_eval, rep_to_json, validate_definition,
)
from .minimizer import minimize
from .spectral import fmt_complex, jsr_bounds, spectrum


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- targets

class Target:
    def __init__(self, text):
        self.text = text
        self.entry = None
        self.definition = None
        self.rep = None
        if text in ENTRIES:
            self.entry = get_entry(text)
            self.definition = self.entry.definition()
        elif text.endswith(".json"):
            self.rep, self.definition = load_rep(text)
        elif os.path.exists(text):
            self.definition = validate_definition(load_definition(text))
        else:
            raise UsageError("%r is neither a catalog entry nor a readable file" % text)

    @property
    def name(self):
        if self.definition is not None and self.definition.name:
            return self.definition.name
        return self.rep.name if self.rep is not None else self.text

    def oracle(self):
        if self.definition is None:
            return None
        return SequenceOracle(self.definition, validate=False)

    def need_definition(self):
        if self.definition is None:
            raise UsageError("this command needs a definition (the representation file has none)")
        return self.definition

    def special_allowed(self, special):
        return special if special is not None else (self.entry.special if self.entry else False)

    def representation(self, special=None, correct=True):
        if self.rep is not None:
            if correct and self.rep.validity_offset:
                return correct_offset(self.rep, self.oracle() or _no_oracle())
            return self.rep
        return build(self.definition, special=self.special_allowed(special), correct=correct)

    def analysis(self, special=None):
        """(rep, JsrBounds, spectrum) used by the asymptotic commands."""
        if self.entry is not None and special is None:
            return analysis_inputs(self.entry)
        rep = self.representation(special)
        return rep, jsr_bounds(rep.matrices, 4, "row"), spectrum(rep.sum_matrix())


def _no_oracle():
    raise UsageError("offset correction needs the defining recurrence")


def _parse_mu(text):
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            a, b = int(a), int(b)
        else:
            a = b = int(text)
    except ValueError:
        raise UsageError("--mu expects A..B or a single integer, got %r" % text)
    if b < a:
        raise UsageError("--mu range %r is empty" % text)
    return list(range(a, b + 1))


def _parse_scaling(text):
    if text is None:
        return None
    try:
        return [Fraction(t) for t in text.split(",")]
    except ValueError:
        raise UsageError("--scaling expects comma-separated rationals")


def _f(x):
    """Floats rounded to 15 significant digits for output."""
    return float("%.15g" % x)


def _emit_json(obj, out):
    out.write(json.dumps(obj, sort_keys=True, indent=1) + "\n")


def _matrix_lines(name, a):
    lines = ["%s =" % name]
    for row in a:
        lines.append("  [" + " ".join("%6s" % format_rational(x) for x in row) + " ]")
    return lines


def _config(args):
    cfg = DirichletConfig()
    if getattr(args, "precision", None):
        if args.precision < 15:
            raise UsageError("--precision must be at least 15")
        cfg.precision = args.precision
        if args.precision > 15:
            cfg.direct_sum_cutoff = 8192
    return cfg


# ---------------------------------------------------------------- verbs

def cmd_catalog(args, out):
    if args.json:
        _emit_json([{"name": e.name, "description": e.description, "special": e.special,
                     "minimal_dim": e.minimal_dim} for e in ENTRIES.values()], out)
        return
    width = max(len(n) for n in ENTRIES)
    for e in ENTRIES.values():
        out.write("%-*s  %s\n" % (width, e.name, e.description))


def _values(target, ns):
    if target.definition is not None and target.rep is None:
        orc = target.oracle()
        return [orc(n) for n in ns]
    rep = target.representation()
    return [rep_eval(rep, n) for n in ns]


def cmd_eval(args, out):
    target = Target(args.target)
    ns = list(args.n)
    if args.nmax is not None:
        ns += list(range(args.nmax + 1))
    if not ns:
        raise UsageError("give indices or --nmax")
    if any(n < 0 for n in ns):
        raise UsageError("indices must be non-negative")
    vals = _values(target, ns)
    if args.json:
        _emit_json({str(n): format_rational(v) for n, v in zip(ns, vals)}, out)
    elif len(ns) == 1:
        out.write(format_rational(vals[0]) + "\n")
    else:
        for n, v in zip(ns, vals):
            out.write("%d %s\n" % (n, format_rational(v)))


def cmd_sum(args, out):
    target = Target(args.target)
    if args.N < 0:
        raise UsageError("N must be non-negative")
    vals = _values(target, range(args.N))
    total = sum(vals, Fraction(0))
    if args.json:
        _emit_json({"N": args.N, "sum": format_rational(total)}, out)
    else:
        out.write(format_rational(total) + "\n")


def _report_rep(rep, definition, args, out, special_m=None):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            _emit_json(rep_to_json(rep, definition), fh)
    if args.json:
        _emit_json(rep_to_json(rep, definition), out)
        return
    out.write("dimension %d, q = %d, valid from n = %d\n" % (rep.dim, rep.q, rep.validity_offset))
    if args.print_matrices:
        if special_m is not None:
            for r, b in enumerate(special_blocks(rep, special_m)):
                out.write("\n".join(_matrix_lines("B_%d" % r, b)) + "\n")
        for r, a in enumerate(rep.matrices):
            out.write("\n".join(_matrix_lines("A_%d" % r, a)) + "\n")
        out.write("v(0) = [" + " ".join(format_rational(x) for x in rep.v0) + "]\n")
        out.write("selection = [" + " ".join(format_rational(x) for x in rep.selection) + "]\n")


def cmd_build_rep(args, out):
    target = Target(args.target)
    d = target.need_definition()
    orc = target.oracle()
    special = bool(args.special)
    if special:
        rep = build_special(d, orc)
    elif not d.is_homogeneous():
        rep = build(d, oracle=orc)
    else:
        rep = build_general(d, orc)
    if args.offset_correct or args.minimize:
        rep = correct_offset(rep, orc)
    if args.minimize:
        rep = minimize(rep)[0]
    _report_rep(rep, d, args, out, d.m if special and not args.minimize else None)


def cmd_offset_correct(args, out):
    target = Target(args.target)
    d = target.need_definition()
    rep = target.rep if target.rep is not None else build(d, special=target.special_allowed(None),
                                                           correct=False)
    rep = correct_offset(rep, target.oracle())
    _report_rep(rep, d, args, out)


def cmd_minimize(args, out):
    target = Target(args.target)
    rep = target.representation()
    small, report = minimize(rep)
    if args.json or args.output:
        _report_rep(small, target.definition, args, out)
        if args.json:
            return
    out.write("input dimension %d, minimal dimension %d\n" % (report.input_dim, report.output_dim))
    if args.print_matrices:
        _report_rep(small, target.definition, args, out)


def cmd_spectrum(args, out):
    target = Target(args.target)
    if args.special:
        d = target.need_definition()
        if not is_special_case(d):
            raise UsageError("definition is not of the special form")
        qm = d.qm
        C = [[sum((d.coeff(r * qm + j, k) for r in range(d.q)), Fraction(0)) for k in range(qm)]
             for j in range(qm)]
    else:
        C = target.analysis()[0].sum_matrix() if target.entry else target.representation().sum_matrix()
    rep = spectrum(C)
    if args.json:
        _emit_json({"char_poly": [format_rational(c) for c in rep.char_poly],
                    "min_poly": [format_rational(c) for c in rep.min_poly],
                    "eigenvalues": [{"re": _f(e.value.real), "im": _f(e.value.imag),
                                     "algebraic_multiplicity": e.algebraic_multiplicity,
                                     "jordan_size": e.jordan_size,
                                     "exact": format_rational(e.exact) if e.exact is not None else None}
                                    for e in rep.eigenvalues]}, out)
        return
    out.write("eigenvalue  algebraic multiplicity  jordan size\n")
    for e in rep.eigenvalues:
        out.write("%s  %d  %d\n" % (fmt_complex(e.value), e.algebraic_multiplicity, e.jordan_size))


def cmd_jsr(args, out):
    target = Target(args.target)
    if args.k is None and args.norm is None and args.scaling is None and target.entry and not args.special:
        bounds = target.analysis()[1]
    else:
        k = args.k or 4
        norm = args.norm or "row"
        if args.special:
            d = target.need_definition()
            mats = special_blocks(build_special(d, target.oracle()), d.m)
        else:
            mats = target.representation().matrices
        bounds = jsr_bounds(mats, k, norm, _parse_scaling(args.scaling))
    obj = {"lower": _f(bounds.lower), "upper": _f(float(bounds.upper)), "depth": bounds.depth,
           "norm": bounds.norm,
           "certificate": list(bounds.finiteness_certificate) if bounds.certified else None,
           "simple_growth": bounds.simple_growth}
    if args.json:
        _emit_json(obj, out)
        return
    out.write("%.15g <= JSR <= %.15g  (norm %s, depth %d)\n"
              % (bounds.lower, float(bounds.upper), bounds.norm, bounds.depth))
    if bounds.certified:
        out.write("finiteness certificate: product %s\n" % "".join(map(str, bounds.finiteness_certificate)))
    out.write("simple growth: %s\n" % {True: "yes", False: "no", None: "undecided"}[bounds.simple_growth])


def _expansion(target, args, mu_max):
    rep, bounds, spec = target.analysis()
    R = choose_R(bounds, spec)
    return assemble_expansion(rep, R, spec, mu_max, _config(args))


def cmd_asymptotics(args, out):
    target = Target(args.target)
    exp = _expansion(target, args, args.mu_max)
    if args.json:
        _emit_json({"R": _f(exp.R), "error_exponent": _f(exp.error_exponent),
                    "error_log_power": exp.error_log_power,
                    "terms": [_table_json(t) for t in exp.terms]}, out)
        return
    out.write("X(N) = %s\n" % exp.describe())
    out.write("R = %.15g\n" % exp.R)
    for t in exp.terms:
        out.write("eigenvalue %s, exponent %s\n" % (fmt_complex(t.eigenvalue), fmt_complex(t.exponent)))
        for mu in range(0, args.mu_max + 1):
            out.write("  phi_%d = %s\n" % (mu, fmt_complex(t.coefficients[mu])))


def _table_json(t):
    return {"eigenvalue": {"re": _f(complex(t.eigenvalue).real), "im": _f(complex(t.eigenvalue).imag)},
            "exponent": _f(complex(t.exponent).real), "k": t.k,
            "coefficients": [{"mu": mu, "re": _f(re), "im": _f(im)} for mu, re, im in t.to_rows()]}


def _tables(target, args, mus):
    cfg = _config(args)
    if args.special:
        d = target.need_definition()
        sd = special_dirichlet(d, cfg=cfg)
        R = sd.eq.q ** sd.eq.growth
        eigs = [e.value for e in sd.spectrum.eigenvalues if e.modulus > R * (1 + 1e-9)]
        return [sd.fourier(lam, mus, check=False) for lam in _pick(eigs, args)]
    rep, bounds, spec = target.analysis()
    R = choose_R(bounds, spec)
    growth = math.log(R) / math.log(rep.q)
    eigs = [e.value for e in spec.eigenvalues if e.modulus > R + 1e-9 * max(1, R)]
    return [fourier_coefficients(rep, lam, mus, cfg, growth, spec, check=False) for lam in _pick(eigs, args)]


def _pick(eigs, args):
    if args.eigenvalue is None:
        return eigs
    want = complex(args.eigenvalue.replace("i", "j"))
    hit = [lam for lam in eigs if abs(lam - want) <= 1e-6 * max(1, abs(want))]
    if not hit:
        raise UsageError("no contributing eigenvalue near %s" % args.eigenvalue)
    return hit


def cmd_fourier(args, out):
    target = Target(args.target)
    mus = _parse_mu(args.mu)
    tables = _tables(target, args, mus)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["eigenvalue", "mu", "re", "im"])
            for t in tables:
                for mu, re, im in t.to_rows():
                    w.writerow([fmt_complex(t.eigenvalue), mu, "%.15g" % re, "%.15g" % im])
    if args.json:
        _emit_json([_table_json(t) for t in tables], out)
        return
    for t in tables:
        out.write("eigenvalue %s, exponent %s\n" % (fmt_complex(t.eigenvalue), fmt_complex(t.exponent)))
        digits = max(15, args.precision or 15)
        for mu, c in sorted(t.coefficients.items()):
            out.write("%4d  %s\n" % (mu, _fmt_digits(c, digits)))


def _fmt_digits(c, digits):
    if digits <= 15:
        return fmt_complex(complex(c))
    from mpmath import nstr
    re, im = nstr(c.real, digits), nstr(c.imag, digits)
    return "%s%s%si" % (re, "" if im.startswith("-") else "+", im)


def cmd_fluctuation(args, out):
    target = Target(args.target)
    exp = _expansion(target, args, args.degree)
    if not exp.terms:
        raise UsageError("the expansion has no main term")
    main = exp.terms[0]
    kappa = complex(main.exponent).real
    steps = int(round((args.umax - args.umin) / args.step))
    grid = [args.umin + i * args.step for i in range(steps + 1)]
    emp = empirical_fluctuation(target.oracle() or target.representation(), kappa, grid, exp.q) \
        if target.definition is not None else _rep_empirical(target.representation(), kappa, grid, exp.q)
    rows = [(u, e, fluctuation_value(main, u % 1.0, args.degree).real) for u, e in emp]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["u", "empirical", "fourier_partial_sum"])
            for u, e, f in rows:
                w.writerow(["%.15g" % u, "%.15g" % e, "%.15g" % f])
    if args.json:
        _emit_json([{"u": _f(u), "empirical": _f(e), "fourier_partial_sum": _f(f)} for u, e, f in rows], out)
    elif not args.csv:
        for u, e, f in rows:
            out.write("%.15g %.15g %.15g\n" % (u, e, f))
    else:
        sup = max(abs(e - f) for _, e, f in rows)
        out.write("%d points written to %s; sup |empirical - partial sum| = %.6g\n"
                  % (len(rows), args.csv, sup))


def _rep_empirical(rep, kappa, grid, q):
    from .core import rep_values
    top = int(q ** max(grid)) + 1
    vals = rep_values(rep, top)
    prefix = [Fraction(0)]
    for v in vals:
        prefix.append(prefix[-1] + v)
    return empirical_fluctuation(lambda N: prefix[N], kappa, grid, q)


def cmd_validate(args, out):
    target = Target(args.target)
    nmax = args.nmax if args.nmax is not None else 1000
    if target.definition is None:
        raise UsageError("a representation file needs an embedded definition to validate against")
    orc = target.oracle()
    rep = target.rep if target.rep is not None else build(target.definition,
                                                          special=target.special_allowed(None),
                                                          correct=False)
    res = rep_check(rep, orc, nmax)
    if not res.ok:
        out.write("FAILED at n = %s: %s\n" % (res.counterexample, res.detail))
        return 1
    out.write("ok: %s, representation of dimension %d checked for n <= %d\n"
              % (target.name, rep.dim, nmax))
    return 0


def cmd_disentangle(args, out):
    system = load_identities(args.target)
    d = system.solve()
    text = format_definition(d)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.json:
        _emit_json({"q": d.q, "M": d.M, "m": d.m, "l": d.l, "u": d.u, "offset": d.offset,
                    "row_offsets": list(d.row_offsets) if d.row_offsets else None,
                    "coefficients": [[s, k, format_rational(c)] for (s, k), c in sorted(d.coefficients.items())
                                     if c]}, out)
    else:
        out.write(text)


# ---------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="qrecursive", description="q-recursive sequences and their asymptotics")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True, metavar="VERB")

    def verb(name, func, help, target=True):
        sp = sub.add_parser(name, help=help)
        if target:
            sp.add_argument("target", help="catalog name, definition file or representation JSON")
        sp.add_argument("--json", action="store_true", help="JSON output")
        sp.set_defaults(func=func)
        return sp

    verb("catalog", cmd_catalog, "list the built-in sequences", target=False)
    sp = verb("eval", cmd_eval, "values x(n)")
    sp.add_argument("n", nargs="*", type=int)
    sp.add_argument("--nmax", type=int)
    sp = verb("sum", cmd_sum, "summatory function X(N) = sum_{n < N} x(n)")
    sp.add_argument("N", type=int)
    for name, func, help in (("build-rep", cmd_build_rep, "construct a linear representation"),
                             ("offset-correct", cmd_offset_correct, "make a representation valid from 0"),
                             ("minimize", cmd_minimize, "minimal equivalent representation")):
        sp = verb(name, func, help)
        sp.add_argument("-o", "--output", help="write the representation JSON here")
        sp.add_argument("--print-matrices", action="store_true")
        if name == "build-rep":
            sp.add_argument("--special", action="store_true", help="use the special-case construction")
            sp.add_argument("--offset-correct", action="store_true")
            sp.add_argument("--minimize", action="store_true")
    sp = verb("spectrum", cmd_spectrum, "eigenvalues with multiplicities and Jordan sizes")
    sp.add_argument("--special", action="store_true", help="spectrum of sum B_r")
    sp = verb("jsr", cmd_jsr, "joint spectral radius bounds")
    sp.add_argument("--k", type=int)
    sp.add_argument("--norm", choices=["row", "col", "spectral"])
    sp.add_argument("--scaling", help="diagonal scaling T as comma-separated rationals")
    sp.add_argument("--special", action="store_true", help="use the matrices B_r")
    sp = verb("asymptotics", cmd_asymptotics, "asymptotic expansion of the summatory function")
    sp.add_argument("--mu-max", type=int, default=3)
    sp.add_argument("--precision", type=int)
    sp = verb("fourier", cmd_fourier, "Fourier coefficients of the fluctuations")
    sp.add_argument("--mu", default="0..10")
    sp.add_argument("--csv")
    sp.add_argument("--precision", type=int)
    sp.add_argument("--special", action="store_true", help="use the block Dirichlet series")
    sp.add_argument("--eigenvalue")
    sp = verb("fluctuation", cmd_fluctuation, "empirical fluctuation against the Fourier partial sum")
    sp.add_argument("--degree", type=int, default=50)
    sp.add_argument("--csv")
    sp.add_argument("--umin", type=float, default=10.0)
    sp.add_argument("--umax", type=float, default=16.0)
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--precision", type=int)
    sp = verb("validate", cmd_validate, "check a definition or representation")
    sp.add_argument("--nmax", type=int)
    sp = verb("disentangle", cmd_disentangle, "solve an identity file for a definition")
    sp.add_argument("-o", "--output")
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        status = args.func(args, out)
    except UsageError as exc:
        sys.stderr.write("usage error: %s\n" % exc)
        return 2
    except QRecursiveError as exc:
        sys.stderr.write("error: %s: %s\n" % (type(exc).__name__, exc))
        return 1
    except (OSError, ValueError) as exc:
        sys.stderr.write("error: %s: %s\n" % (type(exc).__name__, exc))
        return 1
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
