"""Command-line front end.

Subcommands::

    qesheun qes-check --alpha 8 --epsilon -4
    qesheun poly --gamma 1 --delta 1 --epsilon -4.2163702135578393 --n 2
    qesheun demkov --z1 5 --z2 1 --dim 3 [--grid-out rho.csv --box 6 --shape 41]
    qesheun potential --gamma 1 --delta 1 --epsilon -4 --n 2 --root 3 --x-min 0.1 --x-max 4

Numbers accept the rational syntax ``p/q``; integers and fractions keep the
computation exact. JSON floats are written with 17 significant digits so
identical inputs give byte-identical output. ``QESHEUN_THREADS`` sets the
thread count of the Demkov search.

Exit codes: 0 success, 1 domain error (or "not QES"), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .cheq_core import (CheqParams, QesCertificate, build_family, build_solution, qes_degree,
                        solution_residual, spectral_roots)
from .errors import QesError
from .reductions import derived_params, schroedinger_form
from .twocenter import CartesianGrid, CenterConfig, SearchDiagnostics, demkov_search, density_grid

THREADS_ENV = "QESHEUN_THREADS"
SCHEMA_DIR = os.path.join(os.path.dirname(__file__), "schemas")


class UsageError(Exception):
    pass


def parse_number(text: str):
    """``"p/q"`` and integers become Fractions; anything else a float."""
    s = text.strip()
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(s))
    except (ValueError, ZeroDivisionError):
        pass
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


def fmt_float(x) -> str:
    return format(float(x), ".17g")


def _json_text(obj, indent: int = 0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, Fraction, np.floating)):
        v = float(obj)
        return fmt_float(v) if math.isfinite(v) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_json_text(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_json_text(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + _json_text(v, indent + 1) for v in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    return _json_text(obj) + "\n"


def _exact_str(x) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _error(exc: Exception) -> dict:
    return {"error": type(exc).__name__, "message": str(exc)}


# --- commands ------------------------------------------------------------------

def cmd_qes_check(args, out) -> int:
    gamma = args.gamma if args.gamma is not None else 1
    delta = args.delta if args.delta is not None else 1
    p = CheqParams(args.alpha, gamma, delta, args.epsilon)
    n = qes_degree(p, args.tol)
    if n is None:
        out.write("not QES\n")
        return 1
    out.write(f"n={n}\n")
    return 0


def poly_report(gamma, delta, epsilon, n: int) -> dict:
    fam = build_family(gamma, delta, epsilon, n)
    roots = spectral_roots(fam)
    report = {
        "command": "poly",
        "params": {"gamma": gamma, "delta": delta, "epsilon": epsilon, "n": n, "M": fam.M},
        "exact": fam.exact,
        "critical_polynomials": [],
        "roots": list(roots),
        "root_residuals": [float(r) for r in roots.residuals],
        "solutions": [],
    }
    for k, P in enumerate(fam.polys):
        entry = {"k": k, "coeffs": [float(c) for c in P]}
        if fam.exact:
            entry["coeffs_exact"] = [_exact_str(c) for c in P]
        report["critical_polynomials"].append(entry)
    zs = np.linspace(-3, 3, 13)
    for j, q in enumerate(roots, start=1):
        sol = build_solution(fam, q, j=j)
        report["solutions"].append({
            "j": j,
            "q": q,
            "coeffs_z_plus_1": [float(c) for c in sol.coeffs],
            "coeffs_z_monic": [float(c) for c in sol.monic()],
            "max_residual": max(solution_residual(sol, float(z)) for z in zs),
        })
    return report


def cmd_poly(args, out) -> int:
    if args.n < 0:
        raise UsageError("--n must be non-negative")
    try:
        report = poly_report(args.gamma, args.delta, args.epsilon, args.n)
    except QesError as exc:
        out.write(dumps(_error(exc)))
        return 1
    out.write(dumps(report))
    return 0


def demkov_report(config: CenterConfig, n_max: int, workers: int = 1, pairs=None):
    diag = SearchDiagnostics()
    sols = demkov_search(config, n_max, pairs=pairs, diagnostics=diag, workers=workers)
    report = {
        "command": "demkov",
        "config": {"Z1": float(config.Z1), "Z2": float(config.Z2), "dim": config.dim},
        "n_max": n_max,
        "solutions": [s.as_dict() for s in sols],
        "diagnostics": {
            "messages": list(diag.messages),
            "unphysical": [
                {"n1": qn.n1, "n2": qn.n2, "m": qn.m, "case_radial": cr, "case_angular": ca,
                 "lambda": lam, "R": R}
                for qn, cr, ca, lam, R in diag.unphysical
            ],
        },
    }
    return report, sols


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}")


def cmd_demkov(args, out) -> int:
    if args.z1 <= 0 or args.z2 <= 0:
        raise UsageError("charges must be positive")
    pairs = None
    if args.pair:
        pairs = [tuple(int(v) for v in p.split(",")) for p in args.pair]
    config = CenterConfig(args.z1, args.z2, args.dim)
    report, sols = demkov_report(config, args.n_max, _threads(), pairs)
    if args.grid_out:
        if not sols:
            out.write(dumps(_error(QesError("no solution to sample"))))
            return 1
        if not 0 <= args.solution < len(sols):
            raise UsageError(f"--solution must be in [0, {len(sols) - 1}]")
        sol = sols[args.solution]
        L = float(args.box)
        grid = CartesianGrid((-L,) * config.dim, (L,) * config.dim, (args.shape,) * config.dim)
        dg = density_grid(sol, grid)
        names = ["x1", "x2", "x3"][:config.dim] + ["rho"]
        with open(args.grid_out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(names)
            for row in dg.rows():
                w.writerow([fmt_float(v) for v in row])
        report["grid"] = {"path": args.grid_out, "solution": args.solution, "norm2": dg.norm2,
                          "rho_max": float(dg.rho.max())}
    out.write(dumps(report))
    return 0


def cmd_potential(args, out) -> int:
    if (args.q is None) == (args.root is None):
        raise UsageError("give exactly one of --q and --root")
    if not 0 < args.x_min < args.x_max:
        raise UsageError("need 0 < --x-min < --x-max")
    q = args.q
    if args.root is not None:
        fam = build_family(args.gamma, args.delta, args.epsilon, args.n)
        try:
            roots = spectral_roots(fam)
        except QesError as exc:
            sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
            return 1
        if not 1 <= args.root <= len(roots):
            raise UsageError(f"--root must be in [1, {len(roots)}]")
        q = roots[args.root - 1]
    cert = QesCertificate.from_family(args.gamma, args.delta, args.epsilon, args.n)
    form = schroedinger_form(cert, q)
    dp = derived_params(cert.params.with_q(q))
    if float(dp.a) != 0 or float(dp.b) + 0.25 != 0:
        sys.stderr.write("note: V(x) is singular as x -> 0+\n")
    xs = np.linspace(float(args.x_min), float(args.x_max), args.num)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["x", "V"])
    for x, v in zip(xs, form.potential(xs)):
        w.writerow([fmt_float(x), fmt_float(v)])
    return 0


# --- argument parsing -------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    num = parse_number
    parser = _Parser(prog="qesheun", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-o", "--output", help="write the result here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("qes-check", help="report the QES degree n with alpha = -n epsilon")
    p.add_argument("--alpha", type=num, required=True)
    p.add_argument("--epsilon", type=num, required=True)
    p.add_argument("--gamma", type=num)
    p.add_argument("--delta", type=num)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_qes_check)

    p = sub.add_parser("poly", help="critical polynomials, spectral roots and polynomial solutions")
    for name in ("gamma", "delta", "epsilon"):
        p.add_argument(f"--{name}", type=num, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("demkov", help="Demkov solutions of two fixed Coulomb centers")
    p.add_argument("--z1", type=num, required=True)
    p.add_argument("--z2", type=num, required=True)
    p.add_argument("--dim", type=int, choices=(2, 3), default=3)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--pair", action="append", metavar="N1,N2",
                   help="restrict to principal numbers (repeatable)")
    p.add_argument("--grid-out", help="CSV file for the probability density")
    p.add_argument("--solution", type=int, default=0, help="index of the solution to sample")
    p.add_argument("--box", type=num, default=Fraction(6), help="half width of the cubic box")
    p.add_argument("--shape", type=int, default=41, help="points per axis")
    p.set_defaults(func=cmd_demkov)

    p = sub.add_parser("potential", help="CSV samples of the hyperbolic Schroedinger potential")
    for name in ("gamma", "delta", "epsilon"):
        p.add_argument(f"--{name}", type=num, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=num)
    p.add_argument("--root", type=int, help="use the j-th spectral root (1-based, ascending)")
    p.add_argument("--x-min", type=num, default=Fraction(1, 10))
    p.add_argument("--x-max", type=num, default=Fraction(4))
    p.add_argument("--num", type=int, default=40)
    p.set_defaults(func=cmd_potential)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"qesheun: error: {exc}\n")
        return 2
    except QesError as exc:
        buf.write(dumps(_error(exc)))
        code = 1
    text = buf.getvalue()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
