"""Command-line front end.

Every command prints one report.  JSON reports have a fixed key order
and 17-significant-digit floats, so identical flags give byte-identical
output:

    {"command", "params": {"L", "eta"}, "tol", "results", "error_bounds",
     "provenance": {"truncation_order", "series_terms"}}

Exit codes: 0 success, 2 bad parameters or numerics, 3 convergence
failure, 64 unknown command.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import coulomb, jacobi, opoly, zeta
from .coulomb import CoulombParams
from .errors import (
    ConvergenceError,
    InvalidInputError,
    ParameterDomainError,
    PoleProximityError,
)

COMMANDS = (
    "zeros",
    "dzeros",
    "poly",
    "coeffs",
    "zeta",
    "bounds",
    "moments",
    "ortho-check",
    "identity-suite",
    "bessel-oracle",
)

EXACT = "exact: recurrence"
EXIT_OK, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_USAGE = 0, 2, 3, 64
EPS = float(np.finfo(float).eps)


@dataclass
class Report:
    command: str
    L: float
    eta: float
    tol: float
    results: list
    error_bounds: list
    truncation_order: Optional[int] = None
    series_terms: Optional[int] = None
    labels: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# serialization


def _num(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, str):
        return _str(x)
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _str(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch in '"\\':
            out.append("\\" + ch)
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _value(v) -> str:
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_value(x) for x in v) + "]"
    return _num(v)


def to_json(r: Report) -> str:
    parts = [
        f'"command": {_str(r.command)}',
        f'"params": {{"L": {_num(r.L)}, "eta": {_num(r.eta)}}}',
        f'"tol": {_num(r.tol)}',
        f'"results": {_value(r.results)}',
        f'"error_bounds": {_value(r.error_bounds)}',
        f'"provenance": {{"truncation_order": {_num(r.truncation_order)}, '
        f'"series_terms": {_num(r.series_terms)}}}',
    ]
    return "{" + ", ".join(parts) + "}\n"


def _rows(r: Report):
    for i, (v, e) in enumerate(zip(r.results, r.error_bounds)):
        label = r.labels[i] if i < len(r.labels) else str(i)
        if isinstance(v, (list, tuple)):
            errs = e if isinstance(e, (list, tuple)) else [e] * len(v)
            for j, (vj, ej) in enumerate(zip(v, errs)):
                yield f"{label}.{j}", vj, ej
        else:
            yield label, v, e


def to_csv(r: Report) -> str:
    import csv

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "value", "error_bound"])
    for label, v, e in _rows(r):
        w.writerow([label, _num(v) if not isinstance(v, str) else v, e if isinstance(e, str) else _num(e)])
    return buf.getvalue()


def to_text(r: Report) -> str:
    lines = [f"{r.command}  L={_num(r.L)}  eta={_num(r.eta)}  tol={_num(r.tol)}"]
    for label, v, e in _rows(r):
        ev = e if isinstance(e, str) else f"+- {_num(e)}"
        lines.append(f"  {label:>10}  {_num(v):>26}  {ev}")
    if r.truncation_order is not None:
        lines.append(f"  truncation order {r.truncation_order}")
    if r.series_terms is not None:
        lines.append(f"  series terms {r.series_terms}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def _params(a) -> CoulombParams:
    return CoulombParams(a.L, a.eta)


def _positive_count(a, name="count"):
    v = getattr(a, name.replace("-", "_"))
    if v is None or v < 1:
        raise InvalidInputError(f"--{name} must be >= 1")
    return v


def cmd_zeros(a, tilde=False) -> Report:
    p = _params(a)
    count = _positive_count(a)
    fn = coulomb.zeros_dF if tilde else coulomb.zeros_F
    res = fn(p, count, a.tol)
    return Report(a.command, p.L, p.eta, a.tol, list(res.zeros), list(res.error_bounds),
                  truncation_order=res.truncation_order)


def cmd_poly(a) -> Report:
    p = _params(a)
    n = a.n
    if n is None or n < 0:
        raise InvalidInputError("--n must be >= 0")
    vals = opoly.op_values(coulomb.coulomb_sequences(p)[0], n, a.z)
    return Report(a.command, p.L, p.eta, a.tol, [float(v) for v in vals], [EXACT] * (n + 1),
                  labels=[f"P{k}" for k in range(n + 1)])


def cmd_coeffs(a) -> Report:
    p = _params(a)
    n = a.n
    if n is None or n < 0:
        raise InvalidInputError("--n must be >= 0")
    c = opoly.coulomb_P_coeffs(p, n).coeffs
    # Gamma factors through log-gamma: a few dozen ulps per coefficient
    errs = [64 * EPS * (n + 1) * abs(x) for x in c]
    return Report(a.command, p.L, p.eta, a.tol, list(c), errs, labels=[f"c{k}" for k in range(n + 1)])


def cmd_zeta(a) -> Report:
    p = _params(a)
    k_max = a.k_max if a.k_max is not None else 10
    t = zeta.zeta_table(p, k_max)
    return Report(a.command, p.L, p.eta, a.tol, list(t.values), [EXACT] * len(t.values),
                  labels=[f"zeta{k}" for k in range(2, k_max + 1)])


def cmd_bounds(a) -> Report:
    p = _params(a)
    s_max = a.s_max if a.s_max is not None else 4
    if s_max < 1:
        raise InvalidInputError("--s-max must be >= 1")
    b = zeta.euler_bounds(p, s_max)
    return Report(a.command, p.L, p.eta, a.tol, [list(x) for x in b], [EXACT] * len(b),
                  labels=[f"s{s}" for s in range(1, s_max + 1)])


def cmd_moments(a) -> Report:
    p = _params(a)
    n = a.n if a.n is not None else 8
    m = zeta.measure_moments(p, n)
    return Report(a.command, p.L, p.eta, a.tol, m, [EXACT] * len(m), labels=[f"m{k}" for k in range(n + 1)])


def cmd_ortho(a) -> Report:
    p = _params(a)
    K = a.count if a.count is not None else 500
    n = a.n if a.n is not None else 6
    meas = opoly.orthogonality_measure(p, K, a.tol)
    gram, bound = opoly.orthogonality_matrix(p, meas, n)
    resid = gram - np.eye(n + 1)
    results = [[float(x) for x in row] for row in resid]
    errs = [[float(x) for x in row] for row in bound]
    return Report(a.command, p.L, p.eta, a.tol, results, errs,
                  labels=[f"m{k}" for k in range(n + 1)])


def cmd_identity(a) -> Report:
    p = _params(a)
    n = a.n if a.n is not None else 6
    s = a.s_max if a.s_max is not None else 6
    rep = opoly.identity_suite(p, n, s)
    vals = [rep.identity_a, rep.identity_b, rep.lommel_bessel, rep.lommel_q_nu, rep.q_shift, rep.bessel_F]
    labels = ["F_combination", "P_wronskian", "lommel_bessel", "lommel_order_variable", "Q_shift", "bessel_F"]
    return Report(a.command, p.L, p.eta, a.tol, vals, [EXACT] * len(vals), labels=labels)


def cmd_bessel(a) -> Report:
    v = coulomb.bessel_J(a.nu, a.x)
    # the series is summed with 60 digits; only the binary64 prefactor rounds
    err = 8 * EPS * abs(v)
    return Report(a.command, a.L, a.eta, a.tol, [v], [err], labels=[f"J({_num(a.nu)},{_num(a.x)})"])


HANDLERS = {
    "zeros": cmd_zeros,
    "dzeros": lambda a: cmd_zeros(a, tilde=True),
    "poly": cmd_poly,
    "coeffs": cmd_coeffs,
    "zeta": cmd_zeta,
    "bounds": cmd_bounds,
    "moments": cmd_moments,
    "ortho-check": cmd_ortho,
    "identity-suite": cmd_identity,
    "bessel-oracle": cmd_bessel,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="coulomb-opoly",
        description="Zeros of Coulomb wave functions, their orthogonal polynomials and spectral zeta values.",
    )
    ap.add_argument("command", metavar="command", help=", ".join(COMMANDS))
    ap.add_argument("--L", type=float, default=0.0, help="angular parameter L")
    ap.add_argument("--eta", type=float, default=0.0, help="Coulomb strength eta")
    ap.add_argument("--count", type=int, help="number of zeros or atoms")
    ap.add_argument("--n", type=int, help="polynomial degree or moment order")
    ap.add_argument("--k-max", type=int, help="largest zeta index")
    ap.add_argument("--s-max", type=int, help="largest Euler index s")
    ap.add_argument("--tol", type=float, default=1e-10, help="absolute tolerance on zeros")
    ap.add_argument("--truncation-cap", type=int, help="cap on the truncation order N")
    ap.add_argument("--z", type=float, default=1.0, help="evaluation point for poly")
    ap.add_argument("--nu", type=float, default=0.0, help="Bessel order for bessel-oracle")
    ap.add_argument("--x", type=float, default=1.0, help="Bessel argument for bessel-oracle")
    ap.add_argument("--format", choices=("json", "csv", "text"), default="json")
    ap.add_argument("--output", help="write the report here instead of stdout")
    return ap


@contextlib.contextmanager
def _truncation_cap(cap):
    if cap is None:
        yield
        return
    old = os.environ.get(jacobi.MAX_TRUNC_ENV)
    os.environ[jacobi.MAX_TRUNC_ENV] = str(cap)
    try:
        yield
    finally:
        if old is None:
            del os.environ[jacobi.MAX_TRUNC_ENV]
        else:
            os.environ[jacobi.MAX_TRUNC_ENV] = old


def dispatch(args) -> tuple:
    """Run one parsed command; returns (exit status, report text or error message)."""
    if not (args.tol > 0 and math.isfinite(args.tol)):
        return EXIT_DOMAIN, "error: --tol must be positive and finite"
    if args.truncation_cap is not None and args.truncation_cap < 2:
        return EXIT_DOMAIN, "error: --truncation-cap must be >= 2"
    try:
        with _truncation_cap(args.truncation_cap):
            report = HANDLERS[args.command](args)
    except (ParameterDomainError, InvalidInputError, PoleProximityError) as exc:
        return EXIT_DOMAIN, f"error: {exc}"
    except ConvergenceError as exc:
        return EXIT_CONVERGENCE, f"error: {exc} (best bound {exc.best_bound:.3g})"
    fmt = {"json": to_json, "csv": to_csv, "text": to_text}[args.format]
    return EXIT_OK, fmt(report)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.command not in COMMANDS:
        parser.print_usage(sys.stderr)
        print(f"coulomb-opoly: unknown command {args.command!r}", file=sys.stderr)
        return EXIT_USAGE
    status, text = dispatch(args)
    if status != EXIT_OK:
        print(text, file=sys.stderr)
        return status
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
