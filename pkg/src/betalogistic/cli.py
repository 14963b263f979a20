"""Command-line front end.

    betalogistic <subcommand> [options]

Exit status: 0 success, 1 invalid input or domain error, 2 numerical
non-convergence, 3 failed check (verify, bernoulli-check, euler-check).
Floats are written with 17 significant digits so output round-trips.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import distribution, geodesics, geometry, inference, verify
from .errors import ConvergenceError, DomainError
from .quadrature import QuadratureSpec

EXIT_OK, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_CHECK = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; 2 is reserved for non-convergence here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# serialization -----------------------------------------------------------------


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def to_json(obj) -> str:
    """JSON with every float at 17 significant digits; non-finite become null."""

    def enc(o):
        if isinstance(o, dict):
            return "{" + ", ".join(f"{json.dumps(str(k))}: {enc(v)}" for k, v in o.items()) + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            return "[" + ", ".join(enc(v) for v in o) + "]"
        if o is None:
            return "null"
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return format(float(o), ".17g") if math.isfinite(o) else "null"
        return json.dumps(str(o))

    return enc(obj)


def to_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in r])
    return buf.getvalue()


def _table(header, rows, fmt_name: str) -> str:
    if fmt_name == "json":
        return to_json([dict(zip(header, r)) for r in rows]) + "\n"
    return to_csv(header, rows)


def _record(d: dict, fmt_name: str) -> str:
    if fmt_name == "csv":
        return to_csv(list(d), [list(d.values())])
    return to_json(d) + "\n"


# argument helpers ----------------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _pair(text: str) -> tuple[float, float]:
    v = _floats(text)
    if len(v) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return v[0], v[1]


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _add_theta(p, required=True):
    p.add_argument("--theta1", type=float, required=required)
    p.add_argument("--theta2", type=float, required=required)


def _add_tols(p):
    p.add_argument("--t-end", type=_positive, default=geodesics.DEFAULT_T_END)
    p.add_argument("--rel-tol", type=_positive, default=geodesics.DEFAULT_REL_TOL)
    p.add_argument("--abs-tol", type=_positive, default=geodesics.DEFAULT_ABS_TOL)


def _point(args):
    return distribution.ThetaPoint(args.theta1, args.theta2)


def read_observations(path: str, column: int | None) -> np.ndarray:
    """One value per line, or column ``column`` (0-based) of a CSV file.

    Blank lines and lines starting with '#' are skipped; a non-numeric first
    CSV row is treated as a header.
    """
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    values = []
    if column is None:
        for i, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise DomainError(f"line {i}: not a number: {line!r}")
    else:
        for i, row in enumerate(csv.reader(io.StringIO(text)), 1):
            if not row or row[0].startswith("#"):
                continue
            if column >= len(row):
                raise DomainError(f"row {i}: no column {column}")
            try:
                values.append(float(row[column]))
            except ValueError:
                if values or i > 1:
                    raise DomainError(f"row {i}: not a number: {row[column]!r}")
    return np.array(values)


# subcommands ---------------------------------------------------------------------


def cmd_pdf(args) -> tuple[int, str]:
    p = _point(args)
    if args.x is not None:
        xs = np.array(args.x)
    else:
        lo, hi, n = args.grid
        if not (hi > lo and n >= 2 and int(n) == n):
            raise DomainError("--grid needs lo < hi and an integer count >= 2")
        xs = np.linspace(lo, hi, int(n))
    lp = np.atleast_1d(distribution.log_pdf(p, xs))
    return EXIT_OK, _table(["x", "pdf", "log_pdf"], zip(xs, np.exp(lp), lp), args.format)


def cmd_sample(args) -> tuple[int, str]:
    x = distribution.sample(_point(args), args.n, args.seed)
    if args.format == "json":
        return EXIT_OK, to_json(list(x)) + "\n"
    return EXIT_OK, "".join(fmt(v) + "\n" for v in x)


def cmd_moments(args) -> tuple[int, str]:
    p = _point(args)
    q = QuadratureSpec(scheme=args.scheme)
    rows = []
    for k in range(args.max_order + 1):
        r = distribution.moment_result(p, k, q)
        rows.append((k, r.value_real, r.value_imag, r.est_error))
    return EXIT_OK, _table(["k", "value_real", "value_imag", "est_error"], rows, args.format)


def _poly_check(args, via, exact) -> tuple[int, str]:
    rows, ok = [], True
    for n in range(args.max_degree + 1):
        for x in args.x:
            r = via(n, x)
            e = float(exact(n, x))
            err = abs(r.value_real - e)
            good = err <= 1e-8 and abs(r.value_imag) <= 1e-10
            ok &= good
            rows.append((n, x, r.value_real, r.value_imag, e, err, good))
    out = _table(["n", "x", "moment_real", "moment_imag", "exact", "abs_error", "pass"], rows, args.format)
    return (EXIT_OK if ok else EXIT_CHECK), out


def cmd_bernoulli(args):
    return _poly_check(args, distribution.bernoulli_poly_via_moments, distribution.bernoulli_polynomial)


def cmd_euler(args):
    return _poly_check(args, distribution.euler_poly_via_moments, distribution.euler_polynomial)


def cmd_metric(args) -> tuple[int, str]:
    fm = geometry.fisher(_point(args))
    d = {
        "theta1": args.theta1,
        "theta2": args.theta2,
        "g11": fm.g11,
        "g12": fm.g12,
        "g22": fm.g22,
        "det": fm.det,
        "inv11": fm.inv11,
        "inv12": fm.inv12,
        "inv22": fm.inv22,
        "cond": fm.cond,
        "ill_conditioned": fm.ill_conditioned,
    }
    return EXIT_OK, _record(d, args.format)


def cmd_connection(args) -> tuple[int, str]:
    c = geometry.connection(_point(args), args.alpha)
    rows = []
    for i in range(2):
        for j in range(2):
            for k in range(2):
                rows.append((i + 1, j + 1, k + 1, c.lower[i, j, k], c.raised[i, j, k]))
    if args.format == "json":
        return EXIT_OK, to_json({"alpha": c.alpha, "lower": c.lower.tolist(), "raised": c.raised.tolist()}) + "\n"
    return EXIT_OK, to_csv(["i", "j", "k", "gamma_ijk", "gamma_ij^k"], rows)


def cmd_curvature(args) -> tuple[int, str]:
    return EXIT_OK, _record(geometry.curvature(_point(args), args.alpha).as_dict(), args.format)


PATH_HEADER = ["t", "theta1", "theta2", "dtheta1", "dtheta2", "speed"]


def _path_rows(path):
    sp = path.speeds()
    for t, th, v, s in zip(path.t, path.theta, path.velocity, sp):
        yield (t, th[0], th[1], v[0], v[1], s)


def _velocity(args, origin):
    if args.velocity is not None:
        return np.array(args.velocity)
    return geodesics.unit_velocity(origin, args.angle)


def cmd_geodesic(args) -> tuple[int, str]:
    origin = _point(args)
    v = _velocity(args, origin)
    path = geodesics.integrate_geodesic(
        geodesics.GeodesicState(0.0, origin, (float(v[0]), float(v[1]))), args.t_end, args.rel_tol, args.abs_tol
    )
    if args.format == "json":
        d = {"termination": path.termination.value, "states": [dict(zip(PATH_HEADER, r)) for r in _path_rows(path)]}
        return EXIT_OK, to_json(d) + "\n"
    print(f"termination: {path.termination.value}", file=sys.stderr)
    return EXIT_OK, to_csv(PATH_HEADER, _path_rows(path))


def cmd_bundle(args) -> tuple[int, str]:
    paths = geodesics.geodesic_bundle(args.origin, args.count, args.t_end, args.rel_tol, args.abs_tol)
    if args.format == "json":
        d = [
            {"path": i, "termination": p.termination.value, "states": [dict(zip(PATH_HEADER, r)) for r in _path_rows(p)]}
            for i, p in enumerate(paths)
        ]
        return EXIT_OK, to_json(d) + "\n"
    rows = []
    for i, p in enumerate(paths):
        rows.extend((i, *r, p.termination.value) for r in _path_rows(p))
    return EXIT_OK, to_csv(["path", *PATH_HEADER, "termination"], rows)


def cmd_spread(args) -> tuple[int, str]:
    r = geodesics.spread_diagnostic(
        args.origin, args.base_direction, args.perturbation, args.t_end, args.rel_tol, args.abs_tol, args.samples
    )
    if args.format == "json":
        d = {
            "initial_rate": r.initial_rate,
            "terminations": [t.value for t in r.terminations],
            "times": list(r.times),
            "separations": list(r.separations),
        }
        return EXIT_OK, to_json(d) + "\n"
    return EXIT_OK, to_csv(["t", "separation"], zip(r.times, r.separations))


def cmd_prior(args) -> tuple[int, str]:
    p = _point(args)
    d = {
        "theta1": p.theta1,
        "theta2": p.theta2,
        "alpha": args.alpha,
        "log_prior": inference.alpha_prior_log(p, args.alpha),
        "det_g": geometry.fisher(p).det,
    }
    return EXIT_OK, _record(d, args.format)


def cmd_fit(args) -> tuple[int, str]:
    xs = read_observations(args.input, args.csv_column)
    s = inference.suff_stats(xs)
    init = None if args.init is None else distribution.ThetaPoint(*args.init)
    cfg = inference.SolverConfig(args.grad_tol, args.max_iter, init, args.backtrack_ratio)
    est = inference.map_estimate(s, args.alpha, cfg)
    d = {"n": s.n, **est.as_dict()}
    return (EXIT_OK if est.converged else EXIT_CONVERGENCE), _record(d, args.format)


def cmd_verify(args) -> tuple[int, str]:
    results = verify.run(verify.all_rows(include_slow=not args.quick))
    ok = all(r.passed for r in results)
    text = verify.format_text(results)
    payload = to_json({"passed": ok, "rows": [r.as_dict() for r in results]})
    if args.format == "json":
        out = payload + "\n"
    else:
        out = text + "\n" + payload + "\n"
    return (EXIT_OK if ok else EXIT_CHECK), out


# parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="betalogistic", description="Beta-logistic information geometry toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, default_format, help_text, formats=("csv", "json")):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--format", choices=formats, default=default_format)
        p.add_argument("--output", "-o", default="-", help="output file (default: stdout)")
        return p

    p = add("pdf", cmd_pdf, "csv", "density on points or a grid")
    _add_theta(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--x", type=_floats)
    g.add_argument("--grid", type=_floats, metavar="LO,HI,N")

    p = add("sample", cmd_sample, "csv", "draw i.i.d. samples")
    _add_theta(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, required=True)

    p = add("moments", cmd_moments, "csv", "raw moments E[X^k] by quadrature")
    _add_theta(p)
    p.add_argument("--max-order", type=int, default=4)
    p.add_argument("--scheme", choices=("tanh-sinh", "gauss-kronrod"), default="tanh-sinh")

    for name, func in (("bernoulli-check", cmd_bernoulli), ("euler-check", cmd_euler)):
        p = add(name, func, "csv", "polynomial values as complex moments vs exact recurrence")
        p.add_argument("--max-degree", type=int, default=12)
        p.add_argument("--x", type=_floats, default=[0.0, 0.25, 0.5, 1.0])

    p = add("metric", cmd_metric, "json", "Fisher matrix")
    _add_theta(p)

    p = add("connection", cmd_connection, "json", "alpha-connection coefficients")
    _add_theta(p)
    p.add_argument("--alpha", type=float, required=True)

    p = add("curvature", cmd_curvature, "json", "alpha-curvature report")
    _add_theta(p)
    p.add_argument("--alpha", type=float, required=True)

    p = add("geodesic", cmd_geodesic, "csv", "one geodesic path")
    _add_theta(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--velocity", type=_pair, metavar="V1,V2")
    g.add_argument("--angle", type=float, help="unit-speed direction in the orthonormal frame")
    _add_tols(p)

    p = add("bundle", cmd_bundle, "csv", "unit-speed geodesics in evenly spaced directions")
    p.add_argument("--origin", type=_pair, default=(1.0, 0.0), metavar="T1,T2")
    p.add_argument("--count", type=_positive_int, default=geodesics.DEFAULT_DIRECTIONS)
    _add_tols(p)

    p = add("spread", cmd_spread, "csv", "separation of two nearby geodesics")
    p.add_argument("--origin", type=_pair, default=(1.0, 0.0), metavar="T1,T2")
    p.add_argument("--base-direction", type=float, default=0.0)
    p.add_argument("--perturbation", type=float, default=1e-4)
    p.add_argument("--samples", type=_positive_int, default=51)
    _add_tols(p)

    p = add("prior", cmd_prior, "json", "log alpha-parallel prior")
    _add_theta(p)
    p.add_argument("--alpha", type=float, required=True)

    p = add("fit", cmd_fit, "json", "MAP estimate from observations")
    p.add_argument("--input", "-i", default="-", help="observation file ('-' for stdin)")
    p.add_argument("--csv-column", type=int, default=None, help="0-based CSV column")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--grad-tol", type=_positive, default=1e-8)
    p.add_argument("--max-iter", type=_positive_int, default=100)
    p.add_argument("--backtrack-ratio", type=float, default=0.5)
    p.add_argument("--init", type=_pair, default=None, metavar="T1,T2")

    p = add("verify", cmd_verify, "text", "run the reference-value table", formats=("text", "json"))
    p.add_argument("--quick", action="store_true", help="skip the sampling, geodesic and MAP rows")
    return parser


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    """Parse and dispatch; returns (exit status, output text). Errors go to stderr."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "csv_column", None) is not None and args.csv_column < 0:
            raise DomainError("--csv-column must be >= 0")
        status, out = args.func(args)
    except UsageError as e:
        print(f"betalogistic: error: {e}", file=sys.stderr)
        return EXIT_DOMAIN, ""
    except (DomainError, ValueError, OSError) as e:
        print(f"betalogistic: error: {e}", file=sys.stderr)
        return EXIT_DOMAIN, ""
    except ConvergenceError as e:
        print(f"betalogistic: did not converge: {e}", file=sys.stderr)
        return EXIT_CONVERGENCE, ""
    if args.output == "-":
        sys.stdout.write(out)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(out)
    return status, out


def main(argv: Sequence[str] | None = None) -> int:
    status, _ = run(argv)
    return status


if __name__ == "__main__":
    sys.exit(main())
