"""Command-line front end.

Every subcommand prints exactly one JSON document (or ``key: value`` lines with
``--output plain``). Exit status: 0 success, 1 computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
from collections import Counter

from . import __version__
from .atlas import compute_atlas, default_workers, export_atlas
from .errors import ExprSyntaxError, IlluminationError
from .expr import parse
from .mean import taylor_mean
from .solver import IlluminationQuery, SolverConfig, check_hypotheses, find_tangencies
from .taylor import remainder_check

_DEFAULTS = SolverConfig()


def dumps(obj) -> str:
    """JSON with floats written to 17 significant digits; non-finite floats become null."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        text = format(obj, ".17g")
        if not any(ch in text for ch in ".en"):
            text += ".0"
        return text
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _plain(obj, prefix="") -> list[str]:
    lines = []
    for key, value in obj.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            lines.extend(_plain(value, name + "."))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            for i, item in enumerate(value):
                lines.extend(_plain(item, f"{name}[{i}]."))
        else:
            lines.append(f"{name}: {dumps(value)}")
    return lines


# -- report builders -----------------------------------------------------------


def classification_fields(cls) -> dict:
    if cls.is_finite:
        return {
            "classification": "Finite",
            "index": cls.k,
            "half_width": None,
            "suspected_unbounded": False,
        }
    return {
        "classification": "WindowLimited",
        "index": cls.count,
        "half_width": float(cls.half_width),
        "suspected_unbounded": bool(cls.suspected_unbounded),
    }


def report_to_dict(report) -> dict:
    out = classification_fields(report.classification)
    out["distinct_tangent_count"] = report.distinct_tangent_count
    out["window"] = [float(report.window[0]), float(report.window[1])]
    out["solutions"] = [
        {
            "c": sol.c,
            "residual": sol.residual,
            "canonical_coeffs": list(sol.poly.canonical_coeffs),
            "dedup_group": sol.dedup_group,
        }
        for sol in report.solutions
    ]
    out["history"] = [[float(w), int(n)] for w, n in report.history]
    return out


def index_to_dict(report) -> dict:
    out = classification_fields(report.classification)
    out["window"] = [float(report.window[0]), float(report.window[1])]
    return out


# -- argument parsing ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _odd(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"r must be an odd positive integer, got {text!r}")
    if value < 1 or value % 2 == 0:
        raise argparse.ArgumentTypeError(f"r must be odd and positive, got {value}")
    return value


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return value


def _positive(text: str) -> float:
    value = _finite(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _count(minimum):
    def convert(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be at least {minimum}: {value}")
        return value

    return convert


def _expr(text: str):
    try:
        return parse(text)
    except ExprSyntaxError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _add_common(p, with_order=True):
    p.add_argument("-f", "--function", dest="f", type=_expr, required=True, metavar="EXPR",
                   help='function of x, e.g. "exp(x)+x^4"')
    if with_order:
        p.add_argument("-r", "--order", dest="r", type=_odd, required=True, metavar="ODD",
                       help="odd Taylor order (1 = tangent lines)")
    p.add_argument("--output", choices=("json", "plain"), default="json")


def _add_solver(p):
    g = p.add_argument_group("solver settings")
    g.add_argument("--w0", type=_positive, default=None,
                   help="initial half-width of the search window (default max(1, 2|s|))")
    g.add_argument("--wmax", type=_positive, default=None,
                   help="largest half-width tried (default 2^20 * w0)")
    g.add_argument("--scan", type=_count(16), default=_DEFAULTS.scan_points,
                   help="grid points per window (default %(default)s)")
    g.add_argument("--tol", type=_positive, default=_DEFAULTS.root_abs_tol,
                   help="root tolerance (default %(default)s)")
    g.add_argument("--dedup", type=_positive, default=_DEFAULTS.dedup_tol,
                   help="relative tolerance for identifying equal polynomials (default %(default)s)")
    g.add_argument("--cap", type=_count(1), default=_DEFAULTS.index_cap,
                   help="stop after this many tangencies (default %(default)s)")
    g.add_argument("--on-graph-eps", type=_positive, default=_DEFAULTS.on_graph_eps,
                   help="points closer than this to the graph are rejected (default %(default)s)")


def _config(args) -> SolverConfig:
    return SolverConfig(
        initial_half_width=args.w0,
        max_half_width=args.wmax,
        scan_points=args.scan,
        root_abs_tol=args.tol,
        dedup_tol=args.dedup,
        index_cap=args.cap,
        on_graph_eps=args.on_graph_eps,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="illumination",
        description="Count odd-order Taylor polynomials of f through a point, and related tools.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, text in (("index", "illumination index of (s, t)"),
                       ("tangents", "full report of tangency centers through (s, t)")):
        p = sub.add_parser(name, help=text, description=text)
        _add_common(p)
        p.add_argument("-s", type=_finite, required=True, help="abscissa of the point")
        p.add_argument("-t", type=_finite, required=True, help="ordinate of the point")
        _add_solver(p)

    p = sub.add_parser("mean", help="Taylor mean m(a, b)")
    _add_common(p)
    p.add_argument("-a", type=_finite, required=True)
    p.add_argument("-b", type=_finite, required=True)

    p = sub.add_parser("atlas", help="rasterise the index over a rectangle")
    _add_common(p)
    for flag in ("--xmin", "--xmax", "--ymin", "--ymax"):
        p.add_argument(flag, type=_finite, required=True)
    p.add_argument("--nx", type=_count(2), required=True)
    p.add_argument("--ny", type=_count(2), required=True)
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--format", choices=("csv", "pgm"), default="csv")
    p.add_argument("--workers", type=_count(1), default=None,
                   help="worker processes (default: up to 8 CPUs)")
    _add_solver(p)

    p = sub.add_parser("check", help="diagnose the hypotheses on f^(r+1)")
    _add_common(p)
    p.add_argument("--width", type=_positive, default=10.0, help="half-width W (default %(default)s)")
    p.add_argument("--samples", type=_count(64), default=1024, help="(default %(default)s)")

    p = sub.add_parser("remainder", help="compare f - P_c with the integral remainder")
    _add_common(p)
    p.add_argument("-c", type=_finite, required=True, help="expansion center")
    p.add_argument("-x", type=_finite, required=True, help="evaluation point")
    p.add_argument("--tol", type=_positive, default=1e-10, help="quadrature tolerance (default %(default)s)")
    return parser


# -- commands ------------------------------------------------------------------------


def _run_command(args) -> dict:
    cmd = args.command
    if cmd in ("index", "tangents"):
        report = find_tangencies(IlluminationQuery(args.f, args.r, args.s, args.t, _config(args)))
        return index_to_dict(report) if cmd == "index" else report_to_dict(report)
    if cmd == "mean":
        res = taylor_mean(args.f, args.r, args.a, args.b)
        return {"value": res.value, "a": res.a, "b": res.b,
                "bracket_width": res.bracket_width, "iterations": res.iterations}
    if cmd == "atlas":
        atlas = compute_atlas(
            args.f, args.r, (args.xmin, args.xmax, args.ymin, args.ymax), args.nx, args.ny,
            _config(args), workers=args.workers or default_workers(),
        )
        export_atlas(atlas, args.format, args.out)
        hist = Counter(int(v) for v in atlas.cells.ravel())
        return {
            "path": args.out,
            "format": args.format,
            "bounds": [atlas.x_min, atlas.x_max, atlas.y_min, atlas.y_max],
            "nx": atlas.nx,
            "ny": atlas.ny,
            "cell_counts": {str(k): hist[k] for k in sorted(hist)},
        }
    if cmd == "check":
        rep = check_hypotheses(args.f, args.r, args.width, args.samples)
        return {"r": rep.r, "sampled_min_derivative": rep.sampled_min_derivative,
                "sign_changes": rep.sign_changes, "tail_lower_bound": rep.tail_lower_bound,
                "T_est": rep.T_est, "verdict": rep.verdict}
    if cmd == "remainder":
        rc = remainder_check(args.f, args.c, args.r, args.x, args.tol)
        return {"x": rc.x, "taylor_error": rc.taylor_error, "quadrature_value": rc.quadrature_value,
                "abs_gap": rc.abs_gap, "quad_nodes_used": rc.quad_nodes_used}
    raise AssertionError(cmd)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = _run_command(args)
    except (IlluminationError, ValueError, OSError) as exc:
        print(f"illumination {args.command}: error: {exc}", file=stderr)
        return 1
    if args.output == "plain":
        stdout.write("\n".join(_plain(result)) + "\n")
    else:
        stdout.write(dumps(result) + "\n")
    return 0


def main():
    sys.exit(run())
