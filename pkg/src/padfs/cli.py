"""Command-line front end: parameter sweeps and figure data as CSV.

Subcommands: ``measures``, ``wigner``, ``inversion``, ``parametric``, ``decay``.
Exit codes: 0 success, 2 usage error, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

from . import __version__
from .loss import LossParams, evolve_loss, wln_decay_curve
from .measures import find_inversion, measure_report
from .special_numerics import QuadratureSpec
from .states import DEFAULT_TAIL_TOL, PadfsParams, padfs_coefficients, to_density_matrix
from .wigner import fmt, wigner_grid

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
MEASURE_ORDER = ("LE", "N", "WLN", "delta")


class UsageError(Exception):
    pass


@dataclass
class SweepConfig:
    alphas: List[float]
    n_list: List[int]
    k_list: List[int]
    measures: Sequence[str] = MEASURE_ORDER
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    output_path: str = "-"

    def __post_init__(self):
        if not self.n_list or not self.k_list:
            raise UsageError("n and k lists must be nonempty")
        if any(n < 0 for n in self.n_list) or any(k < 0 for k in self.k_list):
            raise UsageError("n and k must be nonnegative")
        if not self.measures:
            raise UsageError("no measures requested")

    def points(self):
        return [(a, n, k) for a in self.alphas for n in self.n_list for k in self.k_list]


def alpha_grid(start: float, stop: float, step: float) -> List[float]:
    """Inclusive, rounding-stable real grid ``start, start+step, ..., <= stop``."""
    if not step > 0:
        raise UsageError(f"alpha step must be > 0, got {step}")
    if stop < start:
        raise UsageError(f"alpha stop {stop} < start {start}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def read_config(path: str) -> dict:
    """``key=value`` lines; ``#`` comments and blank lines ignored."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value")
                key, value = (s.strip() for s in line.split("=", 1))
                out[key.replace("-", "_")] = value
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    return out


@contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc
    with fh:
        yield fh


def _header(args, command: str) -> List[str]:
    skip = {"func", "config", "out", "jobs"}
    items = [f"{k}={_show(v)}" for k, v in sorted(vars(args).items()) if k not in skip]
    return [f"padfs {__version__} {command}", "config: " + " ".join(items)]


def _show(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(_show(x) for x in v)
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def _write_rows(args, command: str, columns: Sequence[str], rows, extra_comments=()) -> None:
    with _open_out(args.out) as fh:
        for line in _header(args, command) + list(extra_comments):
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(c if isinstance(c, str) else fmt(c) for c in row) + "\n")


def _quad_spec(args) -> QuadratureSpec:
    return QuadratureSpec(
        radius=args.quad_radius,
        rel_tolerance=args.quad_tol,
        refinement_levels=args.quad_levels,
    )


def _map(func: Callable, items: list, jobs: int) -> list:
    # ordered results regardless of completion order
    if jobs <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def _alphas(args) -> List[float]:
    if args.alphas is not None:
        return [float(a) for a in args.alphas]
    return alpha_grid(*args.alpha)


class _MeasurePoint:
    def __init__(self, spec, measures, tail_tol):
        self.spec, self.measures, self.tail_tol = spec, measures, tail_tol

    def __call__(self, point):
        alpha, n, k = point
        return measure_report(PadfsParams(alpha, n, k, self.tail_tol), self.spec, self.measures)


def _measure_columns(report, measures) -> list:
    cols = []
    for m in MEASURE_ORDER:
        if m not in measures:
            continue
        if m == "LE":
            cols.append(report.linear_entropy)
        elif m == "N":
            cols.append(report.skew_info)
        elif m == "WLN":
            cols += [report.wln, report.quadrature_error]
        else:
            cols.append(report.rel_entropy_ng)
    return cols


def _measure_names(measures) -> list:
    names = []
    for m in MEASURE_ORDER:
        if m in measures:
            names += ["WLN", "WLN_err"] if m == "WLN" else [m]
    return names


def cmd_measures(args) -> int:
    cfg = SweepConfig(
        alphas=_alphas(args),
        n_list=args.n,
        k_list=args.k,
        measures=[m for m in MEASURE_ORDER if m in args.measures],
        quadrature=_quad_spec(args),
        output_path=args.out,
    )
    measures, points = cfg.measures, cfg.points()
    reports = _map(_MeasurePoint(cfg.quadrature, measures, args.tail_tol), points, args.jobs)
    rows = [[a, str(n), str(k)] + _measure_columns(r, measures) for (a, n, k), r in zip(points, reports)]
    _write_rows(args, "measures", ["alpha", "n", "k"] + _measure_names(measures), rows)
    return EXIT_OK if all(r.converged for r in reports) else EXIT_NUMERIC


def cmd_wigner(args) -> int:
    params = PadfsParams(args.alpha_value, args.n_value, args.k_value, args.tail_tol)
    x0, x1, y0, y1 = args.window
    window = ((x0, x1), (y0, y1))
    extra = []
    if args.kappa_t is None:
        grid = wigner_grid(params, window, args.resolution)
    else:
        rho = evolve_loss(to_density_matrix(padfs_coefficients(params)), LossParams(args.kappa_t))
        grid = wigner_grid(rho, window, args.resolution)
        extra = [f"kappa_t={fmt(args.kappa_t)}"]
    with _open_out(args.out) as fh:
        grid.write_csv(fh, _header(args, "wigner") + extra)
    return EXIT_OK


def cmd_inversion(args) -> int:
    k1, k2 = args.k_pair
    lo, hi = args.bracket
    try:
        root = find_inversion(args.measure, args.n_value, k1, k2, (lo, hi), tail_tolerance=args.tail_tol, tol=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(fmt(root), file=sys.stdout if args.out == "-" else sys.stderr)
    if args.out != "-":
        _write_rows(args, "inversion", ["measure", "n", "k1", "k2", "alpha_inversion"],
                    [[args.measure, str(args.n_value), str(k1), str(k2), root]])
    return EXIT_OK


def _parse_family(text: str):
    """``padfs:n=1,k=1`` / ``pacs:k=1`` / ``dfs:n=2`` / ``coherent`` -> (label, n, k)."""
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    kv = {}
    for part in filter(None, rest.split(",")):
        key, _, val = part.partition("=")
        kv[key.strip()] = int(val)
    n, k = kv.get("n", 0), kv.get("k", 0)
    if name == "pacs":
        n = 0
    elif name == "dfs":
        k = 0
    elif name == "coherent":
        n = k = 0
    elif name != "padfs":
        raise UsageError(f"unknown state family {text!r}")
    return f"{name}(n={n};k={k})", n, k


def cmd_parametric(args) -> int:
    families = [_parse_family(f) for f in args.family]
    alphas = _alphas(args)
    points, labels = [], []
    for label, n, k in families:
        for a in alphas:
            points.append((a, n, k))
            labels.append(label)
    if alphas:
        for m in args.fock_refs:
            points.append((0.0, m, 0))
            labels.append(f"fock({m})")
    reports = _map(_MeasurePoint(_quad_spec(args), MEASURE_ORDER, args.tail_tol), points, args.jobs)
    rows = [
        [lab, a, r.wln, r.linear_entropy, r.skew_info, r.rel_entropy_ng]
        for lab, (a, _, _), r in zip(labels, points, reports)
    ]
    _write_rows(args, "parametric", ["family", "alpha", "WLN", "LE", "N", "delta"], rows)
    return EXIT_OK if all(r.converged for r in reports) else EXIT_NUMERIC


class _DecayCurve:
    def __init__(self, spec, kts, tail_tol):
        self.spec, self.kts, self.tail_tol = spec, kts, tail_tol

    def __call__(self, state):
        alpha, n, k = state
        return wln_decay_curve(PadfsParams(alpha, n, k, self.tail_tol), self.kts, self.spec)


def cmd_decay(args) -> int:
    kts = [float(x) for x in args.kt_values] if args.kt_values is not None else alpha_grid(*args.kt)
    states = [(args.alpha_value, n, k) for n in args.n for k in args.k]
    curves = _map(_DecayCurve(_quad_spec(args), kts, args.tail_tol), states, args.jobs)
    rows, ok = [], True
    for (a, n, k), curve in zip(states, curves):
        for kt, w in curve:
            rows.append([a, str(n), str(k), kt, w.value, w.error])
            ok &= w.converged
    _write_rows(args, "decay", ["alpha", "n", "k", "kappa_t", "WLN", "WLN_err"], rows)
    return EXIT_OK if ok else EXIT_NUMERIC


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="-", help="output CSV path ('-' for stdout; default: %(default)s)")
    p.add_argument("--quad-radius", type=float, default=None, help="phase-space cutoff radius (default: state-dependent rule)")
    p.add_argument("--quad-tol", type=float, default=QuadratureSpec.rel_tolerance, help="relative quadrature tolerance (default: %(default)s)")
    p.add_argument("--quad-levels", type=int, default=QuadratureSpec.refinement_levels, help="grid doublings (default: %(default)s)")
    p.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL, help="Fock truncation tail tolerance (default: %(default)s)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default: %(default)s)")
    p.add_argument("--config", default=None, help="key=value file; command-line flags take precedence")


def _alpha_opts(p: argparse.ArgumentParser, default=(0.0, 2.0, 0.05)) -> None:
    p.add_argument("--alpha", nargs=3, type=float, default=list(default), metavar=("START", "STOP", "STEP"),
                   help="real alpha range, inclusive (default: %(default)s)")
    p.add_argument("--alphas", nargs="*", type=float, default=None, help="explicit alpha values (overrides --alpha)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padfs", description="Photon-added displaced Fock state measures.")
    parser.add_argument("--version", action="version", version=f"padfs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measures", help="sweep the four measures over (alpha, n, k)")
    _alpha_opts(p)
    p.add_argument("--n", nargs="+", type=int, default=[1])
    p.add_argument("--k", nargs="+", type=int, default=[1])
    p.add_argument("--measures", nargs="+", choices=MEASURE_ORDER, default=list(MEASURE_ORDER))
    _common(p)
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("wigner", help="Wigner function on a grid, optionally after photon loss")
    p.add_argument("--alpha", dest="alpha_value", type=float, default=0.5)
    p.add_argument("--n", dest="n_value", type=int, default=1)
    p.add_argument("--k", dest="k_value", type=int, default=1)
    p.add_argument("--window", nargs=4, type=float, default=[-3.0, 3.0, -3.0, 3.0], metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    p.add_argument("--resolution", type=int, default=121)
    p.add_argument("--kappa-t", type=float, default=None)
    _common(p)
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("inversion", help="alpha where two photon-addition curves cross")
    p.add_argument("--n", dest="n_value", type=int, default=1)
    p.add_argument("--k-pair", nargs=2, type=int, default=[1, 2], metavar=("K1", "K2"))
    p.add_argument("--bracket", nargs=2, type=float, default=[0.2, 0.8], metavar=("LO", "HI"))
    p.add_argument("--measure", choices=("LE", "N", "delta"), default="LE")
    p.add_argument("--tol", type=float, default=1e-3)
    _common(p)
    p.set_defaults(func=cmd_inversion)

    p = sub.add_parser("parametric", help="all measures against WLN for several state families")
    _alpha_opts(p)
    p.add_argument("--family", nargs="+", default=["padfs:n=1,k=1", "pacs:k=1"])
    p.add_argument("--fock-refs", nargs="*", type=int, default=[1, 2])
    _common(p)
    p.set_defaults(func=cmd_parametric)

    p = sub.add_parser("decay", help="WLN against rescaled loss time kappa*t")
    p.add_argument("--alpha", dest="alpha_value", type=float, default=0.5)
    p.add_argument("--n", nargs="+", type=int, default=[1])
    p.add_argument("--k", nargs="+", type=int, default=[1])
    p.add_argument("--kt", nargs=3, type=float, default=[0.0, 0.5, 0.025], metavar=("START", "STOP", "STEP"))
    p.add_argument("--kt-values", nargs="*", type=float, default=None)
    _common(p)
    p.set_defaults(func=cmd_decay)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    values = read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in values.items():
        action = known.get(key)
        if action is None:
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        parts = raw.split()
        conv = action.type or str
        if action.nargs in ("+", "*") or isinstance(action.nargs, int):
            defaults[key] = [conv(x) for x in parts]
        else:
            defaults[key] = conv(raw)
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        if args.tail_tol is not None and not 0 < args.tail_tol <= 1e-6:
            raise UsageError("--tail-tol must be in (0, 1e-6]")
        code = args.func(args)
    except UsageError as exc:
        print(f"padfs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    except ValueError as exc:
        print(f"padfs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if code == EXIT_NUMERIC:
        print("padfs: warning: quadrature did not reach the requested tolerance", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
