"""Command-line interface: ``quasispec <subcommand> [flags]``.

Exit codes: 0 success, 1 error (bad input, failed precondition, violated
inequality), 2 mathematically infeasible (empty alpha window).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import bounds as B
from . import pipeline
from .capacity import (
    DEFAULT_TOL,
    CapacityError,
    CondenserProblem,
    TensorGrid,
    annulus_capacity,
    rasterize_path,
    solve_capacity,
    teichmuller_capacity,
)
from .conformal import ConformalMapSpec, q_alpha
from .geometry import (
    CurveError,
    MeshError,
    Rule,
    SnowflakeSpec,
    dump_curve,
    generate_snowflake,
    load_curve,
    polygon_area,
    triangulate,
)
from .metrics import estimate_bounded_turning, estimate_three_point, k_direct, k_star_shaped
from .report import FEASIBLE, INFEASIBLE, VIOLATED, BoundReport, write_report
from .spectral import EigenError, neumann_mu1
from .svg import export_svg

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2
THREADS_ENV = "QUASISPEC_THREADS"

THEOREMS = {
    "q": "dilatation", "dilatation": "dilatation",
    "a": "quasidisc", "quasidisc": "quasidisc",
    "t": "turning", "turning": "turning",
    "c": "snowflake", "snowflake": "snowflake",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# argument parsing

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write the result here instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="quasispec", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("snowflake", help="generate a snowflake polygon")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rule", choices=[r.value for r in Rule], default=Rule.ALL_TENT.value)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--curve-out", help="write the vertices as a curve file (.json or .csv)")
    p.add_argument("--svg")
    _common(p)

    p = sub.add_parser("ahlfors", help="estimate the bounded-turning constant of a curve")
    p.add_argument("curve")
    p.add_argument("--method", choices=["bt", "3pt"], default="bt")
    p.add_argument("--stride", type=int)
    _common(p)

    p = sub.add_parser("qalpha", help="hyperbolic alpha-dilatation of a catalog map")
    p.add_argument("--map", required=True, help="identity | scale:r | quadratic:c | koebe")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha", type=float)
    g.add_argument("--alpha-grid", help="comma-separated alpha values")
    p.add_argument("--shells", type=int, default=24)
    _common(p)

    p = sub.add_parser("capacity", help="condenser capacity on a tensor grid")
    p.add_argument("--preset", choices=["annulus", "teichmuller", "custom"], required=True)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--R", type=float, default=2.0)
    p.add_argument("--t", type=float, default=2.0)
    p.add_argument("--plate0", help="custom: JSON array of [x, y] path points")
    p.add_argument("--plate1", help="custom: JSON array of [x, y] path points")
    p.add_argument("--box", type=float, default=4.0, help="custom: half-width of the grid box")
    p.add_argument("--spacing", type=float, default=1 / 128)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _common(p)

    p = sub.add_parser("eig", help="first nonzero Neumann eigenvalue by P1 FEM")
    p.add_argument("--curve", required=True)
    p.add_argument("--h", type=float, default=0.03)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--svg")
    p.add_argument("--svg-mode", choices=["mesh", "sign"], default="sign")
    _common(p)

    p = sub.add_parser("bound", help="evaluate one eigenvalue bound")
    p.add_argument("--theorem", required=True, choices=sorted(THEOREMS),
                   help="q = dilatation, a = quasidisc, t = turning, c = snowflake")
    p.add_argument("--k", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--map", help="dilatation bound: catalog map")
    p.add_argument("--area", type=float)
    p.add_argument("--shells", type=int, default=24)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--alpha", type=float)
    g.add_argument("--optimize", action="store_true", help="minimise over alpha (default)")
    _common(p)

    p = sub.add_parser("verify", help="curve -> constants -> bounds -> FEM -> verdicts")
    p.add_argument("--preset", choices=["star", "square", "snowflake"], required=True)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--c", type=float, default=0.25, help="star: quadratic map coefficient")
    p.add_argument("--boundary", type=int, default=pipeline.STAR_BOUNDARY)
    p.add_argument("--p", type=float, default=0.3)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--rule", choices=[r.value for r in Rule], default=Rule.ALL_TENT.value)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h", type=float, default=0.03)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--alpha", type=float)
    _common(p)
    return ap


# ---------------------------------------------------------------------------
# helpers

def _config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items())}
    cfg["threads"] = os.environ.get(THREADS_ENV)
    return cfg


def _check_paths(args: argparse.Namespace) -> None:
    for name in ("curve", "plate0", "plate1"):
        path = getattr(args, name, None)
        if path is not None and not os.access(path, os.R_OK):
            raise UsageError(f"cannot read {name} file {path!r}")
    for name in ("out", "svg", "curve_out"):
        path = getattr(args, name, None)
        if path is not None:
            parent = Path(path).resolve().parent
            if not parent.is_dir():
                raise UsageError(f"directory for --{name.replace('_', '-')} does not exist: {parent}")


def _emit(obj, args) -> None:
    data = write_report(obj, args.format)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()


def _load_path(path: str) -> np.ndarray:
    pts = np.asarray(json.loads(Path(path).read_text(encoding="utf-8")), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 1:
        raise UsageError(f"{path}: expected a JSON array of [x, y] pairs")
    return pts


# ---------------------------------------------------------------------------
# subcommands

def cmd_snowflake(args) -> int:
    curve = generate_snowflake(SnowflakeSpec(args.p, args.n, Rule(args.rule), args.seed))
    if args.curve_out:
        fmt = "csv" if args.curve_out.lower().endswith(".csv") else "json"
        Path(args.curve_out).write_text(dump_curve(curve, fmt), encoding="utf-8")
    if args.svg:
        export_svg(curve, args.svg)
    out = {
        "config": _config(args),
        "vertex_count": len(curve),
        "area": polygon_area(curve),
        "ahlfors_bound": 16.0 / (1.0 - 2.0 * args.p),
    }
    if not args.curve_out:
        out["vertices"] = curve.vertices.tolist()
    _emit(out, args)
    return EXIT_OK


def cmd_ahlfors(args) -> int:
    curve = load_curve(args.curve)
    est = (estimate_three_point if args.method == "3pt" else estimate_bounded_turning)(curve, args.stride)
    out = est.to_json()
    out["config"] = _config(args)
    _emit(out, args)
    return EXIT_OK


def cmd_qalpha(args) -> int:
    spec = ConformalMapSpec.parse(args.map)
    if args.alpha is not None:
        alphas = [args.alpha]
    else:
        try:
            alphas = [float(x) for x in args.alpha_grid.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"bad --alpha-grid {args.alpha_grid!r}") from None
    results = [q_alpha(spec, a, args.shells).to_json() for a in alphas]
    out = {"config": _config(args), "results": results}
    _emit(out, args)
    return EXIT_OK


def cmd_capacity(args) -> int:
    if args.preset == "annulus":
        res = annulus_capacity(args.r, args.R, args.spacing, tol=args.tol)
    elif args.preset == "teichmuller":
        res = teichmuller_capacity(args.t, args.spacing, tol=args.tol)
    else:
        if not (args.plate0 and args.plate1):
            raise UsageError("custom capacity needs --plate0 and --plate1")
        g = TensorGrid.uniform(-args.box, args.box, -args.box, args.box, args.spacing)
        p0 = rasterize_path(g, _load_path(args.plate0))
        p1 = rasterize_path(g, _load_path(args.plate1))
        res = solve_capacity(CondenserProblem(g, p0, p1, label="custom"), args.tol)
    out = res.to_json()
    out["config"] = _config(args)
    _emit(out, args)
    return EXIT_OK


def cmd_eig(args) -> int:
    curve = load_curve(args.curve)
    mesh = triangulate(curve, args.h)
    res = neumann_mu1(mesh, tol=args.tol)
    if args.svg:
        export_svg(mesh, args.svg, res.vector if args.svg_mode == "sign" else None)
    out = res.to_json()
    out["triangles"] = int(len(mesh.triangles))
    out["config"] = _config(args)
    _emit(out, args)
    return EXIT_OK


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"--theorem {args.theorem} needs " + ", ".join("--" + m for m in missing))


def cmd_bound(args) -> int:
    kind = THEOREMS[args.theorem]
    k = None
    if kind == "dilatation":
        _need(args, "map")
        spec = ConformalMapSpec.parse(args.map)
        entry = pipeline.entry_dilatation(spec, args.alpha, shells=args.shells)
        domain = f"image of {spec.label}"
        area = q_alpha(spec, 2.0, args.shells).value if spec.bounded else None
    else:
        _need(args, "area")
        area = args.area
        if kind == "quasidisc":
            if args.k is not None:
                k = k_direct(args.k)
            elif args.beta is not None:
                k = k_star_shaped(args.beta)
            else:
                raise UsageError("--theorem a needs --k or --beta")
            entry = pipeline.entry_quasidisc(k, area, args.alpha)
            domain = f"K-quasidisc (K provenance {k.provenance.value})"
        elif kind == "turning":
            _need(args, "c")
            entry = pipeline.entry_turning(args.c, area, args.alpha)
            k = entry.k
            domain = f"curve with three-point constant C={args.c}"
        else:
            _need(args, "p")
            entry = pipeline.entry_snowflake(args.p, area, args.alpha)
            k = entry.k
            domain = f"snowflake(p={args.p})"
        if entry.status == INFEASIBLE and entry.diagnostics.get("code") == "PRECONDITION":
            raise UsageError(entry.diagnostics["message"])
    report = BoundReport(domain=domain, area=area, entries=[entry], k=k, config=_config(args))
    _emit(report, args)
    return EXIT_OK if entry.status == FEASIBLE else EXIT_INFEASIBLE


def cmd_verify(args) -> int:
    cfg = _config(args)
    if args.preset == "star":
        report = pipeline.verify_star(args.beta, args.c, args.h, args.tol, args.alpha,
                                      boundary=args.boundary, config=cfg)
    elif args.preset == "square":
        report = pipeline.verify_square(args.h, args.tol, args.alpha, config=cfg)
    else:
        report = pipeline.verify_snowflake(args.p, args.n, args.h, args.tol, Rule(args.rule),
                                           args.seed, args.alpha, config=cfg)
    _emit(report, args)
    overall = report.overall
    if overall == VIOLATED:
        print("quasispec: error: an inequality is violated; see verdicts", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_INFEASIBLE if overall == INFEASIBLE else EXIT_OK


COMMANDS = {
    "snowflake": cmd_snowflake,
    "ahlfors": cmd_ahlfors,
    "qalpha": cmd_qalpha,
    "capacity": cmd_capacity,
    "eig": cmd_eig,
    "bound": cmd_bound,
    "verify": cmd_verify,
}

_ERRORS = (UsageError, CurveError, MeshError, CapacityError, EigenError, B.BoundError,
           ValueError, OSError)


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _check_paths(args)
        return COMMANDS[args.subcommand](args)
    except B.BoundError as err:
        print(f"quasispec: error: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE if err.code in ("INFEASIBLE", "EMPTY_WINDOW") else EXIT_ERROR
    except _ERRORS as err:
        msg = " ".join(str(err).split())
        print(f"quasispec: error: {msg}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
