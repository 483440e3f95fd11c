"""End-to-end checks: curve -> constants -> bounds -> FEM -> verdicts."""

from __future__ import annotations

from typing import Callable

from . import bounds as B
from .conformal import ConformalMapSpec, image_polygon, q_alpha
from .geometry import (
    PolygonalCurve,
    Rule,
    SnowflakeSpec,
    densify,
    generate_snowflake,
    is_convex,
    polygon_area,
    polygon_diameter,
    rectangle,
    triangulate,
)
from .metrics import (
    Provenance,
    QcCoefficient,
    estimate_beta,
    estimate_three_point,
    k_from_ahlfors,
    k_star_shaped,
)
from .report import FEASIBLE, INFEASIBLE, BoundEntry, BoundReport
from .spectral import neumann_mu1

DEFAULT_ALPHA_RANGE = (2.0, 10.0)
SQUARE_PER_EDGE = 100
# Ear clipping a vertex-dense boundary leaves slivers that longest-edge
# bisection can only resolve with many tiny triangles; a coarse inscribed
# polygon meshes to near-uniform size.
STAR_BOUNDARY = 48


def _infeasible(name: str, err: B.BoundError, **extra) -> BoundEntry:
    diag = {"code": err.code, "message": str(err)}
    diag.update({k: v for k, v in err.diagnostics.items() if not isinstance(v, dict)})
    return BoundEntry(name=name, status=INFEASIBLE, diagnostics=diag, **extra)


def _windowed(name: str, k: QcCoefficient | None, window_fn: Callable[[], B.AlphaWindow],
              value_fn: Callable[[B.Alpha], B.BoundValue], alpha: float | None) -> BoundEntry:
    try:
        window = window_fn()
    except B.BoundError as err:
        return _infeasible(name, err, k=k)
    try:
        if alpha is None:
            a, _ = B.best_alpha(lambda x: value_fn(x).value, window)
        else:
            a = B.as_alpha(alpha)
            if not window.contains(a):
                raise B.BoundError("INFEASIBLE", f"alpha = {alpha} lies outside the window",
                                   ln_excess=a.ln_excess)
        bv = value_fn(a)
    except B.BoundError as err:
        return _infeasible(name, err, k=k, window=window)
    return BoundEntry(name=name, status=FEASIBLE, k=k, alpha=bv.alpha, nu=bv.nu,
                      c_alpha=bv.c_alpha, inv_mu1_bound=bv.value, window=window,
                      terms=bv.terms)


def entry_quasidisc(k: QcCoefficient, area: float, alpha: float | None = None) -> BoundEntry:
    return _windowed("quasidisc", k, lambda: B.alpha_window(k),
                     lambda a: B._quasidisc(k.k, area, a), alpha)


def entry_turning(c: float, area: float, alpha: float | None = None) -> BoundEntry:
    try:
        k = k_from_ahlfors(c)
    except ValueError as err:
        return _infeasible("turning", B.BoundError("PRECONDITION", str(err)))
    entry = _windowed("turning", k, lambda: B.turning_window(c),
                      lambda a: B._turning(c, area, a), alpha)
    entry.terms["c"] = c
    return entry


def entry_snowflake(p: float, area: float, alpha: float | None = None) -> BoundEntry:
    try:
        c = B.snowflake_constant(p)
    except B.BoundError as err:
        return _infeasible("snowflake", err)
    kc = k_from_ahlfors(c).k
    k = QcCoefficient(kc * kc, Provenance.AHLFORS_C)
    return _windowed("snowflake", k, lambda: B.snowflake_window(p),
                     lambda a: B._snowflake(p, area, a), alpha)


def entry_dilatation(spec: ConformalMapSpec, alpha: float | None = None,
                     alpha_range: tuple[float, float] = DEFAULT_ALPHA_RANGE,
                     shells: int | None = None) -> BoundEntry:
    kw = {} if shells is None else {"shells": shells}

    def value(a: B.Alpha) -> B.BoundValue:
        q = q_alpha(spec, a.value, **kw)
        if q.divergent:
            raise B.BoundError("INFEASIBLE", f"Q({a.value}) diverges for {spec.label}")
        return B._dilatation(q.value, a)

    try:
        if alpha is None:
            a, _ = B.best_alpha(lambda x: value(x).value, alpha_range)
        else:
            a = B.as_alpha(alpha)
        bv = value(a)
    except B.BoundError as err:
        return _infeasible("dilatation", err)
    terms = dict(bv.terms, map=spec.label, alpha_range=list(alpha_range))
    return BoundEntry(name="dilatation", status=FEASIBLE, alpha=bv.alpha,
                      inv_mu1_bound=bv.value, terms=terms)


# ---------------------------------------------------------------------------
# presets

def _fem(curve: PolygonalCurve, h: float, tol: float) -> dict:
    mesh = triangulate(curve, h)
    res = neumann_mu1(mesh, tol=tol)
    out = res.to_json()
    out["triangles"] = int(len(mesh.triangles))
    return out


def _finish(domain: str, curve: PolygonalCurve, entries: list[BoundEntry], k, h: float,
            tol: float, config: dict, audit_c: float | None) -> BoundReport:
    area = polygon_area(curve)
    diam = polygon_diameter(curve)
    convex = is_convex(curve)
    fem = _fem(curve, h, tol) if h > 0 else None
    audit = B.formula_audit(audit_c) if audit_c is not None else None
    return BoundReport(
        domain=domain,
        area=area,
        entries=entries,
        k=k,
        diameter=diam,
        convex=convex,
        classical=B.classical_bounds(area, diam, convex),
        fem_mu1=None if fem is None else fem["mu1"],
        fem=fem,
        audit=audit,
        config=config,
    )


def verify_star(beta: float = 0.5, c: float = 0.25, h: float = 0.03, tol: float = 1e-8,
                alpha: float | None = None, alpha_range=DEFAULT_ALPHA_RANGE,
                boundary: int = STAR_BOUNDARY, config: dict | None = None) -> BoundReport:
    """Polygon inscribed in the image of z + c z^2, a beta-star-shaped quasidisc.

    Area, diameter and the three-point constant are those of the polygon
    that is meshed; the dilatation bound uses Q(alpha) of the exact map.
    """
    spec = ConformalMapSpec.quadratic(c)
    beta_hat = estimate_beta(spec)
    if beta_hat > beta:
        raise B.BoundError("PRECONDITION",
                           f"{spec.label} is only {beta_hat:.6g}-star-shaped, above beta = {beta}")
    k = k_star_shaped(beta)
    curve = image_polygon(spec, boundary)
    area = polygon_area(curve)
    c_hat = estimate_three_point(curve).c_hat
    entries = [
        entry_dilatation(spec, alpha, alpha_range),
        entry_quasidisc(k, area, alpha),
        entry_turning(c_hat, area, alpha),
    ]
    entries[0].terms["beta_estimate"] = beta_hat
    return _finish(f"star({spec.label}, beta={beta})", curve, entries, k, h, tol,
                   config or {}, c_hat)


def verify_square(h: float = 0.03, tol: float = 1e-8, alpha: float | None = None,
                  config: dict | None = None) -> BoundReport:
    square = rectangle()
    c_hat = estimate_three_point(densify(square, SQUARE_PER_EDGE)).c_hat
    k = k_from_ahlfors(c_hat)
    entries = [entry_quasidisc(k, 1.0, alpha), entry_turning(c_hat, 1.0, alpha)]
    return _finish("unit square", square, entries, k, h, tol, config or {}, c_hat)


def verify_snowflake(p: float = 0.3, n: int = 3, h: float = 0.03, tol: float = 1e-8,
                     rule: Rule = Rule.ALL_TENT, seed: int = 0, alpha: float | None = None,
                     config: dict | None = None) -> BoundReport:
    curve = generate_snowflake(SnowflakeSpec(p, n, rule, seed))
    area = polygon_area(curve)
    c_hat = estimate_three_point(curve).c_hat
    entries = [entry_snowflake(p, area, alpha), entry_turning(c_hat, area, alpha)]
    k = entries[0].k
    return _finish(f"snowflake(p={p}, n={n}, rule={rule.value})", curve, entries, k, h, tol,
                   config or {}, c_hat)
