"""Acceptance criteria, one group of tests per criterion (see conftest summary)."""

import json
import math
import time

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasispec import bounds as B
from quasispec.capacity import (
    QcTestMap,
    annular_lower_bound_check,
    annulus_capacity,
    log_spiral,
    radial_segment,
    teichmuller_capacity,
)
from quasispec.cli import run
from quasispec.conformal import ConformalMapSpec, q_alpha
from quasispec.capacity import doubling_ratio
from quasispec.geometry import (
    SnowflakeSpec,
    densify,
    generate_snowflake,
    polygon_area,
    polygon_diameter,
    rectangle,
    regular_polygon,
    triangulate,
)
from quasispec.logreal import LogReal
from quasispec.metrics import estimate_bounded_turning
from quasispec.pipeline import verify_square, verify_star
from quasispec.spectral import (
    GAGLIARDO_CONSTANT,
    PS21_CONSTANT,
    gagliardo_ratios,
    neumann_mu1,
    poincare_bound,
    poincare_ratio_disc,
    ps21_ratio_check,
)

P1 = 1.84118


# 1 ---------------------------------------------------------------------------

@pytest.mark.criterion(1)
def test_fem_unit_square_within_one_percent():
    t0 = time.perf_counter()
    res = neumann_mu1(triangulate(rectangle(), 0.02))
    elapsed = time.perf_counter() - t0
    assert abs(res.mu1 - math.pi**2) / math.pi**2 < 0.01
    assert elapsed < 60.0


@pytest.mark.criterion(1)
def test_fem_256gon_within_one_and_half_percent():
    res = neumann_mu1(triangulate(regular_polygon(256), 0.03))
    assert abs(res.mu1 - P1**2) / P1**2 < 0.015


# 2 ---------------------------------------------------------------------------

@pytest.mark.criterion(2)
@pytest.mark.parametrize("spec, area", [
    (ConformalMapSpec.identity(), math.pi),
    (ConformalMapSpec.scale(2.0), 4 * math.pi),
    (ConformalMapSpec.quadratic(0.25), 1.125 * math.pi),
    (ConformalMapSpec.quadratic(0.5), 1.5 * math.pi),
])
def test_q_two_equals_area(spec, area):
    res = q_alpha(spec, 2.0)
    assert res.finite
    assert abs(res.value - area) / area < 1e-3


@pytest.mark.criterion(2)
@pytest.mark.parametrize("c", [0.1, 0.25, 0.4, 0.5])
def test_quadratic_area_closed_form(c):
    res = q_alpha(ConformalMapSpec.quadratic(c), 2.0)
    assert abs(res.value - math.pi * (1 + 2 * c * c)) / (math.pi * (1 + 2 * c * c)) < 1e-3


# 3 ---------------------------------------------------------------------------

@pytest.mark.criterion(3)
def test_koebe_half_is_finite():
    assert q_alpha(ConformalMapSpec.koebe(), 0.5).finite


@pytest.mark.criterion(3)
@pytest.mark.parametrize("alpha", [1.0, 2.0])
def test_koebe_divergent(alpha):
    assert q_alpha(ConformalMapSpec.koebe(), alpha).divergent


# 4 ---------------------------------------------------------------------------

@pytest.mark.criterion(4)
def test_annulus_capacity_within_two_percent():
    res = annulus_capacity(1.0, 2.0, spacing=1 / 128)
    exact = 2 * math.pi / math.log(2.0)
    assert abs(res.value - exact) / exact < 0.02


@pytest.mark.criterion(4)
@pytest.mark.parametrize("t", [2.0, 4.0, 8.0])
def test_teichmuller_inside_bracket(t):
    res = teichmuller_capacity(t)
    lo, hi = 2 * math.pi / math.log(32 * t), 2 * math.pi / math.log(t + 1)
    assert lo < res.value <= hi


@pytest.mark.criterion(4)
def test_radial_segments_respect_lower_bound():
    ok, value, bound = annular_lower_bound_check(
        1.0, 4.0, radial_segment(0.0, 1.0, 4.0), radial_segment(math.pi, 1.0, 4.0))
    assert ok and value >= bound * 0.98


@pytest.mark.criterion(4)
def test_spiral_continua_respect_lower_bound():
    ok, value, bound = annular_lower_bound_check(
        1.0, 2.0, log_spiral(1.0, 2.0, 0.5, 0.0), log_spiral(1.0, 2.0, 0.5, math.pi))
    assert ok and value >= bound


# 5 ---------------------------------------------------------------------------

@pytest.mark.criterion(5)
def test_unit_square_c_hat_literal_target():
    # The literal target sqrt(5)/2 is the vertical-pair ratio; the supremum over
    # all pairs is phi/sqrt(2) ~ 1.1441 (see test_metrics for the brute-force
    # oracle).  This test keeps the stated tolerance and is expected to fail.
    est = estimate_bounded_turning(densify(rectangle(), 100))
    assert abs(est.c_hat - 1.118) <= 0.01


@pytest.mark.criterion(5)
def test_regular_512gon_c_hat_is_one():
    assert abs(estimate_bounded_turning(regular_polygon(512)).c_hat - 1.0) <= 0.01


@pytest.mark.criterion(5)
def test_snowflake_c_hat_bounded_and_monotone():
    values = [estimate_bounded_turning(generate_snowflake(SnowflakeSpec(0.3, n))).c_hat
              for n in range(1, 5)]
    assert all(v <= 16 / (1 - 2 * 0.3) for v in values)
    assert all(b >= a for a, b in zip(values, values[1:]))


# 6 ---------------------------------------------------------------------------

@pytest.mark.criterion(6)
def test_radial_stretch_doubling():
    res = doubling_ratio(QcTestMap.radial_stretch(2.0), resolution=1_000_000)
    assert abs(res.ratio - 2.0) <= 0.02
    assert LogReal.from_float(res.ratio) <= res.bound
    assert res.holds


# 7 ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def star_report():
    return verify_star(beta=0.5, h=0.03)


@pytest.fixture(scope="module")
def square_report():
    return verify_square(h=0.03)


@pytest.mark.criterion(7)
def test_star_preset_every_bound_dominates(star_report):
    assert abs(star_report.k.k.to_float() - 5.828427) < 1e-5
    names = {e.name for e in star_report.entries}
    assert names == {"dilatation", "quasidisc", "turning"}
    inv = LogReal.from_float(1.0 / star_report.fem_mu1)
    for e in star_report.entries:
        assert e.status == "FEASIBLE", e.diagnostics
        assert inv <= e.inv_mu1_bound
    assert star_report.overall == "ok"


@pytest.mark.criterion(7)
def test_unit_square_every_bound_dominates(square_report):
    inv = LogReal.from_float(1.0 / square_report.fem_mu1)
    assert {e.name for e in square_report.entries} == {"quasidisc", "turning"}
    for e in square_report.entries:
        assert e.status == "FEASIBLE", e.diagnostics
        assert inv <= e.inv_mu1_bound
    assert square_report.overall == "ok"


@pytest.mark.criterion(7)
@pytest.mark.parametrize("curve", [
    rectangle(),
    rectangle(2.0, 1.0),
    regular_polygon(6),
    regular_polygon(3),
], ids=["square", "rectangle", "hexagon", "triangle"])
def test_classical_sandwich_on_convex_polygons(curve):
    area = polygon_area(curve)
    d = polygon_diameter(curve)
    mu1 = neumann_mu1(triangulate(curve, 0.05 * d)).mu1
    cb = B.classical_bounds(area, d, convex=True)
    assert math.pi**2 / d**2 <= mu1 <= min(4 * math.pi / area, P1**2 * math.pi / area)
    assert cb.sandwich(mu1)


# 8 ---------------------------------------------------------------------------

def _bound_c(capsys, area):
    assert run(["bound", "--theorem", "c", "--p", "0.25", "--area", repr(area)]) == 0
    return capsys.readouterr().out


@pytest.mark.criterion(8)
def test_snowflake_bound_byte_identical(capsys):
    assert _bound_c(capsys, 1.2) == _bound_c(capsys, 1.2)


@pytest.mark.criterion(8)
def test_snowflake_bound_leading_term(capsys):
    entry = json.loads(_bound_c(capsys, 1.2))["entries"][0]
    with mpmath.workdps(40):
        lead = 4 * (1 + mpmath.e ** (2 * mpmath.pi) * 32**5) ** 2
    assert abs(entry["terms"]["ln_leading"] - float(lead)) / float(lead) < 1e-12
    assert abs(entry["terms"]["ln_leading"] - 1.291e21) / 1.291e21 < 1e-3
    assert entry["status"] == "FEASIBLE"


@pytest.mark.criterion(8)
@pytest.mark.parametrize("area", [0.5, 1.2, 7.0])
def test_snowflake_bound_linear_in_area(capsys, area):
    one = LogReal.from_json(json.loads(_bound_c(capsys, area))["entries"][0]["inv_mu1_bound"])
    two = LogReal.from_json(json.loads(_bound_c(capsys, 2 * area))["entries"][0]["inv_mu1_bound"])
    assert abs(two.log_ratio(one) - math.log(2.0)) < 1e-12


# 9 ---------------------------------------------------------------------------

@pytest.mark.criterion(9)
def test_ps21_family():
    best, bound = ps21_ratio_check()
    assert bound == pytest.approx(3 * math.sqrt(math.pi**3) / 4)
    assert best <= PS21_CONSTANT


@pytest.mark.criterion(9)
@pytest.mark.parametrize("q, p", [(2.0, 2.0), (4.0, 2.0)])
def test_poincare_family(q, p):
    best, bound = poincare_ratio_disc(q, p)
    assert bound == poincare_bound(q, p)
    assert best <= bound


@pytest.mark.criterion(9)
def test_gagliardo_family():
    best, bound = gagliardo_ratios()
    assert bound == GAGLIARDO_CONSTANT
    assert best <= bound


# 10 --------------------------------------------------------------------------

def _mp_root(k: float) -> mpmath.mpf:
    """ln(alpha - 2) solving nu(alpha) = 1, at 50 digits."""
    with mpmath.workdps(50):
        lnk = mpmath.log(k)
        a_ = 4 * mpmath.log(10) + mpmath.log(24 * mpmath.pi**2) + 2 * lnk

        def ln_nu(x):
            eps = mpmath.e**x
            alpha = 2 + eps
            return alpha * a_ + x - mpmath.log1p(eps)

        return mpmath.findroot(ln_nu, -2 * a_)


@pytest.mark.criterion(10)
@pytest.mark.parametrize("k", [1.0, 1.05, 2.05, 3.0])
def test_window_resolves_tiny_roots(k):
    w = B.alpha_window(k)
    root = float(_mp_root(k))
    width = math.exp(root)
    assert width < 2e-13
    assert w.binding is B.WindowBinding.NU_CONDITION
    # bracket: feasible below, infeasible at the top, relative width <= 1e-12
    assert B.nu(w.feasible_point, k) < LogReal.one()
    assert B.nu(B.Alpha(w.ln_upper), k) >= LogReal.one()
    assert abs(math.exp(w.ln_upper) - width) / width < 1e-12
    assert abs(math.exp(w.ln_feasible) - width) / width < 1e-12


@pytest.mark.criterion(10)
def test_window_width_reaches_1e14():
    widths = [math.exp(B.alpha_window(k).ln_upper) for k in (1.0, 2.05)]
    assert max(widths) > 1e-13 and min(widths) <= 1.05e-14


_ln = st.floats(-50.0, 50.0, allow_nan=False)


@pytest.mark.criterion(10)
@settings(max_examples=200, deadline=None)
@given(_ln, _ln, _ln, st.floats(-5.0, 5.0), st.floats(-5.0, 5.0))
def test_logreal_identities(a, b, c, x, y):
    A, Bv, C = LogReal(a), LogReal(b), LogReal(c)
    assert abs(((A * Bv) * C).log() - (A * (Bv * C)).log()) <= 1e-12 * max(1.0, abs(a + b + c))
    assert abs(((A ** x) ** y).log() - (A ** (x * y)).log()) <= 1e-12 * max(1.0, abs(a * x * y))
