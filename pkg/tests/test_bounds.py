import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasispec import bounds as B
from quasispec.logreal import LogReal
from quasispec.metrics import k_from_ahlfors, k_star_shaped


def mp_quasidisc_ln(k, ln_eps, area):
    """ln of (K^2 C^2 / pi) R exp(K^2 X0) |Omega| at alpha = 2 + e^ln_eps, 50 digits."""
    with mpmath.workdps(50):
        k = mpmath.mpf(k)
        eps = mpmath.e ** mpmath.mpf(ln_eps)
        a = 2 + eps
        nu = 10 ** (4 * a) * eps / (a - 1) * (24 * mpmath.pi**2 * k**2) ** a
        c = 10**6 / ((a - 1) * (1 - nu)) ** (1 / a)
        r = ((2 * a - 2) / eps) ** ((2 * a - 2) / a)
        x0 = mpmath.pi**2 * (2 + mpmath.pi**4) ** 2 / (2 * mpmath.log(3))
        return float(mpmath.log(k**2 * c**2 / mpmath.pi * r * area) + k**2 * x0)


# Alpha ---------------------------------------------------------------------

def test_alpha_representation():
    a = B.Alpha.of(2.5)
    assert a.value == pytest.approx(2.5) and a.excess == pytest.approx(0.5)
    assert B.Alpha.of(2.0).is_two
    assert B.Alpha.from_json(json.loads(json.dumps(a.to_json()))) == a
    assert B.Alpha.from_json(B.Alpha.of(2.0).to_json()).is_two
    with pytest.raises(B.BoundError):
        B.Alpha.of(1.5)
    with pytest.raises(ValueError):
        B.Alpha(math.nan)


def test_tiny_excess_survives():
    a = B.Alpha(-1e5)
    assert a.value == 2.0 and a.excess == 0.0 and not a.is_two


# sub-constants -------------------------------------------------------------

def test_nu_closed_form():
    k, eps = 1.3, 1e-14
    alpha = 2.0 + eps  # only for the K^alpha factor below
    with mpmath.workdps(40):
        a = 2 + mpmath.mpf(eps)
        expected = float(10 ** (4 * a) * mpmath.mpf(eps) / (a - 1) * (24 * mpmath.pi**2 * mpmath.mpf(k) ** 2) ** a)
    assert B.nu(B.Alpha(math.log(1e-14)), k).to_float() == pytest.approx(expected, rel=1e-12)
    lin = B.nu(B.Alpha(math.log(1e-14)), k, B.NuVariant.K_LINEAR).to_float()
    assert lin == pytest.approx(expected / k**alpha, rel=1e-12)
    assert B.nu(2.0, k).is_zero


@settings(max_examples=50, deadline=None)
@given(st.floats(-60, -1), st.floats(0.1, 5.0))
def test_nu_monotone_in_alpha(x, dx):
    assert B.nu(B.Alpha(x), 2.0) < B.nu(B.Alpha(x + dx), 2.0)


def test_c_alpha():
    a = B.Alpha(math.log(1e-14))
    assert B.c_alpha(a, LogReal.zero()).to_float() == pytest.approx(1e6 / (1 + 1e-14) ** (1 / 2), rel=1e-12)
    nu_half = LogReal.from_float(0.5)
    assert B.c_alpha(a, nu_half).to_float() == pytest.approx(1e6 / (0.5 * (1 + 1e-14)) ** (1 / (2 + 1e-14)), rel=1e-12)
    # nu just below 1 keeps ln(1 - nu) finite
    near = B.c_alpha(a, LogReal(-1e-300))
    assert near.log() == pytest.approx(6 * math.log(10) + 300 * math.log(10) / 2, rel=1e-12)
    with pytest.raises(B.BoundError) as e:
        B.c_alpha(a, LogReal.one())
    assert e.value.code == "INFEASIBLE"


def test_integrability_cap():
    assert B.integrability_cap(1.0) == math.inf
    assert B.integrability_cap(2.0) == pytest.approx(math.log(2 * 4 / 3 - 2))
    assert B.integrability_cap(1 + 1e-9) == pytest.approx(math.log(2 / ((1 + 1e-9) ** 2 - 1)), rel=1e-6)


# window --------------------------------------------------------------------

@pytest.mark.parametrize("k", [1.0, 1.05, 2.05, 3.0, 5.828427])
def test_window_brackets_the_root(k):
    w = B.alpha_window(k)
    assert w.binding is B.WindowBinding.NU_CONDITION
    assert w.ln_feasible < w.ln_upper
    assert B.nu(w.feasible_point, k) < LogReal.one() <= B.nu(B.Alpha(w.ln_upper), k)
    assert math.nextafter(w.ln_feasible, math.inf) == w.ln_upper
    assert w.contains(w.feasible_point) and not w.contains(B.Alpha(w.ln_upper))
    assert not w.contains(2.0)


def test_window_values():
    assert B.alpha_window(1.0).ln_upper == pytest.approx(-29.3557079480483, abs=1e-9)
    assert B.alpha_window(1.05).ln_upper == pytest.approx(-29.5508686, abs=1e-6)


def test_window_shrinks_with_k():
    ups = [B.alpha_window(k).ln_upper for k in (1.0, 2.0, 4.0, 8.0)]
    assert ups == sorted(ups, reverse=True)
    assert B.alpha_window(4.0, B.NuVariant.K_LINEAR).ln_upper > B.alpha_window(4.0).ln_upper


def test_window_json_round_trip():
    w = B.alpha_window(2.0)
    assert B.AlphaWindow.from_json(json.loads(json.dumps(w.to_json()))) == w
    assert w.to_json()["ln_cap_excess"] == pytest.approx(math.log(2 / 3))


def test_window_for_huge_k_stays_feasible():
    w = B.alpha_window(LogReal(1e20))
    assert w.ln_upper == pytest.approx(-4e20, rel=1e-6)
    assert B.nu(w.feasible_point, LogReal(1e20)) < LogReal.one()


def test_window_for_tower_k_is_empty():
    with pytest.raises(B.BoundError) as e:
        B.alpha_window(LogReal(1e301))
    assert e.value.code == "EMPTY_WINDOW"


def test_snowflake_window_is_feasible_in_log_space():
    w = B.snowflake_window(0.25)
    assert w.ln_upper == pytest.approx(-2.5828e21, rel=1e-4)
    assert w.iterations > 0


# bounds --------------------------------------------------------------------

def test_dilatation_example():
    v = B.bound_dilatation(1.0, 4.0)
    assert v.to_float() == pytest.approx(4 / math.sqrt(math.pi) * 3**1.5, rel=1e-14)
    assert v.to_float() == pytest.approx(11.72646028567, rel=1e-11)
    with pytest.raises(B.BoundError):
        B.bound_dilatation(math.inf, 4.0)
    with pytest.raises(B.BoundError):
        B.bound_dilatation(1.0, 2.0)


@pytest.mark.parametrize("k, ln_eps", [(1.0, -30.0), (1.05, -31.0), (5.828427, -40.0)])
def test_quasidisc_against_mpmath(k, ln_eps):
    v = B.bound_quasidisc(k, math.pi, B.Alpha(ln_eps))
    assert v.log() == pytest.approx(mp_quasidisc_ln(k, ln_eps, math.pi), rel=1e-13)


def test_quasidisc_example_value():
    assert B.bound_quasidisc(1.0, math.pi, B.Alpha(-30.0)).log() == pytest.approx(44448.29, abs=0.01)


def test_quasidisc_infeasible_outside_window():
    with pytest.raises(B.BoundError) as e:
        B.bound_quasidisc(1.0, 1.0, 2.1)
    assert e.value.code == "INFEASIBLE"
    with pytest.raises(B.BoundError):
        B.bound_quasidisc(1.0, -1.0, B.Alpha(-40.0))
    with pytest.raises(B.BoundError):
        B.bound_quasidisc(0.5, 1.0, B.Alpha(-40.0))


@settings(max_examples=30, deadline=None)
@given(st.floats(1.0, 3.0), st.floats(0.0, 2.0), st.floats(0.01, 100.0))
def test_quasidisc_monotone_in_k_and_linear_in_area(k, dk, area):
    a = B.Alpha(-100.0)
    lo = B.bound_quasidisc(k, area, a)
    assert lo <= B.bound_quasidisc(k + dk, area, a)
    assert B.bound_quasidisc(k, 2 * area, a).log_ratio(lo) == pytest.approx(math.log(2), abs=1e-12)


def test_turning_form_matches_quasidisc_with_k_from_c():
    c = 1.2
    a = B.turning_window(c).feasible_point
    turning = B.bound_bounded_turning(c, 1.0, a)
    quasi = B.bound_quasidisc(k_from_ahlfors(c), 1.0, a)
    assert turning.is_tower and quasi.is_tower
    assert turning.tower == pytest.approx(quasi.tower, rel=1e-12)


def test_snowflake_bound_terms_and_linearity():
    w = B.snowflake_window(0.25)
    bv = B._snowflake(0.25, 1.2, w.feasible_point)
    with mpmath.workdps(40):
        lead = float(4 * (1 + mpmath.e ** (2 * mpmath.pi) * 32**5) ** 2)
    assert bv.terms["ln_leading"] == pytest.approx(lead, rel=1e-15)
    assert bv.terms["c"] == 32.0
    two = B.bound_snowflake(0.25, 2.4, w.feasible_point)
    assert two.log_ratio(bv.value) == math.log(2.0)
    with pytest.raises(B.BoundError):
        B.bound_snowflake(0.5, 1.0, w.feasible_point)


def test_square_term_overflow():
    with pytest.raises(B.BoundError) as e:
        B.turning_window(1e60)
    assert e.value.code == "EMPTY_WINDOW"


# best alpha ----------------------------------------------------------------

def test_best_alpha_matches_grid_scan():
    fn = lambda a: B.bound_dilatation(1.0, a)
    a, v = B.best_alpha(fn, (2.0, 10.0))
    grid = np.linspace(2.0, 10.0, 10_001)[1:]
    vals = np.array([B.bound_dilatation(1.0, x).log() for x in grid])
    i = int(vals.argmin())
    assert v.log() <= vals[i] + 1e-12
    assert abs(a.value - grid[i]) <= grid[1] - grid[0]
    assert a.value == pytest.approx(3.4757, abs=1e-4)
    assert v.log() == pytest.approx(2.45209, abs=1e-5)
    # unimodal on the scan
    d = np.sign(np.diff(vals))
    assert np.count_nonzero(np.diff(d)) == 1


def test_best_alpha_in_window():
    k = k_star_shaped(0.5)
    w = B.alpha_window(k)
    a, v = B.best_alpha(lambda x: B.bound_quasidisc(k, 1.0, x), w)
    assert w.contains(a)
    assert v <= B.bound_quasidisc(k, 1.0, B.Alpha(w.ln_feasible - 10))
    assert v <= B.bound_quasidisc(k, 1.0, w.feasible_point)


def test_best_alpha_failures():
    with pytest.raises(B.BoundError):
        B.best_alpha(lambda a: LogReal.one(), (5.0, 3.0))

    def never(a):
        raise B.BoundError("INFEASIBLE", "no")

    with pytest.raises(B.BoundError) as e:
        B.best_alpha(never, (2.0, 10.0))
    assert e.value.code == "INFEASIBLE"


# classical and audit -------------------------------------------------------

def test_classical_examples():
    cb = B.classical_bounds(1.0, math.sqrt(2), convex=True)
    assert cb.szego_upper == pytest.approx(10.650, abs=1e-3)
    assert cb.polya_upper == pytest.approx(12.566, abs=1e-3)
    assert cb.pw_lower == pytest.approx(4.9348, abs=1e-4)
    assert cb.upper == cb.szego_upper
    assert cb.sandwich(9.87) and not cb.sandwich(11.0) and not cb.sandwich(4.0)
    disc = B.classical_bounds(math.pi)
    assert disc.szego_upper == pytest.approx(3.3900, abs=1e-4) and disc.pw_lower is None
    assert B.ClassicalBounds.from_json(cb.to_json()) == cb
    with pytest.raises(B.BoundError):
        B.classical_bounds(0.0)
    with pytest.raises(B.BoundError):
        B.classical_bounds(1.0, None, convex=True)


def test_formula_audit():
    audit = B.formula_audit(32.0)
    assert audit["two_copy_vs_quasidisc"]["agree"]
    assert not audit["four_copy_vs_quasidisc"]["agree"]
    assert audit["four_copy_vs_quasidisc"]["rel_gap"] == pytest.approx(0.5, abs=1e-6)
    assert audit["four_copy_vs_quasidisc_k_squared"]["agree"]
    assert "K^2" in audit["note"]
    json.dumps(audit, allow_nan=False)
