import math

import numpy as np
import pytest

from quasispec.capacity import (
    LN_DOUBLING_BASE,
    CapacityError,
    CondenserProblem,
    QcTestMap,
    TensorGrid,
    annular_lower_bound_check,
    annulus_capacity,
    annulus_problem,
    doubling_bound,
    doubling_ratio,
    graded_axis,
    log_spiral,
    radial_continua_lower_bound,
    radial_segment,
    rasterize_path,
    solve_capacity,
    teichmuller_bracket,
)
from quasispec.logreal import LogReal


def test_tensor_grid_validation():
    with pytest.raises(ValueError):
        TensorGrid(np.array([0.0, 0.0, 1.0]), np.array([0.0, 1.0]))
    g = TensorGrid.uniform(-1, 1, -0.5, 0.5, 0.25)
    assert g.shape == (9, 5)
    assert 0.0 in g.xs and g.min_spacing == pytest.approx(0.25)
    assert g.to_json()["nx"] == 9


def test_graded_axis_hits_special_points():
    ax = graded_axis(-10.0, 10.0, [-1.0, 0.0, 3.0], 0.01)
    assert np.all(np.diff(ax) > 0)
    for s in (-1.0, 0.0, 3.0):
        assert np.min(np.abs(ax - s)) < 1e-12
    assert ax[0] == -10.0 and ax[-1] == 10.0
    # endpoint fitting stretches or compresses each run by a few percent at most
    assert 0.95 * 0.01 <= np.diff(ax).min() <= 1.05 * 0.01


def test_annulus_coarse_and_converging():
    exact = 2 * math.pi / math.log(2.0)
    errs = [abs(annulus_capacity(1.0, 2.0, s).value - exact) for s in (1 / 16, 1 / 32, 1 / 64)]
    assert errs[2] < errs[0]
    assert errs[2] / exact < 0.05


def test_capacity_is_symmetric_in_the_plates():
    prob = annulus_problem(1.0, 2.0, 1 / 32)
    a = solve_capacity(prob).value
    b = solve_capacity(CondenserProblem(prob.grid, prob.plate1, prob.plate0)).value
    assert a == pytest.approx(b, rel=1e-7)


def test_capacity_is_scale_invariant():
    a = annulus_capacity(1.0, 2.0, 1 / 32).value
    b = annulus_capacity(2.0, 4.0, 1 / 16).value
    assert a == pytest.approx(b, rel=1e-6)


def test_capacity_errors():
    g = TensorGrid.uniform(0, 1, 0, 1, 0.25)
    empty = np.zeros(g.shape, dtype=bool)
    left = empty.copy()
    left[0, :] = True
    right = empty.copy()
    right[-1, :] = True
    with pytest.raises(CapacityError) as e:
        solve_capacity(CondenserProblem(g, left, empty))
    assert e.value.code == "NO_ADMISSIBLE"
    with pytest.raises(CapacityError):
        solve_capacity(CondenserProblem(g, left, left))
    touching = empty.copy()
    touching[1, :] = True
    with pytest.raises(CapacityError):
        solve_capacity(CondenserProblem(g, left, touching))
    with pytest.raises(ValueError):
        CondenserProblem(g, left, np.zeros((2, 2), dtype=bool))
    with pytest.raises(CapacityError) as e:
        solve_capacity(annulus_problem(1.0, 2.0, 1 / 16), tol=1e-14, maxiter=2)
    assert e.value.code == "NON_CONVERGED"


def test_parallel_plates_capacity():
    # unit square, u = 0 on x = 0 and u = 1 on x = 1: energy exactly 1
    g = TensorGrid.uniform(0, 1, 0, 1, 0.125)
    p0 = np.zeros(g.shape, dtype=bool)
    p1 = p0.copy()
    p0[0, :] = True
    p1[-1, :] = True
    assert solve_capacity(CondenserProblem(g, p0, p1)).value == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize("t", [2.0, 8.0])
def test_teichmuller_bracket_ordering(t):
    lo, hi = teichmuller_bracket(t)
    assert 0 < lo < hi


def test_rasterized_path_is_connected():
    g = TensorGrid.uniform(-2, 2, -2, 2, 1 / 16)
    mask = rasterize_path(g, log_spiral(1.0, 2.0, 1.0))
    from scipy.ndimage import label

    _, count = label(mask)
    assert count == 1


def test_annular_check_preconditions():
    with pytest.raises(CapacityError):
        annular_lower_bound_check(2.0, 1.0, radial_segment(0, 1, 2), radial_segment(1, 1, 2))
    with pytest.raises(CapacityError) as e:
        annular_lower_bound_check(1.0, 2.0, radial_segment(0, 1.2, 2), radial_segment(1, 1, 2))
    assert e.value.code == "PRECONDITION"
    assert radial_continua_lower_bound(1.0, math.e) == pytest.approx(2 / math.pi)


def test_radial_stretch_maps():
    f = QcTestMap.radial_stretch(3.0)
    z = np.array([0.5 + 0.2j, -1.5j, 0.0])
    assert np.allclose(f.inverse(f.forward(z)), z)
    with pytest.raises(ValueError):
        QcTestMap.radial_stretch(0.5)


def test_doubling_identity_map_gives_four():
    res = doubling_ratio(QcTestMap.radial_stretch(1.0), resolution=200_000)
    assert res.ratio == pytest.approx(4.0, rel=0.02)
    assert res.holds


def test_doubling_is_reproducible_and_validated():
    f = QcTestMap.radial_stretch(2.0)
    a = doubling_ratio(f, resolution=100_000)
    b = doubling_ratio(f, resolution=100_000)
    assert a.to_json() == b.to_json()
    with pytest.raises(ValueError):
        doubling_ratio(f, resolution=10)
    with pytest.raises(ValueError):
        doubling_ratio(f, r=0.0, resolution=100_000)


def test_doubling_bound_in_log_space():
    b = doubling_bound(2.0)
    expected = 2.0 * math.pi**2 * (2 + math.pi**4) ** 2 / (2 * math.log(3))
    assert b.log() == pytest.approx(expected, rel=1e-14)
    assert math.exp(LN_DOUBLING_BASE) == pytest.approx(expected / 2)
    assert LogReal.from_float(1e300) < b
