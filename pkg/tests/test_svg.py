import re

import numpy as np
import pytest

from quasispec.geometry import rectangle, regular_polygon, triangulate
from quasispec.spectral import neumann_mu1
from quasispec.svg import NEGATIVE_FILL, POSITIVE_FILL, export_svg, fmt, render_svg


def test_number_format():
    assert fmt(-0.0) == "0"
    assert fmt(1 / 3) == "0.333333333"
    assert fmt(1e-20) == "1e-20"


def test_curve_svg(tmp_path):
    text = render_svg(regular_polygon(5))
    assert text.startswith('<?xml version="1.0"') and text.endswith("</svg>\n")
    assert text.count("<polygon") == 1
    vb = [float(x) for x in re.search(r'viewBox="([^"]+)"', text).group(1).split()]
    # 5% margin around the bounding box of the pentagon
    v = regular_polygon(5).vertices
    span = np.ptp(v, axis=0).max()
    assert vb[0] == pytest.approx(v[:, 0].min() - 0.05 * span, rel=1e-8)
    assert vb[2] == pytest.approx(np.ptp(v[:, 0]) + 0.1 * span, rel=1e-8)
    p = tmp_path / "c.svg"
    export_svg(regular_polygon(5), p)
    assert p.read_text() == text


def test_mesh_svg_is_deterministic_and_complete():
    mesh = triangulate(rectangle(), 0.2)
    a = render_svg(mesh)
    assert a == render_svg(mesh)
    assert a.count("<polygon") == len(mesh.triangles)
    assert 'fill="none"' in a


def test_sign_fill():
    mesh = triangulate(rectangle(), 0.1)
    res = neumann_mu1(mesh)
    text = render_svg(mesh, res.vector)
    assert POSITIVE_FILL in text and NEGATIVE_FILL in text
    with pytest.raises(ValueError):
        render_svg(mesh, np.zeros(3))
    with pytest.raises(TypeError):
        render_svg("not a shape")
