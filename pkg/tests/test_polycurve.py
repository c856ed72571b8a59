import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anisoflow.anisotropy import Constant, Cosine, wulff_area
from anisoflow.curves import sample_wulff
from anisoflow.errors import DegenerateEdge, FoldedVertex, NonpositiveArea
from anisoflow.polycurve import (
    PolyCurve,
    aniso_curvature,
    build_frames,
    curvature,
    hausdorff,
    mesh_ratio,
    metrics,
    normal_area,
    point_segment_distance,
    shoelace_area,
)


def regular(n, R=1.0, phase=0.0):
    a = phase + 2 * np.pi * np.arange(n) / n
    return R * np.stack([np.cos(a), np.sin(a)], axis=-1)


@st.composite
def convex_polygons(draw, min_n=5, max_n=40):
    n = draw(st.integers(min_n, max_n))
    gaps = np.array(draw(st.lists(st.floats(0.2, 1.0), min_size=n, max_size=n)))
    ang = np.cumsum(gaps) / gaps.sum() * 2 * np.pi
    radii = np.array(draw(st.lists(st.floats(0.8, 1.2), min_size=n, max_size=n)))
    pts = radii[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    # convex hull keeps the sample convex and counter-clockwise
    from scipy.spatial import ConvexHull

    hull = ConvexHull(pts)
    return pts[hull.vertices]


def test_square_frames():
    x = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
    f = build_frames(x)
    assert np.allclose(f.r, math.sqrt(2))
    assert np.allclose(f.phi, np.pi / 2)
    assert f.winding == 1
    # edge 0 runs from the last vertex to vertex 0
    assert np.allclose(f.T[0], np.array([1, 1]) / math.sqrt(2))
    assert f.nu[0] == pytest.approx(np.pi / 4)
    assert np.allclose(np.diff(f.nu), np.pi / 2)


def test_regular_polygon_curvature_closed_form():
    n, R = 24, 1.7
    f = build_frames(regular(n, R))
    assert np.allclose(curvature(f), 1 / (R * math.cos(math.pi / n)), rtol=1e-13)


def test_clockwise_winding_and_negative_area():
    x = regular(10)[::-1]
    f = build_frames(x)
    assert f.winding == -1
    with pytest.raises(NonpositiveArea):
        metrics(x, f, Constant(1), math.pi)


def test_lifted_angles_are_continuous_after_many_turns():
    x = regular(400, phase=0.3)
    f = build_frames(x)
    assert np.all(np.diff(f.nu) > 0)
    assert f.nu_wrap - f.nu[0] == pytest.approx(2 * np.pi)


def test_first_angle_on_negative_axis_is_pi():
    # edge 0 runs from (1, 0) to (0, 0), i.e. along -x; also with a signed zero
    for y0 in (0.0, -0.0):
        x = np.array([[0.0, y0], [1.0, -1.0], [1.0, 0.0]])
        f = build_frames(x)
        assert f.nu[0] == np.pi
        assert f.winding == 1


def test_degenerate_and_folded():
    with pytest.raises(DegenerateEdge):
        build_frames(np.array([[0, 0], [1, 0], [1, 0], [0, 1]], dtype=float))
    with pytest.raises(FoldedVertex) as info:
        build_frames(np.array([[0, 0], [2, 0], [1, 0], [1, 1]], dtype=float))
    assert info.value.index == 1


def test_shoelace_equals_normal_form():
    x = regular(13, 2.0) + [0.3, -0.1]
    assert shoelace_area(x) == pytest.approx(normal_area(build_frames(x)), rel=1e-13)


@settings(max_examples=60, deadline=None)
@given(convex_polygons(), st.integers(2, 6), st.floats(0.0, 0.9))
def test_ksigma_sum_depends_only_on_angles(x, m, frac):
    # sum k_sigma r = sum (sigma_i + sigma_{i+1}) tan(phi_i / 2): the sigma' terms telescope
    s = Cosine(frac / (m * m - 1), m)
    f = build_frames(x)
    _, ks = aniso_curvature(f, s)
    sv = s.value(f.nu)
    expect = np.sum((sv + np.roll(sv, -1)) * f.t)
    assert np.dot(ks, f.r) == pytest.approx(expect, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(convex_polygons(), st.integers(2, 6), st.floats(0.0, 0.9))
def test_discrete_anisoperimetric_inequality(x, m, frac):
    s = Cosine(frac / (m * m - 1), m)
    f = build_frames(x)
    assert metrics(x, f, s, wulff_area(s)).Pi_sigma >= 1.0 - 1e-12


@settings(max_examples=40, deadline=None)
@given(convex_polygons(), st.floats(0.1, 10.0), st.floats(-np.pi, np.pi))
def test_ratio_invariant_under_similarity_for_isotropic(x, scale, rot):
    c, s = math.cos(rot), math.sin(rot)
    y = scale * x @ np.array([[c, s], [-s, c]])
    one = Constant(1)
    p0 = metrics(x, build_frames(x), one, math.pi).Pi_sigma
    p1 = metrics(y, build_frames(y), one, math.pi).Pi_sigma
    assert p1 == pytest.approx(p0, rel=1e-11)


def test_ksigma_on_wulff_polygon_converges_to_one():
    s = Cosine(0.1, 3)
    errs = []
    for n in (64, 128, 256):
        f = build_frames(sample_wulff(s, n))
        _, ks = aniso_curvature(f, s)
        errs.append(np.abs(ks - 1).max())
    assert errs[0] / errs[1] > 3.5 and errs[1] / errs[2] > 3.5


def test_text_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(3)
    c = PolyCurve(rng.normal(size=(17, 2)))
    c.save(tmp_path / "c.txt")
    back = PolyCurve.load(tmp_path / "c.txt")
    assert np.array_equal(back.points, c.points)


def test_polycurve_is_read_only_and_basic_props():
    c = PolyCurve(regular(4))
    with pytest.raises(ValueError):
        c.points[0, 0] = 5
    assert c.area == pytest.approx(2.0)
    assert c.length == pytest.approx(4 * math.sqrt(2))
    assert c.diameter == pytest.approx(2.0)
    assert c.reversed().area == pytest.approx(-2.0)
    with pytest.raises(ValueError):
        PolyCurve(np.zeros((2, 2)))


def test_hausdorff_of_translate_and_segment_distance():
    x = regular(50)
    assert hausdorff(x, x) < 1e-15
    assert hausdorff(x, x + [0.05, 0.0]) == pytest.approx(0.05, rel=1e-9)
    d = point_segment_distance(np.array([[0.5, 1.0], [2.0, 0.0]]), np.array([[0.0, 0.0]]), np.array([[1.0, 0.0]]))
    assert np.allclose(d, [1.0, 1.0])


def test_mesh_ratio():
    assert mesh_ratio(np.ones(10)) == 0.0
    assert mesh_ratio(np.array([1.0, 1.0, 2.0, 0.0])) == pytest.approx(1.0)
