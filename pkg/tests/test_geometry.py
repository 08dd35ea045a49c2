"""Charted model spaces: lifts, jumps, quadrature, subdivision transport."""

import math
from fractions import Fraction

import pytest

from deligne import (
    AnalyticError,
    GEOMETRY_BUILDERS,
    get_geometry,
    simplex_quadrature,
    subdivide_geometry,
    torus2_axis_loop,
    torus3_plane_slice,
)

ALL_NAMES = sorted(GEOMETRY_BUILDERS)


def test_registry_and_cache():
    assert set(ALL_NAMES) == {
        "annulus",
        "circle-2arc",
        "circle-3arc",
        "solid-torus",
        "sphere-octahedron-2chart",
        "torus2-4chart",
        "torus3-8chart",
    }
    g1 = get_geometry("circle-2arc")
    g2 = get_geometry("circle-2arc")
    assert g1 is g2
    with pytest.raises(AnalyticError):
        get_geometry("klein-bottle")


@pytest.mark.parametrize("name", ALL_NAMES)
def test_lift_shapes_where_defined(name):
    g = get_geometry(name)
    ncoord = len(g.coords)
    assert len(g.periodic) == ncoord
    for (chart, s), rows in g.lifts.items():
        assert chart in g.covered.admissible_of(s)
        assert len(rows) == len(s)
        assert all(len(r) == ncoord for r in rows)
        assert all(isinstance(x, Fraction) for r in rows for x in r)


@pytest.mark.parametrize("name", ALL_NAMES)
def test_tops_are_lifted_in_every_admissible_chart(name):
    g = get_geometry(name)
    for t in g.covered.complex.tops:
        for a in g.covered.admissible_of(t):
            assert (a, t) in g.lifts


def test_lift_missing_raises(sphere_octahedron_2chart):
    g = sphere_octahedron_2chart
    K = g.covered.complex
    missing = [
        (a, v)
        for v in K.simplices(0)
        for a in g.covered.admissible_of(v)
        if (a, v) not in g.lifts
    ]
    # the two poles have no angular branch
    assert missing
    a, v = missing[0]
    with pytest.raises(AnalyticError):
        g.lift(a, v)


def test_offset_antisymmetric(circle_2arc):
    g = circle_2arc
    for (a, s) in list(g.lifts):
        for b in g.covered.admissible_of(s):
            if (b, s) not in g.lifts:
                continue
            fwd = g.offset(s, a, b)
            bwd = g.offset(s, b, a)
            assert all(x == -y for x, y in zip(fwd, bwd))


@pytest.mark.parametrize("name", ALL_NAMES)
def test_jumps_are_integers_on_all_overlaps(name):
    g = get_geometry(name)
    periodic_coords = [i for i, p in enumerate(g.periodic) if p]
    seen_nonzero = False
    for _, s in g.covered.complex.all_simplices():
        charts = [a for a in g.covered.admissible_of(s) if (a, s) in g.lifts]
        for a in charts:
            for b in charts:
                for coord in periodic_coords:
                    n = g.jump(s, coord, a, b)
                    assert isinstance(n, int)
                    if n != 0:
                        seen_nonzero = True
    # every model here carries at least one seam
    assert seen_nonzero


def test_jump_rejects_aperiodic_coordinate(annulus):
    g = annulus
    s = g.covered.complex.tops[0]
    charts = g.covered.admissible_of(s)
    with pytest.raises(AnalyticError):
        g.jump(s, 1, charts[0], charts[0])


def test_vertex_value_reads_first_row(circle_3arc):
    g = circle_3arc
    for v in g.covered.complex.simplices(0):
        for a in g.covered.admissible_of(v):
            if (a, v) in g.lifts:
                assert g.vertex_value(a, v, 0) == g.lifts[(a, v)][0][0]


# -- quadrature -----------------------------------------------------------------


def test_quadrature_weights_sum_to_simplex_volume():
    for k in (1, 2, 3):
        pts, wts = simplex_quadrature(k, 6)
        assert wts.sum() == pytest.approx(1.0 / math.factorial(k))
        assert pts.shape == (6**k, k)
        assert (pts >= 0).all() and pts.sum(axis=1).max() <= 1.0 + 1e-12


def test_quadrature_polynomial_exactness():
    pts, wts = simplex_quadrature(1, 4)
    x = pts[:, 0]
    assert (wts * x**2).sum() == pytest.approx(1.0 / 3.0)
    assert (wts * x**7).sum() == pytest.approx(1.0 / 8.0)
    pts, wts = simplex_quadrature(2, 5)
    lam1 = pts[:, 0]
    lam2 = pts[:, 1]
    assert (wts * lam1).sum() == pytest.approx(1.0 / 6.0)
    assert (wts * lam1 * lam2).sum() == pytest.approx(1.0 / 24.0)


def test_quadrature_order_validation_and_cache():
    with pytest.raises(AnalyticError):
        simplex_quadrature(1, 0)
    a = simplex_quadrature(2, 3)
    b = simplex_quadrature(2, 3)
    assert a[0] is b[0]


# -- loops and slices -------------------------------------------------------------


def test_torus2_axis_loops_are_subcomplexes(torus2_4chart):
    K = torus2_4chart.covered.complex
    for axis in (0, 1):
        for at in (0, 1, 2, 3):
            L = torus2_axis_loop(axis, at)
            assert L.dim == 1 and L.closed
            for t in L.tops:
                assert K.has(t)
    with pytest.raises(AnalyticError):
        torus2_axis_loop(2, 0)


def test_torus3_plane_slices_are_subcomplexes(torus3_8chart):
    K = torus3_8chart.covered.complex
    S = torus3_plane_slice(1)
    assert S.dim == 2 and S.closed
    assert S.euler_characteristic() == 0
    for t in S.tops:
        assert K.has(t)


# -- subdivision -------------------------------------------------------------------


def test_subdivide_geometry_structure(circle_2arc):
    g2 = subdivide_geometry(circle_2arc)
    K = circle_2arc.covered.complex
    K2 = g2.covered.complex
    assert len(K2.tops) == 2 * len(K.tops)
    assert g2.parent is circle_2arc
    assert g2.coords == circle_2arc.coords
    assert K2.closed


def test_subdivide_geometry_averages_lifts(circle_2arc):
    g = circle_2arc
    g2 = subdivide_geometry(g)
    K = g.covered.complex
    # pick a parent edge and one chart that lifts it
    edge = K.tops[0]
    chart = next(a for a in g.covered.admissible_of(edge) if (a, edge) in g.lifts)
    rows = g.lifts[(chart, edge)]
    midpoint = tuple((rows[0][c] + rows[1][c]) / 2 for c in range(len(g.coords)))
    # find the subdivided vertex carried by that edge
    candidates = [
        v
        for v in g2.covered.complex.simplices(0)
        if (chart, v) in g2.lifts and g2.lifts[(chart, v)][0] == midpoint
    ]
    assert candidates


def test_subdivide_geometry_twice(annulus):
    g2 = subdivide_geometry(annulus)
    g3 = subdivide_geometry(g2)
    assert len(g3.covered.complex.tops) == 6 * len(g2.covered.complex.tops)
    assert g3.parent is g2
    assert not g3.covered.complex.closed
