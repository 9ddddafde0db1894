import math

import networkx as nx
import pytest

from polyshear import fixtures
from polyshear.geodesics import (
    cut_locus,
    find_generic_point,
    fundamental_triangulation,
    geodesic_distance,
    is_generic,
    shortest_path,
    star_unfold,
    triangle_area,
)
from polyshear.surface import SurfacePoint

PI = math.pi


def test_cube_adjacent_vertices():
    s = fixtures.cube()
    paths = shortest_path(s, s.vertex_point(0), s.vertex_point(1))
    assert paths[0].length == pytest.approx(1.0, abs=1e-12)
    assert paths[0].is_segment


def test_doubly_covered_square_opposite_corners_tie():
    s = fixtures.doubly_covered_square()
    paths = shortest_path(s, s.vertex_point(0), s.vertex_point(2))
    assert len(paths) == 2
    for p in paths:
        assert p.length == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_tetrahedron_vertex_to_opposite_centroid():
    s = fixtures.regular_tetrahedron()
    c = s.faces[0][0]
    # face not containing c
    f = next(f for f in range(s.n_faces) if c not in s.faces[f])
    centroid = SurfacePoint(f, (1 / 3, 1 / 3, 1 / 3))
    d = geodesic_distance(s, s.vertex_point(c), centroid)
    # unfold the three faces around c: c sits at the apex of three unit
    # equilateral triangles; the opposite face's centroid lifts to distance
    # 1/sqrt(3) from the near edge... exact value via planar unfolding:
    # place edge (a,b) of the far face; c unfolds across it; distance from
    # the unfolded c to the centroid equals sqrt(1 - 2*(1/3)*h) with
    # h = sqrt(3)/2: dist^2 = (h + h/3)^2 + 0 = (2h + ... compute directly:
    expected = _tetra_vertex_centroid_distance()
    assert d == pytest.approx(expected, rel=1e-9)


def _tetra_vertex_centroid_distance():
    # far face in the plane: a=(0,0), b=(1,0), p=(1/2, sqrt(3)/2); centroid g.
    # c unfolds across edge ab to (1/2, -sqrt(3)/2).
    h = math.sqrt(3.0) / 2.0
    g = (0.5, h / 3.0)
    c = (0.5, -h)
    return math.hypot(g[0] - c[0], g[1] - c[1])


def test_tetra_centroid_has_three_ties_to_apex():
    # by symmetry the centroid sees the opposite vertex through all 3 edges
    s = fixtures.regular_tetrahedron()
    c = s.faces[0][0]
    f = next(f for f in range(s.n_faces) if c not in s.faces[f])
    centroid = SurfacePoint(f, (1 / 3, 1 / 3, 1 / 3))
    paths = shortest_path(s, centroid, s.vertex_point(c))
    assert len(paths) == 3


def test_triangle_inequality_random_triples():
    s = fixtures.cube()
    import random

    rng = random.Random(7)
    for _ in range(8):
        pts = []
        for _ in range(3):
            f = rng.randrange(s.n_faces)
            r1, r2 = rng.random(), rng.random()
            u = math.sqrt(r1)
            pts.append(SurfacePoint(f, (1 - u, u * (1 - r2), u * r2)))
        a, b, c = pts
        dab = geodesic_distance(s, a, b)
        dbc = geodesic_distance(s, b, c)
        dac = geodesic_distance(s, a, c)
        assert dac <= dab + dbc + 1e-8


# ---------------------------------------------------------------------------
# star unfolding
# ---------------------------------------------------------------------------

def test_star_unfold_tetrahedron_from_vertex():
    s = fixtures.regular_tetrahedron()
    c = s.faces[0][0]
    star = star_unfold(s, s.vertex_point(c))
    assert star.m == 3
    # planar equilateral triangle of edge 2: images of c at the corners,
    # other vertices at edge midpoints
    assert star.polygon_area() == pytest.approx(math.sqrt(3.0), rel=1e-9)
    imgs = star.source_images
    for i in range(3):
        d = math.dist(imgs[i], imgs[(i + 1) % 3])
        assert d == pytest.approx(2.0, rel=1e-9)
    assert star.polygon_area() == pytest.approx(s.area(), rel=1e-8)


def test_star_unfold_cube_top_center():
    s = fixtures.cube()
    # center of the top face: top quad is split into faces 2 and 3
    x = SurfacePoint(2, _top_center_bary(s))
    star = star_unfold(s, x)
    assert star.m == 8
    assert star.polygon_area() == pytest.approx(6.0, rel=1e-8)
    assert star.shapely_polygon().is_valid  # simple polygon


def _top_center_bary(s):
    # face 2 of the cube fixture is half the top square; its hypotenuse
    # midpoint is the face center of the quad
    # top quad (4,5,6,7) -> triangles (4,5,6), (4,6,7); center = midpoint of 4-6
    assert s.faces[2] == (4, 5, 6)
    return (0.5, 0.0, 0.5)


def test_star_unfold_doubly_covered_square_corner():
    s = fixtures.doubly_covered_square()
    star = star_unfold(s, s.vertex_point(0))
    assert star.m == 3
    assert star.polygon_area() == pytest.approx(2.0, rel=1e-9)


def test_star_unfold_strict_rejects_ties():
    from polyshear.errors import NonGenericSource

    s = fixtures.doubly_covered_square()
    with pytest.raises(NonGenericSource):
        star_unfold(s, s.vertex_point(0), strict=True)


# ---------------------------------------------------------------------------
# cut locus
# ---------------------------------------------------------------------------

def test_cut_locus_tetrahedron_from_vertex():
    s = fixtures.regular_tetrahedron()
    c = s.faces[0][0]
    cl = cut_locus(s, s.vertex_point(c))
    g = cl.graph
    assert nx.is_tree(g)
    leaves = cl.leaves()
    assert len(leaves) == 3
    leaf_vs = {g.nodes[n]["vertex"] for n in leaves}
    assert leaf_vs == set(s.vertex_ids) - {c}
    rams = cl.ramification_points()
    assert len(rams) == 1
    # Y-tree: center at distance 1/sqrt(3) from each far vertex
    r = rams[0]
    for n in leaves:
        assert g.edges[r, n]["length"] == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-9)


def test_cut_locus_doubly_covered_square_from_corner():
    s = fixtures.doubly_covered_square()
    cl = cut_locus(s, s.vertex_point(0))
    g = cl.graph
    assert nx.is_tree(g)
    # path along the two far rim edges: corner 1 - corner 2 - corner 3
    assert len(cl.leaves()) == 2
    leaf_vs = {g.nodes[n]["vertex"] for n in cl.leaves()}
    assert leaf_vs == {1, 3}
    assert cl.total_length() == pytest.approx(2.0, rel=1e-9)
    degs = sorted(d for _, d in g.degree)
    assert degs == [1, 1, 2]


def test_cut_locus_cube_generic_point():
    s = fixtures.cube()
    x = find_generic_point(s, seed=3)
    cl = cut_locus(s, x)
    g = cl.graph
    assert nx.is_tree(g)
    on_tree = {d["vertex"] for _, d in g.nodes(data=True) if d["vertex"] is not None}
    assert on_tree == set(s.vertex_ids)
    # every leaf is a vertex of the surface
    for n in cl.leaves():
        assert g.nodes[n]["vertex"] is not None
    # ramification sector angles < pi: degree >= 3 and planar angles
    for n in cl.ramification_points():
        nbrs = list(g.neighbors(n))
        if len(nbrs) < 3:
            continue
        p = g.nodes[n]["planar"]
        angs = sorted(
            math.atan2(g.nodes[q]["planar"][1] - p[1], g.nodes[q]["planar"][0] - p[0])
            for q in nbrs
        )
        for i in range(len(angs)):
            gap = (angs[(i + 1) % len(angs)] - angs[i]) % (2 * PI)
            assert gap < PI + 1e-9


def test_cut_locus_degree_matches_tie_count():
    s = fixtures.regular_tetrahedron()
    c = s.faces[0][0]
    cl = cut_locus(s, s.vertex_point(c))
    g = cl.graph
    x = s.vertex_point(c)
    for n, d in g.nodes(data=True):
        y = d["surface"]
        ties = shortest_path(s, x, y)
        assert len(ties) == g.degree[n]


# ---------------------------------------------------------------------------
# fundamental triangulation
# ---------------------------------------------------------------------------

def test_fundamental_triangulation_tetrahedron():
    s = fixtures.regular_tetrahedron()
    c = s.faces[0][0]
    pairs = fundamental_triangulation(s, s.vertex_point(c))
    assert len(pairs) == 3
    total = 0.0
    for t1, t2 in pairs:
        assert triangle_area(t1) == pytest.approx(triangle_area(t2), rel=1e-9)
        assert _tri_sides(t1) == pytest.approx(_tri_sides(t2), rel=1e-9)
        total += triangle_area(t1) + triangle_area(t2)
    assert total == pytest.approx(s.area(), rel=1e-8)


def _tri_sides(t):
    a, b, c = t
    return sorted([math.dist(a, b), math.dist(b, c), math.dist(c, a)])


def test_fundamental_triangulation_cube_area():
    s = fixtures.cube()
    x = find_generic_point(s, seed=3)
    pairs = fundamental_triangulation(s, x)
    total = sum(triangle_area(t1) + triangle_area(t2) for t1, t2 in pairs)
    assert total == pytest.approx(6.0, rel=1e-6)


# ---------------------------------------------------------------------------
# generic points
# ---------------------------------------------------------------------------

def test_find_generic_point_cube_deterministic():
    s = fixtures.cube()
    x1 = find_generic_point(s, seed=11)
    x2 = find_generic_point(s, seed=11)
    assert x1 == x2
    assert is_generic(s, x1)


def test_rim_midpoint_of_doubly_covered_square_not_generic():
    s = fixtures.doubly_covered_square()
    # a rim edge midpoint reaches the two far corners through either cover
    assert s.faces[0] == (0, 1, 2)
    mid = s.edge_point(0, 0, 0.5)
    assert not is_generic(s, mid)
    assert len(shortest_path(s, mid, s.vertex_point(2))) == 2
