import json
import math

import pytest

from polyshear import fixtures
from polyshear.canonical import isometric
from polyshear.errors import AngleNotAchievable, NoEmbedding, NotAPyramid
from polyshear.surface import IntrinsicSurface, build_doubly_covered_polygon
from polyshear.surgery import cut_and_insert_lens
from polyshear.tailoring import (
    TailorLog,
    build_crest,
    excise_digon,
    plan_digon,
    recognize_pyramid,
    reverse_log,
    seal_graph_check,
    tailor_pyramid,
)

PI = math.pi
SQ3 = math.sqrt(3.0)


def unit_tetrahedron():
    verts = [
        (0.0, 0.0, 0.0),
        (1.0, 0.0, 0.0),
        (0.5, SQ3 / 2.0, 0.0),
        (0.5, SQ3 / 6.0, math.sqrt(2.0 / 3.0)),
    ]
    faces = [(0, 2, 1), (0, 1, 3), (1, 2, 3), (2, 0, 3)]
    from polyshear.surface import build_from_mesh

    return build_from_mesh(verts, faces)


# ---------------------------------------------------------------------------
# digon planning and excision
# ---------------------------------------------------------------------------

def test_plan_digon_tetrahedron_quantities():
    s = unit_tetrahedron()
    d = plan_digon(s, s.vertex_point(2), 3, PI / 3.0)
    assert d.alpha_x == pytest.approx(PI / 3.0, abs=1e-12)
    assert d.alpha_y == pytest.approx(2.0 * PI / 3.0, abs=1e-9)
    assert d.r == pytest.approx(1.0, abs=1e-12)
    # cone half-angle at a tetra vertex is pi/2, so |vy| = tan(pi/6)
    assert d.s == pytest.approx(1.0 / SQ3, rel=1e-9)
    assert d.side_length == pytest.approx(2.0 / SQ3, rel=1e-9)
    assert d.left.length == pytest.approx(d.right.length, rel=1e-9)


def test_plan_digon_rejects_angle_at_or_above_curvature():
    s = unit_tetrahedron()
    with pytest.raises(AngleNotAchievable):
        plan_digon(s, s.vertex_point(2), 3, PI)  # curvature at 3 is exactly pi
    with pytest.raises(AngleNotAchievable):
        plan_digon(s, s.vertex_point(2), 3, 0.0)


def test_excise_digon_tetrahedron_gives_doubly_covered_kite():
    s = unit_tetrahedron()
    d = plan_digon(s, s.vertex_point(2), 3, PI / 3.0)
    res = excise_digon(s, d)
    kite = build_doubly_covered_polygon([
        (0.0, 0.0),
        (SQ3 / 2.0, -0.5),
        (2.0 / SQ3, 0.0),
        (SQ3 / 2.0, 0.5),
    ])
    assert isometric(res.surface, kite, rel=1e-6)


def test_excise_digon_area_and_curvature_bookkeeping():
    s = unit_tetrahedron()
    d = plan_digon(s, s.vertex_point(2), 3, PI / 3.0)
    res = excise_digon(s, d)
    out = res.surface
    # area drops by the digon area: two triangles with legs r, s and
    # included angle equal to the cone half-angle (pi/2 here)
    digon_area = d.r * d.s * math.sin(PI / 2.0)
    assert s.area() - out.area() == pytest.approx(digon_area, rel=1e-9)
    # Gauss-Bonnet is preserved and the anchor curvatures shift by alpha
    total = sum(out.curvature(v) for v in out.vertex_ids)
    assert total == pytest.approx(4.0 * PI, abs=1e-9)
    assert out.curvature(res.record.x_id) == pytest.approx(
        s.curvature(2) + d.alpha_x, abs=1e-9)
    assert out.curvature(res.record.y_id) == pytest.approx(d.alpha_y, abs=1e-9)
    assert res.record.v_id not in out.vertex_ids
    assert res.seal.length == pytest.approx(d.side_length, rel=1e-9)


# ---------------------------------------------------------------------------
# pyramid recognition
# ---------------------------------------------------------------------------

def test_recognize_pyramid_finds_apex_from_coordinates():
    p = fixtures.random_pyramid(3)
    shape = recognize_pyramid(p)
    assert shape.apex == max(p.vertex_ids)
    assert sorted(shape.base_ids) == sorted(set(p.vertex_ids) - {shape.apex})
    # base polygon is closed up to relabeling and ccw
    area = 0.0
    pts = shape.base_pts
    for i in range(len(pts)):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % len(pts)]
        area += x0 * y1 - x1 * y0
    assert area > 0


def test_recognize_pyramid_intrinsic_needs_declared_apex():
    p = fixtures.random_pyramid(3)
    bare = IntrinsicSurface(p.faces, p.lengths, p.gluing)
    with pytest.raises(NotAPyramid):
        recognize_pyramid(bare)
    shape = recognize_pyramid(bare, apex=max(p.vertex_ids))
    assert shape.apex == max(p.vertex_ids)


# ---------------------------------------------------------------------------
# tailoring a pyramid to its doubly covered base
# ---------------------------------------------------------------------------

def test_tailor_hexagonal_pyramid_alpha_schedule():
    p = fixtures.hexagonal_pyramid_70_70_40()
    res = tailor_pyramid(p, apex=max(p.vertex_ids))
    # each digon leaves alpha_y = remaining apex curvature after the step:
    # the apex starts at 120 degrees and each anchor eats 20 more degrees
    alphas = [math.degrees(r.alpha_y) for r in res.log.records]
    assert alphas == pytest.approx([100.0, 80.0, 60.0, 40.0, 20.0], abs=1e-7)
    target = fixtures.doubly_covered_regular_hexagon()
    assert isometric(res.surface, target, rel=1e-6)
    report = seal_graph_check(res.seal_graph)
    assert report.ok, report.details
    assert set(report.properties) == {
        "tree", "containment", "anchors", "increasing_indices",
        "convex_paths", "left_termination", "root_segment",
    }


def test_tailor_cube_corner_two_digons():
    p = fixtures.cube_corner_pyramid()
    res = tailor_pyramid(p, apex=max(p.vertex_ids))
    assert len(res.log.records) == 2
    side = math.sqrt(2.0)
    target = build_doubly_covered_polygon(
        fixtures.regular_polygon(3, side / SQ3))
    assert isometric(res.surface, target, rel=1e-6)
    assert seal_graph_check(res.seal_graph).ok


def test_tailor_rectangle_pyramid():
    base = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]
    p = fixtures.pyramid(base, (0.7, 0.4, 0.9))
    res = tailor_pyramid(p)
    target = build_doubly_covered_polygon(base)
    assert isometric(res.surface, target, rel=1e-6)
    assert seal_graph_check(res.seal_graph).ok


def test_tailor_random_pyramids_and_seal_properties():
    for seed in (2, 7, 13):
        p = fixtures.random_pyramid(seed)
        res = tailor_pyramid(p, apex=max(p.vertex_ids))
        report = seal_graph_check(res.seal_graph)
        assert report.ok, (seed, report.properties, report.details)
        target = build_doubly_covered_polygon(list(res.shape.base_pts))
        assert isometric(res.surface, target, rel=1e-5), seed


def test_non_ccw_order_checks_tree_only():
    p = fixtures.hexagonal_pyramid_70_70_40()
    shape = recognize_pyramid(p, apex=max(p.vertex_ids))
    ids = list(shape.base_ids)
    order = ids[2:] + ids[:2]  # rotated: still a base cycle, different root
    res = tailor_pyramid(p, order=order, apex=max(p.vertex_ids))
    report = seal_graph_check(res.seal_graph)
    assert set(report.properties) == {"tree"}
    assert report.properties["tree"]


def test_tailor_log_json_round_trip():
    p = fixtures.cube_corner_pyramid()
    res = tailor_pyramid(p, apex=max(p.vertex_ids))
    log2 = TailorLog.from_json_obj(json.loads(res.log.to_json()))
    assert log2 == res.log


def test_seal_graph_svg_renders():
    p = fixtures.cube_corner_pyramid()
    res = tailor_pyramid(p, apex=max(p.vertex_ids))
    svg = res.seal_graph.to_svg()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


# ---------------------------------------------------------------------------
# log reversal
# ---------------------------------------------------------------------------

def test_reverse_log_round_trip():
    p = fixtures.random_pyramid(1)
    res = tailor_pyramid(p, apex=max(p.vertex_ids))
    back = reverse_log(res.surface, res.log)
    assert isometric(back, p, rel=1e-5)


def test_lens_insertions_turn_hexagon_into_triangle():
    # insert the three cut corners back into a doubly covered unit hexagon:
    # each lens is equilateral with side 1, anchored on an alternate rim edge
    s = fixtures.doubly_covered_regular_hexagon()
    for a, b in ((0, 1), (2, 3), (4, 5)):
        s, _, _ = cut_and_insert_lens(s, [a, b], 1.0, 1.0)
    target = build_doubly_covered_polygon(fixtures.regular_polygon(3, SQ3))
    assert isometric(s, target, rel=1e-9)


# ---------------------------------------------------------------------------
# crests
# ---------------------------------------------------------------------------

def test_build_crest_pentagon_pyramid():
    base = fixtures.regular_polygon(5, 1.0)
    p = fixtures.pyramid(base, (0.1, 0.05, 0.8))
    crest = build_crest(p)
    assert crest.vbar_in_base
    assert sum(crest.turn_angles) == pytest.approx(crest.nu, abs=1e-9)
    # the lifted triangles and the crest tile the opened lateral cone
    from shapely.geometry import Polygon

    cone = Polygon(list(crest.layout) + [(0.0, 0.0)])
    covered = sum(Polygon(t).area for t in crest.triangles)
    assert covered + crest.area() == pytest.approx(cone.area, rel=1e-6)
    assert crest.area() > 0.0


def test_build_crest_slanted_apex_clips_triangles():
    base = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]
    p = fixtures.pyramid(base, (3.0, 0.5, 0.7))  # apex projects outside
    crest = build_crest(p)
    assert not crest.vbar_in_base
    assert sum(crest.turn_angles) == pytest.approx(crest.nu, abs=1e-9)
    assert len(crest.triangles) < len(base) + 1


def test_build_crest_requires_embedding():
    p = fixtures.random_pyramid(2)
    bare = IntrinsicSurface(p.faces, p.lengths, p.gluing)
    with pytest.raises(NoEmbedding):
        build_crest(bare)
