"""Shortest paths, star unfoldings, and cut loci on intrinsic surfaces.

Shortest paths are found by exhaustive face-sequence unfolding with
best-first pruning: each search state is an unfolded face chain together
with the cone of directions (at the source image) that still passes through
every crossed edge.  This is quadratic-ish but exact at desk scale and
reports all ties, which the tailoring and merging layers need.
"""

from __future__ import annotations

import heapq
import itertools
import json
import math
import random
from dataclasses import dataclass

import networkx as nx
from shapely.geometry import LineString, Point, Polygon

from .errors import ExhaustedAttempts, NonGenericSource
from .surface import (
    TWO_PI,
    GeodesicPath,
    IntrinsicSurface,
    SurfacePoint,
    _clamp_bary,
    _cross,
    _dist,
    _norm,
    _sub,
    path_direction_at,
)
from .tolerances import tol

_DIR_EPS = 1e-9


def _unit(v):
    n = math.hypot(v[0], v[1])
    return (v[0] / n, v[1] / n)


def _seg_point_dist(p, a, b):
    e = _sub(b, a)
    L2 = e[0] * e[0] + e[1] * e[1]
    if L2 == 0.0:
        return _dist(p, a)
    t = ((p[0] - a[0]) * e[0] + (p[1] - a[1]) * e[1]) / L2
    t = min(1.0, max(0.0, t))
    return _dist(p, (a[0] + t * e[0], a[1] + t * e[1]))


def _cone_from_segment(apex, a, b):
    """Cone of directions from apex through segment ab, as (right, left)."""
    da, db = _sub(a, apex), _sub(b, apex)
    na, nb = _norm(da), _norm(db)
    if na < 1e-300 or nb < 1e-300:
        return None
    da = (da[0] / na, da[1] / na)
    db = (db[0] / nb, db[1] / nb)
    c = _cross(da, db)
    if c > _DIR_EPS:
        return (da, db)
    if c < -_DIR_EPS:
        return (db, da)
    return None


def _dir_in_cone(d, cone, eps=_DIR_EPS):
    return _cross(cone[0], d) >= -eps and _cross(d, cone[1]) >= -eps


def _cone_intersect(c1, c2):
    r = c2[0] if _cross(c1[0], c2[0]) >= 0.0 else c1[0]
    l = c2[1] if _cross(c2[1], c1[1]) >= 0.0 else c1[1]
    if _cross(r, l) < -_DIR_EPS:
        return None
    if not (_dir_in_cone(r, c1) and _dir_in_cone(r, c2)):
        return None
    if not (_dir_in_cone(l, c1) and _dir_in_cone(l, c2)):
        return None
    return (r, l)


def _cone_clip_distance(apex, a, b, cone):
    """Distance from apex to the part of segment ab visible within cone."""
    e = _sub(b, a)
    ts = [0.0, 1.0]
    for dirv in cone:
        denom = _cross(dirv, e)
        if abs(denom) > 1e-300:
            u = _cross(_sub(a, apex), dirv) / denom
            if 0.0 < u < 1.0:
                ts.append(u)
    ts.sort()
    best = None
    for t0, t1 in zip(ts, ts[1:]):
        tm = 0.5 * (t0 + t1)
        p = (a[0] + tm * e[0], a[1] + tm * e[1])
        d = _sub(p, apex)
        n = _norm(d)
        if n < 1e-300:
            continue
        if _dir_in_cone((d[0] / n, d[1] / n), cone, eps=1e-7):
            p0 = (a[0] + t0 * e[0], a[1] + t0 * e[1])
            p1 = (a[0] + t1 * e[0], a[1] + t1 * e[1])
            dd = _seg_point_dist(apex, p0, p1)
            best = dd if best is None else min(best, dd)
    return best


def _edge_key(s: IntrinsicSurface, f, side):
    """Orientation-free identifier of the glued edge (f, side)."""
    return min((f, side), s.gluing[(f, side)])


def _anchor_faces(s: IntrinsicSurface, p: SurfacePoint):
    """All (face, bary) placements of p, one per face it lies on."""
    kind, data = s.point_kind(p)
    if kind == "face":
        return [(p.face, p.bary)]
    if kind == "edge":
        f, side, t = data
        f2, s2, t2 = s.mirror_edge_point(f, side, t)
        out = [(f, s.edge_point(f, side, t).bary)]
        if f2 != f or s2 != side:
            out.append((f2, s.edge_point(f2, s2, t2).bary))
        return out
    rec = s.vertex(data)
    out = []
    seen = set()
    for wf, wc in rec.wedges:
        if (wf, wc) in seen:
            continue
        seen.add((wf, wc))
        bary = [0.0, 0.0, 0.0]
        bary[wc] = 1.0
        out.append((wf, tuple(bary)))
    return out


@dataclass(frozen=True)
class _Candidate:
    length: float
    chain: tuple      # ((face, pts), ...)
    sides: tuple      # crossed side index per chain face except the last
    pa: tuple
    pb: tuple
    bary_a: tuple
    bary_b: tuple


def shortest_path(s: IntrinsicSurface, a: SurfacePoint, b: SurfacePoint,
                  max_states: int = 500_000):
    """All globally shortest geodesics from a to b, sorted by length.

    Ties (distinct geodesics whose lengths agree within ten relative length
    tolerances) are all returned; the list always has at least one entry.
    """
    if s.same_point(a, b):
        raise ValueError("endpoints coincide")
    scale = s.scale
    candidates = []
    best = math.inf

    def try_target(face, pts, apex, bary_a, chain, sides, cone):
        nonlocal best
        try:
            bb = s.point_bary_in_face(b, face)
        except ValueError:
            return
        pb = s.bary_to_planar(pts, bb)
        d = _sub(pb, apex)
        n = _norm(d)
        if n < 1e-300:
            return
        if cone is not None and not _dir_in_cone((d[0] / n, d[1] / n), cone, eps=1e-7):
            return
        tie_eps = 10 * tol().len_rel * max(scale, n)
        if n <= best + tie_eps:
            candidates.append(_Candidate(n, chain, sides, apex, pb, bary_a, bb))
            best = min(best, n)

    heap = []
    counter = itertools.count()
    for fa, bary_a in _anchor_faces(s, a):
        pts = s.layout_face(fa)
        apex = s.bary_to_planar(pts, bary_a)
        chain = ((fa, pts),)
        try_target(fa, pts, apex, bary_a, chain, (), None)
        for side in range(3):
            cone = _cone_from_segment(apex, pts[side], pts[(side + 1) % 3])
            if cone is None:
                continue
            lb = _seg_point_dist(apex, pts[side], pts[(side + 1) % 3])
            heapq.heappush(heap, (lb, next(counter), fa, pts, side, cone, apex, bary_a, chain, ()))

    popped = 0
    while heap:
        lb, _, face, pts, side, cone, apex, bary_a, chain, sides = heapq.heappop(heap)
        tie_eps = 10 * tol().len_rel * max(scale, best if best < math.inf else scale)
        if lb > best + tie_eps:
            break
        popped += 1
        if popped > max_states:
            raise ExhaustedAttempts(f"shortest path search exceeded {max_states} states")
        f2, pts2 = s.place_neighbor(face, side, pts)
        entry_side = s.gluing[(face, side)][1]
        chain2 = chain + ((f2, pts2),)
        sides2 = sides + (side,)
        try_target(f2, pts2, apex, bary_a, chain2, sides2, cone)
        for s2 in range(3):
            if s2 == entry_side:
                continue
            seg_cone = _cone_from_segment(apex, pts2[s2], pts2[(s2 + 1) % 3])
            if seg_cone is None:
                continue
            cone2 = _cone_intersect(cone, seg_cone)
            if cone2 is None:
                continue
            lb2 = _cone_clip_distance(apex, pts2[s2], pts2[(s2 + 1) % 3], cone2)
            if lb2 is None or lb2 > best + tie_eps:
                continue
            # a shortest path crosses any mesh edge a bounded number of
            # times; without the cap the search wraps forever around flat
            # vertices, whose visibility cone never shrinks
            key = _edge_key(s, f2, s2)
            wraps = sum(1 for (cf, _), cs in zip(chain2, sides2)
                        if _edge_key(s, cf, cs) == key)
            if wraps >= 4:
                continue
            heapq.heappush(heap, (max(lb, lb2), next(counter), f2, pts2, s2,
                                  cone2, apex, bary_a, chain2, sides2))

    if not candidates:
        raise ExhaustedAttempts("no path found (disconnected gluing?)")
    tie_eps = 10 * tol().len_rel * max(scale, best)
    finals = [c for c in candidates if c.length <= best + tie_eps]
    finals.sort(key=lambda c: c.length)
    # dedupe by initial direction in the source's angular chart
    total = s.total_angle_at(a)
    kept = []
    kept_dirs = []
    for c in finals:
        d = _sub(c.pb, c.pa)
        local = math.atan2(d[1], d[0])
        g = s.direction_to_global(a, c.chain[0][0], local)
        dup = False
        for g0 in kept_dirs:
            diff = abs(g - g0) % total
            if min(diff, total - diff) < 1e-7:
                dup = True
                break
        if not dup:
            kept.append(c)
            kept_dirs.append(g)
    return [_build_path(s, c) for c in kept]


def _build_path(s: IntrinsicSurface, c: _Candidate) -> GeodesicPath:
    planar = [c.pa]
    segments = []
    v = _sub(c.pb, c.pa)
    cur = c.pa
    for (face, pts), side in zip(c.chain[:-1], c.sides):
        a, b = pts[side], pts[(side + 1) % 3]
        e = _sub(b, a)
        denom = _cross(v, e)
        t = _cross(_sub(a, c.pa), e) / denom
        xp = (c.pa[0] + t * v[0], c.pa[1] + t * v[1])
        segments.append((face, _clamp_bary(s.planar_to_bary(pts, cur)),
                         _clamp_bary(s.planar_to_bary(pts, xp))))
        planar.append(xp)
        cur = xp
    face, pts = c.chain[-1]
    segments.append((face, _clamp_bary(s.planar_to_bary(pts, cur)), _clamp_bary(c.bary_b)))
    planar.append(c.pb)
    return GeodesicPath(tuple(segments), c.length, tuple(planar), is_segment=True)


def geodesic_distance(s: IntrinsicSurface, a: SurfacePoint, b: SurfacePoint) -> float:
    return shortest_path(s, a, b)[0].length


def initial_direction(s: IntrinsicSurface, path: GeodesicPath, at: SurfacePoint) -> float:
    """Global angle of the path at its endpoint `at`, pointing away from it."""
    f, local = path_direction_at(s, path, at)
    return s.direction_to_global(at, f, local)


# ---------------------------------------------------------------------------
# star unfolding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StarUnfolding:
    """Planar development of the surface cut along geosegs from the source.

    boundary alternates source images and vertex images, ccw; the polygon is
    simple and has the same area as the surface.  Sector i of the source
    (between consecutive cuts) maps affinely onto the plane at source image
    i; `locate` inverts that map by tracing.
    """

    source: SurfacePoint
    vertex_order: tuple      # vertex ids in ccw cut order around the source
    cut_lengths: tuple
    cut_angles: tuple        # global angle of each cut at the source
    boundary: tuple          # 2m planar points: X_1, V_1, X_2, V_2, ...
    cuts: tuple              # GeodesicPath per vertex, same order
    orientation: float       # +1 if surface ccw maps to planar ccw at images

    @property
    def m(self):
        return len(self.vertex_order)

    @property
    def source_images(self):
        return tuple(self.boundary[2 * i] for i in range(self.m))

    @property
    def vertex_images(self):
        return tuple(self.boundary[2 * i + 1] for i in range(self.m))

    def polygon_area(self) -> float:
        return _shoelace(self.boundary)

    def shapely_polygon(self) -> Polygon:
        return Polygon(self.boundary)

    def to_json_obj(self):
        return {
            "source": {"face": self.source.face, "bary": list(self.source.bary)},
            "vertex_order": list(self.vertex_order),
            "cut_lengths": list(self.cut_lengths),
            "cut_angles": list(self.cut_angles),
            "boundary": [list(p) for p in self.boundary],
            "area": self.polygon_area(),
        }

    def to_json(self):
        return json.dumps(self.to_json_obj(), indent=2)

    def to_svg(self, cut_locus=None) -> str:
        from .svgutil import SvgFigure

        fig = SvgFigure()
        fig.polygon(self.boundary, stroke="black")
        for j in range(self.m):
            fig.dot(self.boundary[2 * j], color="#cc3333")
            fig.dot(self.boundary[2 * j + 1], color="#3333cc")
        if cut_locus is not None:
            for u, v in cut_locus.graph.edges:
                fig.segment(cut_locus.graph.nodes[u]["planar"],
                            cut_locus.graph.nodes[v]["planar"],
                            stroke="#118811", dashed=True)
        return fig.render()


def _shoelace(pts):
    a = 0.0
    n = len(pts)
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        a += x0 * y1 - x1 * y0
    return 0.5 * a


def star_unfold(s: IntrinsicSurface, x: SurfacePoint, strict: bool = False) -> StarUnfolding:
    """Cut the surface along a geoseg from x to every vertex and develop it.

    With strict=True a tie (two shortest geosegs to some vertex) raises
    NonGenericSource; by default the smallest-angle geoseg is used, which
    keeps symmetric degenerate fixtures usable.
    """
    kind, data = s.point_kind(x)
    skip = {data} if kind == "vertex" else set()
    total = s.total_angle_at(x)
    cuts = []
    for v in s.vertex_ids:
        if v in skip:
            continue
        paths = shortest_path(s, x, s.vertex_point(v))
        if strict and len(paths) > 1:
            raise NonGenericSource(f"{len(paths)} shortest geosegs from x to vertex {v}")
        for p in paths:
            cuts.append((v, p, initial_direction(s, p, x)))
    # one cut per vertex: keep the smallest initial angle among ties
    chosen = {}
    for v, p, g in cuts:
        if v not in chosen or g < chosen[v][1]:
            chosen[v] = (p, g)
    order = sorted(chosen, key=lambda v: chosen[v][1])
    m = len(order)
    angles = [chosen[v][1] for v in order]
    lengths = [chosen[v][0].length for v in order]
    thetas = [s.vertex(v).total_angle for v in order]
    sectors = [(angles[(i + 1) % m] - angles[i]) % total for i in range(m)]
    if m == 1:
        sectors = [total]
    # boundary walk: X_1 (sector m), V_1 (theta_1), X_2 (sector 1), V_2, ...
    pts = []
    pos = (0.0, 0.0)
    heading = 0.0
    for i in range(m):
        pts.append(pos)  # X_{i+1}
        pos = (pos[0] + lengths[i] * math.cos(heading),
               pos[1] + lengths[i] * math.sin(heading))
        heading += math.pi - thetas[i]
        pts.append(pos)  # V_{i+1}
        pos = (pos[0] + lengths[i] * math.cos(heading),
               pos[1] + lengths[i] * math.sin(heading))
        heading += math.pi - sectors[i]
    close_err = _dist(pos, pts[0])
    if close_err > 1e-6 * max(s.scale, max(lengths)):
        raise AssertionError(f"star unfolding failed to close (err {close_err})")
    if _shoelace(pts) < 0:
        # walked cw: reflect so the stored polygon is ccw
        pts = [(p[0], -p[1]) for p in pts]
    star = StarUnfolding(
        source=x,
        vertex_order=tuple(order),
        cut_lengths=tuple(lengths),
        cut_angles=tuple(angles),
        boundary=tuple(pts),
        cuts=tuple(chosen[v][0] for v in order),
        orientation=1.0,
    )
    object.__setattr__(star, "_surface_total", total)
    return star


def _star_total(star: StarUnfolding) -> float:
    return getattr(star, "_surface_total")


def star_locate(s: IntrinsicSurface, star: StarUnfolding, p, image: int = None) -> SurfacePoint:
    """Fold a planar point of the star unfolding back onto the surface."""
    m = star.m
    total = _star_total(star)
    js = range(m) if image is None else [image]
    best = None
    for j in js:
        X = star.boundary[2 * j]
        d = _dist(p, X)
        if best is None or d < best[0]:
            best = (d, j, X)
    d, j, X = best
    if d <= tol().hit * s.scale:
        return SurfacePoint(star.source.face, star.source.bary)
    # sector bounds: cut (j-1) .. cut j in ccw surface order
    i = (j - 1) % m
    base = star.cut_angles[i]
    span = (star.cut_angles[j % m] - base) % total
    if span == 0.0:
        span = total
    vprev = star.boundary[(2 * j - 1) % (2 * m)]
    ref = math.atan2(vprev[1] - X[1], vprev[0] - X[0])
    vnext = star.boundary[2 * j + 1]
    refn = math.atan2(vnext[1] - X[1], vnext[0] - X[0])
    sigma = 1.0 if abs(((refn - ref) % TWO_PI) - span) < abs(((ref - refn) % TWO_PI) - span) else -1.0
    ang = math.atan2(p[1] - X[1], p[0] - X[0])
    rel = (sigma * (ang - ref)) % TWO_PI
    rel = min(max(rel, 0.0), span)
    g = (base + rel) % total
    path = s.trace_global(star.source, g, d)
    return path.end


# ---------------------------------------------------------------------------
# cut locus
# ---------------------------------------------------------------------------

@dataclass
class CutLocusTree:
    """The cut locus of a source point, as a tree drawn in the star unfolding.

    graph nodes carry attrs: planar (point), kind ('vertex'|'ramification'),
    vertex (id or None), surface (SurfacePoint).  Edges carry length and
    images (the pair of source-image indices whose bisector contains it).
    """

    source: SurfacePoint
    star: StarUnfolding
    graph: nx.Graph

    def leaves(self):
        return [n for n in self.graph.nodes if self.graph.degree[n] == 1]

    def ramification_points(self):
        return [n for n, d in self.graph.nodes(data=True) if d["kind"] == "ramification"]

    def total_length(self):
        return sum(d["length"] for _, _, d in self.graph.edges(data=True))

    def to_json_obj(self):
        return {
            "nodes": [
                {
                    "id": n,
                    "planar": list(d["planar"]),
                    "kind": d["kind"],
                    "vertex": d["vertex"],
                }
                for n, d in self.graph.nodes(data=True)
            ],
            "edges": [
                {"u": u, "v": v, "length": d["length"], "images": list(d["images"])}
                for u, v, d in self.graph.edges(data=True)
            ],
        }

    def to_json(self):
        return json.dumps(self.to_json_obj(), indent=2)


def voronoi_cells(star: StarUnfolding):
    """Voronoi cell of each source image, clipped to the unfolding polygon."""
    poly = star.shapely_polygon()
    images = star.source_images
    m = len(images)
    span = max(max(p[0] for p in star.boundary) - min(p[0] for p in star.boundary),
               max(p[1] for p in star.boundary) - min(p[1] for p in star.boundary))
    big = 10.0 * span + 1.0
    cells = []
    for i in range(m):
        cell = poly
        for j in range(m):
            if j == i or cell.is_empty:
                continue
            cell = cell.intersection(_halfplane(images[i], images[j], big))
        cells.append(cell)
    return cells


def _bisector_segment(a, b, big):
    """Long segment of the perpendicular bisector of ab, as a LineString."""
    mid = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
    d = _unit(_sub(b, a))
    t = (-d[1], d[0])
    return LineString([
        (mid[0] + big * t[0], mid[1] + big * t[1]),
        (mid[0] - big * t[0], mid[1] - big * t[1]),
    ])


def _halfplane(keep, other, big):
    """Polygon approximating the half-plane of points closer to keep."""
    mid = ((keep[0] + other[0]) / 2.0, (keep[1] + other[1]) / 2.0)
    d = _unit(_sub(other, keep))
    t = (-d[1], d[0])
    a = (mid[0] + big * t[0], mid[1] + big * t[1])
    b = (mid[0] - big * t[0], mid[1] - big * t[1])
    c = (b[0] - big * d[0], b[1] - big * d[1])
    e = (a[0] - big * d[0], a[1] - big * d[1])
    return Polygon([a, b, c, e])


def cut_locus(s: IntrinsicSurface, x: SurfacePoint, strict: bool = False) -> CutLocusTree:
    """Cut locus of x: the Voronoi diagram of the source images, folded back."""
    star = star_unfold(s, x, strict=strict)
    m = star.m
    scale = max(s.scale, max(star.cut_lengths))
    snap = 1e-7 * scale
    segs = []  # (p, q, (i, j))
    images = star.source_images
    span = max(max(p[0] for p in star.boundary) - min(p[0] for p in star.boundary),
               max(p[1] for p in star.boundary) - min(p[1] for p in star.boundary))
    big = 10.0 * span + 1.0
    poly = star.shapely_polygon()
    for i in range(m):
        for j in range(i + 1, m):
            if _dist(images[i], images[j]) <= snap:
                continue
            inter = _bisector_segment(images[i], images[j], big).intersection(poly)
            for k in range(m):
                if k in (i, j) or inter.is_empty:
                    continue
                inter = inter.intersection(_halfplane(images[i], images[k], big))
            for line in _iter_lines(inter):
                coords = list(line.coords)
                for p, q in zip(coords, coords[1:]):
                    if _dist(p, q) > snap:
                        segs.append((tuple(p), tuple(q), (i, j)))
    # split segments at vertex images lying in their interior
    vimgs = star.vertex_images
    out = []
    for p, q, ij in segs:
        pieces = [(p, q)]
        for w in vimgs:
            new = []
            for (a, b) in pieces:
                if (_seg_point_dist(w, a, b) <= snap
                        and _dist(w, a) > snap and _dist(w, b) > snap):
                    new.append((a, w))
                    new.append((w, b))
                else:
                    new.append((a, b))
            pieces = new
        out.extend((a, b, ij) for a, b in pieces)
    # cluster endpoints
    nodes = []  # representative planar points

    def node_id(p):
        for k, q in enumerate(nodes):
            if _dist(p, q) <= 2 * snap:
                return k
        nodes.append(p)
        return len(nodes) - 1

    g = nx.Graph()
    for a, b, ij in out:
        u, v = node_id(a), node_id(b)
        if u == v:
            continue
        L = _dist(nodes[u], nodes[v])
        if g.has_edge(u, v):
            continue
        g.add_edge(u, v, length=L, images=ij)
    # annotate nodes
    hit = max(10 * tol().hit * scale, 2 * snap)
    for n in g.nodes:
        p = nodes[n]
        vid = None
        for k, w in enumerate(vimgs):
            if _dist(p, w) <= hit:
                vid = star.vertex_order[k]
                p = w
                break
        nodes[n] = p
        g.nodes[n]["planar"] = p
        g.nodes[n]["vertex"] = vid
        g.nodes[n]["kind"] = "vertex" if vid is not None else "ramification"
        if vid is not None:
            g.nodes[n]["surface"] = s.vertex_point(vid)
        else:
            g.nodes[n]["surface"] = star_locate(s, star, p)
    return CutLocusTree(source=x, star=star, graph=g)


def _iter_lines(geom):
    if geom.is_empty:
        return
    if isinstance(geom, LineString):
        yield geom
        return
    if isinstance(geom, Point):
        return
    if hasattr(geom, "geoms"):
        for g in geom.geoms:
            yield from _iter_lines(g)


# ---------------------------------------------------------------------------
# fundamental triangulation
# ---------------------------------------------------------------------------

def fundamental_triangulation(s: IntrinsicSurface, x: SurfacePoint, strict: bool = False):
    """Flat triangles (source image, cut-locus edge) tiling the surface.

    Returns a list of pairs of planar triangles; the two triangles of a pair
    share their base (a cut-locus edge) and are congruent.
    """
    cl = cut_locus(s, x, strict=strict)
    imgs = cl.star.source_images
    pairs = []
    for u, v, d in cl.graph.edges(data=True):
        i, j = d["images"]
        p = cl.graph.nodes[u]["planar"]
        q = cl.graph.nodes[v]["planar"]
        pairs.append(((imgs[i], p, q), (imgs[j], p, q)))
    return pairs


def triangle_area(t):
    (ax, ay), (bx, by), (cx, cy) = t
    return 0.5 * abs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))


# ---------------------------------------------------------------------------
# generic sources
# ---------------------------------------------------------------------------

def is_generic(s: IntrinsicSurface, x: SurfacePoint) -> bool:
    """True when x has a unique shortest geoseg to every vertex."""
    kind, data = s.point_kind(x)
    if kind == "vertex":
        return False
    for v in s.vertex_ids:
        if len(shortest_path(s, x, s.vertex_point(v))) > 1:
            return False
    return True


def find_generic_point(s: IntrinsicSurface, seed: int, attempts: int = 64) -> SurfacePoint:
    """Random face point with a unique geoseg to every vertex (deterministic)."""
    rng = random.Random(seed)
    areas = [s.face_area(f) for f in range(s.n_faces)]
    for _ in range(attempts):
        f = rng.choices(range(s.n_faces), weights=areas)[0]
        r1, r2 = rng.random(), rng.random()
        u = math.sqrt(r1)
        b = (1.0 - u, u * (1.0 - r2), u * r2)
        if min(b) < 0.05:
            continue
        x = SurfacePoint(f, b)
        if is_generic(s, x):
            return x
    raise ExhaustedAttempts(f"no generic point found in {attempts} attempts")
