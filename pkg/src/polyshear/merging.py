"""Vertex merging, vm-reductions with slit graphs, and flattening pipelines.

Merging two vertices slits a geodesic between them and fills it with two
congruent triangles, which flattens both endpoints and creates one new
vertex carrying their combined curvature.  Repeating this until no pair can
be merged reduces any surface to a doubly covered triangle or an isosceles
tetrahedron; the traces of the merge geodesics pulled back to the original
surface form the slit graph.  The flattening pipeline combines cut-locus
digon excisions, vm-reduction, and merge reversal to reshape one surface
into a homothet of another entirely intrinsically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import networkx as nx
import shapely
from shapely.geometry import Point, Polygon

from .canonical import isometric
from .errors import (
    CurvatureTooLarge,
    DigonContainsExtraVertex,
    ExhaustedAttempts,
    HitVertex,
    NonGenericSource,
    NotIsoscelesTetra,
    PathNotGeodesic,
    PolyshearError,
)
from .geodesics import (
    cut_locus,
    find_generic_point,
    geodesic_distance,
    initial_direction,
    is_generic,
    shortest_path,
)
from .surface import (
    GeodesicPath,
    IntrinsicSurface,
    SurfacePoint,
    _dist,
    _sub,
    build_doubly_covered_polygon,
)
from .surgery import (
    NodeChain,
    _affine,
    chain_arclengths,
    chain_from_path,
    cut_and_insert_lens,
    excise_between_chains,
    fold_slit,
    insert_chains,
    subdivide_at,
)
from .svgutil import SvgFigure
from .tailoring import Digon, ExcisionRecord, TailorLog, excise_digon
from .tolerances import tol

TWO_PI = 2.0 * math.pi


class Irreducible:
    """Sentinel class: the surface admits no further vertex merge."""


# ---------------------------------------------------------------------------
# merge records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MergeRecord:
    """Replayable description of one vertex merge."""

    v1: int
    v2: int
    new_id: int
    omega1: float
    omega2: float
    length: float
    side_r: float
    side_s: float

    def to_json_obj(self):
        return {
            "v1": self.v1, "v2": self.v2, "new_id": self.new_id,
            "omega1": self.omega1, "omega2": self.omega2,
            "length": self.length,
            "side_r": self.side_r, "side_s": self.side_s,
        }

    @classmethod
    def from_json_obj(cls, obj):
        return cls(**obj)


@dataclass(frozen=True)
class MergeLog:
    """Ordered merge records plus the binary forest they induce."""

    records: tuple

    def forest(self):
        """new vertex id -> (v1, v2) for every merge."""
        return {r.new_id: (r.v1, r.v2) for r in self.records}

    def tree(self, v):
        """Nested (id, left, right) tuple of the merge tree rooted at v."""
        fr = self.forest()
        if v not in fr:
            return v
        a, b = fr[v]
        return (v, self.tree(a), self.tree(b))

    def to_json_obj(self):
        return {"records": [r.to_json_obj() for r in self.records]}

    def to_json(self, **kw):
        return json.dumps(self.to_json_obj(), **kw)

    @classmethod
    def from_json_obj(cls, obj):
        return cls(tuple(MergeRecord.from_json_obj(r) for r in obj["records"]))


@dataclass(frozen=True)
class MergeResult:
    surface: IntrinsicSurface
    record: MergeRecord
    path: GeodesicPath
    marks: dict


def _check_geodesic(s: IntrinsicSurface, path: GeodesicPath):
    """Raise PathNotGeodesic unless the unfolded trace is straight."""
    pl = path.planar
    a, b = pl[0], pl[-1]
    ab = _sub(b, a)
    L = math.hypot(*ab)
    if L <= 0:
        raise PathNotGeodesic("degenerate path")
    for p in pl[1:-1]:
        dev = abs((p[0] - a[0]) * ab[1] - (p[1] - a[1]) * ab[0]) / L
        if dev > 1e-6 * max(s.scale, 1.0):
            raise PathNotGeodesic(f"path bends by {dev:.3g}")


def merge_vertices(s: IntrinsicSurface, v1: int, v2: int,
                   path: GeodesicPath | None = None,
                   marks=None) -> MergeResult:
    """Merge v1 and v2 along a geodesic into one new vertex.

    Slits the geodesic and fills it with two congruent triangles whose base
    angles are half the endpoint curvatures, flattening v1 and v2; the two
    triangle apexes glue into a new vertex of curvature omega1 + omega2.
    """
    w1 = s.curvature(v1)
    w2 = s.curvature(v2)
    if w1 + w2 >= TWO_PI - tol().ang:
        raise CurvatureTooLarge(
            f"curvatures {w1:.6g} + {w2:.6g} do not stay below 2*pi")
    if path is None:
        path = shortest_path(s, s.vertex_point(v1), s.vertex_point(v2))[0]
    else:
        if s.point_kind(path.start) != ("vertex", v1) or \
                s.point_kind(path.end) != ("vertex", v2):
            raise PathNotGeodesic("path endpoints are not v1, v2")
        _check_geodesic(s, path)
    L = path.length
    theta = 0.5 * (w1 + w2)
    side_r = L * math.sin(0.5 * w2) / math.sin(theta)
    side_s = L * math.sin(0.5 * w1) / math.sin(theta)
    ch = chain_from_path(s, path)
    ins = insert_chains(s, [ch], marks=marks)
    ids = ins.node_ids[0]
    surf, marks2, apex = cut_and_insert_lens(
        ins.surface, ids, side_r, side_s, marks=ins.marks)
    guard = max(1e-6, 100 * tol().ang)
    for v, w in ((v1, w1), (v2, w2)):
        if abs(surf.curvature(v)) > guard:
            raise PolyshearError(f"merge failed to flatten vertex {v}")
    if abs(surf.curvature(apex) - (w1 + w2)) > guard:
        raise PolyshearError("merge apex curvature mismatch")
    rec = MergeRecord(v1=v1, v2=v2, new_id=apex, omega1=w1, omega2=w2,
                      length=L, side_r=side_r, side_s=side_s)
    return MergeResult(surface=surf, record=rec, path=path, marks=marks2)


def find_mergeable_pair(s: IntrinsicSurface):
    """The two vertices of smallest curvature, or Irreducible.

    Returns the class Irreducible when the surface is a doubly covered
    triangle or an isosceles tetrahedron (every pair then sums to 2*pi).
    """
    curved = [v for v in s.vertex_ids if s.curvature(v) > tol().flat]
    if len(curved) <= 3:
        return Irreducible
    curved.sort(key=lambda v: (s.curvature(v), v))
    v1, v2 = curved[0], curved[1]
    if s.curvature(v1) + s.curvature(v2) >= TWO_PI - tol().ang:
        return Irreducible
    return (v1, v2)


# ---------------------------------------------------------------------------
# slit graphs
# ---------------------------------------------------------------------------

def _pullback_pieces(s: IntrinsicSurface, path: GeodesicPath):
    """Trace of the path on the base surface, dropping inserted material.

    Returns a list of connected pieces; each piece is a list of
    (base_face, p0, p1) planar segments in that face's layout frame.
    """
    eps = 1e-12 * max(s.scale, 1.0)
    pieces = []
    run = []
    for (f, b0, b1) in path.segments:
        pts = s.layout_face(f)
        p0 = s.bary_to_planar(pts, b0)
        p1 = s.bary_to_planar(pts, b1)
        src = f
        if s.charts and f in s.charts:
            src, qs = s.charts[f]
            if src is None:
                if run:
                    pieces.append(run)
                    run = []
                continue
            p0 = _affine(pts, qs, p0)
            p1 = _affine(pts, qs, p1)
        if _dist(p0, p1) <= eps:
            continue
        run.append((src, p0, p1))
    if run:
        pieces.append(run)
    return pieces


def _seg_cross_param(p0, p1, q0, q1):
    """Parameter on p0p1 of a proper crossing with q0q1, or None."""
    d = _sub(p1, p0)
    e = _sub(q1, q0)
    den = d[0] * e[1] - d[1] * e[0]
    if abs(den) < 1e-14:
        return None
    w = _sub(q0, p0)
    t = (w[0] * e[1] - w[1] * e[0]) / den
    u = (w[0] * d[1] - w[1] * d[0]) / den
    if 1e-9 < t < 1 - 1e-9 and -1e-9 <= u <= 1 + 1e-9:
        return t
    return None


def _point_on_seg_param(p0, p1, q, snap):
    d = _sub(p1, p0)
    L2 = d[0] * d[0] + d[1] * d[1]
    if L2 <= 0:
        return None
    t = ((q[0] - p0[0]) * d[0] + (q[1] - p0[1]) * d[1]) / L2
    if t <= 1e-9 or t >= 1 - 1e-9:
        return None
    foot = (p0[0] + t * d[0], p0[1] + t * d[1])
    if _dist(foot, q) <= snap:
        return t
    return None


@dataclass
class SlitGraph:
    """Merge geodesics pulled back to the base surface, as a planar graph.

    slits[j] holds the pieces of merge j's geodesic that survive on the
    base; graph is the refined arrangement (nodes at endpoints and
    crossings) with edge attrs slit, face, p0, p1, length.
    """

    base: IntrinsicSurface
    slits: tuple
    graph: nx.MultiGraph

    @property
    def components(self) -> int:
        return nx.number_connected_components(self.graph)

    @property
    def is_forest(self) -> bool:
        v = self.graph.number_of_nodes()
        e = self.graph.number_of_edges()
        return e == v - self.components

    @property
    def has_cycle(self) -> bool:
        return not self.is_forest

    def cell_count(self) -> int:
        """Faces of the arrangement on the (spherical) base surface."""
        v = self.graph.number_of_nodes()
        e = self.graph.number_of_edges()
        return 1 + self.components + e - v

    def segment_count(self) -> int:
        return sum(len(piece) for pieces in self.slits for piece in pieces)

    def to_json_obj(self):
        return {
            "slits": [
                [[{"face": f, "p0": list(p0), "p1": list(p1)}
                  for f, p0, p1 in piece] for piece in pieces]
                for pieces in self.slits
            ],
            "components": self.components,
            "is_forest": self.is_forest,
            "cells": self.cell_count(),
        }

    def to_json(self, **kw):
        return json.dumps(self.to_json_obj(), **kw)

    def to_svg(self) -> str:
        place = _develop_faces(self.base)
        fig = SvgFigure()
        for f, pts in place.items():
            fig.polygon(list(pts), stroke="#cccccc")
        for pieces in self.slits:
            for piece in pieces:
                for f, p0, p1 in piece:
                    lay = self.base.layout_face(f)
                    fig.segment(_affine(lay, place[f], p0),
                                _affine(lay, place[f], p1),
                                stroke="#c0392b")
        return fig.render()


def _develop_faces(s: IntrinsicSurface):
    """BFS development of all faces into the plane (diagnostic layout)."""
    from collections import deque

    place = {0: s.layout_face(0)}
    dq = deque([0])
    while dq:
        f = dq.popleft()
        for side in range(3):
            f2, pts2 = s.place_neighbor(f, side, place[f])
            if f2 not in place:
                place[f2] = pts2
                dq.append(f2)
    return place


def build_slit_graph(base: IntrinsicSurface, slits) -> SlitGraph:
    """Arrange the pulled-back slit segments into a refined planar graph."""
    snap = 1e-7 * max(base.scale, 1.0)
    per_face = {}
    for si, pieces in enumerate(slits):
        for piece in pieces:
            for f, p0, p1 in piece:
                if _dist(p0, p1) > snap:
                    per_face.setdefault(f, []).append((si, p0, p1))
    refined = []
    for f, segs in per_face.items():
        for i, (si, p0, p1) in enumerate(segs):
            cuts = {0.0, 1.0}
            for j, (sj, q0, q1) in enumerate(segs):
                if j == i:
                    continue
                t = _seg_cross_param(p0, p1, q0, q1)
                if t is not None:
                    cuts.add(t)
                for q in (q0, q1):
                    t = _point_on_seg_param(p0, p1, q, snap)
                    if t is not None:
                        cuts.add(t)
            ts = sorted(cuts)
            for t0, t1 in zip(ts, ts[1:]):
                a = (p0[0] + t0 * (p1[0] - p0[0]), p0[1] + t0 * (p1[1] - p0[1]))
                b = (p0[0] + t1 * (p1[0] - p0[0]), p0[1] + t1 * (p1[1] - p0[1]))
                if _dist(a, b) > snap:
                    refined.append((si, f, a, b))

    reps = []

    def node_of(f, p):
        bary = base.planar_to_bary(base.layout_face(f), p)
        bary = tuple(min(max(x, 0.0), 1.0) for x in bary)
        tot = sum(bary)
        sp = SurfacePoint(f, tuple(x / tot for x in bary))
        for k, sp2 in enumerate(reps):
            if base.same_point(sp, sp2, eps=3 * snap):
                return k
        reps.append(sp)
        return len(reps) - 1

    g = nx.MultiGraph()
    for si, f, a, b in refined:
        u = node_of(f, a)
        v = node_of(f, b)
        if u == v:
            continue
        g.add_node(u, point=reps[u])
        g.add_node(v, point=reps[v])
        g.add_edge(u, v, slit=si, face=f, p0=a, p1=b, length=_dist(a, b))
    return SlitGraph(base=base, slits=tuple(tuple(p) for p in slits), graph=g)


def complement_components(final: IntrinsicSurface):
    """Components of the inserted material on the reduced surface.

    Returns a list of (face set, interior curved vertex ids) pairs; every
    component should contain exactly one vertex of the reduced surface.
    """
    lens_faces = {f for f in range(final.n_faces)
                  if final.charts and f in final.charts
                  and final.charts[f][0] is None}
    seen = set()
    out = []
    for f0 in sorted(lens_faces):
        if f0 in seen:
            continue
        comp = {f0}
        stack = [f0]
        while stack:
            f = stack.pop()
            for c in range(3):
                f2, _ = final.gluing[(f, c)]
                if f2 in lens_faces and f2 not in comp:
                    comp.add(f2)
                    stack.append(f2)
        seen |= comp
        inner = set()
        for v in {v for f in comp for v in final.faces[f]}:
            if final.curvature(v) <= tol().flat:
                continue
            if all(wf in comp for wf, _ in final.vertex(v).wedges):
                inner.add(v)
        out.append((comp, inner))
    return out


@dataclass(frozen=True)
class ReductionResult:
    surface: IntrinsicSurface
    log: MergeLog
    slit_graph: SlitGraph
    checks: dict


def run_vm_reduction(s: IntrinsicSurface, pairs=None) -> ReductionResult:
    """Merge vertices until irreducible (or through an explicit pair list).

    With pairs=None the smallest-curvature pair is merged at each step; an
    explicit list of (v1, v2) id pairs overrides the policy.  Returns the
    reduced surface, the merge log, and the slit graph pulled back to s.
    """
    cur = s
    records = []
    slits = []
    step = 0
    while True:
        if pairs is None:
            pick = find_mergeable_pair(cur)
            if pick is Irreducible:
                break
        else:
            if step >= len(pairs):
                break
            pick = pairs[step]
        step += 1
        v1, v2 = pick
        res = merge_vertices(cur, v1, v2)
        slits.append(_pullback_pieces(cur, res.path))
        records.append(res.record)
        cur = res.surface
    graph = build_slit_graph(s, slits)
    comps = complement_components(cur)
    n_final = len([v for v in cur.vertex_ids if cur.curvature(v) > tol().flat])
    checks = {
        "merges": len(records),
        "final_vertices": n_final,
        "components": graph.components,
        "component_bound_ok": graph.components <= max(n_final, 3),
        "one_vertex_per_component": all(len(inner) == 1 for _, inner in comps),
        "cells": graph.cell_count(),
        "cell_bound_ok": _cell_bound_ok(graph),
        "is_forest": graph.is_forest,
    }
    return ReductionResult(surface=cur, log=MergeLog(tuple(records)),
                           slit_graph=graph, checks=checks)


def _cell_bound_ok(graph: SlitGraph) -> bool:
    m = max(graph.segment_count(), 1)
    return graph.cell_count() <= m * (m - 1) + m + 2


# ---------------------------------------------------------------------------
# flat outlines of doubly covered polygons
# ---------------------------------------------------------------------------

def _walk_polygon(sides, angles):
    """Turtle-walk a polygon from side lengths and interior angles."""
    pts = [(0.0, 0.0)]
    h = 0.0
    for i in range(len(sides)):
        p = pts[-1]
        pts.append((p[0] + sides[i] * math.cos(h),
                    p[1] + sides[i] * math.sin(h)))
        h += math.pi - angles[(i + 1) % len(sides)]
    return pts


def flat_outline(s: IntrinsicSurface, seed: int = 0):
    """Recover the rim polygon of a doubly covered convex polygon.

    Returns (points, ids) with points in ccw order, or None when the
    surface is not flat.  Vertices are ordered by the direction of their
    unique shortest geodesic from a generic interior point; side lengths
    are the pairwise vertex distances and rim angles are half the cone
    angles, and the reconstruction is verified isometric to the input.
    """
    vids = [v for v in s.vertex_ids if s.curvature(v) > tol().flat]
    if len(vids) < 3:
        return None
    try:
        x = find_generic_point(s, seed)
        angs = {}
        for v in vids:
            p = shortest_path(s, x, s.vertex_point(v))[0]
            angs[v] = initial_direction(s, p, x)
        order = sorted(vids, key=lambda v: angs[v])
        sides = [geodesic_distance(s, s.vertex_point(order[i]),
                                   s.vertex_point(order[(i + 1) % len(order)]))
                 for i in range(len(order))]
        angles = [0.5 * s.vertex(v).total_angle for v in order]
    except (PolyshearError, ExhaustedAttempts, ValueError):
        return None
    if abs(sum(math.pi - a for a in angles) - TWO_PI) > 1e-6:
        return None
    for rev in (False, True):
        o = list(order)
        sd = list(sides)
        an = list(angles)
        if rev:
            o = [o[0]] + o[:0:-1]
            sd = sd[::-1]
            an = [an[0]] + an[:0:-1]
        pts = _walk_polygon(sd, an)
        if _dist(pts[0], pts[-1]) > 1e-6 * max(s.scale, 1.0):
            continue
        outline = [tuple(p) for p in pts[:-1]]
        if _poly_area(outline) < 0:
            continue
        try:
            if isometric(s, build_doubly_covered_polygon(outline), rel=1e-6):
                return tuple(outline), tuple(o)
        except PolyshearError:
            continue
    return None


def _poly_area(pts):
    a = 0.0
    for i in range(len(pts)):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % len(pts)]
        a += x0 * y1 - x1 * y0
    return 0.5 * a


def develop_to_polygon(s: IntrinsicSurface, outline, ids):
    """Fold-flat development of a doubly covered polygon onto its outline.

    Returns a dict face -> (pts, sign) where pts place the face in outline
    coordinates and sign is +1 on the cover developing ccw, -1 on the
    mirrored one.  Verified by matching every vertex image of `ids` to its
    outline point.
    """
    place = _develop_faces(s)
    # position of each rim vertex in the raw development
    raw = {}
    for v in ids:
        f, c = s.vertex(v).wedges[0]
        raw[v] = place[f][c]
    a0, a1 = raw[ids[0]], raw[ids[1]]
    b0, b1 = outline[0], outline[1]
    from .tailoring import _rigid_from_pairs

    for flip in (False, True):
        try:
            T = _rigid_from_pairs(a0, a1, b0, b1, flip=flip)
        except PolyshearError:
            continue
        ok = True
        for i, v in enumerate(ids):
            if _dist(T(raw[v]), outline[i]) > 1e-6 * max(s.scale, 1.0):
                ok = False
                break
        if not ok:
            continue
        out = {}
        for f, pts in place.items():
            q = tuple(T(p) for p in pts)
            sign = 1 if _poly_area(q) > 0 else -1
            out[f] = (q, sign)
        return out
    raise PolyshearError("development does not match the outline")


def surface_point_at(s: IntrinsicSurface, dev, p, sign):
    """Surface point of a developed planar position on the given cover."""
    best = None
    for f, (pts, sg) in dev.items():
        if sg != sign:
            continue
        (x0, y0), (x1, y1), (x2, y2) = pts
        det = (y1 - y2) * (x0 - x2) + (x2 - x1) * (y0 - y2)
        if abs(det) < 1e-300:
            continue
        b0 = ((y1 - y2) * (p[0] - x2) + (x2 - x1) * (p[1] - y2)) / det
        b1 = ((y2 - y0) * (p[0] - x2) + (x0 - x2) * (p[1] - y2)) / det
        b2 = 1.0 - b0 - b1
        m = min(b0, b1, b2)
        if best is None or m > best[0]:
            best = (m, f, (b0, b1, b2))
    if best is None or best[0] < -1e-6:
        raise PolyshearError("developed point lies outside every face")
    _, f, bary = best
    bary = tuple(min(max(b, 0.0), 1.0) for b in bary)
    tot = sum(bary)
    return SurfacePoint(f, tuple(b / tot for b in bary))


def scale_surface(s: IntrinsicSurface, factor: float) -> IntrinsicSurface:
    lengths = [tuple(factor * x for x in l) for l in s.lengths]
    return IntrinsicSurface(s.faces, lengths, s.gluing)


# ---------------------------------------------------------------------------
# flattening by cut-locus path
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FlattenResult:
    surface: IntrinsicSurface
    log: TailorLog
    outline: tuple
    outline_ids: tuple
    x_id: int | None


def _leaf_path(cl):
    """Longest leaf-to-leaf path in the cut locus by total length."""
    g = cl.graph
    leaves = cl.leaves()
    best = None
    for i, a in enumerate(leaves):
        for b in leaves[i + 1:]:
            nodes = nx.shortest_path(g, a, b)
            L = sum(g.edges[u, v]["length"] for u, v in zip(nodes, nodes[1:]))
            va = g.nodes[a]["vertex"]
            vb = g.nodes[b]["vertex"]
            key = (-L, tuple(sorted((va if va is not None else -1,
                                     vb if vb is not None else -1))))
            if best is None or key < best[0]:
                best = (key, nodes)
    if best is None:
        raise PolyshearError("cut locus has no leaf pair")
    return best[1]


def flatten_by_cutlocus_path(s: IntrinsicSurface, x: SurfacePoint,
                             verify: bool = True) -> FlattenResult:
    """Flatten s to a doubly covered polygon by excising cut-locus subtrees.

    The longest leaf-to-leaf path rho of the cut locus C(x) is kept; every
    subtree hanging off rho is cut away by a digon bounded by the two
    shortest geodesics from x to its attachment point that bracket it.  The
    result is a doubly covered convex polygon with x on its rim.
    """
    ready = flat_outline(s)
    if ready is not None:
        return FlattenResult(surface=s, log=TailorLog(()),
                             outline=ready[0], outline_ids=ready[1], x_id=None)
    if not is_generic(s, x):
        raise NonGenericSource("flattening needs a generic source point")
    cl = cut_locus(s, x)
    g = cl.graph
    rho = _leaf_path(cl)
    on_rho = set(rho)
    # angular chart at x: directions of the unique geodesics to each vertex
    vert_ang = {}
    for v in s.vertex_ids:
        if s.curvature(v) <= tol().flat:
            continue
        p = shortest_path(s, x, s.vertex_point(v))[0]
        vert_ang[v] = initial_direction(s, p, x)

    subtrees = []  # (attachment node, set of vertex ids hanging off it)
    for a in rho:
        for nb in g.neighbors(a):
            if nb in on_rho:
                continue
            comp = {nb}
            stack = [nb]
            while stack:
                u = stack.pop()
                for w in g.neighbors(u):
                    if w != a and w not in comp:
                        comp.add(w)
                        stack.append(w)
            vs = {g.nodes[u]["vertex"] for u in comp
                  if g.nodes[u]["vertex"] is not None}
            if not vs:
                raise PolyshearError("cut-locus subtree without a vertex")
            subtrees.append((a, vs))

    chains = []
    records_meta = []
    for a, vs in subtrees:
        a_pt = g.nodes[a]["surface"]
        ties = shortest_path(s, x, a_pt)
        if len(ties) < 2:
            raise PolyshearError("attachment point is not on the cut locus")
        tangs = sorted((initial_direction(s, p, x), p) for p in ties)
        others = [vert_ang[v] for v in vert_ang if v not in vs]
        mine = [vert_ang[v] for v in vs]
        chosen = None
        m = len(tangs)
        for i in range(m):
            lo = tangs[i][0]
            hi = tangs[(i + 1) % m][0]
            width = (hi - lo) % TWO_PI
            if width <= 0:
                width = TWO_PI

            def inside(ang):
                return 0 < (ang - lo) % TWO_PI < width

            if all(inside(t) for t in mine) and not any(inside(t) for t in others):
                chosen = (tangs[i][1], tangs[(i + 1) % m][1], width)
                break
        if chosen is None:
            raise PolyshearError("no geodesic pair brackets the subtree")
        p1, p2, alpha_x = chosen
        c1 = chain_from_path(s, p1)
        c2 = chain_from_path(s, p2)
        a1 = chain_arclengths(s, c1)
        a2 = chain_arclengths(s, c2)
        c1 = subdivide_at(s, c1, a2[1:-1])
        c2 = subdivide_at(s, c2, a1[1:-1])
        chains.extend([c1, c2])
        omega = sum(s.curvature(v) for v in vs)
        records_meta.append((a, vs, alpha_x, omega, p1.length))

    ins = insert_chains(s, chains, unify_eps=1e-6 * max(s.scale, 1.0))
    cur = ins.marks and None
    cur = ins.surface
    marks = ins.marks
    x_id = ins.node_ids[0][0]
    recs = []
    attach_id = {}
    for k, (a, vs, alpha_x, omega, L) in enumerate(records_meta):
        ids_a = ins.node_ids[2 * k]
        ids_b = ins.node_ids[2 * k + 1]
        if len(ids_a) != len(ids_b):
            raise PolyshearError("digon side subdivisions failed to match")
        cur, marks, _ = excise_between_chains(
            cur, ids_a, ids_b, vs, marks, seal_label=f"flat{k}")
        attach_id[a] = ids_a[-1]
        recs.append(ExcisionRecord(
            x_id=ids_a[0], v_id=tuple(sorted(vs)), y_id=ids_a[-1],
            alpha_x=alpha_x, alpha_y=omega - alpha_x,
            r=L, s=L, seal_length=L))

    # rim order: x, then the surviving vertices along rho
    rim = [x_id]
    for n in rho:
        v = g.nodes[n]["vertex"]
        if v is not None:
            rim.append(v)
        elif n in attach_id:
            rim.append(attach_id[n])
    curved = {v for v in cur.vertex_ids if cur.curvature(v) > tol().flat}
    if set(rim) != curved:
        raise PolyshearError(
            f"rim {sorted(rim)} does not match cone points {sorted(curved)}")
    sides = [geodesic_distance(cur, cur.vertex_point(rim[i]),
                               cur.vertex_point(rim[(i + 1) % len(rim)]))
             for i in range(len(rim))]
    angles = [0.5 * cur.vertex(v).total_angle for v in rim]
    outline = None
    for rev in (False, True):
        o, sd, an = list(rim), list(sides), list(angles)
        if rev:
            o = [o[0]] + o[:0:-1]
            sd = sd[::-1]
            an = [an[0]] + an[:0:-1]
        pts = _walk_polygon(sd, an)
        if _dist(pts[0], pts[-1]) <= 1e-6 * max(cur.scale, 1.0) \
                and _poly_area(pts[:-1]) > 0:
            outline = tuple(tuple(p) for p in pts[:-1])
            rim = o
            break
    if outline is None:
        raise PolyshearError("flattened surface rim does not close up")
    if verify and not isometric(cur, build_doubly_covered_polygon(outline),
                                rel=1e-6):
        raise PolyshearError("flattened surface is not a doubly covered polygon")
    return FlattenResult(surface=cur, log=TailorLog(tuple(recs)),
                         outline=outline, outline_ids=tuple(rim), x_id=x_id)


# ---------------------------------------------------------------------------
# isosceles tetrahedra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsoTetraResult:
    surface: IntrinsicSurface
    outline: tuple
    outline_ids: tuple
    identity: bool
    seam: tuple | None      # (crease id 1, crease id 2, slit length)
    merged: tuple | None    # (c, d): the edge endpoints, identified to c


def isotetra_to_rectangle(s: IntrinsicSurface) -> IsoTetraResult:
    """Flatten an isosceles tetrahedron to a doubly covered rectangle.

    Cuts one edge and refolds both banks creased at their midpoints: the
    edge endpoints identify and go flat while the two crease points become
    new right-angle corners.  Degenerate (already flat) input is returned
    unchanged.
    """
    curved = [v for v in s.vertex_ids if s.curvature(v) > tol().flat]
    if len(curved) != 4 or any(abs(s.curvature(v) - math.pi) > 1e-6
                               for v in curved):
        raise NotIsoscelesTetra(
            "surface is not an isosceles tetrahedron metric")
    ready = flat_outline(s)
    if ready is not None:
        return IsoTetraResult(surface=s, outline=ready[0],
                              outline_ids=ready[1], identity=True,
                              seam=None, merged=None)
    c, d = sorted(curved)[:2]
    path = shortest_path(s, s.vertex_point(c), s.vertex_point(d))[0]
    L = path.length
    ch = chain_from_path(s, path)
    arcs = chain_arclengths(s, ch)
    us = sorted({0.5 * L} | {L - a for a in arcs[1:-1]})
    ch = subdivide_at(s, ch, us)
    ins = insert_chains(s, [ch])
    surf, _, (m1, m2) = fold_slit(ins.surface, ins.node_ids[0], ins.marks)
    ready = flat_outline(surf)
    if ready is None:
        raise PolyshearError("refolded tetrahedron is not flat")
    return IsoTetraResult(surface=surf, outline=ready[0],
                          outline_ids=ready[1], identity=False,
                          seam=(m1, m2, L), merged=(c, d))
