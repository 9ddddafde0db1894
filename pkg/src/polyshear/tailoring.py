"""Digon tailoring: excision, pyramid reduction, seal graphs, and crests.

A digon is a disk bounded by two equal-length geodesic segments that share
endpoints and enclose exactly one curved vertex.  Excising it and gluing the
boundary geodesics together (the seal) removes that vertex while raising the
curvature at the endpoints.  Repeating this at the base vertices of a pyramid
flattens it to its doubly covered base; the seals left on the base form a
directed tree (the seal graph).  A crest packages all those excisions into a
single region on the lateral cone.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from shapely.geometry import Point, Polygon
from shapely.ops import unary_union

from .canonical import canonical_hash
from .errors import (
    AngleNotAchievable,
    HitVertex,
    LogMismatch,
    NoEmbedding,
    NoPlanarPlacement,
    NotAPyramid,
    PolyshearError,
    UnequalSides,
)
from .geodesics import initial_direction, shortest_path
from .surface import (
    GeodesicPath,
    IntrinsicSurface,
    SurfacePoint,
    _cross,
    _dist,
    _norm,
    _sub,
)
from .surgery import (
    chain_arclengths,
    chain_from_path,
    cut_and_insert_lens,
    excise_between_chains,
    insert_chains,
    simplify_flat,
    subdivide_at,
)
from .svgutil import SvgFigure
from .tolerances import tol

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# digons
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Digon:
    """Disk bounded by two equal-length geodesics enclosing one vertex."""

    x: SurfacePoint
    v: int
    y: SurfacePoint
    alpha_x: float
    alpha_y: float
    r: float            # geodesic distance x -> v
    s: float            # geodesic distance v -> y
    side_length: float  # common length of the two boundary geodesics
    left: GeodesicPath   # x -> y, counterclockwise of the geoseg x -> v
    right: GeodesicPath  # x -> y, clockwise of it


def _digon_angle(r: float, half_cone: float, t: float) -> float:
    """Angle at x of the digon with |xv| = r, |vy| = t, cone half-angle given.

    Each half of the digon develops to the planar triangle x v y with angle
    half_cone at v; the digon angle at x is twice the triangle angle there.
    """
    y = (t * math.cos(half_cone), t * math.sin(half_cone))
    return 2.0 * math.atan2(y[1], r - y[0])


def plan_digon(s: IntrinsicSurface, x: SurfacePoint, v: int,
               target_angle: float) -> Digon:
    """Digon from x around vertex v with angle target_angle at x.

    The far endpoint y lies on the cut-locus edge of x through v; its
    distance from v is solved by bisection on the monotone digon-angle
    function, then both boundary geodesics are traced and checked to meet.
    """
    omega = s.curvature(v)
    eps_ang = tol().ang
    if target_angle <= eps_ang:
        raise AngleNotAchievable("degenerate digon: target angle is zero")
    if target_angle >= omega - eps_ang:
        raise AngleNotAchievable(
            f"target {target_angle:.6g} not below vertex curvature {omega:.6g}")
    path = shortest_path(s, x, s.vertex_point(v))[0]
    r = path.length
    half_cone = 0.5 * s.vertex(v).total_angle
    # bisection on t = |vy|; the angle grows monotonically from 0 toward omega
    t_hi = r
    while _digon_angle(r, half_cone, t_hi) < target_angle:
        t_hi *= 2.0
        if t_hi > 1e9 * r:
            raise AngleNotAchievable("digon angle never reaches the target")
    t_lo = 0.0
    for _ in range(80):
        t = 0.5 * (t_lo + t_hi)
        if _digon_angle(r, half_cone, t) < target_angle:
            t_lo = t
        else:
            t_hi = t
    t = 0.5 * (t_lo + t_hi)
    yv = (t * math.cos(half_cone), t * math.sin(half_cone))
    side = _dist((r, 0.0), yv)
    g0 = initial_direction(s, path, x)
    half = 0.5 * target_angle
    left = _trace_side(s, x, g0 + half, side)
    right = _trace_side(s, x, g0 - half, side)
    meet_eps = 1e-6 * max(s.scale, side)
    if not s.same_point(left.end, right.end, eps=meet_eps):
        raise AngleNotAchievable(
            "boundary geodesics do not meet: the digon would enclose more "
            "than the target vertex")
    return Digon(x=x, v=v, y=left.end, alpha_x=target_angle,
                 alpha_y=omega - target_angle, r=r, s=t, side_length=side,
                 left=left, right=right)


def _trace_side(s: IntrinsicSurface, x: SurfacePoint, g: float,
                length: float) -> GeodesicPath:
    """Trace a digon side; an end-of-trace vertex hit snaps to that vertex."""
    try:
        return s.trace_global(x, g, length)
    except HitVertex as hv:
        if abs(hv.length - length) > 1e-6 * max(s.scale, length):
            raise
        short = s.trace_global(x, g, hv.length - 1e-8 * s.scale)
        segs = list(short.segments)
        f, b0, b1 = segs[-1]
        if hv.vertex not in s.faces[f]:
            raise
        corner = s.faces[f].index(hv.vertex)
        bary = [0.0, 0.0, 0.0]
        bary[corner] = 1.0
        segs[-1] = (f, b0, tuple(bary))
        return GeodesicPath(tuple(segs), hv.length, short.planar)


@dataclass(frozen=True)
class ExcisionRecord:
    """Replayable description of one digon excision."""

    x_id: int
    v_id: int
    y_id: int
    alpha_x: float
    alpha_y: float
    r: float
    s: float
    seal_length: float
    pre_hash: str | None = None
    post_hash: str | None = None

    def to_json_obj(self):
        return {
            "x_id": self.x_id, "v_id": self.v_id, "y_id": self.y_id,
            "alpha_x": self.alpha_x, "alpha_y": self.alpha_y,
            "r": self.r, "s": self.s, "seal_length": self.seal_length,
            "pre_hash": self.pre_hash, "post_hash": self.post_hash,
        }

    @classmethod
    def from_json_obj(cls, obj):
        return cls(**obj)


@dataclass(frozen=True)
class ExcisionResult:
    surface: IntrinsicSurface
    seal: GeodesicPath
    marks: dict
    record: ExcisionRecord


def excise_digon(s: IntrinsicSurface, d: Digon, marks=None, seal_label=None,
                 hash_snapshots: bool = False) -> ExcisionResult:
    """Cut out the digon and close the hole by identifying its two sides."""
    scale = max(s.scale, d.side_length)
    if abs(d.left.length - d.right.length) > 1e-6 * scale:
        raise UnequalSides(
            f"digon sides differ: {d.left.length} vs {d.right.length}")
    pre = canonical_hash(s) if hash_snapshots else None
    c1 = chain_from_path(s, d.left)
    c2 = chain_from_path(s, d.right)
    a1 = chain_arclengths(s, c1)
    a2 = chain_arclengths(s, c2)
    c1 = subdivide_at(s, c1, a2[1:-1])
    c2 = subdivide_at(s, c2, a1[1:-1])
    ins = insert_chains(s, [c1, c2], marks, unify_eps=1e-6 * scale)
    ids_a, ids_b = ins.node_ids
    if len(ids_a) != len(ids_b):
        raise PolyshearError("digon side subdivisions failed to match")
    surf, marks2, seal_sides = excise_between_chains(
        ins.surface, ids_a, ids_b, d.v, ins.marks, seal_label)
    seal = _path_along_sides(surf, seal_sides)
    rec = ExcisionRecord(
        x_id=ids_a[0], v_id=d.v, y_id=ids_a[-1],
        alpha_x=d.alpha_x, alpha_y=d.alpha_y, r=d.r, s=d.s,
        seal_length=seal.length, pre_hash=pre,
        post_hash=canonical_hash(surf) if hash_snapshots else None)
    return ExcisionResult(surface=surf, seal=seal, marks=marks2, record=rec)


def _path_along_sides(s: IntrinsicSurface, sides) -> GeodesicPath:
    """GeodesicPath running along consecutive mesh sides."""
    segs = []
    planar = [(0.0, 0.0)]
    total = 0.0
    for f, c in sides:
        b0 = [0.0, 0.0, 0.0]
        b0[c] = 1.0
        b1 = [0.0, 0.0, 0.0]
        b1[(c + 1) % 3] = 1.0
        segs.append((f, tuple(b0), tuple(b1)))
        total += s.lengths[f][c]
        planar.append((total, 0.0))
    return GeodesicPath(tuple(segs), total, tuple(planar), is_segment=len(segs) == 1)


# ---------------------------------------------------------------------------
# flat developments
# ---------------------------------------------------------------------------

def develop_patch(s: IntrinsicSurface, patch, eps_rel: float = 1e-6):
    """Planar placement of a connected flat set of faces.

    Returns {face: planar corner triple}.  Raises NoPlanarPlacement when two
    unfolding routes disagree (the patch is not intrinsically flat within
    eps_rel of the scale; retriangulation leaves sub-threshold curvature
    dipoles, so callers of nearly flat patches pass a looser bound).
    """
    patch = set(patch)
    start = min(patch)
    placed = {start: s.layout_face(start)}
    queue = [start]
    eps = eps_rel * s.scale
    while queue:
        f = queue.pop(0)
        for c in range(3):
            f2, _ = s.gluing[(f, c)]
            if f2 not in patch:
                continue
            _, pts2 = s.place_neighbor(f, c, placed[f])
            if f2 in placed:
                if any(_dist(a, b) > eps for a, b in zip(pts2, placed[f2])):
                    raise NoPlanarPlacement(f"patch is not flat at face {f2}")
            else:
                placed[f2] = pts2
                queue.append(f2)
    if set(placed) != patch:
        raise NoPlanarPlacement("patch is not connected")
    return placed


def patch_boundary(s: IntrinsicSurface, patch, placed):
    """Boundary cycle [(vertex id, planar point), ...] of a developed patch.

    The cycle follows the faces' own (counterclockwise) orientation.
    """
    patch = set(patch)
    succ = {}
    for f in patch:
        for c in range(3):
            f2, _ = s.gluing[(f, c)]
            if f2 in patch:
                continue
            a, b = s.faces[f][c], s.faces[f][(c + 1) % 3]
            if a in succ:
                raise PolyshearError("pinched patch boundary")
            succ[a] = (b, placed[f][c])
    if not succ:
        raise PolyshearError("patch has no boundary")
    start = min(succ)
    cycle = []
    u = start
    for _ in range(len(succ) + 1):
        b, pa = succ[u]
        cycle.append((u, pa))
        u = b
        if u == start:
            return cycle
    raise PolyshearError("patch boundary does not close")


# ---------------------------------------------------------------------------
# pyramid recognition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PyramidShape:
    apex: int
    base_ids: tuple     # ccw cycle of base vertex ids
    base_pts: tuple     # matching planar base polygon


def recognize_pyramid(p: IntrinsicSurface, apex=None) -> PyramidShape:
    """Identify the apex and the planar convex base of a pyramid surface.

    With vertex coordinates the apex is the unique vertex off the common
    plane of the others.  A 4-vertex pyramid is a pyramid over any of its
    faces, so coplanarity cannot discriminate; ties break toward the
    smallest-curvature candidate.  Without coordinates the apex must be
    declared (a cone cut open along a generator is also flat, so the
    intrinsic search is ambiguous).
    """
    if apex is None and p.coords:
        candidates = [a for a in p.vertex_ids if _others_coplanar(p, a)]
        candidates.sort(key=p.curvature)
    elif apex is not None:
        candidates = [apex]
    else:
        raise NotAPyramid("apex must be declared for intrinsic-only input")
    for a in candidates:
        shape = _try_apex(p, a)
        if shape is not None:
            return shape
    raise NotAPyramid("no vertex admits a flat convex base")


def _others_coplanar(p: IntrinsicSurface, a) -> bool:
    pts = [p.coords[v] for v in p.vertex_ids if v != a]
    if len(pts) < 4:
        return True
    o = pts[0]
    u = [pts[1][i] - o[i] for i in range(3)]
    nrm = None
    for q in pts[2:]:
        w = [q[i] - o[i] for i in range(3)]
        n = _cross3(u, w)
        if math.sqrt(sum(x * x for x in n)) > 1e-9 * p.scale ** 2:
            nrm = _unit3(n)
            break
    if nrm is None:
        return False
    for q in pts:
        d = sum((q[i] - o[i]) * nrm[i] for i in range(3))
        if abs(d) > 1e-6 * p.scale:
            return False
    return True


def _try_apex(p: IntrinsicSurface, a):
    base_faces = [f for f in range(p.n_faces) if a not in p.faces[f]]
    if not base_faces:
        return None
    try:
        placed = develop_patch(p, base_faces)
        cycle = patch_boundary(p, base_faces, placed)
    except (PolyshearError, NoPlanarPlacement):
        return None
    ids = [v for v, _ in cycle]
    pts = [pt for _, pt in cycle]
    if set(ids) != set(p.vertex_ids) - {a} or len(ids) != len(set(ids)):
        return None
    if _poly_area(pts) < 0:
        ids.reverse()
        pts.reverse()
    if not _convex_ccw(pts):
        return None
    return PyramidShape(apex=a, base_ids=tuple(ids), base_pts=tuple(pts))


def _poly_area(pts):
    a = 0.0
    n = len(pts)
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        a += x0 * y1 - x1 * y0
    return 0.5 * a


def _convex_ccw(pts, eps=1e-9):
    n = len(pts)
    sc = max(_dist(pts[i], pts[(i + 1) % n]) for i in range(n))
    for i in range(n):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
        if _cross(_sub(b, a), _sub(c, b)) < -eps * sc * sc:
            return False
    return True


def _interior_angle(pts, i):
    a, b, c = pts[i - 1], pts[i], pts[(i + 1) % len(pts)]
    u = _sub(a, b)
    v = _sub(c, b)
    x = (u[0] * v[0] + u[1] * v[1]) / (_norm(u) * _norm(v))
    return math.acos(min(1.0, max(-1.0, x)))


# ---------------------------------------------------------------------------
# tailoring a pyramid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailorLog:
    records: tuple

    def to_json_obj(self):
        return {"records": [r.to_json_obj() for r in self.records]}

    def to_json(self, **kw):
        return json.dumps(self.to_json_obj(), **kw)

    @classmethod
    def from_json_obj(cls, obj):
        return cls(tuple(ExcisionRecord.from_json_obj(r) for r in obj["records"]))


@dataclass(frozen=True)
class SealGraph:
    """Seals left on the flattened base, in base-polygon coordinates."""

    base: tuple          # planar base polygon x_1..x_n (excision order)
    order: tuple         # matching vertex ids
    seals: dict          # seal index j (1-based) -> list of ((x,y),(x,y))
    root_id: int
    ccw: bool = True

    def to_json_obj(self):
        return {
            "base": [list(p) for p in self.base],
            "order": list(self.order),
            "seals": {str(j): [[list(a), list(b)] for a, b in segs]
                      for j, segs in self.seals.items()},
            "root_id": self.root_id,
            "ccw": self.ccw,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_json_obj(), **kw)

    def to_svg(self) -> str:
        fig = SvgFigure()
        fig.polygon(list(self.base), stroke="black")
        for j in sorted(self.seals):
            for a, b in self.seals[j]:
                fig.segment(a, b, stroke="#c0392b")
        for i, p in enumerate(self.base):
            fig.dot(p)
            fig.text((p[0], p[1]), f"x{i + 1}")
        return fig.render()


@dataclass(frozen=True)
class TailorResult:
    surface: IntrinsicSurface
    seal_graph: SealGraph
    log: TailorLog
    shape: PyramidShape
    marks: dict


def tailor_pyramid(p: IntrinsicSurface, order=None, apex=None,
                   hash_snapshots: bool = False) -> TailorResult:
    """Flatten a pyramid to its doubly covered base with k-1 digon excisions.

    order is the sequence of base vertex ids anchoring the digons (default:
    the ccw base cycle); the digon at x_i encloses the current apex and
    removes exactly the angle surplus over the doubly covered base.
    """
    shape = recognize_pyramid(p, apex=apex)
    ids = list(shape.base_ids)
    if order is None:
        order_ids = ids
    else:
        order_ids = list(order)
        if sorted(order_ids) != sorted(ids):
            raise NotAPyramid("order must permute the base vertices")
    beta = {}
    for vid in order_ids:
        i = ids.index(vid)
        beta[vid] = _interior_angle(list(shape.base_pts), i)
    cur = p
    marks = {}
    records = []
    cur_apex = shape.apex
    lateral_src = {f for f in range(p.n_faces) if shape.apex in p.faces[f]}
    for step, xid in enumerate(order_ids[:-1], start=1):
        theta = cur.total_angle_at(cur.vertex_point(xid))
        alpha = theta - 2.0 * beta[xid]
        d = plan_digon(cur, cur.vertex_point(xid), cur_apex, alpha)
        res = excise_digon(cur, d, marks, seal_label=step,
                           hash_snapshots=hash_snapshots)
        cur, marks = res.surface, res.marks
        records.append(res.record)
        cur_apex = res.record.y_id
        # coarsen away flat helper nodes so later digons cross a clean mesh
        cur, marks = simplify_flat(
            cur, marks, protect=set(ids) | {cur_apex},
            face_class=lambda sf, f: sf.charts[f][0] in lateral_src)
    if cur_apex != order_ids[-1]:
        raise PolyshearError(
            f"final seal ended at {cur_apex}, expected base vertex {order_ids[-1]}")
    graph = _build_seal_graph(p, cur, marks, shape, order_ids)
    return TailorResult(surface=cur, seal_graph=graph,
                        log=TailorLog(tuple(records)), shape=shape, marks=marks)


def _build_seal_graph(p, final, marks, shape: PyramidShape, order_ids):
    lateral_src = {f for f in range(p.n_faces) if shape.apex in p.faces[f]}
    top = [f for f in range(final.n_faces)
           if final.charts and f in final.charts and final.charts[f][0] in lateral_src]
    placed = develop_patch(final, top, eps_rel=1e-4)
    pos = {}
    for f in top:
        for c in range(3):
            vid = final.faces[f][c]
            q = placed[f][c]
            if vid in pos and _dist(pos[vid], q) > 1e-4 * final.scale:
                raise PolyshearError("seal layout is inconsistent")
            pos[vid] = q
    # align the development with the base polygon via the base vertices
    base_pos = {vid: pt for vid, pt in zip(shape.base_ids, shape.base_pts)}
    b0, b1 = shape.base_ids[0], shape.base_ids[1]
    probe = shape.base_ids[2]
    xform = _rigid_from_pairs(pos[b0], pos[b1], base_pos[b0], base_pos[b1])
    if _dist(xform(pos[probe]), base_pos[probe]) > 1e-4 * final.scale:
        xform = _rigid_from_pairs(pos[b0], pos[b1], base_pos[b0],
                                  base_pos[b1], flip=True)
        if _dist(xform(pos[probe]), base_pos[probe]) > 1e-4 * final.scale:
            raise PolyshearError("cannot align flattened cover with the base")
    seals = {}
    for pair, labels in marks.items():
        u, v = tuple(pair)
        if u not in pos or v not in pos:
            continue
        seg = (xform(pos[u]), xform(pos[v]))
        for j in labels:
            seals.setdefault(j, []).append(seg)
    base = tuple(base_pos[vid] for vid in order_ids)
    return SealGraph(base=base, order=tuple(order_ids), seals=seals,
                     root_id=order_ids[-1], ccw=(order_ids == list(shape.base_ids)))


def _flip(p):
    return (p[0], -p[1])


def _rigid_from_pairs(a0, a1, b0, b1, flip=False):
    """Planar rigid map sending a0 -> b0 and a1 -> b1 (optionally mirrored)."""
    if flip:
        a0, a1 = _flip(a0), _flip(a1)
    da = _sub(a1, a0)
    db = _sub(b1, b0)
    ang = math.atan2(db[1], db[0]) - math.atan2(da[1], da[0])
    co, si = math.cos(ang), math.sin(ang)

    def xf(p):
        q = _flip(p) if flip else p
        x, y = q[0] - a0[0], q[1] - a0[1]
        return (b0[0] + co * x - si * y, b0[1] + si * x + co * y)

    return xf


# ---------------------------------------------------------------------------
# seal graph checking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PropertyReport:
    properties: dict
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.properties.values())


def seal_graph_check(g: SealGraph) -> PropertyReport:
    """Check the structural properties of a seal graph.

    With a ccw excision order all seven properties are checked; for other
    orders only tree-ness is asserted.
    """
    props = {}
    details = {}
    n = len(g.base)
    scale = max(_dist(g.base[i], g.base[(i + 1) % n]) for i in range(n))
    snap = 1e-4 * scale
    seals = {}
    for j, segs in sorted(g.seals.items()):
        pts = [p for seg in segs for p in seg]
        anchor = g.base[j - 1]
        far = max(pts, key=lambda p: _dist(p, anchor))
        seals[j] = (anchor, far)
    order = sorted(seals)

    # tree-ness: each seal's far end lies on a higher structure ending at root
    parent = {}
    ok_tree = True
    for j in order:
        anchor, far = seals[j]
        if _dist(far, g.base[-1]) <= snap:
            parent[j] = None  # reaches the root vertex
            continue
        best = None
        for k in order:
            if k == j:
                continue
            d = _seg_dist(seals[k][0], seals[k][1], far)
            if best is None or d < best[0]:
                best = (d, k)
        if best is None or best[0] > snap:
            ok_tree = False
            details.setdefault("tree", f"seal {j} ends away from all others")
            break
        parent[j] = best[1]
    if ok_tree:
        for j in order:
            seen = set()
            k = j
            while k is not None and k not in seen:
                seen.add(k)
                k = parent.get(k)
            if k is not None:
                ok_tree = False
                details.setdefault("tree", "cycle among seals")
                break
    props["tree"] = ok_tree

    if not g.ccw:
        return PropertyReport(props, details)

    poly = Polygon(g.base).buffer(snap)
    props["containment"] = all(
        poly.contains(Point(p))
        for j in order for seg in g.seals[j] for p in seg)

    props["anchors"] = all(
        min(_dist(p, g.base[j - 1]) for seg in g.seals[j] for p in seg) <= snap
        for j in order)

    inc = True
    conv = True
    for j in order:
        chain = [j]
        k = parent.get(j) if ok_tree else None
        while k is not None:
            chain.append(k)
            k = parent.get(k)
        if any(a >= b for a, b in zip(chain, chain[1:])):
            inc = False
        # leaf-to-root polyline: anchor_j, junctions, root
        pts = [seals[j][0]]
        for k in chain:
            pts.append(seals[k][1])
        turn_signs = set()
        for i in range(1, len(pts) - 1):
            cr = _cross(_sub(pts[i], pts[i - 1]), _sub(pts[i + 1], pts[i]))
            if abs(cr) > snap * scale:
                turn_signs.add(cr > 0)
        if len(turn_signs) > 1:
            conv = False
    props["increasing_indices"] = inc
    props["convex_paths"] = conv

    left_ok = True
    for j in order:
        k = parent.get(j)
        if k is None:
            continue
        if j >= k:
            left_ok = False
            continue
        dk = _sub(seals[k][1], seals[k][0])
        src = _sub(seals[j][0], seals[j][1])  # from junction back to anchor
        if _cross(dk, src) < -snap * scale:
            left_ok = False
            details.setdefault("left_termination",
                               f"seal {j} reaches seal {k} from the right")
    props["left_termination"] = left_ok

    last = order[-1] if order else None
    root_ok = last is not None
    if root_ok:
        anchor, far = seals[last]
        root_ok = (_dist(anchor, g.base[-2]) <= snap
                   and _dist(far, g.base[-1]) <= snap)
        # clean right side: nothing terminates on the root seal from the right
        for j in order:
            if parent.get(j) == last:
                dk = _sub(far, anchor)
                src = _sub(seals[j][0], seals[j][1])
                if _cross(dk, src) < -snap * scale:
                    root_ok = False
    props["root_segment"] = root_ok
    return PropertyReport(props, details)


def _seg_dist(a, b, p):
    ab = _sub(b, a)
    L2 = ab[0] * ab[0] + ab[1] * ab[1]
    if L2 == 0:
        return _dist(a, p)
    t = ((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / L2
    t = min(1.0, max(0.0, t))
    return _dist((a[0] + t * ab[0], a[1] + t * ab[1]), p)


# ---------------------------------------------------------------------------
# crests
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Crest:
    """One-cut flattening certificate for a pyramid.

    All planar data lives in the layout of the lateral cone cut open along
    the generator through the first base vertex, apex at the origin.
    """

    boundary: tuple        # planar ring of the crest region
    holes: tuple           # interior rings of the crest region
    triangles: tuple       # lifted (possibly clipped) triangles, planar rings
    moat: tuple            # apex images forming the moat polygon
    layout: tuple          # boundary chain x_1 ... x_k x_1' of the cone
    base: tuple            # base polygon of the pyramid
    vbar: tuple            # apex projection in base coordinates
    vbar_in_base: bool
    nu: float              # surface angle at the apex
    turn_angles: tuple

    def area(self) -> float:
        return Polygon(self.boundary, [list(h) for h in self.holes]).area

    def to_json_obj(self):
        return {
            "boundary": [list(p) for p in self.boundary],
            "holes": [[list(p) for p in h] for h in self.holes],
            "triangles": [[list(p) for p in t] for t in self.triangles],
            "moat": [list(p) for p in self.moat],
            "layout": [list(p) for p in self.layout],
            "base": [list(p) for p in self.base],
            "vbar": list(self.vbar),
            "vbar_in_base": self.vbar_in_base,
            "nu": self.nu,
            "turn_angles": list(self.turn_angles),
        }

    def to_svg(self) -> str:
        fig = SvgFigure()
        fig.polygon(list(self.layout) + [(0.0, 0.0)], stroke="black")
        for t in self.triangles:
            fig.polygon(list(t), stroke="#e6b800", fill="#fff3bf")
        fig.polygon(list(self.boundary), stroke="#2255cc", fill="#dce6ff")
        for h in self.holes:
            fig.polygon(list(h), stroke="#2255cc", fill="#ffffff")
        if len(self.moat) >= 3:
            fig.polyline(list(self.moat) + [self.moat[0]], stroke="#118833")
        fig.dot((0.0, 0.0), color="#cc2222")
        return fig.render()


def build_crest(p: IntrinsicSurface, apex=None) -> Crest:
    """Crest of a pyramid: the part of the lateral cone no lifted triangle covers.

    Requires an embedded pyramid (3-d vertex coordinates) so the apex can be
    projected onto the base plane.
    """
    if getattr(p, "coords", None) is None:
        raise NoEmbedding("crest construction needs vertex coordinates")
    shape = recognize_pyramid(p, apex=apex)
    k = len(shape.base_ids)
    coords = p.coords
    v3 = coords[shape.apex]
    base3 = [coords[vid] for vid in shape.base_ids]
    origin, ex, ey, ez = _base_frame(base3)
    base2 = [_project(q, origin, ex, ey) for q in base3]
    if _poly_area(base2) < 0:
        raise NotAPyramid("base frame is not counterclockwise")
    vbar = _project(v3, origin, ex, ey)
    height = sum((v3[i] - origin[i]) * ez[i] for i in range(3))

    e = [math.dist(v3, q) for q in base3]
    phi = []
    for i in range(k):
        b = math.dist(base3[i], base3[(i + 1) % k])
        phi.append(_tri_angle(e[i], e[(i + 1) % k], b))
    nu = sum(phi)

    # layout: apex at origin, x_i at cumulative cone angle
    psi = [0.0]
    for a in phi:
        psi.append(psi[-1] + a)
    layout = [(e[i % k] * math.cos(psi[i]), e[i % k] * math.sin(psi[i]))
              for i in range(k + 1)]

    base_poly = Polygon(base2)
    vbar_in = base_poly.covers(Point(vbar))
    tris = []
    moat = []
    for i in range(k):
        j = (i + 1) % k
        tri = Polygon([base2[i], base2[j], vbar])
        clipped = tri if vbar_in else tri.intersection(base_poly)
        xf = _rigid_from_pairs(base2[i], base2[j], layout[i], layout[i + 1])
        if not clipped.is_empty and clipped.area > 1e-12 * base_poly.area:
            ring = list(clipped.exterior.coords)[:-1]
            tris.append(tuple(xf(q) for q in ring))
            moat.append(xf(vbar))
    turns = []
    for i in range(k):
        im = (i - 1) % k
        beta_prev = _tri_angle(e[i], math.dist(base3[im], base3[i]), e[im])
        alpha_i = _tri_angle(e[i], math.dist(base3[i], base3[(i + 1) % k]),
                             e[(i + 1) % k])
        turns.append(math.pi - (beta_prev + alpha_i))

    cone = Polygon(layout + [(0.0, 0.0)])
    covered = unary_union([Polygon(t) for t in tris])
    crest_region = cone.difference(covered)
    if crest_region.geom_type == "MultiPolygon":
        crest_region = max(crest_region.geoms, key=lambda g: g.area)
    boundary = tuple(crest_region.exterior.coords[:-1])
    holes = tuple(tuple(r.coords[:-1]) for r in crest_region.interiors)

    # certificates
    if abs(sum(turns) - nu) > 1e-6:
        raise PolyshearError("turn angles do not sum to the apex surface angle")
    inter = 0.0
    polys = [Polygon(t) for t in tris]
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            inter = max(inter, polys[i].intersection(polys[j]).area)
    if inter > 1e-8 * cone.area:
        raise PolyshearError("lifted triangles overlap")
    return Crest(boundary=boundary, holes=holes, triangles=tuple(tris),
                 moat=tuple(moat),
                 layout=tuple(layout), base=tuple(base2), vbar=tuple(vbar),
                 vbar_in_base=bool(vbar_in), nu=nu, turn_angles=tuple(turns))


def _base_frame(base3):
    o = base3[0]
    ex = _unit3([base3[1][i] - o[i] for i in range(3)])
    # normal from first convex corner
    u = [base3[1][i] - o[i] for i in range(3)]
    w = [base3[-1][i] - o[i] for i in range(3)]
    nz = _cross3(u, w)
    ez = _unit3(nz)
    ey = _cross3(ez, ex)
    return o, ex, ey, ez


def _project(q, o, ex, ey):
    d = [q[i] - o[i] for i in range(3)]
    return (sum(d[i] * ex[i] for i in range(3)),
            sum(d[i] * ey[i] for i in range(3)))


def _unit3(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def _cross3(u, w):
    return [u[1] * w[2] - u[2] * w[1],
            u[2] * w[0] - u[0] * w[2],
            u[0] * w[1] - u[1] * w[0]]


def _tri_angle(a, b, c):
    """Angle opposite side c in a triangle with sides a, b, c at the a-b corner."""
    x = (a * a + b * b - c * c) / (2.0 * a * b)
    return math.acos(min(1.0, max(-1.0, x)))


# ---------------------------------------------------------------------------
# enlarging (log reversal)
# ---------------------------------------------------------------------------

def reverse_log(base: IntrinsicSurface, log: TailorLog) -> IntrinsicSurface:
    """Undo a tailoring log: slit each seal and insert the excised digon.

    Records are replayed newest first; each seal is relocated as the unique
    shortest geodesic between its endpoint vertices, slit open, and filled
    with the lens of the original digon, recreating the excised vertex under
    its original id.  Raises LogMismatch when the surface does not match the
    log's lineage.
    """
    cur = base
    for rec in reversed(log.records):
        if rec.post_hash is not None and canonical_hash(cur) != rec.post_hash:
            raise LogMismatch("surface does not match the record's post state")
        if rec.x_id not in cur.vertex_ids or rec.y_id not in cur.vertex_ids:
            raise LogMismatch("seal endpoints missing from the surface")
        paths = shortest_path(cur, cur.vertex_point(rec.x_id),
                              cur.vertex_point(rec.y_id))
        path = paths[0]
        if abs(path.length - rec.seal_length) > 1e-6 * max(cur.scale, 1.0):
            raise LogMismatch(
                f"seal length {path.length:.9g} != recorded {rec.seal_length:.9g}")
        ch = chain_from_path(cur, path)
        ins = insert_chains(cur, [ch])
        ids = ins.node_ids[0]
        cur, _, _ = cut_and_insert_lens(ins.surface, ids, rec.r, rec.s,
                                        apex_id=rec.v_id, marks=ins.marks)
        if rec.pre_hash is not None and canonical_hash(cur) != rec.pre_hash:
            raise LogMismatch("insertion did not reproduce the pre state")
    return cur
