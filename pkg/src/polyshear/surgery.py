"""Mesh surgery: cutting along geodesic chains, excising digons, inserting lenses.

All reshaping operations reduce to three primitives on an IntrinsicSurface:

* insert_chains: re-triangulate so given geodesic chains run along mesh edges;
* excise_between_chains: remove the disk bounded by two chains and glue them;
* cut_and_insert_lens: slit along one chain and fill with a two-triangle lens.

Chains are supplied as node polylines (face, barycentric) so callers can
pre-subdivide them to matching arclengths.  Surfaces stay immutable: every
primitive returns a new surface plus propagated edge marks and provenance
charts (each face mapped into a chart of the surface where surgery started).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from shapely.geometry import LineString
from shapely.ops import polygonize, unary_union

from .errors import DigonContainsExtraVertex, NonManifold, PolyshearError
from .surface import (
    GeodesicPath,
    IntrinsicSurface,
    SurfacePoint,
    _cross,
    _dist,
    _sub,
)
from .tolerances import tol


# ---------------------------------------------------------------------------
# chains as node polylines
# ---------------------------------------------------------------------------

@dataclass
class NodeChain:
    """Polyline of surface points; consecutive nodes share a face.

    nodes[k] = list of (face, bary) placements of node k (one per face the
    node lies on); seg_face[k] is the face carrying the straight segment
    between nodes k and k+1.
    """

    nodes: list
    seg_face: list

    @property
    def n_segments(self):
        return len(self.seg_face)


# chains are coarsened so that consecutive same-carrier nodes stay at least
# CHAIN_EPS_REL of the surface scale apart.
CHAIN_EPS_REL = 1e-5


def chain_from_path(s: IntrinsicSurface, path: GeodesicPath) -> NodeChain:
    eps = CHAIN_EPS_REL * s.scale
    nodes = []
    seg_face = []
    segs = []
    for (f, b0, b1) in path.segments:
        if _seg_len(s, f, b0, b1) > eps or not _same_carrier(s, f, b0, b1):
            segs.append((f, b0, b1))
    if not segs:
        raise PolyshearError("degenerate chain")
    nodes.append([(segs[0][0], segs[0][1])])
    for (f, b0, b1) in segs:
        seg_face.append(f)
        nodes[-1].append((f, b0))
        nodes.append([(f, b1)])
    # dedupe placements per node
    for pl in nodes:
        seen = []
        for fb in pl:
            if not any(fb[0] == g[0] and _bary_close(fb[1], g[1]) for g in seen):
                seen.append(fb)
        pl[:] = seen
    return NodeChain(nodes, seg_face)


def _seg_len(s, f, b0, b1):
    pts = s.layout_face(f)
    return _dist(s.bary_to_planar(pts, b0), s.bary_to_planar(pts, b1))


def _same_carrier(s, f, b0, b1):
    """Both segment endpoints sit on the same edge (or vertex) of face f.

    Dropping a short segment merges its endpoints into one chain node, which
    is sound only when the merged placements denote the same carrier.  A short
    segment crossing a sliver face between two distinct edges must be kept.
    """
    k0 = s.point_kind(SurfacePoint(f, _normbary(b0)))
    k1 = s.point_kind(SurfacePoint(f, _normbary(b1)))
    if k0[0] == "vertex" or k1[0] == "vertex":
        return True
    if k0[0] == "edge" and k1[0] == "edge":
        return k0[1][:2] == k1[1][:2]
    return True


def _bary_close(a, b, eps=1e-9):
    return max(abs(x - y) for x, y in zip(a, b)) < eps


def chain_arclengths(s: IntrinsicSurface, chain: NodeChain):
    out = [0.0]
    for k, f in enumerate(chain.seg_face):
        b0 = _placement(chain.nodes[k], f)
        b1 = _placement(chain.nodes[k + 1], f)
        out.append(out[-1] + _seg_len(s, f, b0, b1))
    return out


def _placement(placements, f):
    for (ff, b) in placements:
        if ff == f:
            return b
    raise KeyError(f"node has no placement on face {f}")


def subdivide_at(s: IntrinsicSurface, chain: NodeChain, us,
                 skip_rel: float = 1e-11) -> NodeChain:
    """Insert interior nodes at the given arclengths along the chain.

    Arclengths within skip_rel * scale of an existing node are already
    realized and are skipped; the rest are interpolated inside the segment
    that contains them.  Subdividing each of two equal-length chains at the
    other's interior arclengths gives both the same node arclengths, which
    excise_between_chains needs to glue them isometrically.
    """
    eps = skip_rel * s.scale
    arcs = chain_arclengths(s, chain)
    us = sorted(us)
    nodes = [chain.nodes[0]]
    seg_face = []
    ui = 0
    for k, f in enumerate(chain.seg_face):
        a0, a1 = arcs[k], arcs[k + 1]
        b0 = _placement(chain.nodes[k], f)
        b1 = _placement(chain.nodes[k + 1], f)
        while ui < len(us):
            u = us[ui]
            if u <= a0 + eps:
                ui += 1  # coincides with the node just emitted
                continue
            if u >= a1 - eps:
                break  # coincides with node k + 1 or lies further along
            t = (u - a0) / (a1 - a0)
            bm = tuple(b0[i] + t * (b1[i] - b0[i]) for i in range(3))
            nodes.append([(f, bm)])
            seg_face.append(f)
            ui += 1
        nodes.append(chain.nodes[k + 1])
        seg_face.append(f)
    return NodeChain(nodes, seg_face)


# ---------------------------------------------------------------------------
# ear clipping
# ---------------------------------------------------------------------------

def ear_clip(pts):
    """Triangulate a simple ccw polygon; returns index triples."""
    n = len(pts)
    if n < 3:
        raise ValueError("not a polygon")
    scale2 = max(_dist(pts[i], pts[(i + 1) % n]) for i in range(n)) ** 2
    eps = 1e-12 * scale2
    idx = list(range(n))
    tris = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10 * n * n:
            raise PolyshearError("ear clipping failed (non-simple cell?)")
        m = len(idx)
        clipped = False
        for i in range(m):
            a, b, c = idx[(i - 1) % m], idx[i], idx[(i + 1) % m]
            cr = _cross(_sub(pts[b], pts[a]), _sub(pts[c], pts[b]))
            if cr <= eps:
                continue
            if any(_in_tri(pts[j], pts[a], pts[b], pts[c], eps)
                   for j in idx if j not in (a, b, c)):
                continue
            tris.append((a, b, c))
            idx.pop(i)
            clipped = True
            break
        if not clipped:
            raise PolyshearError("ear clipping stalled")
    tris.append(tuple(idx))
    return tris


def _in_tri(p, a, b, c, eps):
    d1 = _cross(_sub(b, a), _sub(p, a))
    d2 = _cross(_sub(c, b), _sub(p, b))
    d3 = _cross(_sub(a, c), _sub(p, c))
    return d1 >= -eps and d2 >= -eps and d3 >= -eps


# ---------------------------------------------------------------------------
# chain insertion
# ---------------------------------------------------------------------------

@dataclass
class Insertion:
    surface: IntrinsicSurface
    node_ids: list          # per chain: vertex ids along it
    marks: dict             # frozenset{ida, idb} -> set of labels


def insert_chains(s: IntrinsicSurface, chains, marks=None,
                  unify_eps=None) -> Insertion:
    """Re-triangulate so every chain runs along mesh edges.

    Chain endpoints that coincide (same surface point, within unify_eps)
    receive one id.
    """
    marks = marks or {}
    eps = unify_eps if unify_eps is not None else 10 * tol().hit * s.scale
    # label each node: existing vertices keep ('v', id); others ('n', i, k)
    labels = []  # per chain: list of labels
    label_point = {}  # label -> SurfacePoint (representative)
    for ci, ch in enumerate(chains):
        labs = []
        for k, placements in enumerate(ch.nodes):
            f, b = placements[0]
            sp = SurfacePoint(f, _normbary(b))
            kind, data = s.point_kind(sp)
            if kind == "vertex":
                lab = ("v", data)
            else:
                lab = ("n", ci, k)
            labs.append(lab)
            label_point.setdefault(lab, sp)
        labels.append(labs)
    # unify coincident chain endpoints
    alias = {}
    ends = []
    for ci, ch in enumerate(chains):
        for k in (0, len(ch.nodes) - 1):
            ends.append(labels[ci][k])
    for i in range(len(ends)):
        for j in range(i + 1, len(ends)):
            a, b = ends[i], ends[j]
            a = alias.get(a, a)
            b = alias.get(b, b)
            if a == b or a[0] == "v" or b[0] == "v":
                continue
            if s.same_point(label_point[a], label_point[b], eps=eps):
                alias[b] = a

    def canon(lab):
        while lab in alias:
            lab = alias[lab]
        return lab

    labels = [[canon(l) for l in labs] for labs in labels]

    # per-face extra points and constraints
    face_pts = {f: {} for f in range(s.n_faces)}   # label -> planar
    face_segs = {f: [] for f in range(s.n_faces)}

    def add_point(lab, f, bary):
        if lab[0] == "v":
            return
        pts = s.layout_face(f)
        face_pts[f][lab] = s.bary_to_planar(pts, bary)

    for ci, ch in enumerate(chains):
        for k, f in enumerate(ch.seg_face):
            l0, l1 = labels[ci][k], labels[ci][k + 1]
            b0 = _placement(ch.nodes[k], f)
            b1 = _placement(ch.nodes[k + 1], f)
            add_point(l0, f, b0)
            add_point(l1, f, b1)
            face_segs[f].append((l0, l1))
        # on-edge nodes must subdivide both adjacent faces
        for k in range(len(ch.nodes)):
            lab = labels[ci][k]
            if lab[0] == "v":
                continue
            f0, b0 = ch.nodes[k][0]
            kind, data = s.point_kind(SurfacePoint(f0, _normbary(b0)))
            if kind == "edge":
                f, side, t = data
                f2, s2, t2 = s.mirror_edge_point(f, side, t)
                add_point(lab, f, s.edge_point(f, side, t).bary)
                add_point(lab, f2, s.edge_point(f2, s2, t2).bary)

    new_faces = []      # list of (label triple, planar triple, source face)
    for f in range(s.n_faces):
        pts = s.layout_face(f)
        corner_labs = [("v", s.faces[f][c]) for c in range(3)]
        if not face_pts[f] and not face_segs[f]:
            new_faces.append((tuple(corner_labs), pts, f))
            continue
        new_faces.extend(_subdivide_face(s, f, pts, corner_labs,
                                         face_pts[f], face_segs[f]))

    return _assemble(s, new_faces, labels, marks, label_point)


def _normbary(b):
    b = [max(0.0, x) for x in b]
    t = sum(b)
    return tuple(x / t for x in b)


def _subdivide_face(s, f, pts, corner_labs, extra, segs):
    """Arrangement + triangulation of one face; returns (labels, planar, f)."""
    scale = max(s.lengths[f])
    eps = 1e-9 * scale
    pos = {corner_labs[c]: pts[c] for c in range(3)}
    pos.update(extra)

    # which side (if any) each extra point lies on
    def side_of(p):
        for side in range(3):
            a, b = pts[side], pts[(side + 1) % 3]
            e = _sub(b, a)
            L = _dist(a, b)
            if abs(_cross(e, _sub(p, a))) / L <= eps:
                t = ((p[0] - a[0]) * e[0] + (p[1] - a[1]) * e[1]) / (L * L)
                if -1e-12 <= t <= 1 + 1e-12:
                    return side, t
        return None, None

    on_side = {side: [] for side in range(3)}
    for lab, p in extra.items():
        side, t = side_of(p)
        if side is not None:
            on_side[side].append((t, lab))
    lines = []
    for side in range(3):
        seq = [pts[side]]
        for t, lab in sorted(on_side[side]):
            seq.append(pos[lab])
        seq.append(pts[(side + 1) % 3])
        lines.append(LineString(seq))
    boundary_labs = {lab for lst in on_side.values() for _, lab in lst}
    for l0, l1 in segs:
        if l0 == l1:
            continue
        p0, p1 = pos[l0], pos[l1]
        s0, _ = side_of(p0)
        s1, _ = side_of(p1)
        if s0 is not None and s0 == s1:
            # collinear with a side: already part of the boundary polyline
            a, b = pts[s0], pts[(s0 + 1) % 3]
            if abs(_cross(_sub(b, a), _sub(p1, p0))) <= eps * _dist(a, b):
                continue
        lines.append(LineString([p0, p1]))
    cells = list(polygonize(unary_union(lines)))
    if not cells:
        raise PolyshearError(f"face {f} arrangement produced no cells")
    out = []
    items = list(pos.items())

    def snap(p):
        best = None
        for lab, q in items:
            d = _dist(p, q)
            if best is None or d < best[0]:
                best = (d, lab)
        if best[0] > 10 * eps:
            raise PolyshearError(f"unsnappable arrangement vertex in face {f}")
        return best[1]

    area = 0.0
    for cell in cells:
        ring = list(cell.exterior.coords)[:-1]
        if _ring_area(ring) < 0:
            ring.reverse()
        labs = [snap(p) for p in ring]
        ring = [pos[l] for l in labs]
        area += _ring_area(ring)
        for (i, j, k) in ear_clip(ring):
            out.append(((labs[i], labs[j], labs[k]),
                        (ring[i], ring[j], ring[k]), f))
    # snapping moves ring points by up to ~10 eps along sides of length
    # ~scale, so sliver faces need an absolute term in the area budget
    if abs(area - s.face_area(f)) > 1e-6 * s.face_area(f) + 1e-7 * scale * scale:
        raise PolyshearError(f"face {f} subdivision area mismatch")
    return out


def _ring_area(ring):
    a = 0.0
    n = len(ring)
    for i in range(n):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % n]
        a += x0 * y1 - x1 * y0
    return 0.5 * a


def _assemble(s, new_faces, labels, marks, label_point):
    # vertex ids
    next_id = max(s.vertex_ids) + 1
    lab_id = {}
    for labs, _, _ in new_faces:
        for lab in labs:
            if lab in lab_id:
                continue
            if lab[0] == "v":
                lab_id[lab] = lab[1]
            else:
                lab_id[lab] = next_id
                next_id += 1
    faces = []
    lengths = []
    charts = []
    for labs, tri, f in new_faces:
        faces.append(tuple(lab_id[l] for l in labs))
        lengths.append((_dist(tri[0], tri[1]), _dist(tri[1], tri[2]),
                        _dist(tri[2], tri[0])))
        charts.append(_chart_for(s, f, tri))
    gluing = _glue_new_faces(s, new_faces)
    surf = IntrinsicSurface(faces, lengths, gluing,
                            charts={i: c for i, c in enumerate(charts)})
    # marks: propagate along subdivided original edges
    new_marks = {}
    if marks:
        edge_sets = {frozenset(faces[i][c] for c in (cc, (cc + 1) % 3)): None
                     for i in range(len(faces)) for cc in range(3)}
        # map: for each marked old edge, find new edges whose endpoints lie
        # on it; approximate by arc-membership via label points
        for old_edge, labset in marks.items():
            for i, face in enumerate(faces):
                for c in range(3):
                    pair = frozenset((face[c], face[(c + 1) % 3]))
                    if _edge_on_old(s, new_faces[i], c, old_edge, lab_id):
                        new_marks.setdefault(pair, set()).update(labset)
    node_ids = [[lab_id[l] for l in labs] for labs in labels]
    return Insertion(surf, node_ids, new_marks)


def _glue_new_faces(s, new_faces):
    """Gluing for retriangulated faces, robust to repeated vertex-id pairs.

    Interior edges (cell diagonals and chain constraints) pair within their
    source face by exact planar endpoints; the pairing by vertex ids alone
    is ambiguous because a cone star may carry several edges between the
    same two vertices.  Edges on an original mesh side pair across the old
    gluing by mirrored arclength intervals.
    """
    interior = {}   # (f, p, q) -> (i, c)
    on_side = {}    # (f, side) -> list of (t0, t1, i, c)
    gluing = {}
    for i, (labs, tri, f) in enumerate(new_faces):
        pts = s.layout_face(f)
        for c in range(3):
            p, q = tri[c], tri[(c + 1) % 3]
            hit = _side_interval(s, f, pts, p, q)
            if hit is None:
                key = (f, q, p)
                if key in interior:
                    j, cc = interior.pop(key)
                    gluing[(i, c)] = (j, cc)
                    gluing[(j, cc)] = (i, c)
                else:
                    interior[(f, p, q)] = (i, c)
            else:
                side, t0, t1 = hit
                on_side.setdefault((f, side), []).append((t0, t1, i, c))
    if interior:
        raise NonManifold(f"unpaired interior edges: {sorted(interior)[:3]}")
    done = set()
    for (f, side), subs in on_side.items():
        if (f, side) in done:
            continue
        f2, s2 = s.gluing[(f, side)]
        subs2 = on_side.get((f2, s2), [])
        if (f2, s2) == (f, side):
            raise NonManifold(f"side ({f}, {side}) glued to itself")
        if len(subs) != len(subs2):
            raise NonManifold(
                f"side ({f}, {side}) split into {len(subs)} pieces but its "
                f"partner ({f2}, {s2}) into {len(subs2)}")
        L = s.lengths[f][side]
        subs_sorted = sorted(subs)
        subs2_sorted = sorted(subs2, key=lambda e: L - e[1])
        for (t0, t1, i, c), (u0, u1, j, cc) in zip(subs_sorted, subs2_sorted):
            if abs((L - u1) - t0) > 1e-6 * max(L, 1.0) or \
               abs((L - u0) - t1) > 1e-6 * max(L, 1.0):
                raise NonManifold(
                    f"sub-edge intervals disagree across side ({f}, {side})")
            gluing[(i, c)] = (j, cc)
            gluing[(j, cc)] = (i, c)
        done.add((f, side))
        done.add((f2, s2))
    return gluing


def _side_interval(s, f, pts, p, q):
    """(side, t0, t1) if segment pq lies on a side of face f, else None."""
    eps = 1e-9 * max(s.lengths[f])
    for side in range(3):
        a, b = pts[side], pts[(side + 1) % 3]
        e = _sub(b, a)
        L = _dist(a, b)
        ok = True
        ts = []
        for r in (p, q):
            if abs(_cross(e, _sub(r, a))) / L > eps:
                ok = False
                break
            t = ((r[0] - a[0]) * e[0] + (r[1] - a[1]) * e[1]) / L
            if t < -eps or t > L + eps:
                ok = False
                break
            ts.append(t)
        if ok:
            return side, ts[0], ts[1]
    return None


def _edge_on_old(s, new_face, c, old_edge, lab_id):
    """Does side c of this new face lie along the old mesh edge old_edge?

    The old edge is a frozenset of two old vertex ids.  A new edge lies on it
    iff both endpoints are on the old edge segment in the source face chart.
    """
    labs, tri, f = new_face
    a, b = tuple(old_edge)
    vs = s.faces[f]
    if a not in vs or b not in vs:
        return False
    pts = s.layout_face(f)
    pa, pb = pts[vs.index(a)], pts[vs.index(b)]
    eps = 1e-9 * max(s.lengths[f])
    for p in (tri[c], tri[(c + 1) % 3]):
        L = _dist(pa, pb)
        if abs(_cross(_sub(pb, pa), _sub(p, pa))) / L > eps:
            return False
        t = ((p[0] - pa[0]) * (pb[0] - pa[0]) + (p[1] - pa[1]) * (pb[1] - pa[1])) / (L * L)
        if t < -1e-9 or t > 1 + 1e-9:
            return False
    return True


def _chart_for(s, f, tri):
    """Provenance chart for a new face: its corners in f's source chart."""
    if s.charts and f in s.charts:
        src, qs = s.charts[f]
        pts = s.layout_face(f)
        return (src, tuple(_affine(pts, qs, p) for p in tri))
    return (f, tri)


def _affine(pts, qs, p):
    """Map p through the affine map sending pts[i] -> qs[i]."""
    (x0, y0), (x1, y1), (x2, y2) = pts
    det = (y1 - y2) * (x0 - x2) + (x2 - x1) * (y0 - y2)
    b0 = ((y1 - y2) * (p[0] - x2) + (x2 - x1) * (p[1] - y2)) / det
    b1 = ((y2 - y0) * (p[0] - x2) + (x0 - x2) * (p[1] - y2)) / det
    b2 = 1.0 - b0 - b1
    return (b0 * qs[0][0] + b1 * qs[1][0] + b2 * qs[2][0],
            b0 * qs[0][1] + b1 * qs[1][1] + b2 * qs[2][1])


def _pair_directed(faces):
    directed = {}
    for f, vs in enumerate(faces):
        for c in range(3):
            key = (vs[c], vs[(c + 1) % 3])
            if key in directed:
                raise NonManifold(f"duplicate directed edge {key}")
            directed[key] = (f, c)
    gluing = {}
    for (a, b), (f, c) in directed.items():
        if (b, a) not in directed:
            raise NonManifold(f"unpaired edge {(a, b)}")
        gluing[(f, c)] = directed[(b, a)]
    return gluing


# ---------------------------------------------------------------------------
# excision
# ---------------------------------------------------------------------------

def excise_between_chains(s: IntrinsicSurface, ids_a, ids_b, inside_vertex,
                          marks=None, seal_label=None):
    """Remove the disk bounded by the two id chains and glue them together.

    Both chains must run from the same start id to the same end id with
    matching sub-edge arclengths (pre-subdivide with subdivide_at).
    inside_vertex may be a single id or an iterable of ids; raises
    DigonContainsExtraVertex if the removed disk contains a curved vertex
    not among them.  Returns (surface, marks, seal_sides) where seal_sides
    are the glued (face, side) pairs along the a-chain.
    """
    marks = dict(marks or {})
    if isinstance(inside_vertex, int):
        inside_ids = {inside_vertex}
    else:
        inside_ids = set(inside_vertex)
    if ids_a[0] != ids_b[0] or ids_a[-1] != ids_b[-1]:
        raise PolyshearError("chain endpoints differ")
    if len(ids_a) != len(ids_b):
        raise PolyshearError("chains not subdivision-matched")
    barrier = {frozenset(p) for p in zip(ids_a, ids_a[1:])}
    barrier |= {frozenset(p) for p in zip(ids_b, ids_b[1:])}

    def edge_pair(f, c):
        return frozenset((s.faces[f][c], s.faces[f][(c + 1) % 3]))

    # flood fill the digon interior from the enclosed vertices
    inside = set()
    stack = [wf for v in inside_ids for wf, _ in s.vertex(v).wedges]
    inside.update(stack)
    while stack:
        f = stack.pop()
        for c in range(3):
            if edge_pair(f, c) in barrier:
                continue
            f2, _ = s.gluing[(f, c)]
            if f2 not in inside:
                inside.add(f2)
                stack.append(f2)
    if len(inside) >= s.n_faces:
        raise PolyshearError("chains do not separate the enclosed vertex")
    keep = [f for f in range(s.n_faces) if f not in inside]
    remap = {f: i for i, f in enumerate(keep)}
    kept_vertex_ids = {v for f in keep for v in s.faces[f]}
    for v in {v for f in inside for v in s.faces[f]} - kept_vertex_ids:
        if v not in inside_ids and abs(s.curvature(v)) > tol().flat:
            raise DigonContainsExtraVertex(
                f"vertex {v} (curvature {s.curvature(v):.3g}) inside the digon")

    # exterior side of each chain edge
    def ext_side(u, v):
        found = None
        for f in keep:
            vs = s.faces[f]
            for c in range(3):
                if frozenset((vs[c], vs[(c + 1) % 3])) == frozenset((u, v)):
                    if found is not None:
                        raise PolyshearError("ambiguous chain edge")
                    found = (f, c)
        if found is None:
            raise PolyshearError("chain edge lost")
        return found

    sides_a = [ext_side(u, v) for u, v in zip(ids_a, ids_a[1:])]
    sides_b = [ext_side(u, v) for u, v in zip(ids_b, ids_b[1:])]
    # check matched sub-lengths
    for (fa, ca), (fb, cb) in zip(sides_a, sides_b):
        la, lb = s.lengths[fa][ca], s.lengths[fb][cb]
        if abs(la - lb) > 1e-5 * max(s.scale, 1.0):
            raise PolyshearError(f"seal sub-lengths differ: {la} vs {lb}")

    rename = {b: a for a, b in zip(ids_a, ids_b)}
    faces = []
    lengths = []
    gluing = {}
    for f in keep:
        faces.append(tuple(rename.get(v, v) for v in s.faces[f]))
        lengths.append(s.lengths[f])
    for (f, c), (f2, c2) in s.gluing.items():
        if f in remap and f2 in remap and edge_pair(f, c) not in barrier:
            gluing[(remap[f], c)] = (remap[f2], c2)
    for (fa, ca), (fb, cb) in zip(sides_a, sides_b):
        gluing[(remap[fa], ca)] = (remap[fb], cb)
        gluing[(remap[fb], cb)] = (remap[fa], ca)
    charts = None
    if s.charts:
        charts = {remap[f]: s.charts[f] for f in keep if f in s.charts}
    surf = IntrinsicSurface(faces, lengths, gluing, charts=charts)
    # marks: drop interior edges, rename, add seal label
    new_marks = {}
    kept_ids = {v for face in faces for v in face}
    for pair, labset in marks.items():
        p2 = frozenset(rename.get(v, v) for v in pair)
        if len(p2) == 2 and p2 <= kept_ids and _edge_exists(surf, p2):
            new_marks.setdefault(p2, set()).update(labset)
    if seal_label is not None:
        for u, v in zip(ids_a, ids_a[1:]):
            new_marks.setdefault(frozenset((u, v)), set()).add(seal_label)
    seal_sides = [(remap[fa], ca) for fa, ca in sides_a]
    return surf, new_marks, seal_sides


def _edge_exists(surf, pair):
    for face in surf.faces:
        for c in range(3):
            if frozenset((face[c], face[(c + 1) % 3])) == pair:
                return True
    return False


# ---------------------------------------------------------------------------
# lens insertion (reverse of excision; also vertex merging)
# ---------------------------------------------------------------------------

def cut_and_insert_lens(s: IntrinsicSurface, ids, side_r, side_s,
                        apex_id=None, marks=None, apex_mark=None):
    """Slit along the id chain and fill with two congruent triangles.

    The lens triangle has base = the chain (total length L), one side of
    length side_r at the start id and side_s at the end id; its apex becomes
    a new vertex (id apex_id, or fresh).  Inverse of excise_between_chains.
    """
    marks = dict(marks or {})
    if len(ids) < 2:
        raise PolyshearError("chain too short")
    # locate left/right mesh sides of each chain edge
    left = []
    right = []
    for u, v in zip(ids, ids[1:]):
        lft = rgt = None
        for f in range(s.n_faces):
            vs = s.faces[f]
            for c in range(3):
                if vs[c] == u and vs[(c + 1) % 3] == v:
                    lft = (f, c)
                if vs[c] == v and vs[(c + 1) % 3] == u:
                    rgt = (f, c)
        if lft is None or rgt is None:
            raise PolyshearError(f"chain edge {(u, v)} not in mesh")
        left.append(lft)
        right.append(rgt)
    seg_lens = [s.lengths[f][c] for f, c in left]
    total = sum(seg_lens)

    # duplicate interior node ids on the right bank of the slit
    next_id = max(s.vertex_ids) + 1
    faces = [list(face) for face in s.faces]
    prime = {}
    for k in range(1, len(ids) - 1):
        u = ids[k]
        prime[u] = next_id
        next_id += 1
        for bf, bc in _right_bank(s, u, right[k - 1], right[k]):
            faces[bf][bc] = prime[u]
    apex = apex_id if apex_id is not None else next_id
    if apex_id is None:
        next_id += 1

    # lens layout: base on +x axis, apex above
    px = (total * total + side_r * side_r - side_s * side_s) / (2.0 * total)
    py2 = side_r * side_r - px * px
    if py2 <= 0:
        raise PolyshearError("lens sides violate the triangle inequality")
    py = math.sqrt(py2)
    arcs = [0.0]
    for L in seg_lens:
        arcs.append(arcs[-1] + L)
    apex_pt = (px, py)
    lens_faces = []
    lens_lengths = []
    left_ids = ids
    right_ids = [ids[0]] + [prime[u] for u in ids[1:-1]] + [ids[-1]]
    for k in range(len(seg_lens)):
        p0, p1 = (arcs[k], 0.0), (arcs[k + 1], 0.0)
        # left copy presents directed edge (ids[k+1] -> ids[k])
        lens_faces.append((left_ids[k + 1], left_ids[k], apex))
        lens_lengths.append((seg_lens[k], _dist(p0, apex_pt), _dist(apex_pt, p1)))
        # right copy presents directed edge (right_ids[k] -> right_ids[k+1])
        lens_faces.append((right_ids[k], right_ids[k + 1], apex))
        lens_lengths.append((seg_lens[k], _dist(p1, apex_pt), _dist(apex_pt, p0)))
    all_faces = [tuple(f) for f in faces] + lens_faces
    all_lengths = list(s.lengths) + lens_lengths
    # only the gluing along the slit changes; splice the lens fan in rather
    # than re-pairing every directed edge (ids may repeat across covers)
    new_gluing = dict(s.gluing)
    n_old = len(faces)
    K = len(seg_lens)

    def glue(a, b):
        new_gluing[a] = b
        new_gluing[b] = a

    for k in range(K):
        lf = (n_old + 2 * k, 0)      # left lens copy, base side
        rf = (n_old + 2 * k + 1, 0)  # right lens copy, base side
        glue(left[k], lf)
        glue(right[k], rf)
        if k > 0:
            glue((n_old + 2 * k, 1), (n_old + 2 * (k - 1), 2))
            glue((n_old + 2 * k + 1, 2), (n_old + 2 * (k - 1) + 1, 1))
    glue((n_old, 1), (n_old + 1, 2))
    glue((n_old + 2 * (K - 1), 2), (n_old + 2 * (K - 1) + 1, 1))
    charts = dict(s.charts) if s.charts else None
    surf = IntrinsicSurface(all_faces, all_lengths, new_gluing, charts=charts)
    if surf.charts is not None:
        # lens faces carry a sourceless chart so pull-backs to the base
        # surface can recognize and drop inserted material
        for k in range(2 * K):
            surf.charts[n_old + k] = (None, surf.layout_face(n_old + k))
    new_marks = {}
    for pair, labset in marks.items():
        # marks on the slit stay with the left bank ids
        if _edge_exists(surf, pair):
            new_marks.setdefault(pair, set()).update(labset)
    if apex_mark is not None:
        new_marks.setdefault(frozenset((ids[0], apex)), set()).add(apex_mark)
    return surf, new_marks, apex


def fold_slit(s: IntrinsicSurface, ids, marks=None):
    """Slit along the id chain and refold each bank onto itself.

    Each bank of the slit is creased at its midpoint and glued to itself,
    which identifies the two chain endpoints (their cone angles add) and
    turns the two bank midpoints into new cone points of curvature pi minus
    half the flattened endpoint excess.  The chain nodes must be symmetric
    in arclength about the midpoint, with a node exactly at the midpoint
    (pre-subdivide with subdivide_at).  The operation is an involution:
    applying it to the crease-to-crease chain of the result restores s.

    Returns (surface, marks, (mid_left, mid_right)).
    """
    marks = dict(marks or {})
    n = len(ids)
    if n < 3 or n % 2 == 0:
        raise PolyshearError("fold chain needs an odd node count >= 3")
    left = []
    right = []
    for u, v in zip(ids, ids[1:]):
        lft = rgt = None
        for f in range(s.n_faces):
            vs = s.faces[f]
            for c in range(3):
                if vs[c] == u and vs[(c + 1) % 3] == v:
                    lft = (f, c)
                if vs[c] == v and vs[(c + 1) % 3] == u:
                    rgt = (f, c)
        if lft is None or rgt is None:
            raise PolyshearError(f"chain edge {(u, v)} not in mesh")
        left.append(lft)
        right.append(rgt)
    seg_lens = [s.lengths[f][c] for f, c in left]
    total = sum(seg_lens)
    arcs = [0.0]
    for L in seg_lens:
        arcs.append(arcs[-1] + L)
    eps = 1e-7 * max(s.scale, 1.0)
    for i in range(n):
        if abs(arcs[i] + arcs[n - 1 - i] - total) > eps:
            raise PolyshearError("chain nodes not symmetric about the midpoint")
    mid = (n - 1) // 2
    if abs(arcs[mid] - 0.5 * total) > eps:
        raise PolyshearError("no chain node at the midpoint")

    # duplicate interior node ids on the right bank
    next_id = max(s.vertex_ids) + 1
    faces = [list(face) for face in s.faces]
    prime = {}
    for k in range(1, n - 1):
        u = ids[k]
        prime[u] = next_id
        next_id += 1
        for bf, bc in _right_bank(s, u, right[k - 1], right[k]):
            faces[bf][bc] = prime[u]

    # fold identifications: node i ~ node n-1-i on each bank
    rename = {}
    for i in range((n - 1) // 2):
        a, b = ids[i], ids[n - 1 - i]
        la = rename.get(a, a)
        rename[b] = la
        if i > 0:
            rename[prime[b]] = prime[a]
    faces = [tuple(rename.get(v, v) for v in face) for face in faces]

    new_gluing = dict(s.gluing)

    def glue(a, b):
        new_gluing[a] = b
        new_gluing[b] = a

    for k in range(n - 1):
        if k < n - 2 - k:
            glue(left[k], left[n - 2 - k])
            glue(right[k], right[n - 2 - k])
    charts = dict(s.charts) if s.charts else None
    surf = IntrinsicSurface(faces, s.lengths, new_gluing, charts=charts)
    new_marks = {}
    for pair, labset in marks.items():
        p2 = frozenset(rename.get(v, v) for v in pair)
        if len(p2) == 2 and _edge_exists(surf, p2):
            new_marks.setdefault(p2, set()).update(labset)
    return surf, new_marks, (ids[mid], prime[ids[mid]])


def _right_bank(s, u, right_prev, right_next):
    """Wedges of u on the right bank of the slit, walked ccw.

    right_prev is the mesh side carrying the incoming chain edge directed
    u -> previous id (so its corner is u); right_next is the side carrying
    the outgoing chain edge directed next id -> u.  The walk starts in
    right_prev's face and stops when crossing right_next would leave the bank.
    """
    bank = []
    cur = right_prev
    for _ in range(len(s.vertex(u).wedges)):
        bank.append(cur)
        cf, cc = cur
        side = (cf, (cc + 2) % 3)
        if side == right_next:
            return bank
        cur = s.gluing[side]
    raise PolyshearError("right bank walk failed to close")


# ---------------------------------------------------------------------------
# flat-vertex removal
# ---------------------------------------------------------------------------

def remove_flat_vertices(s: IntrinsicSurface, flat_eps=None) -> IntrinsicSurface:
    """Coarsen away vertices of zero curvature left by retriangulation.

    Each flat vertex's star develops to a planar polygon (star-shaped
    around the vertex image), which is re-triangulated without the center.
    Charts, marks and coordinates are not preserved; the result is meant
    for metric queries (canonical forms, distances), not further surgery.
    """
    if flat_eps is None:
        flat_eps = tol().flat
    cur = s
    skipped = set()
    while True:
        target = None
        # near-cancelling dipole pairs sit slightly above the threshold;
        # attempt those too and let the drift guard reject bad removals
        for bound in (flat_eps, 10.0 * flat_eps):
            for v in cur.vertex_ids:
                if v in skipped:
                    continue
                if abs(cur.curvature(v)) <= bound:
                    target = v
                    break
            if target is not None:
                break
        if target is None:
            return cur
        nxt = _remove_one_vertex(cur, target, flat_eps)
        if nxt is None:
            skipped.add(target)
        else:
            cur = nxt
            skipped.clear()


def _remove_one_vertex(s, v, flat_eps):
    rec = s.vertex(v)
    wedges = list(rec.wedges)
    m = len(wedges)
    if m < 3:
        return None
    star = {wf for wf, _ in wedges}
    if len(star) != m:
        return None  # a face visits v twice; leave it alone
    # develop the star around the origin; the fan misses closure by the
    # leftover curvature, so start at the shortest radial edge to park the
    # seam discrepancy (curvature times radius) where it is smallest
    start = min(range(m), key=lambda k: s.lengths[wedges[k][0]][wedges[k][1]])
    wedges = wedges[start:] + wedges[:start]
    ring_pos = []
    ring_ids = []
    ring_len = []  # exact length of the boundary side after wedge k
    slots = {}  # old boundary side -> ring slot
    ang = 0.0
    for k, (wf, wc) in enumerate(wedges):
        r = s.lengths[wf][wc]
        ring_pos.append((r * math.cos(ang), r * math.sin(ang)))
        ring_ids.append(s.faces[wf][(wc + 1) % 3])
        ring_len.append(s.lengths[wf][(wc + 1) % 3])
        slots[(wf, (wc + 1) % 3)] = k
        ang += s.corner_angle(wf, wc)
    try:
        tris = ear_clip(ring_pos)
    except PolyshearError:
        return None
    area_eps = 1e-13 * max(max(p[0] ** 2 + p[1] ** 2 for p in ring_pos), 1e-300)
    for (i, j, k) in tris:
        if abs(_ring_area([ring_pos[i], ring_pos[j], ring_pos[k]])) <= area_eps:
            return None
        sides = sorted((_ring_dist(ring_pos, ring_len, m, i, j),
                        _ring_dist(ring_pos, ring_len, m, j, k),
                        _ring_dist(ring_pos, ring_len, m, k, i)))
        if sides[0] + sides[1] - sides[2] <= 1e-12 * sides[2]:
            return None  # stored lengths would make the ear degenerate
    # assemble: kept faces first, then ear faces
    keep = [f for f in range(s.n_faces) if f not in star]
    remap = {f: i for i, f in enumerate(keep)}
    faces = [s.faces[f] for f in keep]
    lengths = [s.lengths[f] for f in keep]

    def edge_len(a, b):
        # ring edges keep their exact mesh length so the gluing with the
        # outside stays isometric; diagonals come from the development
        if (b - a) % m == 1:
            return ring_len[a]
        return _dist(ring_pos[a], ring_pos[b])

    ear_side = {}  # (i, j) ring index pair -> (new face, side)
    for t, (i, j, k) in enumerate(tris):
        nf = len(faces)
        faces.append((ring_ids[i], ring_ids[j], ring_ids[k]))
        lengths.append((edge_len(i, j), edge_len(j, k), edge_len(k, i)))
        for c, (a, b) in enumerate(((i, j), (j, k), (k, i))):
            ear_side[(a, b)] = (nf, c)
    gluing = {}
    # diagonals pair among ear faces; ring edges pair with the old outside
    for (a, b), (nf, c) in ear_side.items():
        if (b - a) % len(ring_pos) == 1:
            f_out, s_out = s.gluing[(wedges[a][0], (wedges[a][1] + 1) % 3)]
            if f_out in star:
                a2 = slots[(f_out, s_out)]
                gluing[(nf, c)] = ear_side[(a2, (a2 + 1) % len(ring_pos))]
            else:
                gluing[(nf, c)] = (remap[f_out], s_out)
        else:
            gluing[(nf, c)] = ear_side[(b, a)]
    for i, f in enumerate(keep):
        for c in range(3):
            f2, c2 = s.gluing[(f, c)]
            if f2 in star:
                a = slots[(f2, c2)]
                gluing[(i, c)] = ear_side[(a, (a + 1) % len(ring_pos))]
            else:
                gluing[(i, c)] = (remap[f2], c2)
    out = IntrinsicSurface(faces, lengths, gluing)
    # reject removals that perturb the curvature of the ring vertices by
    # more than the flatness budget (sliver stars amplify roundoff), unless
    # the vertex ends up flat: a dipole partner absorbing the removed
    # vertex's cancelling curvature is the desired outcome
    for rid in set(ring_ids):
        drift = abs(out.curvature(rid) - s.curvature(rid))
        if drift > 0.5 * flat_eps and abs(out.curvature(rid)) > flat_eps:
            return None
    return out


def simplify_flat(s: IntrinsicSurface, marks, protect, face_class=None,
                  flat_eps=None):
    """Remove flat helper vertices mid-pipeline, keeping charts and marks.

    Repeated surgeries accumulate nearly collinear helper nodes whose sliver
    stars degrade later operations; coarsening between steps keeps the mesh
    numerically healthy.  Vertices in protect are kept.  A vertex carrying
    exactly two equally labelled marked edges is removed by merging them into
    one; other marked vertices (seal junctions) are kept.  face_class, when
    given, maps (surface, face) to a partition key and removals never merge
    faces of different classes.

    Returns (surface, marks).
    """
    if flat_eps is None:
        flat_eps = tol().flat
    cur = s
    marks = {k: set(v) for k, v in (marks or {}).items()}
    skipped = set()
    while True:
        target = None
        for v in cur.vertex_ids:
            if v in protect or v in skipped:
                continue
            if abs(cur.curvature(v)) <= 10.0 * flat_eps:
                target = v
                break
        if target is None:
            return cur, marks
        res = _remove_one_vertex_keep(cur, target, marks, face_class, flat_eps)
        if res is None:
            skipped.add(target)
        else:
            cur, marks = res
            skipped.clear()


def _remove_one_vertex_keep(s, v, marks, face_class, flat_eps):
    rec = s.vertex(v)
    wedges = list(rec.wedges)
    m = len(wedges)
    if m < 3:
        return None
    star = {wf for wf, _ in wedges}
    if len(star) != m:
        return None  # a face visits v twice
    if face_class is not None and len({face_class(s, f) for f in star}) > 1:
        return None
    # rotate so the seam discrepancy lands on the shortest radial edge
    start = min(range(m), key=lambda k: s.lengths[wedges[k][0]][wedges[k][1]])
    wedges = wedges[start:] + wedges[:start]
    ring_pos = []
    ring_ids = []
    ring_len = []
    slots = {}
    ang = 0.0
    for k, (wf, wc) in enumerate(wedges):
        r = s.lengths[wf][wc]
        ring_pos.append((r * math.cos(ang), r * math.sin(ang)))
        ring_ids.append(s.faces[wf][(wc + 1) % 3])
        ring_len.append(s.lengths[wf][(wc + 1) % 3])
        slots[(wf, (wc + 1) % 3)] = k
        ang += s.corner_angle(wf, wc)
    if len(set(ring_ids)) != m:
        return None  # repeated ring vertex: the merged edge would be ambiguous
    # marked edges incident to v
    marked = [k for k in range(m) if frozenset((v, ring_ids[k])) in marks]
    if len(marked) not in (0, 2):
        return None  # seal junction or endpoint
    if marked:
        ka, kb = marked
        la = marks[frozenset((v, ring_ids[ka]))]
        lb = marks[frozenset((v, ring_ids[kb]))]
        if la != lb:
            return None
        if frozenset((ring_ids[ka], ring_ids[kb])) in marks:
            return None  # the merged edge already exists elsewhere
        # the two marked edges must run straight through v
        pa, pb = ring_pos[ka], ring_pos[kb]
        na = math.hypot(*pa)
        nb = math.hypot(*pb)
        if abs(_cross(pa, pb)) > 10.0 * flat_eps * na * nb or \
           pa[0] * pb[0] + pa[1] * pb[1] >= 0.0:
            return None
        halves = [[i % m for i in range(ka, ka + (kb - ka) % m + 1)],
                  [i % m for i in range(kb, kb + (ka - kb) % m + 1)]]
        tris = []
        try:
            for half in halves:
                if len(half) < 3:
                    return None
                for (i, j, k) in ear_clip([ring_pos[i] for i in half]):
                    tris.append((half[i], half[j], half[k]))
        except PolyshearError:
            return None
    else:
        try:
            tris = ear_clip(ring_pos)
        except PolyshearError:
            return None
    area_eps = 1e-13 * max(max(p[0] ** 2 + p[1] ** 2 for p in ring_pos), 1e-300)
    for (i, j, k) in tris:
        if abs(_ring_area([ring_pos[i], ring_pos[j], ring_pos[k]])) <= area_eps:
            return None
        sides = sorted((_ring_dist(ring_pos, ring_len, m, i, j),
                        _ring_dist(ring_pos, ring_len, m, j, k),
                        _ring_dist(ring_pos, ring_len, m, k, i)))
        if sides[0] + sides[1] - sides[2] <= 1e-12 * sides[2]:
            return None  # stored lengths would make the ear degenerate
    keep = [f for f in range(s.n_faces) if f not in star]
    remap = {f: i for i, f in enumerate(keep)}
    faces = [s.faces[f] for f in keep]
    lengths = [s.lengths[f] for f in keep]
    charts = {remap[f]: s.charts[f] for f in keep} if s.charts else None
    # chart frame: star coordinates -> layout of the first wedge's face
    f0, wc0 = wedges[0]
    lay0 = s.layout_face(f0)
    a0 = lay0[wc0]
    e0 = _sub(lay0[(wc0 + 1) % 3], lay0[wc0])
    r0 = s.lengths[f0][wc0]
    co, si = e0[0] / r0, e0[1] / r0

    def to_lay0(p):
        return (a0[0] + co * p[0] - si * p[1], a0[1] + si * p[0] + co * p[1])

    def edge_len(a, b):
        if (b - a) % m == 1:
            return ring_len[a]
        return _dist(ring_pos[a], ring_pos[b])

    ear_side = {}
    for (i, j, k) in tris:
        nf = len(faces)
        faces.append((ring_ids[i], ring_ids[j], ring_ids[k]))
        lengths.append((edge_len(i, j), edge_len(j, k), edge_len(k, i)))
        if charts is not None:
            charts[nf] = _chart_for(
                s, f0, tuple(to_lay0(ring_pos[q]) for q in (i, j, k)))
        for c, (a, b) in enumerate(((i, j), (j, k), (k, i))):
            ear_side[(a, b)] = (nf, c)
    gluing = {}
    for (a, b), (nf, c) in ear_side.items():
        if (b - a) % m == 1:
            f_out, s_out = s.gluing[(wedges[a][0], (wedges[a][1] + 1) % 3)]
            if f_out in star:
                a2 = slots[(f_out, s_out)]
                gluing[(nf, c)] = ear_side[(a2, (a2 + 1) % m)]
            else:
                gluing[(nf, c)] = (remap[f_out], s_out)
        else:
            gluing[(nf, c)] = ear_side[(b, a)]
    for i, f in enumerate(keep):
        for c in range(3):
            f2, c2 = s.gluing[(f, c)]
            if f2 in star:
                a = slots[(f2, c2)]
                gluing[(i, c)] = ear_side[(a, (a + 1) % m)]
            else:
                gluing[(i, c)] = (remap[f2], c2)
    out = IntrinsicSurface(faces, lengths, gluing, charts=charts)
    for rid in set(ring_ids):
        drift = abs(out.curvature(rid) - s.curvature(rid))
        if drift > 0.5 * flat_eps and abs(out.curvature(rid)) > flat_eps:
            return None
    new_marks = {k: set(vv) for k, vv in marks.items()}
    if marked:
        la = new_marks.pop(frozenset((v, ring_ids[ka])))
        new_marks.pop(frozenset((v, ring_ids[kb])))
        new_marks[frozenset((ring_ids[ka], ring_ids[kb]))] = la
    return out, new_marks


def _ring_dist(ring_pos, ring_len, m, a, b):
    """Edge length the assembled ear face will store for ring pair (a, b)."""
    if (b - a) % m == 1:
        return ring_len[a]
    return _dist(ring_pos[a], ring_pos[b])
