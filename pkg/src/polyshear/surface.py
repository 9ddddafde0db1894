"""Intrinsic triangulated metric spheres.

A surface is a set of triangles given purely by edge lengths, plus a gluing
map pairing oriented triangle sides.  No embedding is required; when one is
available (input came from an OFF mesh) the vertex coordinates are retained
as provenance.

Conventions
-----------
* Face ``f`` has corners ``(v0, v1, v2)`` listed ccw.
* Side ``s`` of face ``f`` joins corner ``s`` to corner ``s+1`` (mod 3).
* ``gluing[(f, s)] = (f2, s2)`` identifies the sides with opposite
  orientation: corner ``(f, s)`` coincides with corner ``(f2, s2+1)``.
* ``layout_face`` places a face in its local chart with corner 0 at the
  origin and side 0 along +x; all face-local angles are measured ccw from
  the side-0 direction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import (
    ExceedsMaxCrossings,
    HitVertex,
    NonConvexPolygon,
    NonManifold,
    NonTriangular,
    NotClosed,
)
from .tolerances import tol

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# small planar helpers
# ---------------------------------------------------------------------------

def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _dist(a, b):
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _norm(a):
    return math.hypot(a[0], a[1])


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


def triangle_third_point(base_len, right_len, left_len, origin, along):
    """Third corner of a ccw triangle with corner0 at `origin`, corner1 at
    `origin + base_len*along`, side lengths (base_len, right_len, left_len).

    `along` must be a unit vector.  right_len joins corners 1-2, left_len
    joins corners 2-0.
    """
    x = (base_len * base_len + left_len * left_len - right_len * right_len) / (2.0 * base_len)
    y2 = left_len * left_len - x * x
    y = math.sqrt(max(y2, 0.0))
    px = origin[0] + x * along[0] - y * along[1]
    py = origin[1] + x * along[1] + y * along[0]
    return (px, py)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurfacePoint:
    """Face-anchored point in barycentric coordinates."""

    face: int
    bary: tuple[float, float, float]

    def __post_init__(self):
        s = sum(self.bary)
        if abs(s - 1.0) > 1e-6:
            raise ValueError(f"barycentric sum {s} != 1")


@dataclass(frozen=True)
class TangentDirection:
    """Direction at a surface point, ccw from side 0 of the anchor face."""

    point: SurfacePoint
    angle: float


@dataclass(frozen=True)
class GeodesicPath:
    """A geodesic on the surface as a chain of straight face segments.

    segments[i] = (face, start_bary, end_bary); consecutive segments meet on
    glued sides.  planar holds the unfolded trace of the chain, starting in
    the chart of segments[0].face.
    """

    segments: tuple
    length: float
    planar: tuple
    is_segment: bool = False

    @property
    def start(self) -> SurfacePoint:
        f, b, _ = self.segments[0]
        return SurfacePoint(f, b)

    @property
    def end(self) -> SurfacePoint:
        f, _, b = self.segments[-1]
        return SurfacePoint(f, b)

    def reversed(self) -> "GeodesicPath":
        segs = tuple((f, b1, b0) for (f, b0, b1) in reversed(self.segments))
        return GeodesicPath(segs, self.length, tuple(reversed(self.planar)), self.is_segment)


@dataclass(frozen=True)
class VertexRecord:
    id: int
    wedges: tuple  # cyclic ccw list of (face, corner)
    total_angle: float

    @property
    def curvature(self) -> float:
        return TWO_PI - self.total_angle


@dataclass
class ValidationReport:
    entries: list = field(default_factory=list)

    def add(self, code: str, detail: str):
        self.entries.append({"code": code, "detail": detail})

    @property
    def ok(self) -> bool:
        return not self.entries

    def codes(self):
        return [e["code"] for e in self.entries]

    def to_json(self) -> str:
        return json.dumps(self.entries, indent=2)


# ---------------------------------------------------------------------------
# the surface
# ---------------------------------------------------------------------------

class IntrinsicSurface:
    """Closed, oriented, triangulated surface defined by lengths and gluings.

    Treated as an immutable value: all reshaping operations build new
    surfaces.
    """

    def __init__(self, faces, lengths, gluing, coords=None, charts=None):
        self.faces = [tuple(f) for f in faces]
        self.lengths = [tuple(float(x) for x in l) for l in lengths]
        self.gluing = dict(gluing)
        # optional extrinsic coordinates per vertex id
        self.coords = dict(coords) if coords else None
        # optional provenance charts: face -> (source_id, ((x,y),)*3)
        self.charts = dict(charts) if charts else None
        self._layouts = {}
        self._vertex_records = None
        self._areas = None

    # -- basic queries ------------------------------------------------------

    @property
    def n_faces(self):
        return len(self.faces)

    @property
    def vertex_ids(self):
        out = set()
        for f in self.faces:
            out.update(f)
        return sorted(out)

    def corner(self, f, c):
        return self.faces[f][c % 3]

    def side_length(self, f, s):
        return self.lengths[f][s % 3]

    def corner_angle(self, f, c):
        """Interior angle at corner c of face f (law of cosines)."""
        c %= 3
        a = self.lengths[f][c]          # side c: corner c -> c+1
        b = self.lengths[f][(c + 2) % 3]  # side c+2: corner c+2 -> c
        opp = self.lengths[f][(c + 1) % 3]
        x = (a * a + b * b - opp * opp) / (2.0 * a * b)
        return math.acos(min(1.0, max(-1.0, x)))

    def face_area(self, f):
        a, b, c = self.lengths[f]
        s = 0.5 * (a + b + c)
        return math.sqrt(max(s * (s - a) * (s - b) * (s - c), 0.0))

    def area(self):
        if self._areas is None:
            self._areas = sum(self.face_area(f) for f in range(self.n_faces))
        return self._areas

    @property
    def scale(self):
        return max(max(l) for l in self.lengths)

    # -- layouts ------------------------------------------------------------

    def layout_face(self, f):
        """Local planar chart of face f: corner0 at origin, side0 along +x."""
        if f not in self._layouts:
            l0, l1, l2 = self.lengths[f]
            p2 = triangle_third_point(l0, l1, l2, (0.0, 0.0), (1.0, 0.0))
            self._layouts[f] = ((0.0, 0.0), (l0, 0.0), p2)
        return self._layouts[f]

    def place_neighbor(self, f, s, pts):
        """Planar placement of the face across side s, given f placed at pts.

        Returns (f2, pts2) with the shared edge coincident and f2 laid out on
        the far side of it (an unfolding step).
        """
        f2, s2 = self.gluing[(f, s % 3)]
        a = pts[s % 3]
        b = pts[(s + 1) % 3]
        # in f2 the shared side runs b -> a
        base = self.lengths[f2][s2]
        d = _sub(a, b)
        along = (d[0] / base, d[1] / base)
        third = triangle_third_point(
            base, self.lengths[f2][(s2 + 1) % 3], self.lengths[f2][(s2 + 2) % 3], b, along
        )
        pts2 = [None, None, None]
        pts2[s2] = b
        pts2[(s2 + 1) % 3] = a
        pts2[(s2 + 2) % 3] = third
        return f2, tuple(pts2)

    # -- barycentric helpers ------------------------------------------------

    def bary_to_planar(self, pts, bary):
        return (
            bary[0] * pts[0][0] + bary[1] * pts[1][0] + bary[2] * pts[2][0],
            bary[0] * pts[0][1] + bary[1] * pts[1][1] + bary[2] * pts[2][1],
        )

    def planar_to_bary(self, pts, p):
        (x0, y0), (x1, y1), (x2, y2) = pts
        det = (y1 - y2) * (x0 - x2) + (x2 - x1) * (y0 - y2)
        b0 = ((y1 - y2) * (p[0] - x2) + (x2 - x1) * (p[1] - y2)) / det
        b1 = ((y2 - y0) * (p[0] - x2) + (x0 - x2) * (p[1] - y2)) / det
        return (b0, b1, 1.0 - b0 - b1)

    def point_planar(self, p: SurfacePoint):
        return self.bary_to_planar(self.layout_face(p.face), p.bary)

    # -- vertex structure ---------------------------------------------------

    def _build_vertices(self):
        recs = {}
        seen = set()
        for f in range(self.n_faces):
            for c in range(3):
                if (f, c) in seen:
                    continue
                v = self.faces[f][c]
                wedges = []
                cur = (f, c)
                while cur not in seen:
                    seen.add(cur)
                    wedges.append(cur)
                    cf, cc = cur
                    f2, s2 = self.gluing[(cf, (cc + 2) % 3)]
                    cur = (f2, s2)
                total = sum(self.corner_angle(wf, wc) for wf, wc in wedges)
                recs[v] = VertexRecord(v, tuple(wedges), total)
        self._vertex_records = recs

    def vertex(self, v) -> VertexRecord:
        if self._vertex_records is None:
            self._build_vertices()
        return self._vertex_records[v]

    def curvature(self, v) -> float:
        return self.vertex(v).curvature

    def curvatures(self) -> dict:
        return {v: self.curvature(v) for v in self.vertex_ids}

    def vertex_point(self, v) -> SurfacePoint:
        f, c = self.vertex(v).wedges[0]
        bary = [0.0, 0.0, 0.0]
        bary[c] = 1.0
        return SurfacePoint(f, tuple(bary))

    # -- point classification ----------------------------------------------

    def point_kind(self, p: SurfacePoint):
        """('vertex', v) | ('edge', (f, s, t)) | ('face', None).

        For edge points t is the arclength from corner s along side s.
        """
        eps = tol().bar ** 0.5  # bary snap for classification
        zero = [i for i in range(3) if p.bary[i] <= eps]
        if len(zero) == 2:
            c = ({0, 1, 2} - set(zero)).pop()
            return ("vertex", self.faces[p.face][c])
        if len(zero) == 1:
            z = zero[0]
            s = (z + 1) % 3  # side opposite corner z joins corners z+1 -> z+2
            t = p.bary[(s + 1) % 3] * self.lengths[p.face][s]
            return ("edge", (p.face, s, t))
        return ("face", None)

    def mirror_edge_point(self, f, s, t):
        """The same edge point seen from the glued side."""
        f2, s2 = self.gluing[(f, s)]
        return (f2, s2, self.lengths[f][s] - t)

    def edge_point(self, f, s, t) -> SurfacePoint:
        length = self.lengths[f][s]
        bary = [0.0, 0.0, 0.0]
        bary[s] = 1.0 - t / length
        bary[(s + 1) % 3] = t / length
        return SurfacePoint(f, tuple(bary))

    def same_point(self, p: SurfacePoint, q: SurfacePoint, eps=None) -> bool:
        if eps is None:
            eps = 10 * tol().hit * self.scale
        kp, dp = self.point_kind(p)
        kq, dq = self.point_kind(q)
        if kp == "vertex" and kq == "vertex":
            return dp == dq
        if p.face == q.face:
            return _dist(self.point_planar(p), self.point_planar(q)) <= eps
        if kp == "edge":
            f2, s2, t2 = self.mirror_edge_point(*dp)
            if f2 == q.face:
                return _dist(
                    self.bary_to_planar(self.layout_face(f2), self.edge_point(f2, s2, t2).bary),
                    self.point_planar(q),
                ) <= eps
        return False

    # -- angular coordinates around a point ---------------------------------

    def total_angle_at(self, p: SurfacePoint) -> float:
        kind, data = self.point_kind(p)
        if kind == "vertex":
            return self.vertex(data).total_angle
        return TWO_PI

    def direction_to_global(self, p: SurfacePoint, face: int, local_angle: float) -> float:
        """Angle of a direction at p, in p's intrinsic angular chart.

        For a face-interior point the chart is the face chart itself.  For an
        edge point, angle 0 is the along-edge direction (corner s -> s+1 of
        the primary side).  For a vertex, angle 0 is the direction of the
        first wedge's outgoing side.
        """
        kind, data = self.point_kind(p)
        if kind == "face":
            if face != p.face:
                raise ValueError("direction anchored off the point's face")
            return local_angle % TWO_PI
        if kind == "edge":
            f, s, t = data
            if face == f:
                pts = self.layout_face(f)
                e = _sub(pts[(s + 1) % 3], pts[s])
                base = math.atan2(e[1], e[0])
                return (local_angle - base) % TWO_PI
            f2, s2, t2 = self.mirror_edge_point(f, s, t)
            if face != f2:
                raise ValueError("direction anchored off the point's edge")
            pts2 = self.layout_face(f2)
            e2 = _sub(pts2[s2], pts2[(s2 + 1) % 3])  # direction matching f's s->s+1
            base2 = math.atan2(e2[1], e2[0])
            return (local_angle - base2) % TWO_PI
        # vertex
        rec = self.vertex(data)
        cum = 0.0
        for wf, wc in rec.wedges:
            if wf == face and self.faces[wf][wc] == data:
                pts = self.layout_face(wf)
                e = _sub(pts[(wc + 1) % 3], pts[wc])
                base = math.atan2(e[1], e[0])
                off = (local_angle - base) % TWO_PI
                # clamp into the wedge
                return (cum + off) % rec.total_angle
            cum += self.corner_angle(wf, wc)
        raise ValueError("face not incident to vertex")

    def direction_to_local(self, p: SurfacePoint, global_angle: float):
        """Inverse of direction_to_global: returns (face, local_angle)."""
        kind, data = self.point_kind(p)
        if kind == "face":
            return p.face, global_angle % TWO_PI
        if kind == "edge":
            f, s, t = data
            g = global_angle % TWO_PI
            if g <= math.pi:
                pts = self.layout_face(f)
                e = _sub(pts[(s + 1) % 3], pts[s])
                base = math.atan2(e[1], e[0])
                return f, (base + g) % TWO_PI
            f2, s2, t2 = self.mirror_edge_point(f, s, t)
            pts2 = self.layout_face(f2)
            e2 = _sub(pts2[s2], pts2[(s2 + 1) % 3])
            base2 = math.atan2(e2[1], e2[0])
            return f2, (base2 + g) % TWO_PI
        rec = self.vertex(data)
        g = global_angle % rec.total_angle
        cum = 0.0
        for wf, wc in rec.wedges:
            ang = self.corner_angle(wf, wc)
            if g <= cum + ang or (wf, wc) == rec.wedges[-1]:
                pts = self.layout_face(wf)
                e = _sub(pts[(wc + 1) % 3], pts[wc])
                base = math.atan2(e[1], e[0])
                return wf, (base + (g - cum)) % TWO_PI
            cum += ang
        raise AssertionError("unreachable")

    # -- tracing ------------------------------------------------------------

    def trace_geodesic(self, d: TangentDirection, length: float, max_crossings: int = 2000) -> GeodesicPath:
        """Straight-line continuation of d for the given length.

        Raises HitVertex if the trace passes within the hit tolerance of a
        vertex, ExceedsMaxCrossings if it crosses too many faces.
        """
        if length < 0:
            raise ValueError("negative length")
        hit_eps = tol().hit * self.scale
        p = d.point
        # re-anchor boundary starts so the ray points into the chosen face
        g = self.direction_to_global(p, p.face, d.angle)
        face, local = self.direction_to_local(p, g)
        pts = self.layout_face(face)
        pos = self.bary_to_planar(pts, self.point_bary_in_face(p, face))
        dirv = (math.cos(local), math.sin(local))
        remaining = length
        segments = []
        planar = [pos]
        prev_side = None
        for _ in range(max_crossings + 1):
            best = None
            for s in range(3):
                if s == prev_side:
                    continue
                a, b = pts[s], pts[(s + 1) % 3]
                e = _sub(b, a)
                denom = _cross(dirv, e)
                if abs(denom) < 1e-300:
                    continue
                tray = _cross(_sub(a, pos), e) / denom
                u = _cross(_sub(a, pos), dirv) / denom
                if tray <= hit_eps:
                    continue
                if u < -1e-12 or u > 1 + 1e-12:
                    continue
                if best is None or tray < best[0]:
                    best = (tray, s, u)
            if best is None:
                # every exit is inside the hit tolerance: the ray grazes a
                # corner, so hand it to the vertex handling below
                c = min(range(3), key=lambda cc: _dist(pos, pts[cc]))
                dcorner = _dist(pos, pts[c])
                if dcorner > max(remaining + 10 * hit_eps, 1e3 * hit_eps):
                    raise ExceedsMaxCrossings("trace stalled (no exit found)")
                tray, s, u = dcorner, None, None
                xp = pts[c]
            else:
                tray, s, u = best
                if remaining <= tray:
                    endpt = (pos[0] + remaining * dirv[0], pos[1] + remaining * dirv[1])
                    for c in range(3):
                        if _dist(endpt, pts[c]) <= hit_eps:
                            endpt = pts[c]  # snap a landing onto the vertex
                    segments.append((face, _clamp_bary(self.planar_to_bary(pts, pos)),
                                     _clamp_bary(self.planar_to_bary(pts, endpt))))
                    planar.append(endpt)
                    return GeodesicPath(tuple(segments), length, tuple(planar))
                a, b = pts[s], pts[(s + 1) % 3]
                xp = (a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1]))
            for c in range(3):
                if _dist(xp, pts[c]) <= hit_eps:
                    if remaining - tray <= hit_eps:
                        segments.append((face, _clamp_bary(self.planar_to_bary(pts, pos)),
                                         _clamp_bary(self.planar_to_bary(pts, pts[c]))))
                        planar.append(pts[c])
                        return GeodesicPath(tuple(segments), length, tuple(planar))
                    vid = self.faces[face][c]
                    if abs(self.curvature(vid)) <= tol().flat:
                        # a geodesic continues straight through a flat vertex
                        segments.append((face, _clamp_bary(self.planar_to_bary(pts, pos)),
                                         _clamp_bary(self.planar_to_bary(pts, pts[c]))))
                        planar.append(pts[c])
                        bary = [0.0, 0.0, 0.0]
                        bary[c] = 1.0
                        vp = SurfacePoint(face, tuple(bary))
                        lay = self.layout_face(face)
                        cur = math.atan2(pts[1][1] - pts[0][1], pts[1][0] - pts[0][0])
                        ref = math.atan2(lay[1][1] - lay[0][1], lay[1][0] - lay[0][0])
                        back = math.atan2(-dirv[1], -dirv[0]) + (ref - cur)
                        rec = self.vertex(vid)
                        g_in = self.direction_to_global(vp, face, back)
                        g_out = (g_in + rec.total_angle / 2.0) % rec.total_angle
                        f2, loc2 = self.direction_to_local(vp, g_out)
                        bary2 = self.point_bary_in_face(vp, f2)
                        cont = self.trace_geodesic(
                            TangentDirection(SurfacePoint(f2, bary2), loc2),
                            remaining - tray, max_crossings)
                        segments.extend(cont.segments)
                        planar.extend(_chain_planar(planar[-1], dirv, cont.planar))
                        return GeodesicPath(tuple(segments), length, tuple(planar))
                    raise HitVertex(vid, length - remaining + tray)
            segments.append((face, _clamp_bary(self.planar_to_bary(pts, pos)),
                             _clamp_bary(self.planar_to_bary(pts, xp))))
            planar.append(xp)
            remaining -= tray
            pos = xp
            f2, pts2 = self.place_neighbor(face, s, pts)
            prev_side = self.gluing[(face, s)][1]
            face, pts = f2, pts2
        raise ExceedsMaxCrossings(f"more than {max_crossings} crossings")

    def trace_global(self, p: SurfacePoint, global_angle: float, length: float,
                     max_crossings: int = 2000) -> GeodesicPath:
        """Trace from p along a direction given in p's intrinsic angular chart."""
        f, local = self.direction_to_local(p, global_angle)
        p2 = SurfacePoint(f, self.point_bary_in_face(p, f))
        return self.trace_geodesic(TangentDirection(p2, local), length, max_crossings)

    def point_bary_in_face(self, p: SurfacePoint, f: int):
        """Barycentric coordinates of p expressed in face f's chart."""
        if f == p.face:
            return p.bary
        kind, data = self.point_kind(p)
        if kind == "edge":
            f2, s2, t2 = self.mirror_edge_point(*data)
            if f2 == f:
                return self.edge_point(f2, s2, t2).bary
        if kind == "vertex":
            for c in range(3):
                if self.faces[f][c] == data:
                    bary = [0.0, 0.0, 0.0]
                    bary[c] = 1.0
                    return tuple(bary)
        raise ValueError("point does not lie on the requested face")

    # -- validation ---------------------------------------------------------

    def validate(self) -> ValidationReport:
        rep = ValidationReport()
        t = tol()
        scale = self.scale
        # gluing involution and length match
        for (f, s), (f2, s2) in self.gluing.items():
            if self.gluing.get((f2, s2)) != (f, s):
                rep.add("BadInvolution", f"gluing({f},{s}) not involutive")
            la, lb = self.lengths[f][s], self.lengths[f2][s2]
            if abs(la - lb) > t.len_rel * scale * 10:
                rep.add("GluingLengthMismatch", f"sides ({f},{s})~({f2},{s2}): {la} vs {lb}")
        for f in range(self.n_faces):
            for s in range(3):
                if (f, s) not in self.gluing:
                    rep.add("UnpairedSide", f"side ({f},{s}) unglued")
        # triangle inequality
        for f, (a, b, c) in enumerate(self.lengths):
            if a + b <= c or b + c <= a or a + c <= b:
                rep.add("TriangleInequality", f"face {f} lengths {(a, b, c)}")
            if min(a, b, c) <= 0:
                rep.add("NonPositiveLength", f"face {f} lengths {(a, b, c)}")
        if not rep.ok:
            return rep
        # vertex angles
        total_curv = 0.0
        for v in self.vertex_ids:
            rec = self.vertex(v)
            if rec.total_angle > TWO_PI + 100 * t.ang:
                rep.add("ExcessAngle", f"vertex {v} angle sum {rec.total_angle}")
            total_curv += rec.curvature
        if abs(total_curv - 4 * math.pi) > math.sqrt(t.ang):
            rep.add("GaussBonnet", f"total curvature {total_curv} != 4*pi")
        # connectivity of the gluing graph
        if self.n_faces:
            seen = {0}
            stack = [0]
            while stack:
                f = stack.pop()
                for s in range(3):
                    f2, _ = self.gluing[(f, s)]
                    if f2 not in seen:
                        seen.add(f2)
                        stack.append(f2)
            if len(seen) != self.n_faces:
                rep.add("NotConnected", f"{len(seen)} of {self.n_faces} faces reachable")
        return rep

    # -- serialization ------------------------------------------------------

    def to_json_obj(self):
        obj = {
            "triangles": [
                {"corners": list(self.faces[f]), "lengths": list(self.lengths[f])}
                for f in range(self.n_faces)
            ],
            "gluing": [[f, s, f2, s2] for (f, s), (f2, s2) in sorted(self.gluing.items()) if (f, s) < (f2, s2)],
        }
        if self.coords:
            obj["coords"] = {str(v): list(c) for v, c in self.coords.items()}
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)

    @classmethod
    def from_json_obj(cls, obj) -> "IntrinsicSurface":
        faces = [tuple(t["corners"]) for t in obj["triangles"]]
        lengths = [tuple(t["lengths"]) for t in obj["triangles"]]
        gluing = {}
        for f, s, f2, s2 in obj["gluing"]:
            gluing[(f, s)] = (f2, s2)
            gluing[(f2, s2)] = (f, s)
        coords = None
        if "coords" in obj:
            coords = {int(v): tuple(c) for v, c in obj["coords"].items()}
        return cls(faces, lengths, gluing, coords=coords)

    @classmethod
    def from_json(cls, text: str) -> "IntrinsicSurface":
        return cls.from_json_obj(json.loads(text))


def _clamp_bary(b):
    b = [max(0.0, x) for x in b]
    s = sum(b)
    return tuple(x / s for x in b)


def _chain_planar(anchor, dirv, pl):
    """Rigidly continue a development polyline pl from anchor along dirv."""
    if len(pl) < 2:
        return []
    d0 = (pl[1][0] - pl[0][0], pl[1][1] - pl[0][1])
    a = math.atan2(dirv[1], dirv[0]) - math.atan2(d0[1], d0[0])
    ca, sa = math.cos(a), math.sin(a)
    out = []
    for q in pl[1:]:
        v = (q[0] - pl[0][0], q[1] - pl[0][1])
        out.append((anchor[0] + ca * v[0] - sa * v[1],
                    anchor[1] + sa * v[0] + ca * v[1]))
    return out


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def build_from_mesh(vertices: Sequence, faces: Sequence) -> IntrinsicSurface:
    """Intrinsic surface from an embedded triangulated mesh.

    vertices: list of 3-d points; faces: list of vertex-index triples with
    consistent (outward ccw) orientation.
    """
    for f in faces:
        if len(f) != 3:
            raise NonTriangular(f"face {f} is not a triangle")
    lengths = []
    for (i, j, k) in faces:
        vi, vj, vk = vertices[i], vertices[j], vertices[k]
        lengths.append((
            math.dist(vi, vj),
            math.dist(vj, vk),
            math.dist(vk, vi),
        ))
    # pair sides by directed vertex pairs
    directed = {}
    for f, (i, j, k) in enumerate(faces):
        vs = (i, j, k)
        for s in range(3):
            key = (vs[s], vs[(s + 1) % 3])
            if key in directed:
                raise NonManifold(f"duplicate directed edge {key}")
            directed[key] = (f, s)
    gluing = {}
    for (a, b), (f, s) in directed.items():
        if (b, a) not in directed:
            raise NotClosed(f"boundary edge {(a, b)}")
        gluing[(f, s)] = directed[(b, a)]
    coords = {i: tuple(map(float, vertices[i])) for i in range(len(vertices))}
    return IntrinsicSurface(faces, lengths, gluing, coords=coords)


def read_off(text: str):
    """Parse an ASCII OFF file into (vertices, faces); faces fan-triangulated."""
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("OFF"):
        raise ValueError("not an OFF file")
    header = lines[0][3:].split() or lines[1].split()
    idx = 1 if not lines[0][3:].split() else 1
    if lines[0].strip() == "OFF":
        counts = lines[1].split()
        idx = 2
    else:
        counts = lines[0][3:].split()
        idx = 1
    nv, nf = int(counts[0]), int(counts[1])
    vertices = []
    for i in range(nv):
        xs = lines[idx + i].split()
        vertices.append(tuple(float(x) for x in xs[:3]))
    faces = []
    for i in range(nf):
        xs = lines[idx + nv + i].split()
        k = int(xs[0])
        poly = [int(x) for x in xs[1:1 + k]]
        for j in range(1, k - 1):
            faces.append((poly[0], poly[j], poly[j + 1]))
    return vertices, faces


def build_from_off(text: str) -> IntrinsicSurface:
    vertices, faces = read_off(text)
    return build_from_mesh(vertices, faces)


def polygon_is_convex(pts) -> bool:
    n = len(pts)
    if n < 3:
        return False
    sign = 0.0
    for i in range(n):
        a, b, c = pts[i], pts[(i + 1) % n], pts[(i + 2) % n]
        cr = _cross(_sub(b, a), _sub(c, b))
        if abs(cr) < 1e-14:
            continue
        if sign == 0.0:
            sign = cr
        elif sign * cr < 0:
            return False
    return sign != 0.0


def build_doubly_covered_polygon(points) -> IntrinsicSurface:
    """Doubly-covered convex polygon as an intrinsic surface.

    points: ccw planar convex polygon.  Front is fan-triangulated; the back
    is a mirror copy glued rim to rim.
    """
    pts = [tuple(map(float, p)) for p in points]
    n = len(pts)
    if not polygon_is_convex(pts):
        raise NonConvexPolygon("input polygon is not convex (or not ccw)")
    faces = []
    lengths = []

    def add_face(i, j, k):
        faces.append((i, j, k))
        lengths.append((_dist(pts[i], pts[j]), _dist(pts[j], pts[k]), _dist(pts[k], pts[i])))

    # front: fan around vertex 0, ccw
    for j in range(1, n - 1):
        add_face(0, j, j + 1)
    # back: mirrored orientation, same vertex ids
    for j in range(1, n - 1):
        add_face(0, j + 1, j)
    directed = {}
    for f, vs in enumerate(faces):
        for s in range(3):
            key = (vs[s], vs[(s + 1) % 3], "F" if f < n - 2 else "B")
            directed[key] = (f, s)
    gluing = {}
    # fan diagonals pair within each cover; rim edges pair across covers
    for f, vs in enumerate(faces):
        side = "F" if f < n - 2 else "B"
        other_side = "B" if side == "F" else "F"
        for s in range(3):
            a, b = vs[s], vs[(s + 1) % 3]
            if (b, a, side) in directed:
                gluing[(f, s)] = directed[(b, a, side)]
            else:
                gluing[(f, s)] = directed[(b, a, other_side)]
    # provenance: planar coordinates with z=0
    coords = {i: (pts[i][0], pts[i][1], 0.0) for i in range(n)}
    surf = IntrinsicSurface(faces, lengths, gluing, coords=coords)
    return surf


# ---------------------------------------------------------------------------
# angles between paths
# ---------------------------------------------------------------------------

def path_direction_at(s: IntrinsicSurface, path: GeodesicPath, p: SurfacePoint):
    """(face, local_angle) of the path at its endpoint p, pointing away from p."""
    from .errors import NotIncident

    if s.same_point(path.start, p):
        f = path.segments[0][0]
        a, b = path.planar[0], path.planar[1]
    elif s.same_point(path.end, p):
        f = path.segments[-1][0]
        a, b = path.planar[-1], path.planar[-2]
        # planar trace is in the chart of the *first* face; recompute locally
        pts = s.layout_face(f)
        a = s.bary_to_planar(pts, path.segments[-1][2])
        b = s.bary_to_planar(pts, path.segments[-1][1])
        return f, math.atan2(b[1] - a[1], b[0] - a[0])
    else:
        raise NotIncident("path endpoint does not coincide with the given point")
    return f, math.atan2(b[1] - a[1], b[0] - a[0])


def angle_between(s: IntrinsicSurface, a: GeodesicPath, b: GeodesicPath, at: SurfacePoint) -> float:
    """Ccw surface angle from path a to path b at their common endpoint."""
    fa, la = path_direction_at(s, a, at)
    fb, lb = path_direction_at(s, b, at)
    ga = s.direction_to_global(at, fa, la)
    gb = s.direction_to_global(at, fb, lb)
    total = s.total_angle_at(at)
    return (gb - ga) % total
