"""Isometry-invariant fingerprints of intrinsic surfaces.

Two surfaces built by independent operation sequences rarely share a
triangulation, so equality is checked on metric invariants: the multiset of
vertex curvatures and the multiset of pairwise geodesic distances between
vertices.  This is a practical oracle for the small closed surfaces handled
here, not a complete isometry test.
"""

from __future__ import annotations

import hashlib
import json

from .geodesics import geodesic_distance
from .surface import IntrinsicSurface
from .surgery import remove_flat_vertices
from .tolerances import tol


def canonical_form(s: IntrinsicSurface, curvature_tol: float = None):
    """(sorted curvatures, sorted pairwise cone-point distances, area).

    Flat vertices (helper nodes left by retriangulation) are metrically
    invisible and are excluded, so surfaces built by different operation
    sequences compare on their cone points alone.
    """
    if curvature_tol is None:
        curvature_tol = tol().flat
    s = remove_flat_vertices(s, flat_eps=curvature_tol)
    vs = [v for v in s.vertex_ids if abs(s.curvature(v)) > curvature_tol]
    curv = sorted(s.curvature(v) for v in vs)
    dists = []
    for i, a in enumerate(vs):
        pa = s.vertex_point(a)
        for b in vs[i + 1:]:
            dists.append(geodesic_distance(s, pa, s.vertex_point(b)))
    return (tuple(curv), tuple(sorted(dists)), s.area())


def canonical_hash(s: IntrinsicSurface, digits: int = 6) -> str:
    """Stable hash of the canonical form, rounded relative to scale."""
    curv, dists, area = canonical_form(s)
    sc = max(s.scale, 1e-30)
    obj = [
        [round(c, digits) for c in curv],
        [round(d / sc, digits) for d in dists],
        round(area / (sc * sc), digits),
    ]
    payload = json.dumps(obj, separators=(",", ":")).encode()
    return hashlib.sha256(payload).hexdigest()


def isometric(s1: IntrinsicSurface, s2: IntrinsicSurface,
              rel: float = 1e-6) -> bool:
    """Canonical forms agree within a relative tolerance."""
    c1, d1, a1 = canonical_form(s1)
    c2, d2, a2 = canonical_form(s2)
    if len(c1) != len(c2) or len(d1) != len(d2):
        return False
    sc = max(s1.scale, s2.scale, 1e-30)
    if any(abs(x - y) > rel for x, y in zip(c1, c2)):
        return False
    if any(abs(x - y) > rel * sc for x, y in zip(d1, d2)):
        return False
    return abs(a1 - a2) <= rel * sc * sc * 10
