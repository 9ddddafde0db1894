"""Standard solids and shapes used by tests, examples, and the CLI demos."""

from __future__ import annotations

import math

from .surface import IntrinsicSurface, build_doubly_covered_polygon, build_from_mesh


def cube(edge: float = 1.0) -> IntrinsicSurface:
    """Unit cube, each square face split along a diagonal (12 triangles)."""
    e = edge
    verts = [
        (0, 0, 0), (e, 0, 0), (e, e, 0), (0, e, 0),
        (0, 0, e), (e, 0, e), (e, e, e), (0, e, e),
    ]
    quads = [
        (0, 3, 2, 1),  # bottom (z=0), outward -z
        (4, 5, 6, 7),  # top
        (0, 1, 5, 4),  # front (y=0)
        (1, 2, 6, 5),  # right
        (2, 3, 7, 6),  # back
        (3, 0, 4, 7),  # left
    ]
    faces = []
    for (a, b, c, d) in quads:
        faces.append((a, b, c))
        faces.append((a, c, d))
    return build_from_mesh(verts, faces)


def regular_tetrahedron(edge: float = 1.0) -> IntrinsicSurface:
    s = edge / (2.0 * math.sqrt(2.0))
    verts = [(s, s, s), (s, -s, -s), (-s, s, -s), (-s, -s, s)]
    faces = [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)]
    return build_from_mesh(verts, faces)


def regular_icosahedron(edge: float = 1.0) -> IntrinsicSurface:
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    raw = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            raw.append((0.0, a, b))
            raw.append((a, b, 0.0))
            raw.append((b, 0.0, a))
    scale = edge / 2.0
    verts = [(x * scale, y * scale, z * scale) for (x, y, z) in raw]
    # faces via convex hull with outward orientation
    from scipy.spatial import ConvexHull

    hull = ConvexHull(verts)
    faces = []
    c = [sum(v[i] for v in verts) / len(verts) for i in range(3)]
    for simplex, eq in zip(hull.simplices, hull.equations):
        a, b, d = simplex
        # orient outward: normal eq[:3] points away from centroid
        va, vb, vd = verts[a], verts[b], verts[d]
        n = _tri_normal(va, vb, vd)
        if sum(n[i] * eq[i] for i in range(3)) < 0:
            a, b, d = a, d, b
        faces.append((a, b, d))
    return build_from_mesh(verts, faces)


def _tri_normal(a, b, c):
    u = [b[i] - a[i] for i in range(3)]
    v = [c[i] - a[i] for i in range(3)]
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def regular_polygon(n: int, circumradius: float = 1.0):
    return [
        (circumradius * math.cos(2 * math.pi * k / n),
         circumradius * math.sin(2 * math.pi * k / n))
        for k in range(n)
    ]


def doubly_covered_square(edge: float = 1.0) -> IntrinsicSurface:
    return build_doubly_covered_polygon([(0, 0), (edge, 0), (edge, edge), (0, edge)])


def doubly_covered_regular_hexagon(circumradius: float = 1.0) -> IntrinsicSurface:
    return build_doubly_covered_polygon(regular_polygon(6, circumradius))


def pyramid_mesh(base, apex):
    """Extrinsic pyramid over a ccw planar base polygon (z=0) with 3-d apex.

    Returns (vertices, faces) with the base fan-triangulated.
    """
    n = len(base)
    verts = [(x, y, 0.0) for (x, y) in base] + [tuple(map(float, apex))]
    faces = []
    for j in range(1, n - 1):
        faces.append((0, j + 1, j))  # base faces, outward -z
    for i in range(n):
        faces.append((i, (i + 1) % n, n))  # lateral, outward
    return verts, faces


def pyramid(base, apex) -> IntrinsicSurface:
    verts, faces = pyramid_mesh(base, apex)
    return build_from_mesh(verts, faces)


def hexagonal_pyramid_70_70_40() -> IntrinsicSurface:
    """Regular-hexagon base, all lateral faces congruent 70-70-40 triangles.

    Apex curvature is 120 degrees; every lateral base angle is 70 degrees.
    """
    # lateral triangle: base = hexagon edge b, apex angle 40 deg
    b = 1.0
    # slant length s with apex angle 40: b = 2 s sin(20 deg)
    s = b / (2.0 * math.sin(math.radians(20.0)))
    base = regular_polygon(6, b)  # circumradius == edge length for a hexagon
    # apex height from slant length: distance from base vertex to center is b
    h = math.sqrt(max(s * s - b * b, 0.0))
    return pyramid(base, (0.0, 0.0, h))


def cube_corner_pyramid() -> IntrinsicSurface:
    """Corner cut from a unit cube: equilateral base of side sqrt(2).

    The apex has three right face angles, so its curvature is 90 degrees.
    """
    side = math.sqrt(2.0)
    base = regular_polygon(3, side / math.sqrt(3.0))
    h = 1.0 / math.sqrt(3.0)
    return pyramid(base, (0.0, 0.0, h))


def random_convex_polygon(rng, n: int, circumradius: float = 1.0):
    """ccw convex polygon: n points on a circle at jittered sorted angles."""
    gaps = [0.2 + rng.random() for _ in range(n)]
    total = sum(gaps)
    angs = []
    acc = rng.random() * 2.0 * math.pi
    for g in gaps:
        angs.append(acc)
        acc += 2.0 * math.pi * g / total
    return [
        (circumradius * math.cos(a), circumradius * math.sin(a)) for a in angs
    ]


def random_pyramid(seed: int, n_min: int = 4, n_max: int = 12) -> IntrinsicSurface:
    """Seeded pyramid with a random convex base and a random apex."""
    import random

    rng = random.Random(seed)
    n = rng.randint(n_min, n_max)
    base = random_convex_polygon(rng, n)
    r = 0.6 * rng.random()
    t = rng.random() * 2.0 * math.pi
    h = 0.4 + 1.2 * rng.random()
    return pyramid(base, (r * math.cos(t), r * math.sin(t), h))
