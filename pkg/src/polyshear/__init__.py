"""polyshear: reshaping convex polyhedral metrics.

Intrinsic surfaces, geodesics and cut loci, digon tailoring, vertex
merging, hulls on half-surfaces, and unfoldings to planar nets.
"""

from .canonical import canonical_form, canonical_hash, isometric
from .geodesics import (
    CutLocusTree,
    StarUnfolding,
    cut_locus,
    find_generic_point,
    geodesic_distance,
    is_generic,
    shortest_path,
    star_unfold,
)
from .surface import (
    GeodesicPath,
    IntrinsicSurface,
    SurfacePoint,
    TangentDirection,
    angle_between,
    build_doubly_covered_polygon,
    build_from_mesh,
    build_from_off,
)
from .surgery import cut_and_insert_lens, remove_flat_vertices
from .tailoring import (
    Crest,
    Digon,
    SealGraph,
    TailorLog,
    TailorResult,
    build_crest,
    excise_digon,
    plan_digon,
    recognize_pyramid,
    reverse_log,
    seal_graph_check,
    tailor_pyramid,
)
from .tolerances import Tolerances, set_tol, tol

__all__ = [
    "Crest",
    "CutLocusTree",
    "Digon",
    "GeodesicPath",
    "IntrinsicSurface",
    "SealGraph",
    "StarUnfolding",
    "SurfacePoint",
    "TailorLog",
    "TailorResult",
    "TangentDirection",
    "Tolerances",
    "angle_between",
    "build_crest",
    "build_doubly_covered_polygon",
    "build_from_mesh",
    "build_from_off",
    "canonical_form",
    "canonical_hash",
    "cut_and_insert_lens",
    "cut_locus",
    "excise_digon",
    "find_generic_point",
    "geodesic_distance",
    "is_generic",
    "isometric",
    "plan_digon",
    "recognize_pyramid",
    "remove_flat_vertices",
    "reverse_log",
    "seal_graph_check",
    "set_tol",
    "shortest_path",
    "star_unfold",
    "tailor_pyramid",
    "tol",
]
