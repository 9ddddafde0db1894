"""Exception hierarchy for the geometry kernel."""


class PolyshearError(Exception):
    """Base class for all kernel errors."""


class NonManifold(PolyshearError):
    pass


class NonTriangular(PolyshearError):
    pass


class NotClosed(PolyshearError):
    pass


class NonConvexPolygon(PolyshearError):
    pass


class HitVertex(PolyshearError):
    """A traced geodesic passed within the hit tolerance of a vertex."""

    def __init__(self, vertex, length, msg=""):
        super().__init__(msg or f"trace hit vertex {vertex} at length {length}")
        self.vertex = vertex
        self.length = length


class ExceedsMaxCrossings(PolyshearError):
    pass


class NotIncident(PolyshearError):
    pass


class NonGenericSource(PolyshearError):
    """Two shortest paths tie to some vertex: the source is not generic."""


class ExhaustedAttempts(PolyshearError):
    pass


class DigonContainsExtraVertex(PolyshearError):
    pass


class UnequalSides(PolyshearError):
    pass


class AngleNotAchievable(PolyshearError):
    pass


class NotAPyramid(PolyshearError):
    pass


class NoEmbedding(PolyshearError):
    pass


class LogMismatch(PolyshearError):
    pass


class NoIntersection(PolyshearError):
    pass


class TangentPlane(PolyshearError):
    pass


class NotContained(PolyshearError):
    pass


class BadN(PolyshearError):
    pass


class CurvatureTooLarge(PolyshearError):
    pass


class PathNotGeodesic(PolyshearError):
    pass


class NotIsoscelesTetra(PolyshearError):
    pass


class EmptyV(PolyshearError):
    pass


class VNotComplete(PolyshearError):
    pass


class CurvatureExactly2Pi(PolyshearError):
    """Interior curvature sums to 2*pi: the cap merges to a cylinder, not a cone."""


class NoPlanarPlacement(PolyshearError):
    pass
