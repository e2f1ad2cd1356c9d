"""Exception hierarchy for meshcurv.

Every failure mode that callers are expected to branch on gets its own
class; all inherit from MeshCurvError so blanket handling stays easy.
"""


class MeshCurvError(Exception):
    """Base class for all meshcurv errors."""


# --- combinatorics / mesh validation ---------------------------------------

class NonManifoldEdge(MeshCurvError):
    """An edge is shared by more than two faces."""


class DegenerateFace(MeshCurvError):
    """A face cycle is shorter than 3 or contains immediate repeats."""


class CombinatoricsMismatch(MeshCurvError):
    """Two meshes that must share combinatorics do not."""


class ZeroMeshEdge(MeshCurvError):
    """The base mesh contains a zero-length edge."""


class NotParallel(MeshCurvError):
    """Edgewise parallelism fails beyond tolerance."""


class NonPlanarFace(MeshCurvError):
    """A face fails the planarity gate."""


class ZeroAreaFace(MeshCurvError):
    """A face has no well-defined plane or vanishing area."""


class NonTransversal(MeshCurvError):
    """A line/line or line/plane intersection is ill-conditioned."""


class ClosureViolation(MeshCurvError):
    """Propagation around a cycle is inconsistent beyond tolerance."""


class NotConical(MeshCurvError):
    """Face planes around a vertex, translated to sphere tangency, do not meet."""


class OrientationInconsistent(MeshCurvError):
    """Face cycles do not orient the surface consistently."""


class DisconnectedMesh(MeshCurvError):
    """An operation requiring a connected mesh got a disconnected one."""


# --- polygon areas ----------------------------------------------------------

class LengthMismatch(MeshCurvError):
    """Two polygons that must have equal vertex counts do not."""


class EdgesDoNotCancel(MeshCurvError):
    """The shared boundary passed to concat() does not match up."""


class DegenerateBeyondTriangle(MeshCurvError):
    """A quad with two or more collinear vertex triples."""


class BothAreasZero(MeshCurvError):
    """The area polynomial is requested for two zero-area polygons."""


# --- curvature --------------------------------------------------------------

class VanishingFaceArea(MeshCurvError):
    """Curvatures are undefined on a face of vanishing area."""


class SingularDenominator(MeshCurvError):
    """The edge-to-face curvature formula degenerates (similarity case)."""


class DegenerateOffsetFace(MeshCurvError):
    """An offset face has vanishing area; family curvatures undefined."""


class ZeroMeanCurvature(MeshCurvError):
    """Weingarten coefficients need a nonzero base mean curvature."""


# --- duality ----------------------------------------------------------------

class NotQuadMesh(MeshCurvError):
    """An operation restricted to quad meshes got another face size."""


class DegenerateQuad(MeshCurvError):
    """A quad is too degenerate for the dual construction."""


class OddVertexCount(MeshCurvError):
    """Incircle duality needs an even vertex count."""


class NoIncircle(MeshCurvError):
    """A polygon has no incircle within tolerance."""


class DistanceNotConstant(MeshCurvError):
    """Vertexwise distance between two meshes is not constant."""


# --- generators -------------------------------------------------------------

class ParallelityViolated(MeshCurvError):
    """Meridian data violates the edge parallelism constraint."""


class EqualRadii(MeshCurvError):
    """Consecutive meridian radii coincide; band curvatures undefined."""


class NoPositiveRoot(MeshCurvError):
    """The prescribed-curvature recurrence has no positive radius root."""


class NegativeRadicand(MeshCurvError):
    """The constant-K recurrence hit a negative radicand."""


class OutOfRange(MeshCurvError):
    """A Gauss meridian height is outside (-1, 1)."""


class TangencyLost(MeshCurvError):
    """Billiard stepping drifted off the caustic beyond tolerance."""


class CollinearTriple(MeshCurvError):
    """Three consecutive trajectory vertices are collinear."""


class ReflectionAmbiguity(MeshCurvError):
    """Unrolling cannot decide a triangle's side (degenerate triangle)."""


class NotConcyclic(MeshCurvError):
    """Four points are not concyclic within tolerance."""


# --- file I/O ---------------------------------------------------------------

class ParseError(MeshCurvError):
    """A mesh or pair file is malformed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnsupportedElement(ParseError):
    """A mesh file contains an element kind we do not handle."""


class IoError(MeshCurvError):
    """Filesystem-level failure while reading or writing."""
