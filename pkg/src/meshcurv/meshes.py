"""Mesh combinatorics, vertex positions, parallelism and offset machinery.

Combinatorics (an abstract cell complex) is kept separate from vertex
positions so that a whole family of parallel meshes can share one
combinatorics object. All types are immutable after construction and all
operations are pure functions; concurrent use on shared meshes is safe.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (
    ClosureViolation,
    CombinatoricsMismatch,
    DegenerateFace,
    DisconnectedMesh,
    NonManifoldEdge,
    NonPlanarFace,
    NonTransversal,
    NotConical,
    NotParallel,
    OrientationInconsistent,
    ZeroMeshEdge,
)

#: relative factor for default geometric tolerances (times bbox diagonal)
DEFAULT_TOL_FACTOR = 1e-9


# --- combinatorics ----------------------------------------------------------

@dataclass(frozen=True)
class MeshCombinatorics:
    """Abstract (V, E, F) complex: faces are vertex-index cycles."""

    vertex_count: int
    faces: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edge_index = {e: k for k, e in enumerate(self.edges)}
        edge_faces: list[list[int]] = [[] for _ in self.edges]
        vertex_faces: list[list[int]] = [[] for _ in range(self.vertex_count)]
        neighbors: list[set[int]] = [set() for _ in range(self.vertex_count)]
        for fi, cycle in enumerate(self.faces):
            seen = set()
            for a, b in _cycle_pairs(cycle):
                key = (a, b) if a < b else (b, a)
                if key not in seen:
                    edge_faces[edge_index[key]].append(fi)
                    seen.add(key)
                neighbors[a].add(b)
                neighbors[b].add(a)
            for v in set(cycle):
                vertex_faces[v].append(fi)
        object.__setattr__(self, "edge_index", edge_index)
        object.__setattr__(self, "edge_faces", tuple(tuple(f) for f in edge_faces))
        object.__setattr__(self, "vertex_faces", tuple(tuple(f) for f in vertex_faces))
        object.__setattr__(
            self, "vertex_neighbors", tuple(tuple(sorted(n)) for n in neighbors)
        )

    @property
    def edge_array(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)

    def face_adjacency(self):
        """Pairs of faces sharing an edge, with the shared edge index."""
        out = []
        for ei, fs in enumerate(self.edge_faces):
            if len(fs) == 2:
                out.append((fs[0], fs[1], ei))
        return out

    def csr(self):
        """Flattened face cycles: (vertex indices, face pointer array)."""
        vidx = np.fromiter(
            (v for cycle in self.faces for v in cycle),
            dtype=np.int64,
            count=sum(len(c) for c in self.faces),
        )
        ptr = np.zeros(len(self.faces) + 1, dtype=np.int64)
        np.cumsum([len(c) for c in self.faces], out=ptr[1:])
        return vidx, ptr


def _cycle_pairs(cycle):
    n = len(cycle)
    for i in range(n):
        yield cycle[i], cycle[(i + 1) % n]


def build_combinatorics(face_cycles, vertex_count: int | None = None) -> MeshCombinatorics:
    """Validate face cycles and derive the edge set.

    Raises DegenerateFace for cycles shorter than 3 or with immediate
    repeats (cyclically), NonManifoldEdge when an edge would belong to
    more than two faces.
    """
    faces = []
    max_index = -1
    for fi, cycle in enumerate(face_cycles):
        cyc = tuple(int(v) for v in cycle)
        if len(cyc) < 3:
            raise DegenerateFace(f"face {fi} has {len(cyc)} vertices")
        for a, b in _cycle_pairs(cyc):
            if a == b:
                raise DegenerateFace(f"face {fi} repeats vertex {a}")
        if min(cyc) < 0:
            raise DegenerateFace(f"face {fi} has a negative vertex index")
        max_index = max(max_index, max(cyc))
        faces.append(cyc)
    if vertex_count is None:
        vertex_count = max_index + 1
    elif max_index >= vertex_count:
        raise DegenerateFace(
            f"vertex index {max_index} exceeds vertex_count {vertex_count}"
        )
    counts: dict[tuple[int, int], int] = {}
    for fi, cyc in enumerate(faces):
        for a, b in _cycle_pairs(cyc):
            key = (a, b) if a < b else (b, a)
            counts[key] = counts.get(key, 0) + 1
            if counts[key] > 2:
                raise NonManifoldEdge(f"edge {key} belongs to more than 2 faces")
    edges = tuple(sorted(counts))
    return MeshCombinatorics(vertex_count, tuple(faces), edges)


# --- meshes -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Mesh:
    """Vertex positions realizing a combinatorics."""

    combinatorics: MeshCombinatorics
    positions: np.ndarray  # (V, 3) float64

    def __post_init__(self):
        pos = np.ascontiguousarray(np.asarray(self.positions, dtype=float))
        if pos.shape != (self.combinatorics.vertex_count, 3):
            raise ValueError(
                f"positions shape {pos.shape} does not match "
                f"{self.combinatorics.vertex_count} vertices"
            )
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions contain non-finite values")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    def face_points(self, f: int) -> np.ndarray:
        return self.positions[list(self.combinatorics.faces[f])]

    def edge_vectors(self) -> np.ndarray:
        e = self.combinatorics.edge_array
        return self.positions[e[:, 1]] - self.positions[e[:, 0]]

    def bbox_diagonal(self) -> float:
        if len(self.positions) == 0:
            return 0.0
        return float(np.linalg.norm(np.ptp(self.positions, axis=0)))

    def translated(self, v) -> "Mesh":
        return Mesh(self.combinatorics, self.positions + np.asarray(v, dtype=float))

    def scaled(self, c: float) -> "Mesh":
        return Mesh(self.combinatorics, c * self.positions)


def default_tol(*meshes: Mesh) -> float:
    diag = max((m.bbox_diagonal() for m in meshes), default=0.0)
    return DEFAULT_TOL_FACTOR * max(diag, 1.0)


# --- parallelism ------------------------------------------------------------

@dataclass(frozen=True)
class ParallelReport:
    passed: bool
    max_residual: float
    worst_edge: tuple[int, int] | None
    residuals: np.ndarray = field(repr=False)


def check_parallel(m: Mesh, s: Mesh, tol: float | None = None) -> ParallelReport:
    """Edgewise linear-dependence check.

    Residual per edge: ||em x es|| / (||em|| max(1, ||es||)). Zero edges of
    s pass trivially; zero edges of m pass the dependence test too (the
    zero vector is dependent on anything) but are rejected separately by
    ParallelPair.
    """
    if m.combinatorics != s.combinatorics:
        raise CombinatoricsMismatch("meshes do not share combinatorics")
    if tol is None:
        tol = DEFAULT_TOL_FACTOR  # residual is scale-free
    res = _kernels.edge_parallel_residuals(m.edge_vectors(), s.edge_vectors())
    if len(res) == 0:
        return ParallelReport(True, 0.0, None, res)
    worst = int(np.argmax(res))
    return ParallelReport(
        passed=bool(res[worst] <= tol),
        max_residual=float(res[worst]),
        worst_edge=m.combinatorics.edges[worst],
        residuals=res,
    )


@dataclass(frozen=True, eq=False)
class ParallelPair:
    """A mesh with an edgewise-parallel companion (its Gauss image).

    Validated on construction: shared combinatorics, no zero edges in m,
    parallelism within tol, and planar faces of m.
    """

    m: Mesh
    s: Mesh
    tol: float = field(default=0.0)

    def __post_init__(self):
        tol = self.tol if self.tol > 0.0 else default_tol(self.m)
        object.__setattr__(self, "tol", tol)
        if self.m.combinatorics != self.s.combinatorics:
            raise CombinatoricsMismatch("pair meshes do not share combinatorics")
        em = self.m.edge_vectors()
        scale = max(self.m.bbox_diagonal(), 1.0)
        if len(em):
            lm = np.linalg.norm(em, axis=1)
            bad = np.nonzero(lm <= DEFAULT_TOL_FACTOR * scale)[0]
            if len(bad):
                raise ZeroMeshEdge(
                    f"base mesh edge {self.m.combinatorics.edges[bad[0]]} has zero length"
                )
        rep = check_parallel(self.m, self.s, self.tol)
        if not rep.passed:
            raise NotParallel(
                f"edge {rep.worst_edge} deviates by {rep.max_residual:.3e}"
            )
        planes = face_planarity(self.m, self.tol)
        for pl in planes:
            if pl.residual > self.tol:
                raise NonPlanarFace(
                    f"face {pl.face} planarity residual {pl.residual:.3e} > {self.tol:.3e}"
                )
        object.__setattr__(self, "_face_planes", planes)

    @property
    def face_planes(self):
        return self._face_planes

    @property
    def combinatorics(self) -> MeshCombinatorics:
        return self.m.combinatorics


def offset(pair: ParallelPair, t: float) -> Mesh:
    """Vertexwise offset m + t s; parallel to m for every t."""
    return Mesh(pair.combinatorics, pair.m.positions + t * pair.s.positions)


def offset_pair(pair: ParallelPair, t: float, tol: float | None = None) -> ParallelPair:
    return ParallelPair(offset(pair, t), pair.s, tol or pair.tol)


# --- face planes ------------------------------------------------------------

@dataclass(frozen=True)
class FacePlane:
    """Least-squares plane of a face with a chart fixed by the vertex cycle.

    The normal follows the Newell orientation of the cycle; (e1, e2, n) is
    an orthonormal right-handed frame. ``degenerate`` marks faces whose
    Newell vector vanishes (zero-area; chart direction arbitrary).
    """

    face: int
    normal: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    base: np.ndarray
    residual: float
    degenerate: bool

    def project(self, points: np.ndarray) -> np.ndarray:
        """Chart coordinates of 3D points (drops the normal component)."""
        rel = np.asarray(points, dtype=float) - self.base
        return np.column_stack([rel @ self.e1, rel @ self.e2])


def _stable_perpendicular(n: np.ndarray) -> np.ndarray:
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(n)))] = 1.0
    e1 = np.cross(n, axis)
    return e1 / np.linalg.norm(e1)


def face_planarity(m: Mesh, tol: float | None = None) -> list[FacePlane]:
    """Per-face least-squares plane, Newell-oriented, with max-distance residual.

    Zero-area faces are flagged degenerate rather than raising; their chart
    is still usable (covariance axes) so downstream code can report them.
    """
    if tol is None:
        tol = default_tol(m)
    planes = []
    scale = max(m.bbox_diagonal(), 1.0)
    for fi, cycle in enumerate(m.combinatorics.faces):
        pts = m.positions[list(cycle)]
        centroid = pts.mean(axis=0)
        rel = pts - centroid
        newell = np.sum(np.cross(rel, np.roll(rel, -1, axis=0)), axis=0)
        nn = np.linalg.norm(newell)
        degenerate = nn <= (DEFAULT_TOL_FACTOR * scale) ** 2
        cov = rel.T @ rel
        evals, evecs = np.linalg.eigh(cov)
        normal = evecs[:, 0]
        if not degenerate and normal @ newell < 0.0:
            normal = -normal
        elif degenerate:
            # no orientation available; keep the covariance axis as-is
            pass
        e1 = _stable_perpendicular(normal)
        e2 = np.cross(normal, e1)
        residual = float(np.max(np.abs(rel @ normal)))
        planes.append(
            FacePlane(fi, normal, e1, e2, centroid, residual, bool(degenerate))
        )
    return planes


def face_chart_coords(pair: ParallelPair):
    """Chart coordinates of m- and s-faces in m's shared face charts.

    Returns (xy_m, xy_s, ptr) in CSR layout, ready for the area kernels.
    """
    vidx, ptr = pair.combinatorics.csr()
    planes = pair.face_planes
    xy_m = np.empty((len(vidx), 2))
    xy_s = np.empty((len(vidx), 2))
    pos_m, pos_s = pair.m.positions, pair.s.positions
    for pl in planes:
        a, b = ptr[pl.face], ptr[pl.face + 1]
        idx = vidx[a:b]
        xy_m[a:b] = pl.project(pos_m[idx])
        xy_s[a:b] = pl.project(pos_s[idx])
    return xy_m, xy_s, ptr


# --- offset-type classification ----------------------------------------------

@dataclass(frozen=True)
class OffsetTypeReport:
    """Which unit-sphere contact types the Gauss image satisfies.

    ``classes`` can hold any of {"vertex", "edge", "face"}; empty means
    none. Residuals are distances-to-one per vertex/edge/face.
    """

    classes: frozenset
    vertex_residuals: np.ndarray
    edge_residuals: np.ndarray
    face_residuals: np.ndarray

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(sorted(self.classes)) if self.classes else ("none",)


def classify_offset_type(pair: ParallelPair, tol: float = 1e-9) -> OffsetTypeReport:
    """Test the Gauss image against the unit sphere.

    vertex type: all ||s_i|| = 1; edge type: every edge line of s at
    distance 1 from the origin; face type: every face plane of s at
    distance 1. The categories are not mutually exclusive.
    """
    s = pair.s.positions
    vres = np.abs(np.linalg.norm(s, axis=1) - 1.0)

    e = pair.combinatorics.edge_array
    if len(e):
        p, q = s[e[:, 0]], s[e[:, 1]]
        seg = np.linalg.norm(q - p, axis=1)
        cross = np.linalg.norm(np.cross(p, q), axis=1)
        dist = np.full(len(e), np.inf)
        ok = seg > 0.0
        dist[ok] = cross[ok] / seg[ok]
        eres = np.abs(dist - 1.0)
    else:
        eres = np.zeros(0)

    fres = np.empty(len(pair.combinatorics.faces))
    for pl in pair.face_planes:
        cyc = list(pair.combinatorics.faces[pl.face])
        off = float(np.mean(s[cyc] @ pl.normal))
        fres[pl.face] = abs(abs(off) - 1.0)

    classes = set()
    if len(vres) and np.max(vres) <= tol:
        classes.add("vertex")
    if len(eres) and np.max(eres) <= tol:
        classes.add("edge")
    if len(fres) and np.max(fres) <= tol:
        classes.add("face")
    return OffsetTypeReport(frozenset(classes), vres, eres, fres)


# --- circularity ------------------------------------------------------------

@dataclass(frozen=True)
class FaceCircle:
    face: int
    center: np.ndarray | None  # 3D circumcenter, None when degenerate
    radius: float
    residual: float
    passed: bool


def is_circular(m: Mesh, tol: float | None = None) -> list[FaceCircle]:
    """Per-face best-fit circumcircle in the face plane.

    A face passes iff max | ||v - c|| - rho | <= tol. Faces must be planar
    within tol; degenerate (zero-area) faces are reported as failed.
    """
    if tol is None:
        tol = default_tol(m)
    planes = face_planarity(m, tol)
    out = []
    for pl in planes:
        if pl.residual > tol:
            raise NonPlanarFace(
                f"face {pl.face} planarity residual {pl.residual:.3e} > {tol:.3e}"
            )
        pts = m.face_points(pl.face)
        if pl.degenerate:
            out.append(FaceCircle(pl.face, None, np.nan, np.inf, False))
            continue
        xy = pl.project(pts)
        # |v|^2 = 2 c.v + k  is linear in (c, k)
        aa = np.column_stack([2.0 * xy, np.ones(len(xy))])
        bb = np.einsum("ij,ij->i", xy, xy)
        sol, *_ = np.linalg.lstsq(aa, bb, rcond=None)
        c2 = sol[:2]
        rho = float(np.sqrt(max(sol[2] + c2 @ c2, 0.0)))
        residual = float(np.max(np.abs(np.linalg.norm(xy - c2, axis=1) - rho)))
        center3 = pl.base + c2[0] * pl.e1 + c2[1] * pl.e2
        out.append(FaceCircle(pl.face, center3, rho, residual, residual <= tol))
    return out


# --- line congruences -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LineCongruence:
    """One line per vertex: point + unit direction."""

    points: np.ndarray  # (V, 3)
    directions: np.ndarray  # (V, 3), normalized

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        dirs = np.asarray(self.directions, dtype=float)
        norms = np.linalg.norm(dirs, axis=1)
        if np.any(norms == 0.0):
            raise ValueError("congruence has a zero direction")
        dirs = dirs / norms[:, None]
        pts.setflags(write=False)
        dirs.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "directions", dirs)


def congruence_coplanarity(m: Mesh, lines: LineCongruence) -> float:
    """Max normalized coplanarity defect of lines at adjacent vertices."""
    worst = 0.0
    for i, j in m.combinatorics.edges:
        di, dj = lines.directions[i], lines.directions[j]
        w = lines.points[j] - lines.points[i]
        cr = np.cross(di, dj)
        denom = np.linalg.norm(cr) * max(np.linalg.norm(w), 1.0)
        if denom > 0.0:
            worst = max(worst, abs(w @ cr) / denom)
    return worst


def _line_intersection(p1, d1, p2, d2, tol_angle=1e-12):
    """Point on line (p2, d2) closest to line (p1, d1), plus the gap."""
    d1 = d1 / np.linalg.norm(d1)
    d2n = np.linalg.norm(d2)
    d2 = d2 / d2n
    cr = np.cross(d1, d2)
    if np.linalg.norm(cr) <= tol_angle:
        raise NonTransversal("lines are (nearly) parallel")
    mat = np.column_stack([d1, -d2])
    rhs = p2 - p1
    sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    x1 = p1 + sol[0] * d1
    x2 = p2 + sol[1] * d2
    return x2, float(np.linalg.norm(x1 - x2))


@dataclass(frozen=True)
class PropagationResult:
    mesh: Mesh
    closure_residual: float
    worst_edge: tuple[int, int] | None


def propagate_from_congruence(
    m: Mesh,
    lines: LineCongruence,
    seed: tuple[int, np.ndarray],
    tol: float | None = None,
) -> PropagationResult:
    """Reconstruct a parallel mesh from a line congruence and one seed vertex.

    Breadth-first: a placed vertex i determines neighbor j as the
    intersection of L_j with the line through the placed point in the
    direction m_i - m_j. Edges whose direction is parallel to the target
    line carry no constraint and are skipped; if they disconnect the mesh,
    NonTransversal is raised. Re-derived cycle edges are compared against
    the stored positions; the worst mismatch is the closure residual, and
    exceeding tol raises ClosureViolation.
    """
    if tol is None:
        tol = default_tol(m)
    i0, point = seed
    point = np.asarray(point, dtype=float)
    gap0 = _point_line_distance(point, lines.points[i0], lines.directions[i0])
    if gap0 > tol:
        raise ValueError(f"seed point is {gap0:.3e} off its congruence line")

    nv = m.combinatorics.vertex_count
    placed = np.full(nv, False)
    new_pos = np.zeros((nv, 3))
    new_pos[i0] = point
    placed[i0] = True
    queue = deque([i0])
    residual = 0.0
    worst = None
    while queue:
        i = queue.popleft()
        for j in m.combinatorics.vertex_neighbors[i]:
            d = m.positions[i] - m.positions[j]
            try:
                candidate, gap = _line_intersection(
                    new_pos[i], d, lines.points[j], lines.directions[j]
                )
            except NonTransversal:
                continue  # unconstraining edge; j may be reachable elsewhere
            if not placed[j]:
                new_pos[j] = candidate
                placed[j] = True
                queue.append(j)
                err = gap
            else:
                err = max(gap, float(np.linalg.norm(candidate - new_pos[j])))
            if err > residual:
                residual, worst = err, (i, j) if i < j else (j, i)
    if not placed.all():
        missing = int(np.nonzero(~placed)[0][0])
        if _mesh_connected(m.combinatorics, i0):
            raise NonTransversal(
                f"vertex {missing} is only reachable through edges parallel "
                "to its congruence line"
            )
        raise DisconnectedMesh("congruence propagation did not reach every vertex")
    if residual > tol:
        raise ClosureViolation(
            f"closure residual {residual:.3e} > {tol:.3e} at edge {worst}"
        )
    return PropagationResult(Mesh(m.combinatorics, new_pos), residual, worst)


def _mesh_connected(comb: MeshCombinatorics, start: int) -> bool:
    seen = {start}
    queue = deque([start])
    while queue:
        i = queue.popleft()
        for j in comb.vertex_neighbors[i]:
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == comb.vertex_count


def _point_line_distance(x, p, d):
    rel = x - p
    return float(np.linalg.norm(rel - (rel @ d) * d))


# --- canonical Gauss image of conical meshes ---------------------------------

def check_orientation(m: MeshCombinatorics) -> None:
    """Raise OrientationInconsistent unless shared edges are counter-run."""
    directed: dict[tuple[int, int], int] = {}
    for fi, cycle in enumerate(m.faces):
        for a, b in _cycle_pairs(cycle):
            if (a, b) in directed:
                raise OrientationInconsistent(
                    f"edge ({a},{b}) traversed twice in the same direction "
                    f"(faces {directed[(a, b)]} and {fi})"
                )
            directed[(a, b)] = fi


def canonical_gauss_conical(m: Mesh, tol: float = 1e-9) -> Mesh:
    """Gauss image of a conical mesh: face planes translated to unit-sphere
    tangency, vertices at the common point of the planes around them.

    Faces of the result lie in planes {x : <n_f, x> = 1}. Vertices with
    more than three faces use the least-squares point and must meet the
    concurrency gate (NotConical otherwise); boundary vertices with fewer
    planes take the minimum-norm solution.
    """
    check_orientation(m.combinatorics)
    planes = face_planarity(m)
    geo_tol = default_tol(m)
    for pl in planes:
        if pl.degenerate:
            raise NonPlanarFace(f"face {pl.face} has no well-defined plane")
        if pl.residual > geo_tol:
            raise NonPlanarFace(
                f"face {pl.face} planarity residual {pl.residual:.3e}"
            )
    normals = np.array([pl.normal for pl in planes])
    s_pos = np.zeros((m.combinatorics.vertex_count, 3))
    for v in range(m.combinatorics.vertex_count):
        fs = m.combinatorics.vertex_faces[v]
        if not fs:
            continue
        a = normals[list(fs)]
        b = np.ones(len(fs))
        sol, *_ = np.linalg.lstsq(a, b, rcond=None)
        res = float(np.max(np.abs(a @ sol - b)))
        if res > tol:
            raise NotConical(
                f"vertex {v}: tangent planes miss concurrency by {res:.3e}"
            )
        s_pos[v] = sol
    return Mesh(m.combinatorics, s_pos)
