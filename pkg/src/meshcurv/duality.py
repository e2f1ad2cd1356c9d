"""Duality of parallel meshes: vanishing mixed area, dual quads, dual-mesh
construction with closure residual, and incircle-polygon duality.

Two parallel meshes are dual when every pair of corresponding faces has
vanishing mixed area. For quads this is equivalent to the parallelism of
the non-corresponding diagonals, which fixes the dual quad up to a
translation and one scale; a mesh admits a global dual exactly when the
per-face scales can be propagated consistently (closure residual zero).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .curvature import all_face_curvatures, principal_curvatures
from .errors import (
    ClosureViolation,
    CombinatoricsMismatch,
    DegenerateQuad,
    DisconnectedMesh,
    DistanceNotConstant,
    NoIncircle,
    NotParallel,
    NotQuadMesh,
    OddVertexCount,
    VanishingFaceArea,
)
from .meshes import (
    Mesh,
    MeshCombinatorics,
    ParallelPair,
    build_combinatorics,
    check_parallel,
    default_tol,
    face_chart_coords,
    face_planarity,
)
from .polygons import area, as_polygon, cross2, mixed_area, polygon_scale


# --- dual quads ---------------------------------------------------------------

@dataclass(frozen=True)
class DualQuadReport:
    dual: bool
    mixed: float
    mixed_normalized: float
    diagonals_parallel: tuple[bool, bool]
    diagonal_sines: tuple[float, float]


def _sine_between(u, v) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return abs(cross2(u, v)) / (nu * nv)


def is_dual_quads(P, Q, tol: float = 1e-10, ang_tol: float = 1e-8) -> DualQuadReport:
    """Dual-quad test: A(P, Q) = 0 and, equivalently, the non-corresponding
    diagonals are parallel.

    For parallel quads both readings compute the same number:
    A(P,Q) = 1/2 det(p2-p0, q3-q1) = 1/2 det(q2-q0, p3-p1); the three
    evaluations are asserted to agree, then thresholded.
    """
    P = as_polygon(P)
    Q = as_polygon(Q)
    if len(P) != 4 or len(Q) != 4:
        raise ValueError("is_dual_quads needs two quads")
    ep = np.roll(P, -1, axis=0) - P
    eq = np.roll(Q, -1, axis=0) - Q
    scale2 = polygon_scale(P, Q) ** 2
    for k in range(4):
        if abs(cross2(ep[k], eq[k])) > 1e-8 * scale2:
            raise NotParallel(f"edge {k} of the quads is not parallel")
    m = mixed_area(P, Q)
    d_p1, d_q1 = P[2] - P[0], Q[3] - Q[1]
    d_p2, d_q2 = P[3] - P[1], Q[2] - Q[0]
    via1 = 0.5 * cross2(d_p1, d_q1)
    via2 = 0.5 * cross2(d_q2, d_p2)
    assert abs(m - via1) <= 1e-10 * scale2 and abs(m - via2) <= 1e-10 * scale2, (
        "mixed area and diagonal determinants disagree beyond roundoff"
    )
    s1 = _sine_between(d_p1, d_q1)
    s2 = _sine_between(d_p2, d_q2)
    return DualQuadReport(
        dual=bool(abs(m) <= tol * scale2),
        mixed=float(m),
        mixed_normalized=float(abs(m) / scale2),
        diagonals_parallel=(bool(s1 <= ang_tol), bool(s2 <= ang_tol)),
        diagonal_sines=(float(s1), float(s2)),
    )


def dual_quad_factors(xy: np.ndarray) -> np.ndarray:
    """Edge scale factors of the dual of a planar quad (chart coords).

    The dual quad has edges sigma_k * e_k with sigma_0 = 1, closure
    sum sigma_k e_k = 0, and its q1q3-diagonal parallel to p0p2. The
    remaining diagonal condition follows automatically. Raises
    DegenerateQuad when the 3x3 system is singular.
    """
    e = np.roll(xy, -1, axis=0) - xy
    d = xy[2] - xy[0]
    a = np.array(
        [
            [e[1][0], e[2][0], e[3][0]],
            [e[1][1], e[2][1], e[3][1]],
            [cross2(d, e[1]), cross2(d, e[2]), 0.0],
        ]
    )
    rhs = np.array([-e[0][0], -e[0][1], 0.0])
    try:
        sol = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateQuad(f"dual construction singular: {exc}") from exc
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > 1e12:
        raise DegenerateQuad(f"dual construction ill-conditioned (cond {cond:.1e})")
    return np.concatenate([[1.0], sol])


@dataclass(frozen=True)
class KoenigsSolve:
    """Candidate dual mesh with its propagation diagnostics."""

    dual: Mesh
    closure_residual: float
    seed_edge: int
    seed_scale: float
    edge_factors: np.ndarray


def christoffel_dual(
    m: Mesh, seed: tuple[int, float] = (0, 1.0), tol: float | None = None
) -> KoenigsSolve:
    """Construct the dual mesh of a planar-quad mesh, if it exists.

    Per face the dual quad is fixed up to translation and one scale by
    edge parallelism plus diagonal parallelism; the scales are propagated
    from the seed edge across the face-adjacency graph. The closure
    residual is the worst relative mismatch of edge factors over
    non-tree adjacencies; the mesh is a Koenigs net iff it vanishes.
    """
    comb = m.combinatorics
    if any(len(f) != 4 for f in comb.faces):
        raise NotQuadMesh("christoffel_dual needs a quad mesh")
    if tol is None:
        tol = 1e-9
    planes = face_planarity(m)
    mesh_tol = default_tol(m)
    sigma = []
    for pl in planes:
        if pl.degenerate or pl.residual > mesh_tol:
            raise DegenerateQuad(f"face {pl.face} is not a proper planar quad")
        sigma.append(dual_quad_factors(pl.project(m.face_points(pl.face))))

    # face-local edge factors -> global: lambda_f * sigma_f(e)
    nfaces = len(comb.faces)
    seed_edge, seed_scale = seed
    owners = comb.edge_faces[seed_edge]
    if not owners:
        raise ValueError(f"seed edge {seed_edge} belongs to no face")
    f0 = owners[0]
    lam = np.full(nfaces, np.nan)
    lam[f0] = seed_scale / _face_edge_sigma(comb, sigma, f0, seed_edge)
    visited = {f0}
    queue = deque([f0])
    residual = 0.0
    adjacency = {}
    for fa, fb, ei in comb.face_adjacency():
        adjacency.setdefault(fa, []).append((fb, ei))
        adjacency.setdefault(fb, []).append((fa, ei))
    while queue:
        fa = queue.popleft()
        for fb, ei in adjacency.get(fa, ()):
            val_a = lam[fa] * _face_edge_sigma(comb, sigma, fa, ei)
            if fb not in visited:
                lam[fb] = val_a / _face_edge_sigma(comb, sigma, fb, ei)
                visited.add(fb)
                queue.append(fb)
            else:
                val_b = lam[fb] * _face_edge_sigma(comb, sigma, fb, ei)
                mag = max(abs(val_a), abs(val_b), 1e-300)
                residual = max(residual, abs(val_a - val_b) / mag)
    if len(visited) != nfaces:
        raise DisconnectedMesh("dual propagation did not reach every face")

    # per-edge factor: from the lower-indexed adjacent face (deterministic)
    edge_factor = np.empty(len(comb.edges))
    for ei, faces in enumerate(comb.edge_faces):
        f = min(faces)
        edge_factor[ei] = lam[f] * _face_edge_sigma(comb, sigma, f, ei)

    # integrate dual positions over a vertex spanning tree
    pos = np.zeros((comb.vertex_count, 3))
    placed = np.full(comb.vertex_count, False)
    placed[0] = True
    vq = deque([0])
    while vq:
        i = vq.popleft()
        for j in comb.vertex_neighbors[i]:
            if placed[j]:
                continue
            ei = comb.edge_index[(i, j) if i < j else (j, i)]
            pos[j] = pos[i] + edge_factor[ei] * (m.positions[j] - m.positions[i])
            placed[j] = True
            vq.append(j)
    if not placed.all():
        raise DisconnectedMesh("dual integration did not reach every vertex")
    return KoenigsSolve(
        dual=Mesh(comb, pos),
        closure_residual=float(residual),
        seed_edge=seed_edge,
        seed_scale=float(seed_scale),
        edge_factors=edge_factor,
    )


def _face_edge_sigma(comb: MeshCombinatorics, sigma, f: int, ei: int) -> float:
    cyc = comb.faces[f]
    i, j = comb.edges[ei]
    for k in range(4):
        a, b = cyc[k], cyc[(k + 1) % 4]
        if (a, b) == (i, j) or (a, b) == (j, i):
            return float(sigma[f][k])
    raise KeyError(f"edge {ei} not on face {f}")


def is_koenigs(m: Mesh, tol: float = 1e-9, seed: tuple[int, float] = (0, 1.0)):
    """True (with the residual) iff the dual scale propagation closes."""
    solve = christoffel_dual(m, seed=seed, tol=tol)
    return solve.closure_residual <= tol, solve.closure_residual


@dataclass(frozen=True)
class DualityReport:
    """Facewise mixed areas of a pair, normalized by sqrt(|A_m| |A_s|)."""

    mixed_areas: np.ndarray
    max_normalized: float
    passed: bool


def duality_report(pair: ParallelPair, tol: float = 1e-9) -> DualityReport:
    xy_m, xy_s, ptr = face_chart_coords(pair)
    a_m = _kernels.face_areas(xy_m, ptr)
    a_s = _kernels.face_areas(xy_s, ptr)
    a_ms = _kernels.face_mixed_areas(xy_m, xy_s, ptr)
    denom = np.sqrt(np.abs(a_m) * np.abs(a_s))
    if np.any(denom == 0.0):
        raise VanishingFaceArea("cannot normalize: a face area vanishes")
    worst = float(np.max(np.abs(a_ms) / denom)) if len(a_ms) else 0.0
    return DualityReport(a_ms, worst, worst <= tol)


# --- incircle polygons --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IncirclePolygon:
    """Even polygon with an incircle; tangency[i] sits on edge p_{i-1} p_i."""

    vertices: np.ndarray  # (n, 2)
    center: np.ndarray  # (2,)
    radius: float
    tangency: np.ndarray  # (n, 2)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def refined(self) -> np.ndarray:
        """2n-gon with tangency points inserted: (q_0, p_0, q_1, p_1, ...)."""
        out = np.empty((2 * self.n, 2))
        out[0::2] = self.tangency
        out[1::2] = self.vertices
        return out


def incircle_polygon(vertices, tol: float = 1e-9) -> IncirclePolygon:
    """Fit the incircle of a polygon; NoIncircle if none exists within tol.

    The signed distance of the center to every edge line must equal the
    radius: with inward normals that is linear in (center, radius).
    """
    pts = as_polygon(vertices)
    n = len(pts)
    if n % 2:
        raise OddVertexCount(f"incircle duality needs even n, got {n}")
    orient = 1.0 if area(pts) > 0 else -1.0
    edges = np.roll(pts, -1, axis=0) - pts
    lens = np.linalg.norm(edges, axis=1)
    if np.any(lens == 0.0):
        raise NoIncircle("zero-length edge")
    # inward unit normal of each edge for the given orientation
    normals = orient * np.column_stack([-edges[:, 1], edges[:, 0]]) / lens[:, None]
    a = np.column_stack([normals, -np.ones(n)])
    b = np.einsum("ij,ij->i", normals, pts)
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    center, rho = sol[:2], float(sol[2])
    scale = polygon_scale(pts)
    res = float(np.max(np.abs(a @ sol - b)))
    if rho <= tol * scale or res > tol * scale:
        raise NoIncircle(f"incircle fit residual {res:.3e} (radius {rho:.3e})")
    # foot of the perpendicular from the center on each edge line, then
    # re-indexed so tangency[i] lies on edge p_{i-1} -> p_i
    u = edges / lens[:, None]
    t_param = np.einsum("ij,ij->i", center - pts, u)
    feet = pts + t_param[:, None] * u
    if np.any(t_param < -tol * scale) or np.any(t_param > lens + tol * scale):
        raise NoIncircle("incircle touches outside an edge segment")
    tangency = np.roll(feet, 1, axis=0)
    return IncirclePolygon(pts, center, rho, tangency)


def tangential_polygon(center, radius: float, angles) -> IncirclePolygon:
    """Exact tangential polygon from tangency angles (gaps must be < pi)."""
    z = np.asarray(center, dtype=float)
    th = np.asarray(angles, dtype=float)
    n = len(th)
    if n % 2:
        raise OddVertexCount(f"need an even number of tangency angles, got {n}")
    gaps = np.diff(np.concatenate([th, [th[0] + 2 * np.pi]]))
    if np.any(gaps <= 0) or np.any(gaps >= np.pi):
        raise ValueError("tangency angle gaps must lie in (0, pi)")
    q = z + radius * np.column_stack([np.cos(th), np.sin(th)])
    half = gaps / 2.0
    mid = th + half
    p = z + (radius / np.cos(half))[:, None] * np.column_stack(
        [np.cos(mid), np.sin(mid)]
    )
    # vertex p_k sits between tangencies q_k and q_{k+1}: tangency[i] on
    # edge p_{i-1} -> p_i is q_i.
    return IncirclePolygon(p, z, float(radius), q)


@dataclass(frozen=True, eq=False)
class IncircleDual:
    """Dual of an incircle polygon (same chart, up to overall sign)."""

    vertices: np.ndarray  # (n, 2) dual vertex images
    tangency: np.ndarray  # (n, 2) dual tangency images
    center: np.ndarray  # image of the incircle center

    def refined(self) -> np.ndarray:
        out = np.empty((2 * len(self.vertices), 2))
        out[0::2] = self.tangency
        out[1::2] = self.vertices
        return out


def incircle_dual(P: IncirclePolygon, gauge: float = 1.0) -> IncircleDual:
    """Dual polygon of an even tangential polygon.

    In the complex chart centered at the incircle center z, the radius
    vector t_k = q_k - z and the tangent half-edges u_k = p_k - q_k,
    w_k = p_k - q_{k+1} map to scalar multiples of themselves with
    alternating signs: sub-polygon k (z, q_k, p_k, q_{k+1}) gets factors
    (-c_k, c_k rho^2/|u_k|^2, -c_k rho^2/|u_k|^2, c_k) with c_k =
    gauge * (-1)^k. Each central sub-quad is then dual to its image
    (parallel edges, diagonals crossed), so every mixed area A(P_k, P_k*)
    vanishes and by concatenation so does A(P, P*).
    """
    n = P.n
    if n % 2:
        raise OddVertexCount(f"incircle duality needs even n, got {n}")
    z = P.center[0] + 1j * P.center[1]
    p = P.vertices[:, 0] + 1j * P.vertices[:, 1]
    q = P.tangency[:, 0] + 1j * P.tangency[:, 1]
    # with tangency[i] on edge p_{i-1} p_i, the sub-polygon at vertex k is
    # (z, q_k, p_k, q_{k+1})
    t = q - z
    u = p - q  # q_k -> p_k
    lam2 = np.abs(u) ** 2
    if np.any(lam2 == 0.0):
        raise NoIncircle("a tangency point coincides with a vertex")
    rho2 = P.radius * P.radius
    c = gauge * (-1.0) ** np.arange(n)
    q_star = -c * t
    p_star = q_star + c * (rho2 / lam2) * u
    return IncircleDual(
        vertices=np.column_stack([p_star.real, p_star.imag]),
        tangency=np.column_stack([q_star.real, q_star.imag]),
        center=np.zeros(2),
    )


# --- s-isothermic assembly ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SIsothermicDual:
    """Facewise incircle duals of a mesh, as one (face-disjoint) surface.

    ``surface`` holds every dual face in the plane of its source face;
    ``gauss`` holds the matching refined source faces (tangency points
    inserted as vertices). Faces are combinatorially disjoint: on a closed
    polyhedron the per-face sign gauge has a parity obstruction around
    vertices, so dual faces of a closed surface cannot always be glued
    into a single vertex-shared mesh even though every adjacent pair glues
    in isolation. ``pair_glue_residual`` reports the worst such pairwise
    gluing error (translation + sign), which vanishes for polyhedra
    midscribed to a sphere.
    """

    surface: Mesh
    gauss: Mesh
    pair_glue_residual: float


def s_isothermic_dual(s: Mesh, tol: float | None = None) -> SIsothermicDual:
    """Dualize every incircle face of s in its own plane.

    Adjacent faces must agree on the tangency point of their shared edge
    (the midscribed-sphere property); otherwise ClosureViolation. The
    result pairs each dual face with the refined source face, so face
    curvatures of (surface, gauss) are well-defined facewise.
    """
    if tol is None:
        tol = default_tol(s)
    comb = s.combinatorics
    planes = face_planarity(s)
    scale = max(s.bbox_diagonal(), 1.0)

    polys: list[IncirclePolygon] = []
    duals: list[IncircleDual] = []
    for pl in planes:
        if pl.degenerate or pl.residual > tol:
            raise NoIncircle(f"face {pl.face} is not planar enough for an incircle")
        poly = incircle_polygon(pl.project(s.face_points(pl.face)), tol=max(tol / scale, 1e-9))
        polys.append(poly)
        duals.append(incircle_dual(poly, gauge=1.0))

    def embed(fi: int, xy: np.ndarray) -> np.ndarray:
        pl = planes[fi]
        return pl.base + xy[:, 0][:, None] * pl.e1 + xy[:, 1][:, None] * pl.e2

    # tangency consistency across shared edges (and the per-edge 3D points)
    tang3: list[dict[int, np.ndarray]] = []
    vert3: list[dict[int, np.ndarray]] = []
    for fi, cyc in enumerate(comb.faces):
        q3 = embed(fi, polys[fi].tangency)
        qmap = {}
        for k in range(len(cyc)):
            a, b = cyc[k - 1], cyc[k]
            ei = comb.edge_index[(a, b) if a < b else (b, a)]
            qmap[ei] = q3[k]
        tang3.append(qmap)
        dq3 = embed(fi, duals[fi].tangency)
        dp3 = embed(fi, duals[fi].vertices)
        vmap = {"q": {ei: dq3[k] for k, ei in enumerate(_edge_ids(comb, fi))}}
        vmap["p"] = {cyc[k]: dp3[k] for k in range(len(cyc))}
        vert3.append(vmap)
    for fa, fb, ei in comb.face_adjacency():
        gap = float(np.linalg.norm(tang3[fa][ei] - tang3[fb][ei]))
        if gap > tol:
            raise ClosureViolation(
                f"faces {fa} and {fb} disagree on the tangency point of edge "
                f"{comb.edges[ei]} by {gap:.3e}"
            )

    # pairwise gluing diagnostic: translate + sign so the shared dual edge
    # (tangency image plus both endpoint images) coincides
    glue_residual = 0.0
    for fa, fb, ei in comb.face_adjacency():
        i, j = comb.edges[ei]
        base_b = planes[fb].base
        best = np.inf
        for sign in (1.0, -1.0):
            def im(x):
                return x if sign > 0 else 2.0 * base_b - x
            shift = vert3[fa]["q"][ei] - im(vert3[fb]["q"][ei])
            err = max(
                float(np.linalg.norm(im(vert3[fb]["p"][i]) + shift - vert3[fa]["p"][i])),
                float(np.linalg.norm(im(vert3[fb]["p"][j]) + shift - vert3[fa]["p"][j])),
            )
            best = min(best, err)
        glue_residual = max(glue_residual, best)

    # face-disjoint refined meshes: each face owns 2n vertices
    faces_out = []
    surf_chunks = []
    gauss_chunks = []
    offset_v = 0
    for fi, cyc in enumerate(comb.faces):
        n = len(cyc)
        faces_out.append(list(range(offset_v, offset_v + 2 * n)))
        surf_chunks.append(embed(fi, duals[fi].refined()))
        gauss_chunks.append(embed(fi, polys[fi].refined()))
        offset_v += 2 * n
    refined_comb = build_combinatorics(faces_out, vertex_count=offset_v)
    return SIsothermicDual(
        surface=Mesh(refined_comb, np.vstack(surf_chunks)),
        gauss=Mesh(refined_comb, np.vstack(gauss_chunks)),
        pair_glue_residual=float(glue_residual),
    )


def _edge_ids(comb: MeshCombinatorics, fi: int):
    cyc = comb.faces[fi]
    out = []
    for k in range(len(cyc)):
        a, b = cyc[k - 1], cyc[k]
        out.append(comb.edge_index[(a, b) if a < b else (b, a)])
    return out


@dataclass(frozen=True)
class MinimalityReport:
    max_abs_H: float
    passed: bool
    H: np.ndarray
    principal: list


def s_isothermic_minimal_check(
    s: Mesh, m: Mesh | None = None, tol: float = 1e-9
) -> MinimalityReport:
    """Check that the assembled incircle dual of s has vanishing mean
    curvature with opposite principal curvatures on every face."""
    if m is None:
        assembled = s_isothermic_dual(s)
        pair = ParallelPair(assembled.surface, assembled.gauss)
    else:
        pair = ParallelPair(m, s)
    reports = all_face_curvatures(pair)
    if any(r is None for r in reports):
        raise VanishingFaceArea("a dual face has vanishing area")
    hs = np.array([r.H for r in reports])
    principal = [r.principal for r in reports]
    ok = bool(np.max(np.abs(hs)) <= tol)
    for pr in principal:
        if pr is None:
            ok = False
        elif abs(pr[0] + pr[1]) > tol * max(1.0, abs(pr[0])):
            ok = False
    return MinimalityReport(float(np.max(np.abs(hs))), ok, hs, principal)


# --- cmc duality ----------------------------------------------------------------

@dataclass(frozen=True)
class CmcDualReport:
    distance_max_dev: float
    unit_gauss_max_dev: float
    mean_curvature_max_dev: float
    passed: bool


def cmc_dual_check(m: Mesh, m_star: Mesh, H0: float, tol: float = 1e-9) -> CmcDualReport:
    """Verify the structure of a constant-mean-curvature pair and its dual:
    |m*_i - m_i| = 1/H0 for all i, s = H0 (m* - m) is unit, and every face
    of (m, s) has mean curvature H0."""
    if m.combinatorics != m_star.combinatorics:
        raise CombinatoricsMismatch("meshes do not share combinatorics")
    rep = check_parallel(m, m_star)
    if not rep.passed:
        raise NotParallel(f"worst edge {rep.worst_edge}: {rep.max_residual:.3e}")
    dist = np.linalg.norm(m_star.positions - m.positions, axis=1)
    target = 1.0 / H0
    scale = max(m.bbox_diagonal(), 1.0)
    dist_dev = float(np.max(np.abs(dist - target)))
    if dist_dev > tol * scale:
        raise DistanceNotConstant(
            f"vertex distances deviate from {target} by up to {dist_dev:.3e}"
        )
    s = Mesh(m.combinatorics, H0 * (m_star.positions - m.positions))
    unit_dev = float(np.max(np.abs(np.linalg.norm(s.positions, axis=1) - 1.0)))
    pair = ParallelPair(m, s)
    reports = all_face_curvatures(pair)
    if any(r is None for r in reports):
        raise VanishingFaceArea("a face has vanishing area")
    h_dev = float(np.max(np.abs(np.array([r.H for r in reports]) - H0)))
    passed = h_dev <= tol and unit_dev <= tol
    return CmcDualReport(dist_dev, unit_dev, h_dev, passed)
