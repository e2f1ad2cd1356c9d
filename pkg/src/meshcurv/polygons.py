"""Signed areas and mixed areas of planar polygons.

A polygon is an (n, 2) float array of chart coordinates, n >= 3, read as a
closed cycle. The signed area is the shoelace sum

    A(P) = 1/2 * sum_i det(p_i, p_{i+1})        (indices mod n)

and the mixed area is its polarization, the symmetric bilinear form with
A(P, P) = A(P). On the space of quads parallel to a fixed quad (modulo
translation) the area form is a 2x2 quadratic form whose signature encodes
whether all four vertices are extremal in their convex hull.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BothAreasZero,
    DegenerateBeyondTriangle,
    EdgesDoNotCancel,
    LengthMismatch,
)

DEGENERACY_TOL = 1e-12  # orientation-test tolerance, scaled by coordinate spread^2


def cross2(u, v) -> float:
    """Scalar cross product of 2-vectors."""
    return float(u[0] * v[1] - u[1] * v[0])


def as_polygon(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise ValueError(f"polygon needs shape (n>=3, 2), got {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("polygon has non-finite coordinates")
    return pts


def polygon_scale(*polys) -> float:
    """Coordinate spread used to scale degeneracy tolerances."""
    spread = 0.0
    for p in polys:
        p = np.asarray(p, dtype=float)
        if len(p):
            spread = max(spread, float(np.max(np.ptp(p, axis=0), initial=0.0)))
    return max(spread, 1e-300)


def area(P) -> float:
    """Signed area by the shoelace formula; CCW is positive."""
    P = as_polygon(P)
    c = P.mean(axis=0)
    q = P - c
    qn = np.roll(q, -1, axis=0)
    return 0.5 * float(np.sum(q[:, 0] * qn[:, 1] - q[:, 1] * qn[:, 0]))


def mixed_area(P, Q) -> float:
    """Polarization of the area form: symmetric, bilinear, A(P,P)=A(P).

    Vertex counts must match; edgewise parallelism is not needed for the
    value to be defined (it is needed for the convex-geometry reading).
    """
    P = as_polygon(P)
    Q = as_polygon(Q)
    if len(P) != len(Q):
        raise LengthMismatch(f"vertex counts differ: {len(P)} vs {len(Q)}")
    p = P - P.mean(axis=0)
    q = Q - Q.mean(axis=0)
    pn = np.roll(p, -1, axis=0)
    qn = np.roll(q, -1, axis=0)
    s = np.sum(p[:, 0] * qn[:, 1] - p[:, 1] * qn[:, 0])
    s += np.sum(q[:, 0] * pn[:, 1] - q[:, 1] * pn[:, 0])
    return 0.25 * float(s)


def concat(P1, P2, shared) -> np.ndarray:
    """Concatenate two polygons along a shared boundary run.

    ``shared = (i1, i2, k)`` declares that the k edges of P1 starting at
    vertex i1 coincide, reversed, with the k edges of P2 starting at i2:
    P1[i1 + t] == P2[i2 + k - t] for t = 0..k (cyclic indices). The shared
    edges cancel and the outer boundary survives, so areas add.
    """
    P1 = as_polygon(P1)
    P2 = as_polygon(P2)
    i1, i2, k = shared
    n1, n2 = len(P1), len(P2)
    if not (1 <= k < min(n1, n2)):
        raise EdgesDoNotCancel(f"shared run of {k} edges is impossible")
    tol = 1e-9 * polygon_scale(P1, P2)
    for t in range(k + 1):
        a = P1[(i1 + t) % n1]
        b = P2[(i2 + k - t) % n2]
        if np.linalg.norm(a - b) > tol:
            raise EdgesDoNotCancel(
                f"vertex {(i1 + t) % n1} of P1 and {(i2 + k - t) % n2} of P2 differ"
            )
    out = []
    # walk P1 from the end of the shared run around to its start...
    for t in range(n1 - k + 1):
        out.append(P1[(i1 + k + t) % n1])
    # ...then P2 from the end of its run (== start of P1's) back around,
    # skipping both endpoints, which are already present.
    for t in range(1, n2 - k):
        out.append(P2[(i2 + k + t) % n2])
    return np.asarray(out)


def _orient(a, b, c) -> float:
    return float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def convex_position(P, tol: float | None = None) -> bool:
    """True iff every vertex is an extremal point of the convex hull.

    Brute force: a vertex fails iff it lies inside or on the triangle of
    the other three (orientation tests, ties count as non-extremal).
    """
    P = as_polygon(P)
    if len(P) != 4:
        raise ValueError("convex_position is defined for quads")
    eps = (DEGENERACY_TOL if tol is None else tol) * polygon_scale(P) ** 2
    for i in range(4):
        others = [P[j] for j in range(4) if j != i]
        a, b, c = others
        o = _orient(a, b, c)
        if abs(o) <= eps:
            return False  # supporting triangle degenerate: not strictly extremal
        sgn = 1.0 if o > 0 else -1.0
        d1 = sgn * _orient(a, b, P[i])
        d2 = sgn * _orient(b, c, P[i])
        d3 = sgn * _orient(c, a, P[i])
        if d1 >= -eps and d2 >= -eps and d3 >= -eps:
            return False
    return True


@dataclass(frozen=True)
class SignatureReport:
    """Signature of the area form on quads parallel to P, mod translation."""

    classification: str  # indefinite | positive-definite | negative-definite | semidefinite | degenerate
    determinant: float  # det of the normalized 2x2 form matrix
    convex_position: bool
    form_matrix: np.ndarray  # normalized so the off-diagonal entry is ~1
    frame_params: tuple[float, float] | None  # (s, t) of the affine normal form


def _intersect_lines(p, u, q, v):
    """Intersection of p + a*u and q + b*v; returns the point."""
    mat = np.array([[u[0], -v[0]], [u[1], -v[1]]])
    ab = np.linalg.solve(mat, q - p)
    return p + ab[0] * u


def _normalized_form_matrix(P):
    """Area form of quads parallel to P in the proof-normal coordinates.

    Maps p0,p1,p2 to (0,1),(0,0),(1,0); a parallel quad is pinned by q1=0
    and parametrized by q3=(s',t'); q0 and q2 follow by line intersection.
    Returns (2x form matrix, (s,t)); areas evaluated numerically, no closed
    form is assumed.
    """
    p0, p1, p2, p3 = (np.asarray(p, dtype=float) for p in P)
    u = p2 - p1
    w = p0 - p1
    frame = np.column_stack([u, w])
    st = np.linalg.solve(frame, p3 - p1)
    s, t = float(st[0]), float(st[1])
    n0 = np.array([0.0, 1.0])
    n1 = np.array([0.0, 0.0])
    n2 = np.array([1.0, 0.0])
    n3 = np.array([s, t])

    def quad_at(v):
        q1 = np.zeros(2)
        q3 = np.asarray(v, dtype=float)
        q2 = _intersect_lines(q1, n2 - n1, q3, n3 - n2)
        q0 = _intersect_lines(q1, n0 - n1, q3, n0 - n3)
        return np.array([q0, q1, q2, q3])

    a10 = area(quad_at([1.0, 0.0]))
    a01 = area(quad_at([0.0, 1.0]))
    a11 = area(quad_at([1.0, 1.0]))
    m12 = 0.5 * (a11 - a10 - a01)
    m_hat = np.array([[a10, m12], [m12, a01]])
    return 2.0 * m_hat, (s, t), float(np.linalg.det(frame))


def _null_space_form(P, eps):
    """Gram matrix of the area form on a closure-nullspace basis.

    Works for any quad, including triangle degenerations where the normal
    form's parametrization breaks down.
    """
    edges = np.roll(P, -1, axis=0) - P  # e_k = p_{k+1} - p_k
    closure = edges.T  # 2 x 4
    _, sv, vt = np.linalg.svd(closure)
    null = vt[2:]  # (2, 4) basis of edge-factor space with closed quads
    basis = []
    for factors in null:
        verts = np.zeros((4, 2))
        verts[1:] = np.cumsum(factors[:3, None] * edges[:3], axis=0)
        basis.append(verts)
    g = np.empty((2, 2))
    g[0, 0] = area(basis[0])
    g[1, 1] = area(basis[1])
    g[0, 1] = g[1, 0] = mixed_area(basis[0], basis[1])
    return g


def quad_signature(P, tol: float | None = None) -> SignatureReport:
    """Classify the area form on the space of quads parallel to P.

    Nondegenerate quads get the affine normal form (frame = first three
    vertices); a quad degenerated to a triangle (exactly one collinear
    consecutive triple) is semidefinite; two or more collinear triples
    raise DegenerateBeyondTriangle.
    """
    P = as_polygon(P)
    if len(P) != 4:
        raise ValueError("quad_signature needs exactly 4 vertices")
    scale2 = polygon_scale(P) ** 2
    eps = (DEGENERACY_TOL if tol is None else tol) * scale2
    collinear = [
        abs(_orient(P[i], P[(i + 1) % 4], P[(i + 2) % 4])) <= eps for i in range(4)
    ]
    ncol = sum(collinear)
    if ncol >= 2:
        raise DegenerateBeyondTriangle(f"{ncol} collinear vertex triples")

    if ncol == 1:
        gram = _null_space_form(P, eps)
        ev = np.linalg.eigvalsh(gram)
        lead = max(abs(ev[0]), abs(ev[1]))
        small = [abs(v) <= 1e-9 * max(lead, eps) for v in ev]
        classification = "degenerate" if all(small) else "semidefinite"
        return SignatureReport(
            classification=classification,
            determinant=0.0,
            convex_position=convex_position(P, tol),
            form_matrix=gram,
            frame_params=None,
        )

    # Frame p0,p1,p2 is guaranteed non-collinear here (all triples are).
    form, (s, t), frame_det = _normalized_form_matrix(P)
    det = float(np.linalg.det(form))
    if det < 0.0:
        classification = "indefinite"
    else:
        # Definite in normalized coordinates; the original-chart sign picks
        # up the orientation of the affine frame.
        sign = np.sign(np.trace(form)) * np.sign(frame_det)
        classification = "positive-definite" if sign > 0 else "negative-definite"
    return SignatureReport(
        classification=classification,
        determinant=det,
        convex_position=convex_position(P, tol),
        form_matrix=form,
        frame_params=(s, t),
    )


@dataclass(frozen=True)
class FactorizationReport:
    """Real factorization of phi(x, y) = A(xP + yQ)."""

    coefficients: tuple[float, float, float]  # (A(P), A(P,Q), A(Q))
    discriminant: float  # A(P,Q)^2 - A(P) A(Q)
    roots: tuple[float, ...] | None  # real roots of phi(x, 1); None if irreducible
    is_square: bool


def area_polynomial_roots(P, Q, tol: float = 1e-12) -> FactorizationReport:
    """Factorization data of the quadratic x -> A(xP + Q).

    phi(x, 1) = A(P) x^2 + 2 A(P,Q) x + A(Q); it factorizes over the reals
    iff A(P,Q)^2 - A(P) A(Q) >= 0, and is a square iff that discriminant
    vanishes.
    """
    a_p = area(P)
    a_pq = mixed_area(P, Q)
    a_q = area(Q)
    scale2 = polygon_scale(P, Q) ** 2
    eps = tol * scale2
    if abs(a_p) <= eps and abs(a_q) <= eps:
        raise BothAreasZero("both polygons have (numerically) vanishing area")
    disc = a_pq * a_pq - a_p * a_q
    eps_disc = tol * max(a_p * a_p, a_pq * a_pq, a_q * a_q, eps * eps)
    if disc < -eps_disc:
        return FactorizationReport((a_p, a_pq, a_q), disc, None, False)
    is_square = abs(disc) <= eps_disc
    if abs(a_p) <= eps:
        if abs(a_pq) <= eps:
            # phi = A(Q) y^2: a square with no affine root.
            return FactorizationReport((a_p, a_pq, a_q), disc, (), True)
        return FactorizationReport(
            (a_p, a_pq, a_q), disc, (-a_q / (2.0 * a_pq),), False
        )
    if is_square:
        r = -a_pq / a_p
        return FactorizationReport((a_p, a_pq, a_q), disc, (r, r), True)
    sq = np.sqrt(max(disc, 0.0))
    # stable quadratic roots for a x^2 + 2 b x + c
    qq = -(a_pq + np.copysign(sq, a_pq)) if a_pq != 0.0 else -sq
    r1 = qq / a_p
    r2 = a_q / qq
    roots = tuple(sorted((float(r1), float(r2))))
    return FactorizationReport((a_p, a_pq, a_q), disc, roots, False)
