"""Exact constructors for constant-curvature test surfaces.

Rotational surfaces come from a meridian polygon (r_i, 0, h_i) and a Gauss
meridian (r*_i, 0, h*_i) swept around the z axis by a fixed step; band
curvatures depend only on the radii:

    H = (r_i r*_i - r_{i+1} r*_{i+1}) / (r_{i+1}^2 - r_i^2),
    K = (r*_{i+1}^2 - r*_i^2) / (r_{i+1}^2 - r_i^2),

so prescribing H or K is a one-step recurrence for the radii, and the
heights follow from edge parallelism. The rolling construction unwinds a
tangent polygon of an ellipse onto a line; the two unrolled focus traces
are meridians of a constant-mean-curvature pair of surfaces of revolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CollinearTriple,
    EqualRadii,
    NegativeRadicand,
    NoPositiveRoot,
    NotConcyclic,
    OutOfRange,
    ParallelityViolated,
    ReflectionAmbiguity,
    TangencyLost,
)
from .meshes import Mesh, ParallelPair, build_combinatorics, face_planarity
from .polygons import cross2

TWO_PI = 2.0 * np.pi


# --- meridians ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MeridianSpec:
    """Radius/height sequences of a surface of revolution and its Gauss
    meridian. Parallelism ties the two: dr * dh_star == dr_star * dh on
    every step."""

    r: np.ndarray
    h: np.ndarray
    r_star: np.ndarray
    h_star: np.ndarray
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        arrays = {}
        n = None
        for name in ("r", "h", "r_star", "h_star"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1:
                raise ValueError(f"{name} must be one-dimensional")
            if n is None:
                n = len(arr)
            elif len(arr) != n:
                raise ValueError("meridian sequences must have equal length")
            arr.setflags(write=False)
            arrays[name] = arr
        if n < 2:
            raise ValueError("meridians need at least two samples")
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)
        if np.any(arrays["r"] <= 0.0):
            raise ValueError("surface meridian radii must be positive")
        res = parallelity_residual(
            arrays["r"], arrays["h"], arrays["r_star"], arrays["h_star"]
        )
        scale = max(
            float(np.max(np.abs(arrays["r"]))), float(np.max(np.abs(arrays["h"]))), 1.0
        )
        if res > 1e-9 * scale * scale:
            raise ParallelityViolated(f"meridian parallelism violated by {res:.3e}")

    def __len__(self) -> int:
        return len(self.r)


def parallelity_residual(r, h, r_star, h_star) -> float:
    dr = np.diff(r)
    dh = np.diff(h)
    drs = np.diff(r_star)
    dhs = np.diff(h_star)
    return float(np.max(np.abs(dr * dhs - drs * dh), initial=0.0))


def spherical_gauss_meridian(h_star):
    """Gauss meridian on the unit sphere: r* = +sqrt(1 - h*^2)."""
    hs = np.asarray(h_star, dtype=float)
    if np.any(np.abs(hs) >= 1.0):
        raise OutOfRange("Gauss meridian heights must lie strictly inside (-1, 1)")
    return np.sqrt(1.0 - hs * hs), hs


def rot_face_curvatures(r_i, r_ip1, rs_i, rs_ip1):
    """Band curvatures of a rotational pair from the radii alone.

    Returns (H, K, kappa1_rot, kappa2_rot) with
    kappa1_rot = (r*_{i+1} + r*_i)/(r_{i+1} + r_i),
    kappa2_rot = (r*_{i+1} - r*_i)/(r_{i+1} - r_i).
    The rotational principal values are roots of x^2 + 2Hx + K (note the
    sign: kappa1_rot + kappa2_rot = -2H, kappa1_rot * kappa2_rot = K),
    opposite in sign to the roots of the general convention x^2 - 2Hx + K.
    """
    dr2 = r_ip1 * r_ip1 - r_i * r_i
    if dr2 == 0.0 or r_ip1 == r_i:
        raise EqualRadii("equal consecutive radii: band curvatures undefined")
    H = (r_i * rs_i - r_ip1 * rs_ip1) / dr2
    K = (rs_ip1 * rs_ip1 - rs_i * rs_i) / dr2
    k1 = (rs_ip1 + rs_i) / (r_ip1 + r_i)
    k2 = (rs_ip1 - rs_i) / (r_ip1 - r_i)
    return float(H), float(K), float(k1), float(k2)


def gen_prescribed_H(r_star, h_star, H, r0: float, h0: float = 0.0) -> MeridianSpec:
    """Meridian with prescribed per-band mean curvature.

    Solves r_i r*_i - r_{i+1} r*_{i+1} = H_i (r_{i+1}^2 - r_i^2) for
    r_{i+1}, taking the root continuous in H through the H = 0 solution
    r_{i+1} = r_i r*_i / r*_{i+1}. Heights follow from edge parallelism,
    dh = dh* (dr/dr*).

    Both the radius step and the secant ratio dr/dr* are evaluated with
    dr* factored out symbolically (dr = 4 r_i (r*_i + H r_i) dr* /
    [(sqrt(disc) + G)(-b - sqrt(disc))] with G = 2 r*_i + 2 H r_i -
    r*_{i+1}), so nearly-flat Gauss steps suffer no cancellation and a
    flat step (dr* = 0) lands exactly on its curvature-preserving limit.
    """
    rs = np.asarray(r_star, dtype=float)
    hs = np.asarray(h_star, dtype=float)
    if np.any(rs <= 0.0):
        raise ValueError("Gauss meridian radii must be positive")
    n = len(rs)
    h_arr = np.broadcast_to(np.asarray(H, dtype=float), (n - 1,))
    if r0 <= 0.0:
        raise ValueError("r0 must be positive")
    r = np.empty(n)
    h = np.empty(n)
    r[0], h[0] = r0, h0
    notes = []
    for i in range(n - 1):
        a = h_arr[i]
        b = rs[i + 1]
        c = -(r[i] * rs[i] + a * r[i] * r[i])
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            raise NoPositiveRoot(f"step {i}: negative discriminant {disc:.3e}")
        sq = np.sqrt(disc)
        g = 2.0 * rs[i] + 2.0 * a * r[i] - rs[i + 1]
        drs = rs[i + 1] - rs[i]
        if g > 0.0:
            ratio = 4.0 * r[i] * (rs[i] + a * r[i]) / ((sq + g) * (-b - sq))
            dr = ratio * drs
            root = r[i] + dr
        else:
            root = 2.0 * c / (-b - sq)
            dr = root - r[i]
            ratio = dr / drs if drs != 0.0 else 0.0
        if not np.isfinite(root) or root <= 0.0:
            # the continuity branch died (it reaches 0 exactly on the
            # similarity family); fall back to the other root if positive
            other = (-b - sq) / (2.0 * a) if a != 0.0 else -np.inf
            if not np.isfinite(other) or other <= 0.0:
                raise NoPositiveRoot(
                    f"step {i}: no positive radius root (branch {root:.3e})"
                )
            root = other
            dr = root - r[i]
            ratio = dr / drs if drs != 0.0 else 0.0
            notes.append(f"step {i}: continuity branch nonpositive, other root used")
        r[i + 1] = root
        h[i + 1] = h[i] + ratio * (hs[i + 1] - hs[i])
        if drs == 0.0:
            notes.append(f"step {i}: flat Gauss step, height from curvature limit")
    return MeridianSpec(r, h, rs, hs, tuple(notes))


def gen_prescribed_K(r_star, h_star, K: float, r0: float, h0: float = 0.0) -> MeridianSpec:
    """Meridian with constant Gaussian curvature K != 0:
    r_{i+1} = sqrt(r_i^2 + (r*_{i+1}^2 - r*_i^2)/K), heights from edge
    parallelism via the cancellation-free secant ratio
    dr/dr* = (r*_{i+1} + r*_i) / (K (r_{i+1} + r_i))."""
    if K == 0.0:
        raise ValueError("K must be nonzero")
    rs = np.asarray(r_star, dtype=float)
    hs = np.asarray(h_star, dtype=float)
    n = len(rs)
    r = np.empty(n)
    h = np.empty(n)
    if r0 <= 0.0:
        raise ValueError("r0 must be positive")
    r[0], h[0] = r0, h0
    notes = []
    for i in range(n - 1):
        drs = rs[i + 1] - rs[i]
        sum_rs = rs[i + 1] + rs[i]
        rad = r[i] * r[i] + drs * sum_rs / K
        if rad <= 0.0:
            raise NegativeRadicand(f"step {i}: radicand {rad:.3e}")
        r[i + 1] = np.sqrt(rad)
        ratio = sum_rs / (K * (r[i + 1] + r[i]))
        h[i + 1] = h[i] + ratio * (hs[i + 1] - hs[i])
        if drs == 0.0:
            notes.append(f"step {i}: flat Gauss step, height from curvature limit")
    return MeridianSpec(r, h, rs, hs, tuple(notes))


# --- sweeping ----------------------------------------------------------------

def _revolve(radii, heights, alpha: float, copies: int, closed: bool):
    """Vertices of the swept mesh: rings at angles 2*alpha*k.

    Signed radii are allowed (a negative radius places the ring at the
    antipodal azimuth), which keeps edgewise parallelism for pairs of
    traces on opposite sides of the axis.
    """
    ncols = copies if closed else copies + 1
    ang = 2.0 * alpha * np.arange(ncols)
    cos, sin = np.cos(ang), np.sin(ang)
    rings = []
    for r_i, h_i in zip(radii, heights):
        rings.append(np.column_stack([r_i * cos, r_i * sin, np.full(ncols, h_i)]))
    return np.vstack(rings), ncols


def _band_faces(nrows: int, ncols: int, closed: bool):
    faces = []
    for i in range(nrows - 1):
        for k in range(ncols if closed else ncols - 1):
            k2 = (k + 1) % ncols
            a = i * ncols
            b = (i + 1) * ncols
            faces.append([a + k, a + k2, b + k2, b + k])
    return faces


def rot_surface(
    ms: MeridianSpec, alpha: float, copies: int, tol: float = 0.0
) -> ParallelPair:
    """Sweep the meridian and its Gauss meridian into a parallel pair.

    The rotation step is 2*alpha; ``copies`` bands are generated, wrapping
    into a closed ring when copies * 2 * alpha == 2*pi (within 1e-9),
    otherwise an open strip. Faces are planar isosceles trapezoids.
    """
    if not (0.0 < alpha < np.pi):
        raise ValueError("alpha must lie in (0, pi)")
    if copies < 1:
        raise ValueError("need at least one copy")
    closed = abs(copies * 2.0 * alpha - TWO_PI) <= 1e-9
    pos_m, ncols = _revolve(ms.r, ms.h, alpha, copies, closed)
    pos_s, _ = _revolve(ms.r_star, ms.h_star, alpha, copies, closed)
    comb = build_combinatorics(
        _band_faces(len(ms), ncols, closed), vertex_count=len(pos_m)
    )
    return ParallelPair(Mesh(comb, pos_m), Mesh(comb, pos_s), tol)


def catenoid_pair(
    samples: int = 30,
    h_range: tuple[float, float] = (-0.8, 0.8),
    alpha: float = np.pi / 12,
    copies: int = 12,
    r0: float = 1.0,
) -> ParallelPair:
    """Vanishing-mean-curvature surface of revolution with spherical Gauss
    meridian (discrete catenoid)."""
    rs, hs = spherical_gauss_meridian(np.linspace(*h_range, samples))
    ms = gen_prescribed_H(rs, hs, 0.0, r0=r0)
    return rot_surface(ms, alpha, copies)


def pseudosphere_pair(
    K: float = 1.0,
    samples: int = 20,
    h_range: tuple[float, float] = (0.8, 0.0),
    alpha: float = np.pi / 12,
    copies: int = 12,
    r0: float = 1.0,
) -> ParallelPair:
    """Constant-Gaussian-curvature surface of revolution with spherical
    Gauss meridian."""
    rs, hs = spherical_gauss_meridian(np.linspace(*h_range, samples))
    ms = gen_prescribed_K(rs, hs, K, r0=r0)
    return rot_surface(ms, alpha, copies)


def cmc_rotational_pair(
    H0: float = 0.25,
    samples: int = 20,
    h_range: tuple[float, float] = (-0.6, 0.6),
    alpha: float = np.pi / 12,
    copies: int = 12,
    r0: float = 3.0,
) -> ParallelPair:
    """Constant-mean-curvature surface of revolution with spherical Gauss
    meridian."""
    rs, hs = spherical_gauss_meridian(np.linspace(*h_range, samples))
    ms = gen_prescribed_H(rs, hs, H0, r0=r0)
    return rot_surface(ms, alpha, copies)


# --- elliptic billiards --------------------------------------------------------

@dataclass(frozen=True)
class Ellipse:
    """Axis-aligned origin-centered ellipse x^2/a^2 + y^2/b^2 = 1."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a >= self.b > 0.0):
            raise ValueError("need a >= b > 0")

    @property
    def focal_distance(self) -> float:
        return float(np.sqrt(self.a * self.a - self.b * self.b))

    @property
    def focus_a(self) -> np.ndarray:
        return np.array([-self.focal_distance, 0.0])

    @property
    def focus_b(self) -> np.ndarray:
        return np.array([self.focal_distance, 0.0])

    def point(self, t: float) -> np.ndarray:
        return np.array([self.a * np.cos(t), self.b * np.sin(t)])

    def tangent_line(self, t: float):
        """Unit normal n and offset p of the tangent line {x : n.x = p}."""
        n = np.array([np.cos(t) / self.a, np.sin(t) / self.b])
        nn = float(np.linalg.norm(n))
        return n / nn, 1.0 / nn

    def line_tangency_residual(self, p0: np.ndarray, p1: np.ndarray) -> float:
        """Distance of the line p0 p1 from tangency: a line {n.x = p} is
        tangent iff (a n_x)^2 + (b n_y)^2 = p^2."""
        e = p1 - p0
        n = np.array([-e[1], e[0]])
        n = n / np.linalg.norm(n)
        off = float(n @ p0)
        return abs(float(np.hypot(self.a * n[0], self.b * n[1])) - abs(off))

    def line_tangency_point(self, p0: np.ndarray, p1: np.ndarray) -> np.ndarray:
        e = p1 - p0
        n = np.array([-e[1], e[0]])
        n = n / np.linalg.norm(n)
        off = float(n @ p0)
        return np.array([self.a * self.a * n[0], self.b * self.b * n[1]]) / off


@dataclass(frozen=True, eq=False)
class BilliardTrajectory:
    """Tangent-segment polygon around an ellipse.

    ``vertices`` are the polygon corners P_i; segment [P_i, P_{i+1}] lies
    on a tangent line of the caustic, touching at ``tangency[i]``.
    """

    caustic: Ellipse
    vertices: np.ndarray  # (n+1, 2) for n segments
    tangency: np.ndarray  # (n, 2)
    mode: str  # "confocal" | "free"
    a_prime: float | None = None

    @property
    def segments(self) -> int:
        return len(self.vertices) - 1

    def focal_distance_sums(self) -> np.ndarray:
        """d_i = |A P_i| + |B P_i| (constant on a confocal trajectory)."""
        A, B = self.caustic.focus_a, self.caustic.focus_b
        return np.linalg.norm(self.vertices - A, axis=1) + np.linalg.norm(
            self.vertices - B, axis=1
        )


def _check_triples(pts: np.ndarray, tol: float):
    for i in range(len(pts) - 2):
        u = pts[i + 1] - pts[i]
        v = pts[i + 2] - pts[i + 1]
        if abs(cross2(u, v)) <= tol * np.linalg.norm(u) * np.linalg.norm(v):
            raise CollinearTriple(f"vertices {i},{i+1},{i+2} are collinear")


def billiard_trajectory(
    ellipse: Ellipse,
    mode: str = "confocal",
    a_prime: float | None = None,
    start: float = 0.3,
    n: int = 24,
    tangency_params=None,
    tol: float = 1e-10,
) -> BilliardTrajectory:
    """Trajectory of the extrinsic billiard around ``ellipse``.

    confocal mode: vertices on the confocal ellipse with semi-major
    a_prime (> a); stepping reflects the direction in the outer boundary,
    and each chord is verified tangent to the caustic within tol
    (TangencyLost otherwise). ``start`` is the angle parameter of P_0.

    free mode: ``tangency_params`` are strictly monotone tangency angles;
    vertices are consecutive tangent-line intersections.
    """
    E = ellipse
    if mode == "confocal":
        if a_prime is None or a_prime <= E.a:
            raise ValueError("confocal mode needs a_prime > a")
        c = E.focal_distance
        b_prime = float(np.sqrt(a_prime * a_prime - c * c))
        quad = np.diag([1.0 / a_prime**2, 1.0 / b_prime**2])
        p = np.array([a_prime * np.cos(start), b_prime * np.sin(start)])
        u = _initial_tangent_direction(E, p)
        vertices = [p]
        tangency = []
        # tangency geometry degrades once chords reach the cube root of
        # machine epsilon (tangency-point conditioning ~ chord^2)
        resolution = float(np.finfo(float).eps ** (1.0 / 3.0)) * E.a
        for _ in range(n):
            uu = float(u @ quad @ u)
            up = float(u @ quad @ p)
            t_step = -2.0 * up / uu
            if not np.isfinite(t_step) or t_step <= resolution:
                raise TangencyLost(
                    f"billiard segment length {t_step:.3e} below resolution"
                )
            q = p + t_step * u
            res = E.line_tangency_residual(p, q)
            if res > tol * max(E.a, 1.0):
                raise TangencyLost(
                    f"chord missed the caustic by {res:.3e} (tol {tol:.1e})"
                )
            tangency.append(E.line_tangency_point(p, q))
            normal = quad @ q
            normal = normal / np.linalg.norm(normal)
            u = u - 2.0 * float(u @ normal) * normal
            p = q
            vertices.append(p)
        verts = np.asarray(vertices)
        _check_triples(verts, 1e-12)
        return BilliardTrajectory(E, verts, np.asarray(tangency), "confocal", a_prime)

    if mode == "free":
        params = np.asarray(tangency_params, dtype=float)
        if params is None or params.ndim != 1 or len(params) < 3:
            raise ValueError("free mode needs at least three tangency parameters")
        steps = np.diff(params)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError("tangency parameters must be strictly monotone")
        if np.any(np.abs(steps) >= np.pi):
            raise ValueError("tangency parameter steps must be smaller than pi")
        lines = [E.tangent_line(t) for t in params]
        verts = []
        for (n1, p1), (n2, p2) in zip(lines[:-1], lines[1:]):
            mat = np.vstack([n1, n2])
            det = float(np.linalg.det(mat))
            if abs(det) < 1e-14:
                raise CollinearTriple("consecutive tangent lines are parallel")
            verts.append(np.linalg.solve(mat, [p1, p2]))
        verts = np.asarray(verts)
        _check_triples(verts, 1e-12)
        tangency = np.array([E.point(t) for t in params[1:-1]])
        return BilliardTrajectory(E, verts, tangency, "free", None)

    raise ValueError(f"unknown mode {mode!r}")


def _initial_tangent_direction(E: Ellipse, p: np.ndarray) -> np.ndarray:
    """Direction from p along a tangent line of E, oriented to run
    counterclockwise around the caustic."""
    gx, gy = p[0] / E.a, p[1] / E.b
    rad = float(np.hypot(gx, gy))
    if rad <= 1.0:
        raise ValueError("start point is not outside the caustic")
    psi = float(np.arctan2(gy, gx))
    best = None
    for th in (psi - np.arccos(1.0 / rad), psi + np.arccos(1.0 / rad)):
        target = E.point(th)
        u = target - p
        u = u / np.linalg.norm(u)
        progress = cross2(p, u)
        if best is None or progress > best[0]:
            best = (progress, u)
    return best[1]


# --- rolling to a line -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RolledTraces:
    """Unrolled trajectory data: P_i on the axis; per-segment focus images
    B_i (upper half-plane) and A_i (lower half-plane)."""

    axis_positions: np.ndarray  # (n+1,) x-coordinates of P_i on the axis
    B: np.ndarray  # (n, 2)
    A: np.ndarray  # (n, 2)
    l: float  # |A_i B_i|, constant over i
    d: float | None  # |A P_i| + |B P_i| when constant (confocal), else None

    @property
    def r(self) -> np.ndarray:
        """Distances of the B trace from the axis."""
        return np.abs(self.B[:, 1])

    @property
    def r_prime(self) -> np.ndarray:
        """Distances of the A trace from the axis."""
        return np.abs(self.A[:, 1])


def roll_to_line(traj: BilliardTrajectory, tol: float = 1e-9) -> RolledTraces:
    """Unroll the trajectory onto the x axis, mapping the focus triangles
    isometrically; B images go to the upper half-plane, A images to the
    lower."""
    E = traj.caustic
    P = traj.vertices
    seg = np.linalg.norm(np.diff(P, axis=0), axis=1)
    x = np.concatenate([[0.0], np.cumsum(seg)])
    scale = max(float(seg.max()), E.a)

    def unroll(F: np.ndarray, sign: float) -> np.ndarray:
        out = np.empty((len(seg), 2))
        for i in range(len(seg)):
            d1 = float(np.linalg.norm(F - P[i]))
            d2 = float(np.linalg.norm(F - P[i + 1]))
            L = float(seg[i])
            u = (d1 * d1 - d2 * d2 + L * L) / (2.0 * L)
            y2 = d1 * d1 - u * u
            if y2 <= (1e-12 * scale) ** 2:
                raise ReflectionAmbiguity(
                    f"segment {i}: focus lies on the segment line"
                )
            out[i] = (x[i] + u, sign * np.sqrt(y2))
        return out

    B = unroll(E.focus_b, +1.0)
    A = unroll(E.focus_a, -1.0)
    l_vals = np.linalg.norm(B - A, axis=1)
    if float(np.ptp(l_vals)) > tol * scale:
        raise ReflectionAmbiguity(
            f"unrolled focus distance varies by {np.ptp(l_vals):.3e}"
        )
    d = None
    if traj.mode == "confocal":
        d_vals = traj.focal_distance_sums()
        d = float(np.mean(d_vals))
    return RolledTraces(x, B, A, float(np.mean(l_vals)), d)


# --- Delaunay pairs --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DelaunayReport:
    l: float
    d: float | None
    H_m: np.ndarray
    H_mt: np.ndarray
    edge_products: np.ndarray  # |A_i A_{i+1}| * |B_i B_{i+1}|
    cross_ratios_m: np.ndarray
    cross_ratios_mt: np.ndarray


@dataclass(frozen=True, eq=False)
class DelaunayPair:
    pair_m: ParallelPair
    pair_mt: ParallelPair
    report: DelaunayReport


def delaunay_pair(traces: RolledTraces, alpha: float, copies: int) -> DelaunayPair:
    """Rotational constant-mean-curvature pair from unrolled billiard traces.

    The B trace is the meridian of m; the A trace, kept on its (negative)
    side of the axis, is the meridian of the companion surface. The shared
    unit Gauss map s points from the B surface to the A surface, scaled by
    1/l, so both (m, s) and (m_tilde, -s) have mean curvature 1/l on every
    face.
    """
    from .curvature import all_face_curvatures  # local import to avoid a cycle

    rm, hm = traces.B[:, 1], traces.B[:, 0] - traces.B[0, 0]
    rt, ht = traces.A[:, 1], traces.A[:, 0] - traces.B[0, 0]
    l = traces.l
    rs = (rt - rm) / l
    hs = (ht - hm) / l

    closed = abs(copies * 2.0 * alpha - TWO_PI) <= 1e-9
    pos_m, ncols = _revolve(rm, hm, alpha, copies, closed)
    pos_mt, _ = _revolve(rt, ht, alpha, copies, closed)
    pos_s, _ = _revolve(rs, hs, alpha, copies, closed)
    comb = build_combinatorics(
        _band_faces(len(rm), ncols, closed), vertex_count=len(pos_m)
    )
    m = Mesh(comb, pos_m)
    mt = Mesh(comb, pos_mt)
    s = Mesh(comb, pos_s)
    s_neg = Mesh(comb, -pos_s)
    pair_m = ParallelPair(m, s)
    pair_mt = ParallelPair(mt, s_neg)

    H_m = np.array([rep.H for rep in all_face_curvatures(pair_m)])
    H_mt = np.array([rep.H for rep in all_face_curvatures(pair_mt)])
    dB = np.linalg.norm(np.diff(traces.B, axis=0), axis=1)
    dA = np.linalg.norm(np.diff(traces.A, axis=0), axis=1)
    crs_m = np.array(
        [
            _rot_face_cross_ratio(rm[i], rm[i + 1], hm[i], hm[i + 1], alpha)
            for i in range(len(rm) - 1)
        ]
    )
    crs_mt = np.array(
        [
            _rot_face_cross_ratio(rt[i], rt[i + 1], ht[i], ht[i + 1], alpha)
            for i in range(len(rt) - 1)
        ]
    )
    report = DelaunayReport(
        l=l,
        d=traces.d,
        H_m=H_m,
        H_mt=H_mt,
        edge_products=dA * dB,
        cross_ratios_m=crs_m,
        cross_ratios_mt=crs_mt,
    )
    return DelaunayPair(pair_m, pair_mt, report)


def _rot_face_cross_ratio(r0, r1, h0, h1, alpha) -> float:
    delta = float(np.hypot(np.cos(alpha) * (r1 - r0), h1 - h0))
    v = np.array(
        [
            complex(-r0 * np.sin(alpha), 0.0),
            complex(+r0 * np.sin(alpha), 0.0),
            complex(+r1 * np.sin(alpha), delta),
            complex(-r1 * np.sin(alpha), delta),
        ]
    )
    cr = (v[0] - v[1]) * (v[2] - v[3]) / ((v[1] - v[2]) * (v[3] - v[0]))
    return float(cr.real)


def face_cross_ratio(points, tol: float = 1e-9) -> float:
    """Complex cross-ratio (p1-p2)(p3-p4) / ((p2-p3)(p4-p1)) of four
    concyclic 3D points, evaluated in their common plane; real for
    concyclic inputs and returned as a real number."""
    pts = np.asarray(points, dtype=float)
    if pts.shape != (4, 3):
        raise ValueError("face_cross_ratio needs four 3D points")
    centroid = pts.mean(axis=0)
    rel = pts - centroid
    _, sv, vt = np.linalg.svd(rel)
    scale = max(float(sv[0]), 1e-300)
    if sv[2] > tol * scale:
        raise NotConcyclic(f"points are not coplanar (residual {sv[2]:.3e})")
    e1, e2 = vt[0], vt[1]
    z = rel @ e1 + 1j * (rel @ e2)
    # concyclicity: |z - c| = rho has a linear least-squares formulation
    xy = np.column_stack([z.real, z.imag])
    aa = np.column_stack([2.0 * xy, np.ones(4)])
    bb = np.einsum("ij,ij->i", xy, xy)
    sol, *_ = np.linalg.lstsq(aa, bb, rcond=None)
    c2 = sol[:2]
    rho = float(np.sqrt(max(sol[2] + c2 @ c2, 0.0)))
    res = float(np.max(np.abs(np.linalg.norm(xy - c2, axis=1) - rho)))
    if res > tol * scale:
        raise NotConcyclic(f"circumcircle residual {res:.3e}")
    cr = (z[0] - z[1]) * (z[2] - z[3]) / ((z[1] - z[2]) * (z[3] - z[0]))
    if abs(cr.imag) > tol * max(1.0, abs(cr)):
        raise NotConcyclic(f"cross-ratio has imaginary part {cr.imag:.3e}")
    return float(cr.real)
