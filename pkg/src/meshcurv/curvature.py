"""Face and edge curvatures of a parallel mesh pair.

The face area of the offset family m + t s is a quadratic polynomial in t,

    A(m(f) + t s(f)) = (1 - 2 H_f t + K_f t^2) A(m(f)),

which defines the mean and Gaussian curvatures per face:

    H_f = -A(m(f), s(f)) / A(m(f)),      K_f = A(s(f)) / A(m(f)).

Both are ratios of areas in a shared face chart, hence independent of the
chart's rotation, scale and orientation; H flips sign under s -> -s while
K is unchanged. Principal curvatures are the real roots of x^2 - 2Hx + K.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DegenerateOffsetFace,
    SingularDenominator,
    VanishingFaceArea,
    ZeroMeanCurvature,
    ZeroMeshEdge,
)
from .meshes import Mesh, ParallelPair, face_chart_coords
from .polygons import area, mixed_area


@dataclass(frozen=True)
class FaceCurvatureReport:
    face: int
    H: float
    K: float
    area_m: float
    area_s: float
    area_ms: float
    principal: tuple[float, float] | None
    similar: bool  # s(f) is a (nonzero) scaled translate of m(f)


def principal_curvatures(H: float, K: float):
    """Real roots of x^2 - 2Hx + K, ascending; None when H^2 < K.

    Discriminants within roundoff of zero count as zero so that exact
    similarity data (K = H^2 up to floating point) yields its double root.
    """
    disc = H * H - K
    if disc < 0.0:
        if disc < -1e-12 * max(H * H, abs(K), 1e-300):
            return None
        disc = 0.0
    sq = float(np.sqrt(disc))
    return (H - sq, H + sq)


def _face_polygons(pair: ParallelPair, f: int):
    plane = pair.face_planes[f]
    cyc = list(pair.combinatorics.faces[f])
    return plane.project(pair.m.positions[cyc]), plane.project(pair.s.positions[cyc])


def _similarity_flag(pm: np.ndarray, ps: np.ndarray, tol: float) -> bool:
    em = np.roll(pm, -1, axis=0) - pm
    es = np.roll(ps, -1, axis=0) - ps
    lm2 = np.einsum("ij,ij->i", em, em)
    lam = float((es[0] @ em[0]) / lm2[0])
    scale = max(float(np.max(np.abs(pm))), float(np.max(np.abs(ps))), 1.0)
    if abs(lam) * np.sqrt(float(lm2.max())) <= tol * scale:
        return False  # s-face collapses to a point: not a similarity
    return bool(np.max(np.linalg.norm(es - lam * em, axis=1)) <= tol * scale)


def _report_from_areas(f, a_m, a_s, a_ms, pm, ps, tol):
    H = -a_ms / a_m
    K = a_s / a_m
    return FaceCurvatureReport(
        face=f,
        H=float(H),
        K=float(K),
        area_m=float(a_m),
        area_s=float(a_s),
        area_ms=float(a_ms),
        principal=principal_curvatures(H, K),
        similar=_similarity_flag(pm, ps, tol),
    )


def face_curvatures(pair: ParallelPair, f: int, tol: float | None = None) -> FaceCurvatureReport:
    """Mean/Gaussian curvature of face f from areas and the mixed area."""
    if tol is None:
        tol = 1e-9
    pm, ps = _face_polygons(pair, f)
    a_m = area(pm)
    scale2 = max(float(np.max(np.abs(pm))), 1e-300) ** 2
    if abs(a_m) <= tol * scale2:
        raise VanishingFaceArea(f"face {f} has area {a_m:.3e}")
    return _report_from_areas(f, a_m, area(ps), mixed_area(pm, ps), pm, ps, tol)


def all_face_curvatures(pair: ParallelPair, tol: float | None = None):
    """Curvature reports for every face; None entries for vanishing areas."""
    if tol is None:
        tol = 1e-9
    xy_m, xy_s, ptr = face_chart_coords(pair)
    a_m = _kernels.face_areas(xy_m, ptr)
    a_s = _kernels.face_areas(xy_s, ptr)
    a_ms = _kernels.face_mixed_areas(xy_m, xy_s, ptr)
    out = []
    for f in range(len(pair.combinatorics.faces)):
        lo, hi = ptr[f], ptr[f + 1]
        pm, ps = xy_m[lo:hi], xy_s[lo:hi]
        scale2 = max(float(np.max(np.abs(pm))), 1e-300) ** 2
        if abs(a_m[f]) <= tol * scale2:
            out.append(None)
            continue
        out.append(_report_from_areas(f, a_m[f], a_s[f], a_ms[f], pm, ps, tol))
    return out


def steiner_area(pair: ParallelPair, f: int, t: float) -> float:
    """Area of the offset face m(f) + t s(f), checked against the
    quadratic offset-area law (exact identity up to roundoff)."""
    rep = face_curvatures(pair, f)
    pm, ps = _face_polygons(pair, f)
    a_t = area(pm + t * ps)
    predicted = (1.0 - 2.0 * rep.H * t + rep.K * t * t) * rep.area_m
    assert abs(a_t - predicted) <= 1e-10 * abs(rep.area_m) * max(1.0, t * t), (
        f"offset-area law violated on face {f}: {a_t} vs {predicted}"
    )
    return float(a_t)


@dataclass(frozen=True)
class EdgeCurvature:
    edge: tuple[int, int]
    kappa: float
    center: np.ndarray | None  # curvature center L_i cap L_j; None near kappa = 0


def edge_curvatures(pair: ParallelPair, tol: float = 1e-9) -> list[EdgeCurvature]:
    """Per-edge curvature kappa with s_j - s_i = kappa (m_i - m_j).

    The center c_e = m_i + s_i / kappa is the intersection of the vertex
    lines through m_i, m_j with directions s_i, s_j; it is dropped when
    kappa is so small that the center recedes past 1/tol mesh scales.
    """
    em = pair.m.edge_vectors()
    if len(em):
        lm = np.linalg.norm(em, axis=1)
        if np.any(lm == 0.0):
            raise ZeroMeshEdge("zero-length base edge")
    kappas = _kernels.edge_kappas(em, pair.s.edge_vectors())
    scale = max(pair.m.bbox_diagonal(), 1.0)
    out = []
    for k, (i, j) in enumerate(pair.combinatorics.edges):
        kap = float(kappas[k])
        if abs(kap) * scale > tol:
            center = pair.m.positions[i] + pair.s.positions[i] / kap
        else:
            center = None
        out.append(EdgeCurvature((i, j), kap, center))
    return out


def face_from_edge_curvatures(
    k01: float, k12: float, k23: float, k30: float, tol: float = 1e-12
):
    """(H, K) of a quad face from its four edge curvatures.

    H = (k01 k23 - k12 k30) / D,
    K = (k01 k23 (k12 + k30) - k12 k30 (k01 + k23)) / D,
    D = k01 + k23 - k12 - k30.

    D vanishes exactly in the similarity-like case; callers must fall back
    to the mixed-area path then.
    """
    denom = k01 + k23 - k12 - k30
    kmax = max(abs(k01), abs(k12), abs(k23), abs(k30), 1.0)
    if abs(denom) < tol * kmax:
        raise SingularDenominator(
            f"edge-curvature denominator {denom:.3e} is singular"
        )
    H = (k01 * k23 - k12 * k30) / denom
    K = (k01 * k23 * (k12 + k30) - k12 * k30 * (k01 + k23)) / denom
    return float(H), float(K)


def parallel_family_curvatures(H: float, K: float, t: float):
    """Curvatures of the offset (m + t s, s) from those of (m, s):

    H_t = (H - K t) / (1 - 2 H t + K t^2),   K_t = K / (1 - 2 H t + K t^2).
    """
    denom = 1.0 - 2.0 * H * t + K * t * t
    if abs(denom) <= 1e-14 * max(1.0, abs(H * t), abs(K * t * t)):
        raise DegenerateOffsetFace(f"offset face area factor {denom:.3e} vanishes")
    return (H - K * t) / denom, K / denom


def weingarten_coefficients(H0: float, t: float):
    """Coefficients with alpha H_t + beta K_t = 1 on every face of the
    offset family of a constant-mean-curvature pair:

    alpha = 1/H0 - 2t,   beta = t/H0 - t^2.
    """
    if H0 == 0.0:
        raise ZeroMeanCurvature("base mean curvature must be nonzero")
    return 1.0 / H0 - 2.0 * t, t / H0 - t * t


@dataclass(frozen=True)
class ConstantCurvatureReport:
    kind: str
    target: float
    max_deviation: float
    passed: bool
    deviations: np.ndarray
    dual_mixed_max: float | None  # cmc only: max |A(m(f), m(f)+s(f)/H0)| / scale^2


def constant_curvature_check(
    pair: ParallelPair, kind: str, value: float | None = None, tol: float = 1e-9
) -> ConstantCurvatureReport:
    """Check a pair for constant mean curvature, vanishing mean curvature,
    or constant Gaussian curvature.

    kind: "minimal" (H == 0), "cmc" (H == value, also checks that the
    offset at 1/H0 has vanishing mixed area with m, i.e. is the dual), or
    "constant_K" (K == value).
    """
    reports = all_face_curvatures(pair)
    if any(r is None for r in reports):
        raise VanishingFaceArea("a face has vanishing area")
    if kind == "minimal":
        target = 0.0
        devs = np.array([abs(r.H) for r in reports])
        dual_mixed = None
    elif kind == "cmc":
        if value is None:
            raise ValueError("cmc check needs the target mean curvature")
        target = float(value)
        devs = np.array([abs(r.H - target) for r in reports])
        dual_mixed = _dual_mixed_max(pair, target)
    elif kind == "constant_K":
        if value is None:
            raise ValueError("constant_K check needs the target value")
        target = float(value)
        devs = np.array([abs(r.K - target) for r in reports])
        dual_mixed = None
    else:
        raise ValueError(f"unknown kind {kind!r}")
    max_dev = float(devs.max()) if len(devs) else 0.0
    passed = max_dev <= tol
    if kind == "cmc" and dual_mixed is not None:
        passed = passed and dual_mixed <= tol
    return ConstantCurvatureReport(kind, target, max_dev, passed, devs, dual_mixed)


def _dual_mixed_max(pair: ParallelPair, H0: float) -> float:
    """Max |A(m(f), m(f) + s(f)/H0)| normalized by the face chart scale^2."""
    xy_m, xy_s, ptr = face_chart_coords(pair)
    xy_dual = xy_m + xy_s / H0
    mixed = _kernels.face_mixed_areas(xy_m, xy_dual, ptr)
    worst = 0.0
    for f in range(len(ptr) - 1):
        lo, hi = ptr[f], ptr[f + 1]
        scale = max(
            float(np.max(np.abs(xy_m[lo:hi]))), float(np.max(np.abs(xy_dual[lo:hi]))), 1e-300
        )
        worst = max(worst, abs(float(mixed[f])) / scale**2)
    return worst
