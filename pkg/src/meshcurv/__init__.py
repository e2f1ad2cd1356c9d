"""Curvature of polyhedral surfaces from parallel meshes and mixed areas.

A mesh together with an edgewise-parallel companion (its Gauss image)
carries offset surfaces m + t s whose face areas are quadratic in t; the
coefficients define mean and Gaussian curvature per face. The package
implements the polygon-area algebra, validators for the classical offset
types, dual-mesh construction, and exact generators for constant-curvature
surfaces of revolution including the rolling-billiard construction.
"""

from ._kernels import BACKEND as kernel_backend
from .curvature import (
    ConstantCurvatureReport,
    EdgeCurvature,
    FaceCurvatureReport,
    all_face_curvatures,
    constant_curvature_check,
    edge_curvatures,
    face_curvatures,
    face_from_edge_curvatures,
    parallel_family_curvatures,
    principal_curvatures,
    steiner_area,
    weingarten_coefficients,
)
from .duality import (
    DualityReport,
    DualQuadReport,
    IncircleDual,
    IncirclePolygon,
    KoenigsSolve,
    christoffel_dual,
    cmc_dual_check,
    duality_report,
    incircle_dual,
    incircle_polygon,
    is_dual_quads,
    is_koenigs,
    s_isothermic_dual,
    s_isothermic_minimal_check,
    tangential_polygon,
)
from .generators import (
    BilliardTrajectory,
    DelaunayPair,
    Ellipse,
    MeridianSpec,
    RolledTraces,
    billiard_trajectory,
    catenoid_pair,
    cmc_rotational_pair,
    delaunay_pair,
    face_cross_ratio,
    gen_prescribed_H,
    gen_prescribed_K,
    pseudosphere_pair,
    roll_to_line,
    rot_face_curvatures,
    rot_surface,
    spherical_gauss_meridian,
)
from .io import curvature_report, parse_mesh, parse_pair, write_mesh, write_pair
from .meshes import (
    FacePlane,
    LineCongruence,
    Mesh,
    MeshCombinatorics,
    ParallelPair,
    build_combinatorics,
    canonical_gauss_conical,
    check_parallel,
    classify_offset_type,
    face_planarity,
    is_circular,
    offset,
    propagate_from_congruence,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
