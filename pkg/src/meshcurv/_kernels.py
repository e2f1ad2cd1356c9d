"""Hot per-face/per-edge numeric kernels.

Faces are stored CSR-style: a flat coordinate array plus an int64 ``ptr``
array of length n_faces + 1 delimiting each face's vertex run. Every kernel
exists twice with identical semantics:

* a vectorized pure-numpy implementation, and
* a numba ``@njit`` loop version.

The active backend is chosen once at import time: numba when importable,
unless ``MESHCURV_DISABLE_NUMBA`` is set to 1/true/yes. Both backends stay
reachable through :data:`IMPLEMENTATIONS` for parity tests and benchmarks.
No fastmath: results must be reproducible run to run.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "MESHCURV_DISABLE_NUMBA"


def _next_index(ptr: np.ndarray) -> np.ndarray:
    """Successor index within each face run (wraps at face boundaries)."""
    n = ptr[-1]
    nxt = np.arange(1, n + 1, dtype=np.int64)
    nxt[ptr[1:] - 1] = ptr[:-1]
    return nxt


# --- numpy backend ----------------------------------------------------------

def _np_face_areas(xy: np.ndarray, ptr: np.ndarray) -> np.ndarray:
    nxt = _next_index(ptr)
    cross = xy[:, 0] * xy[nxt, 1] - xy[:, 1] * xy[nxt, 0]
    return 0.5 * np.add.reduceat(cross, ptr[:-1])


def _np_face_mixed_areas(xyp: np.ndarray, xyq: np.ndarray, ptr: np.ndarray) -> np.ndarray:
    nxt = _next_index(ptr)
    cross = (
        xyp[:, 0] * xyq[nxt, 1] - xyp[:, 1] * xyq[nxt, 0]
        + xyq[:, 0] * xyp[nxt, 1] - xyq[:, 1] * xyp[nxt, 0]
    )
    return 0.25 * np.add.reduceat(cross, ptr[:-1])


def _np_edge_parallel_residuals(em: np.ndarray, es: np.ndarray) -> np.ndarray:
    cross = np.cross(em, es)
    cn = np.linalg.norm(cross, axis=1)
    lm = np.linalg.norm(em, axis=1)
    ls = np.maximum(1.0, np.linalg.norm(es, axis=1))
    denom = lm * ls
    out = np.zeros(len(em))
    ok = denom > 0.0
    out[ok] = cn[ok] / denom[ok]
    return out


def _np_edge_kappas(em: np.ndarray, es: np.ndarray) -> np.ndarray:
    lm2 = np.einsum("ij,ij->i", em, em)
    dot = np.einsum("ij,ij->i", es, em)
    out = np.full(len(em), np.nan)
    ok = lm2 > 0.0
    out[ok] = -dot[ok] / lm2[ok]
    return out


_NUMPY_IMPL = {
    "face_areas": _np_face_areas,
    "face_mixed_areas": _np_face_mixed_areas,
    "edge_parallel_residuals": _np_edge_parallel_residuals,
    "edge_kappas": _np_edge_kappas,
}

# --- numba backend ----------------------------------------------------------

IMPLEMENTATIONS = {"numpy": _NUMPY_IMPL}


def _build_numba_impl():
    from numba import njit

    @njit(cache=True)
    def face_areas(xy, ptr):
        nf = len(ptr) - 1
        out = np.empty(nf)
        for f in range(nf):
            a, b = ptr[f], ptr[f + 1]
            acc = 0.0
            for k in range(a, b):
                k2 = a if k + 1 == b else k + 1
                acc += xy[k, 0] * xy[k2, 1] - xy[k, 1] * xy[k2, 0]
            out[f] = 0.5 * acc
        return out

    @njit(cache=True)
    def face_mixed_areas(xyp, xyq, ptr):
        nf = len(ptr) - 1
        out = np.empty(nf)
        for f in range(nf):
            a, b = ptr[f], ptr[f + 1]
            acc = 0.0
            for k in range(a, b):
                k2 = a if k + 1 == b else k + 1
                acc += xyp[k, 0] * xyq[k2, 1] - xyp[k, 1] * xyq[k2, 0]
                acc += xyq[k, 0] * xyp[k2, 1] - xyq[k, 1] * xyp[k2, 0]
            out[f] = 0.25 * acc
        return out

    @njit(cache=True)
    def edge_parallel_residuals(em, es):
        n = len(em)
        out = np.zeros(n)
        for e in range(n):
            cx = em[e, 1] * es[e, 2] - em[e, 2] * es[e, 1]
            cy = em[e, 2] * es[e, 0] - em[e, 0] * es[e, 2]
            cz = em[e, 0] * es[e, 1] - em[e, 1] * es[e, 0]
            cn = (cx * cx + cy * cy + cz * cz) ** 0.5
            lm = (em[e, 0] ** 2 + em[e, 1] ** 2 + em[e, 2] ** 2) ** 0.5
            ls = (es[e, 0] ** 2 + es[e, 1] ** 2 + es[e, 2] ** 2) ** 0.5
            if ls < 1.0:
                ls = 1.0
            denom = lm * ls
            if denom > 0.0:
                out[e] = cn / denom
        return out

    @njit(cache=True)
    def edge_kappas(em, es):
        n = len(em)
        out = np.full(n, np.nan)
        for e in range(n):
            lm2 = em[e, 0] ** 2 + em[e, 1] ** 2 + em[e, 2] ** 2
            if lm2 > 0.0:
                dot = es[e, 0] * em[e, 0] + es[e, 1] * em[e, 1] + es[e, 2] * em[e, 2]
                out[e] = -dot / lm2
        return out

    return {
        "face_areas": face_areas,
        "face_mixed_areas": face_mixed_areas,
        "edge_parallel_residuals": edge_parallel_residuals,
        "edge_kappas": edge_kappas,
    }


def _numba_disabled() -> bool:
    return os.environ.get(_ENV_FLAG, "").strip().lower() in {"1", "true", "yes"}


BACKEND = "numpy"
if not _numba_disabled():
    try:
        IMPLEMENTATIONS["numba"] = _build_numba_impl()
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is an optional speedup
        pass

_ACTIVE = IMPLEMENTATIONS[BACKEND]

face_areas = _ACTIVE["face_areas"]
face_mixed_areas = _ACTIVE["face_mixed_areas"]
edge_parallel_residuals = _ACTIVE["edge_parallel_residuals"]
edge_kappas = _ACTIVE["edge_kappas"]


def warm_up() -> None:
    """Trigger JIT compilation so later calls are measurement-clean."""
    xy = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    ptr = np.array([0, 4], dtype=np.int64)
    face_areas(xy, ptr)
    face_mixed_areas(xy, xy, ptr)
    e = np.array([[1.0, 0.0, 0.0]])
    edge_parallel_residuals(e, e)
    edge_kappas(e, e)
