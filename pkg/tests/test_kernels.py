"""Backend parity: the numba kernels and the numpy fallbacks must agree."""

import numpy as np
import pytest

from meshcurv import _kernels


def random_csr(rng, n_faces=50):
    sizes = rng.integers(3, 9, n_faces)
    ptr = np.zeros(n_faces + 1, dtype=np.int64)
    np.cumsum(sizes, out=ptr[1:])
    xy = rng.uniform(-5, 5, (ptr[-1], 2))
    return xy, ptr


@pytest.fixture
def impls():
    if "numba" not in _kernels.IMPLEMENTATIONS:
        pytest.skip("numba backend unavailable")
    return _kernels.IMPLEMENTATIONS


def test_active_backend_exposed():
    assert _kernels.BACKEND in _kernels.IMPLEMENTATIONS


def test_face_areas_parity(impls, rng):
    xy, ptr = random_csr(rng)
    a = impls["numpy"]["face_areas"](xy, ptr)
    b = impls["numba"]["face_areas"](xy, ptr)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)


def test_face_mixed_areas_parity(impls, rng):
    xy, ptr = random_csr(rng)
    xy2 = rng.uniform(-5, 5, xy.shape)
    a = impls["numpy"]["face_mixed_areas"](xy, xy2, ptr)
    b = impls["numba"]["face_mixed_areas"](xy, xy2, ptr)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)


def test_edge_residuals_parity(impls, rng):
    em = rng.uniform(-2, 2, (200, 3))
    es = 0.7 * em + 1e-7 * rng.uniform(-1, 1, em.shape)
    es[::5] = 0.0  # zero companion edges are legal
    a = impls["numpy"]["edge_parallel_residuals"](em, es)
    b = impls["numba"]["edge_parallel_residuals"](em, es)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)


def test_edge_kappas_parity(impls, rng):
    em = rng.uniform(-2, 2, (100, 3))
    es = -1.3 * em
    a = impls["numpy"]["edge_kappas"](em, es)
    b = impls["numba"]["edge_kappas"](em, es)
    np.testing.assert_allclose(a, b, rtol=1e-13)
    np.testing.assert_allclose(a, 1.3, rtol=1e-13)


def test_mixed_area_diagonal_is_area(impls, rng):
    xy, ptr = random_csr(rng, 20)
    for impl in impls.values():
        np.testing.assert_allclose(
            impl["face_mixed_areas"](xy, xy, ptr),
            impl["face_areas"](xy, ptr),
            rtol=1e-13,
            atol=1e-14,
        )


def test_env_flag_selects_numpy(tmp_path):
    import subprocess
    import sys

    code = (
        "from meshcurv import _kernels; print(_kernels.BACKEND)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"MESHCURV_DISABLE_NUMBA": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "numpy"
