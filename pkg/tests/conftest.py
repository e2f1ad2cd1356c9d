import numpy as np
import pytest

from meshcurv import Mesh, ParallelPair, build_combinatorics


def cube_faces():
    """Consistently outward-oriented unit-cube combinatorics (vertex id =
    x + 2y + 4z over 0/1 flags)."""
    def vid(x, y, z):
        return x + 2 * y + 4 * z

    return [
        [vid(0, 0, 0), vid(0, 1, 0), vid(1, 1, 0), vid(1, 0, 0)],
        [vid(0, 0, 1), vid(1, 0, 1), vid(1, 1, 1), vid(0, 1, 1)],
        [vid(0, 0, 0), vid(1, 0, 0), vid(1, 0, 1), vid(0, 0, 1)],
        [vid(0, 1, 0), vid(0, 1, 1), vid(1, 1, 1), vid(1, 1, 0)],
        [vid(0, 0, 0), vid(0, 0, 1), vid(0, 1, 1), vid(0, 1, 0)],
        [vid(1, 0, 0), vid(1, 1, 0), vid(1, 1, 1), vid(1, 0, 1)],
    ]


def cube_positions(half=1.0):
    return np.array(
        [[2 * x - 1, 2 * y - 1, 2 * z - 1] for z in (0, 1) for y in (0, 1) for x in (0, 1)],
        dtype=float,
    ) * half


@pytest.fixture
def cube():
    return Mesh(build_combinatorics(cube_faces()), cube_positions())


@pytest.fixture
def quad_comb():
    return build_combinatorics([[0, 1, 2, 3]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def cross2_batch(u, v):
    return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]


def random_nondegenerate_quad(rng, scale=1.0, min_turn=1e-2):
    """Random planar quad with no three consecutive vertices collinear."""
    while True:
        pts = rng.uniform(-scale, scale, (4, 2))
        e = np.roll(pts, -1, axis=0) - pts
        turns = np.abs(cross2_batch(e, np.roll(e, -1, axis=0)))
        lens = np.linalg.norm(e, axis=1)
        if lens.min() > 1e-3 * scale and turns.min() > min_turn * scale * scale:
            return pts


def random_convex_parallel_pair(rng, n=5, jitter=0.3):
    """Two convex polygons with identical edge directions (parallel pair).

    Edge lengths are positive closure-respecting perturbations of the most
    uniform closed length vector for the sampled directions.
    """
    while True:
        angles = np.sort(rng.uniform(0, 2 * np.pi, n))
        gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * np.pi]]))
        if gaps.min() < 0.15 or gaps.max() > np.pi - 0.15:
            continue
        dirs = np.column_stack([np.cos(angles), np.sin(angles)])
        a = dirs.T  # closure constraint: a @ lengths = 0
        proj = np.eye(n) - a.T @ np.linalg.inv(a @ a.T) @ a
        base = proj @ np.ones(n)
        _, _, vt = np.linalg.svd(a)
        null = vt[2:]

        def sample():
            return base + jitter * (null.T @ rng.uniform(-1, 1, n - 2))

        l1, l2 = sample(), sample()
        if l1.min() <= 0.05 or l2.min() <= 0.05:
            continue
        p = np.vstack([[0.0, 0.0], np.cumsum((l1[:, None] * dirs)[:-1], axis=0)])
        q = np.vstack([[0.0, 0.0], np.cumsum((l2[:, None] * dirs)[:-1], axis=0)])
        return p, q


def random_parallel_quad(rng, base, kappa_scale=2.0):
    """Closed quad parallel to ``base`` from random edge factors."""
    e = np.roll(base, -1, axis=0) - base
    _, _, vt = np.linalg.svd(e.T)
    null = vt[2:]  # (2, 4) factor combinations with closure
    factors = null.T @ rng.uniform(-kappa_scale, kappa_scale, 2)
    edges = factors[:, None] * e
    verts = np.vstack([[0.0, 0.0], np.cumsum(edges[:3], axis=0)])
    return verts + rng.uniform(-1.0, 1.0, 2), factors


def planar_quad_pair(rng, scale=1.0):
    """Random ParallelPair of planar quads embedded in z = 0."""
    comb = build_combinatorics([[0, 1, 2, 3]])
    pm = random_nondegenerate_quad(rng, scale)
    ps, _ = random_parallel_quad(rng, pm)
    m = Mesh(comb, np.column_stack([pm, np.zeros(4)]))
    s = Mesh(comb, np.column_stack([ps, np.zeros(4)]))
    return ParallelPair(m, s)


def parallelogram_grid(nx=4, ny=3, u=(1.0, 0.0, 0.0), w=(0.3, 1.1, 0.0)):
    u = np.asarray(u)
    w = np.asarray(w)
    pos = np.array([i * u + j * w for j in range(ny + 1) for i in range(nx + 1)])
    faces = []
    for j in range(ny):
        for i in range(nx):
            a = j * (nx + 1) + i
            faces.append([a, a + 1, a + nx + 2, a + nx + 1])
    return Mesh(build_combinatorics(faces, vertex_count=len(pos)), pos)


def perturbed_grid(rng, nx=4, ny=3, amount=0.01):
    """Planar quad mesh: grid with in-plane perturbation (faces stay planar)."""
    base = parallelogram_grid(nx, ny)
    pos = base.positions.copy()
    pos[:, :2] += amount * rng.uniform(-1.0, 1.0, (len(pos), 2))
    return Mesh(base.combinatorics, pos)
