import numpy as np
import pytest

from meshcurv import (
    Ellipse,
    MeridianSpec,
    ParallelPair,
    all_face_curvatures,
    billiard_trajectory,
    catenoid_pair,
    check_parallel,
    cmc_rotational_pair,
    delaunay_pair,
    face_cross_ratio,
    face_planarity,
    gen_prescribed_H,
    gen_prescribed_K,
    pseudosphere_pair,
    roll_to_line,
    rot_face_curvatures,
    rot_surface,
    spherical_gauss_meridian,
)
from meshcurv.errors import (
    CollinearTriple,
    EqualRadii,
    NegativeRadicand,
    NoPositiveRoot,
    NotConcyclic,
    OutOfRange,
    ParallelityViolated,
    TangencyLost,
)


class TestMeridians:
    def test_spherical_values(self):
        rs, hs = spherical_gauss_meridian([0.0, 0.6])
        assert rs == pytest.approx([1.0, 0.8])

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            spherical_gauss_meridian([0.0, 1.0])

    def test_parallelity_invariant_enforced(self):
        with pytest.raises(ParallelityViolated):
            MeridianSpec(
                r=[1.0, 2.0], h=[0.0, 1.0], r_star=[1.0, 1.5], h_star=[0.0, -1.0]
            )

    def test_catenoid_recurrence(self):
        ms = gen_prescribed_H([1.0, 0.8, 0.64], [0.0, 0.1, 0.25], 0.0, r0=1.0)
        assert ms.r == pytest.approx([1.0, 1.25, 1.5625])

    def test_constant_K_step(self):
        ms = gen_prescribed_K([0.6, 0.8], [0.8, 0.6], 1.0, r0=1.0)
        assert ms.r[1] == pytest.approx(np.sqrt(1.28))

    def test_similarity_consistency_under_H(self):
        # r* = c r with constant H = -c reproduces the similarity solution
        c = 0.5
        rs = np.array([0.5, 0.6, 0.7])
        hs = np.array([0.0, 0.2, 0.5])
        ms = gen_prescribed_H(rs, hs, -c, r0=rs[0] / c)
        assert ms.r == pytest.approx(rs / c)

    def test_similarity_consistency_under_K(self):
        c = 0.8
        rs = np.array([0.4, 0.56, 0.64])
        hs = np.array([0.1, 0.3, 0.4])
        ms = gen_prescribed_K(rs, hs, c * c, r0=rs[0] / c)
        assert ms.r == pytest.approx(rs / c)

    def test_no_positive_root(self):
        with pytest.raises(NoPositiveRoot):
            gen_prescribed_H([1.0, 1.0], [0.0, 0.5], -10.0, r0=0.01)

    def test_negative_radicand(self):
        with pytest.raises(NegativeRadicand):
            gen_prescribed_K([1.0, 0.1], [0.0, 0.9], 0.1, r0=1.0)

    def test_flat_gauss_step_keeps_curvature(self):
        # symmetric heights make r* repeat exactly; the band must still
        # carry the prescribed curvature
        rs, hs = spherical_gauss_meridian([-0.3, 0.3, 0.5])
        assert rs[0] == rs[1]
        ms = gen_prescribed_H(rs, hs, 0.0, r0=1.0)
        assert "flat Gauss step" in ms.notes[0]
        pair = rot_surface(ms, 0.3, 4)
        for rep in all_face_curvatures(pair):
            assert abs(rep.H) <= 1e-13


class TestRotSurface:
    def test_band_curvature_values(self):
        H, K, k1, k2 = rot_face_curvatures(1.0, 1.25, 1.0, 0.8)
        assert (H, K) == pytest.approx((0.0, -0.64))
        assert (k1, k2) == pytest.approx((0.8, -0.8))

    def test_equal_radii_raises(self):
        with pytest.raises(EqualRadii):
            rot_face_curvatures(1.0, 1.0, 0.5, 0.6)

    def test_principal_identities_random(self, rng):
        for _ in range(100):
            r0, r1 = rng.uniform(0.2, 3.0, 2)
            if abs(r1 - r0) < 1e-3:
                continue
            s0, s1 = rng.uniform(-1.5, 1.5, 2)
            H, K, k1, k2 = rot_face_curvatures(r0, r1, s0, s1)
            assert k1 * k2 == pytest.approx(K, rel=1e-12, abs=1e-12)
            assert k1 + k2 == pytest.approx(-2 * H, rel=1e-12, abs=1e-12)

    def test_faces_planar_and_parallel(self):
        pair = catenoid_pair(samples=8)
        tol = 1e-10 * pair.m.bbox_diagonal()
        assert max(p.residual for p in face_planarity(pair.m)) <= tol
        assert max(p.residual for p in face_planarity(pair.s)) <= tol
        assert check_parallel(pair.m, pair.s).passed

    def test_band_values_match_embedded_faces(self, rng):
        hs = np.sort(rng.uniform(-0.7, 0.7, 6))[::-1]
        rs = np.sqrt(1 - hs * hs)
        ms = gen_prescribed_H(rs, hs, rng.uniform(-0.3, 0.3, 5), r0=1.3)
        for alpha, copies in ((0.4, 3), (np.pi / 5, 5)):
            pair = rot_surface(ms, alpha, copies)
            reps = all_face_curvatures(pair)
            per_band = copies if abs(copies * 2 * alpha - 2 * np.pi) <= 1e-9 else copies
            for f, rep in enumerate(reps):
                i = f // per_band
                H, K, _, _ = rot_face_curvatures(ms.r[i], ms.r[i + 1], ms.r_star[i], ms.r_star[i + 1])
                assert rep.H == pytest.approx(H, rel=1e-10, abs=1e-12)
                assert rep.K == pytest.approx(K, rel=1e-10, abs=1e-12)

    def test_closure_wraps(self):
        ms = gen_prescribed_H(*spherical_gauss_meridian([-0.2, 0.2]), H=0.0, r0=1.0)
        closed = rot_surface(ms, np.pi / 6, 6)
        assert len(closed.m.positions) == 2 * 6
        open_strip = rot_surface(ms, np.pi / 6, 5)
        assert len(open_strip.m.positions) == 2 * 6  # 5 bands need 6 meridians

    def test_similarity_gauss(self):
        c = 0.7
        r = np.array([1.0, 1.3, 1.5])
        h = np.array([0.0, 0.4, 1.0])
        ms = MeridianSpec(r, h, c * r, c * h)
        pair = rot_surface(ms, 0.3, 4)
        for rep in all_face_curvatures(pair):
            assert rep.H == pytest.approx(-c, rel=1e-12)
            assert rep.K == pytest.approx(c * c, rel=1e-12)

    def test_generators_constant_targets(self):
        for pair, kind, value in (
            (catenoid_pair(samples=25), "H", 0.0),
            (pseudosphere_pair(K=1.0, samples=25), "K", 1.0),
            (cmc_rotational_pair(H0=0.25, samples=25), "H", 0.25),
        ):
            reps = all_face_curvatures(pair)
            assert len(reps) >= 20
            vals = np.array([rep.H if kind == "H" else rep.K for rep in reps])
            assert np.max(np.abs(vals - value)) <= 1e-9


class TestBilliard:
    @pytest.fixture
    def ellipse(self):
        return Ellipse(2.0, np.sqrt(3.0))

    def test_confocal_invariants(self, ellipse):
        traj = billiard_trajectory(ellipse, "confocal", a_prime=3.0, start=0.3, n=24)
        d = traj.focal_distance_sums()
        assert np.ptp(d) <= 1e-10
        assert d[0] == pytest.approx(6.0)
        for i in range(traj.segments):
            res = ellipse.line_tangency_residual(traj.vertices[i], traj.vertices[i + 1])
            assert res <= 1e-10

    def test_free_mode(self, ellipse):
        traj = billiard_trajectory(
            ellipse, "free", tangency_params=np.linspace(0.1, 2.4, 9)
        )
        for i in range(traj.segments):
            res = ellipse.line_tangency_residual(traj.vertices[i], traj.vertices[i + 1])
            assert res <= 1e-12

    def test_degenerate_caustic_distance(self, ellipse):
        with pytest.raises(TangencyLost):
            billiard_trajectory(ellipse, "confocal", a_prime=2.0 + 1e-13, start=0.3, n=24)

    def test_unroll_isometry(self, ellipse):
        traj = billiard_trajectory(ellipse, "confocal", a_prime=3.0, start=0.3, n=12)
        traces = roll_to_line(traj)
        B = ellipse.focus_b
        for i in range(traj.segments):
            p_i = np.array([traces.axis_positions[i], 0.0])
            p_j = np.array([traces.axis_positions[i + 1], 0.0])
            assert np.linalg.norm(traces.B[i] - p_i) == pytest.approx(
                np.linalg.norm(B - traj.vertices[i]), rel=1e-13
            )
            assert np.linalg.norm(traces.B[i] - p_j) == pytest.approx(
                np.linalg.norm(B - traj.vertices[i + 1]), rel=1e-13
            )
        assert np.all(traces.B[:, 1] > 0)
        assert np.all(traces.A[:, 1] < 0)

    def test_l_equals_string_construction(self, ellipse):
        # oracle: reflecting one focus across a tangent line lands at
        # distance 2a from the other focus
        traj = billiard_trajectory(ellipse, "confocal", a_prime=3.0, start=0.7, n=10)
        traces = roll_to_line(traj)
        p0, p1 = traj.vertices[0], traj.vertices[1]
        e = (p1 - p0) / np.linalg.norm(p1 - p0)
        A = ellipse.focus_a
        foot = p0 + ((A - p0) @ e) * e
        reflected = 2 * foot - A
        oracle = np.linalg.norm(reflected - ellipse.focus_b)
        assert oracle == pytest.approx(2 * ellipse.a, rel=1e-12)
        assert traces.l == pytest.approx(oracle, rel=1e-10)

    def test_trace_radii_product_constant(self, ellipse):
        traj = billiard_trajectory(ellipse, "confocal", a_prime=2.7, start=0.1, n=16)
        traces = roll_to_line(traj)
        prod = traces.r * traces.r_prime
        assert np.ptp(prod) <= 1e-10 * prod[0]


class TestDelaunay:
    @pytest.fixture(scope="class")
    def setup(self):
        ellipse = Ellipse(2.0, np.sqrt(3.0))
        traj = billiard_trajectory(ellipse, "confocal", a_prime=3.0, start=0.3, n=24)
        traces = roll_to_line(traj)
        return ellipse, traces, delaunay_pair(traces, np.pi / 12, 12)

    def test_both_surfaces_cmc(self, setup):
        _, traces, dp = setup
        H0 = 1.0 / traces.l
        assert np.max(np.abs(dp.report.H_m - H0)) <= 1e-9
        assert np.max(np.abs(dp.report.H_mt - H0)) <= 1e-9

    def test_edge_products(self, setup):
        _, traces, dp = setup
        expected = traces.d**2 - traces.l**2
        assert np.max(np.abs(dp.report.edge_products - expected)) <= 1e-9

    def test_cross_ratio_constant(self, setup):
        _, _, dp = setup
        assert np.ptp(dp.report.cross_ratios_m) <= 1e-9
        assert np.ptp(dp.report.cross_ratios_mt) <= 1e-9

    def test_cross_ratio_matches_trace_formula(self, setup):
        # the cyclic cross-ratio lambda of a face satisfies
        # 4 / lambda = -(1/sin^2 alpha) |dA| |dB| / (r r')
        _, traces, dp = setup
        alpha = np.pi / 12
        dB = np.linalg.norm(np.diff(traces.B, axis=0), axis=1)
        dA = np.linalg.norm(np.diff(traces.A, axis=0), axis=1)
        q = -(1 / np.sin(alpha) ** 2) * dA * dB / (traces.r[:-1] * traces.r_prime[:-1])
        assert np.allclose(4.0 / dp.report.cross_ratios_m, q, rtol=1e-9)

    def test_face_cross_ratio_against_report(self, setup):
        _, _, dp = setup
        comb = dp.pair_m.combinatorics
        cr0 = face_cross_ratio(dp.pair_m.m.positions[list(comb.faces[0])])
        assert cr0 == pytest.approx(dp.report.cross_ratios_m[0], rel=1e-10)

    def test_pairs_validate(self, setup):
        _, _, dp = setup
        assert isinstance(dp.pair_m, ParallelPair)
        assert isinstance(dp.pair_mt, ParallelPair)
        # s is a unit Gauss map
        assert np.allclose(np.linalg.norm(dp.pair_m.s.positions, axis=1), 1.0, atol=1e-12)


class TestFaceCrossRatio:
    def test_square(self):
        sq = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], float)
        assert face_cross_ratio(sq) == pytest.approx(-1.0)

    def test_rectangle(self):
        # widths 2 and 4: direct complex arithmetic gives -(2/4)^2
        rect = np.array([[0, 0, 0], [2, 0, 0], [2, 4, 0], [0, 4, 0]], float)
        z = rect[:, 0] + 1j * rect[:, 1]
        oracle = ((z[0] - z[1]) * (z[2] - z[3]) / ((z[1] - z[2]) * (z[3] - z[0]))).real
        assert oracle == pytest.approx(-0.25)
        assert face_cross_ratio(rect) == pytest.approx(oracle)

    def test_not_concyclic(self):
        quad = np.array([[0, 0, 0], [3, 0, 0], [2, 1, 0], [1, 1.2, 0]], float)
        with pytest.raises(NotConcyclic):
            face_cross_ratio(quad)
