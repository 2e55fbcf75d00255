import math

import numpy as np
import pytest

import lownerjohn as lj
from lownerjohn.duality import COUNTEREXAMPLE_CENTER
from lownerjohn.errors import CenterOutsideError, DegeneracyError

from conftest import gaussian, square_indicator


class TestLevelSet:
    def test_indicator_levels_constant(self):
        f = square_indicator()
        P = lj.level_set(f, 0.5)
        assert np.allclose(sorted(P.offsets), [1, 1, 1, 1])
        for x in ([0.99, 0.99], [-1.0, 0.3]):
            assert P.contains(np.array(x))

    def test_gaussian_unit_disc(self):
        f = gaussian(2)
        P = lj.level_set(f, math.exp(-0.5))
        # tangent 128-gon of the unit disc: every offset is the radius
        assert np.allclose(P.offsets, 1.0, atol=1e-12)
        assert P.num_rows == 128

    def test_counterexample_polar_interval(self):
        z = COUNTEREXAMPLE_CENTER
        pol = lj.polar(lj.counterexample_function(), np.array([z]))
        sq5 = math.sqrt(5)
        for s in (0.25, 0.5, math.exp(-0.5), 0.95):
            lo, hi = lj.level_set(pol.fn, s)._interval_bounds()
            assert lo == pytest.approx(z + (3 - math.sqrt(9 - 80 * math.log(s))) / sq5, abs=1e-12)
            assert hi == pytest.approx(
                z + (3 + math.sqrt(9 - 320 * math.log(s))) / (4 * sq5), abs=1e-12
            )

    def test_nesting(self):
        f = gaussian(2)
        small = lj.level_set(f, 0.8)
        big = lj.level_set(f, 0.2)
        assert np.all(big.contains_points(small.vertices()))

    def test_continuity_in_s(self):
        f = gaussian(2)
        base = lj.level_set(f, 0.5)
        gaps = []
        for delta in (0.1, 0.05, 0.025, 0.0125):
            gaps.append(lj.hausdorff_distance(base, lj.level_set(f, 0.5 + delta)))
        assert all(g1 > g2 for g1, g2 in zip(gaps, gaps[1:]))
        assert gaps[-1] < 0.05


class TestSymmetrize:
    def test_1d_example(self):
        P = lj.HPolytope([[1.0], [-1.0]], [2.0, 1.0])
        S = lj.symmetrize(P)
        assert S.contains(np.array([0.99]))
        assert not S.contains(np.array([1.01]))

    def test_idempotent_on_symmetric(self):
        P = lj.HPolytope.box([-1, -2], [1, 2])
        S = lj.symmetrize(P)
        assert np.all(S.contains_points(P.vertices() * 0.999))

    def test_triangle_gives_hexagon(self, rng):
        r3 = math.sqrt(3) / 2
        P = lj.HPolytope(
            [[0.0, -1.0], [r3, 0.5], [-r3, 0.5]],
            [1.0, 1.0, 1.0],
        )
        S = lj.symmetrize(P)
        # direct reflection: membership in P and -P
        for _ in range(500):
            x = rng.uniform(-2, 2, 2)
            in_both = P.contains(x) and P.contains(-x)
            assert S.contains(x) == in_both

    def test_center_outside_error(self):
        P = lj.HPolytope([[1.0], [-1.0]], [3.0, -1.0])  # interval [1, 3]
        with pytest.raises(CenterOutsideError):
            lj.symmetrize(P)

    def test_subset_and_symmetric(self, rng):
        A = rng.standard_normal((6, 2))
        P = lj.HPolytope(A, rng.uniform(0.5, 2.0, 6))
        S = lj.symmetrize(P)
        for _ in range(200):
            x = rng.uniform(-3, 3, 2)
            if S.contains(x):
                assert P.contains(x)
                assert S.contains(-x)


class TestTranslate:
    def test_interval_shift(self):
        P = lj.HPolytope.interval(-1, 1)
        Q = lj.translate(P, [1.0])
        assert Q._interval_bounds() == pytest.approx((0.0, 2.0))

    def test_identity(self):
        P = lj.HPolytope.box([-1, -1], [1, 1])
        Q = lj.translate(P, [0.0, 0.0])
        assert np.array_equal(Q.offsets, P.offsets)

    def test_round_trip_bit_exact(self):
        P = lj.HPolytope.box([-1, -1], [1, 1])
        Q = lj.translate(lj.translate(P, [1.0, 1.0]), [-1.0, -1.0])
        assert np.array_equal(Q.offsets, P.offsets)
        assert np.array_equal(Q.normals, P.normals)

    def test_membership_relation(self, rng):
        P = lj.HPolytope.box([-1, -0.5], [0.5, 1])
        v = rng.standard_normal(2)
        Q = lj.translate(P, v)
        for _ in range(100):
            x = rng.uniform(-2, 2, 2)
            assert Q.contains(x) == P.contains(x - v)


class TestHausdorff:
    def test_identical(self):
        P = lj.HPolytope.box([-1, -1], [1, 1])
        assert lj.hausdorff_distance(P, P) == pytest.approx(0.0, abs=1e-9)

    def test_nested_intervals(self):
        P = lj.HPolytope.interval(-1, 1)
        Q = lj.HPolytope.interval(-2, 2)
        assert lj.hausdorff_distance(P, Q) == pytest.approx(1.0, abs=1e-9)

    def test_square_vs_disc(self):
        P = lj.HPolytope.box([-1, -1], [1, 1])
        # inscribed 64-gon so the disc is inside the square
        ang = np.arange(64) * 2 * math.pi / 64
        verts = np.column_stack([np.cos(ang), np.sin(ang)])
        from scipy.spatial import ConvexHull

        hull = ConvexHull(verts)
        Q = lj.HPolytope(hull.equations[:, :-1], -hull.equations[:, -1])
        assert lj.hausdorff_distance(P, Q) == pytest.approx(math.sqrt(2) - 1, abs=1e-2)

    def test_unbounded_raises(self):
        P = lj.HPolytope([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]], [1.0, 1.0, 1.0])
        with pytest.raises(DegeneracyError):
            lj.hausdorff_distance(P, lj.HPolytope.box([-1, -1], [1, 1]))


class TestSymmetricPolytope:
    def test_requires_positive_offsets(self):
        with pytest.raises(CenterOutsideError):
            lj.SymmetricPolytope([[1.0, 0.0], [0.0, 1.0]], [1.0, -0.2])

    def test_requires_spanning(self):
        with pytest.raises(DegeneracyError):
            lj.SymmetricPolytope([[1.0, 0.0], [1.0, 0.0]], [1.0, 2.0])

    def test_radial_extent(self):
        S = lj.SymmetricPolytope([[1.0, 0.0], [0.0, 1.0]], [2.0, 1.0])
        assert S.radial_extent([1.0, 0.0]) == pytest.approx(2.0)
        assert S.radial_extent([0.0, 1.0]) == pytest.approx(1.0)


def test_polar_of_box_is_cross_polytope():
    K = lj.HPolytope.box([-1, -1], [1, 1])
    Kp = K.polar()
    # cross polytope: vertices at +-e_i
    V = Kp.vertices()
    assert sorted(np.round(np.abs(V).sum(axis=1), 9)) == pytest.approx([1, 1, 1, 1])


def test_icosphere_directions_level3():
    D = lj.geometry.icosphere_directions(3)
    assert D.shape == (642, 3)
    assert np.allclose(np.linalg.norm(D, axis=1), 1.0, atol=1e-12)
