import math

import numpy as np
import pytest

import lownerjohn as lj
from lownerjohn.errors import DegeneracyError

from conftest import random_symmetric_polytope


def box(w=2.0, h=1.0):
    return lj.SymmetricPolytope([[1.0, 0.0], [0.0, 1.0]], [w, h])


def cross_polytope():
    s = math.sqrt(2) / 2
    return lj.SymmetricPolytope([[s, s], [s, -s]], [s, s])


class TestCenteredMvie:
    def test_axis_box(self):
        sol = lj.centered_mvie(box())
        assert np.allclose(sol.T, np.diag([2.0, 1.0]), atol=1e-7)
        assert sol.det == pytest.approx(2.0, rel=1e-8)
        assert sol.kkt_residual <= 1e-8

    def test_cross_polytope(self):
        sol = lj.centered_mvie(cross_polytope())
        assert np.allclose(sol.T, np.eye(2) / math.sqrt(2), atol=1e-7)
        assert sol.det == pytest.approx(0.5, rel=1e-8)

    def test_polygon_ball_calibration(self):
        for r in (0.5, 1.0, 3.0):
            P = lj.symmetrize(lj.HPolytope.ball_approx(r, 2, 128))
            sol = lj.centered_mvie(P)
            assert sol.det == pytest.approx(r * r, rel=1e-3)
            assert np.allclose(sol.T, r * np.eye(2), atol=1e-3 * r)

    def test_icosphere_ball_3d(self):
        P = lj.symmetrize(lj.HPolytope.ball_approx(1.3, 3, 0))
        sol = lj.centered_mvie(P)
        assert sol.det == pytest.approx(1.3**3, rel=1e-6)

    def test_1d_interval(self):
        P = lj.SymmetricPolytope([[1.0]], [0.7])
        sol = lj.centered_mvie(P)
        assert sol.T[0, 0] == pytest.approx(0.7, rel=1e-12)

    def test_feasibility_always(self, rng):
        for _ in range(10):
            P = random_symmetric_polytope(rng, rows=int(rng.integers(3, 12)))
            sol = lj.centered_mvie(P)
            assert np.max(np.linalg.norm(P.normals @ sol.T, axis=1) - P.offsets) <= 1e-9

    def test_degenerate_raises(self):
        with pytest.raises(DegeneracyError):
            lj.centered_mvie(lj.SymmetricPolytope([[1.0, 0.0], [0.0, 1.0]], [1e-13, 1.0], validate=False))


class TestCertificate:
    def test_own_optimum(self):
        P = box()
        sol = lj.centered_mvie(P)
        feas, margin, local = lj.mvie_certificate(P, sol.T)
        assert feas and margin <= 1e-9 and local

    def test_shrunk_is_improvable(self):
        P = box()
        sol = lj.centered_mvie(P)
        feas, margin, local = lj.mvie_certificate(P, 0.5 * sol.T)
        assert feas and margin < 0 and not local

    def test_inflated_is_infeasible(self):
        P = box()
        sol = lj.centered_mvie(P)
        feas, margin, _ = lj.mvie_certificate(P, 1.01 * sol.T)
        assert not feas and margin > 0


class TestInvariances:
    def test_rotation_equivariance(self, rng):
        for _ in range(6):
            P = random_symmetric_polytope(rng, rows=7)
            th = rng.uniform(0, math.pi)
            R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
            sol = lj.centered_mvie(P)
            rotated = lj.SymmetricPolytope(P.normals @ R.T, P.offsets)
            sol_r = lj.centered_mvie(rotated)
            lhs = sol_r.T @ sol_r.T.T
            rhs = R @ (sol.T @ sol.T.T) @ R.T
            assert np.linalg.norm(lhs - rhs) <= 1e-6 * max(1.0, np.linalg.norm(rhs))

    def test_monotone_under_nesting(self, rng):
        for _ in range(10):
            P = random_symmetric_polytope(rng, rows=8)
            shrink = lj.SymmetricPolytope(P.normals, P.offsets * rng.uniform(0.3, 0.95))
            assert lj.centered_mvie(shrink).det <= lj.centered_mvie(P).det + 1e-9

    def test_determinant_mixture_concavity(self, rng):
        # optimizers of two bodies obey the determinant mixture inequality
        for _ in range(8):
            P1 = random_symmetric_polytope(rng, rows=6)
            P2 = random_symmetric_polytope(rng, rows=6)
            T1 = lj.centered_mvie(P1).T
            T2 = lj.centered_mvie(P2).T
            n = 2
            lhs = np.linalg.det(0.5 * (T1 + T2)) ** (1.0 / n)
            rhs = 0.5 * (np.linalg.det(T1) ** (1.0 / n) + np.linalg.det(T2) ** (1.0 / n))
            assert lhs >= rhs - 1e-9

    def test_continuity_under_small_perturbations(self, rng):
        # engineering tolerance: 1e-4 facet perturbations move det by <= 1e-3
        for _ in range(5):
            P = random_symmetric_polytope(rng, rows=7)
            base = lj.centered_mvie(P).det
            bumped = lj.SymmetricPolytope(
                P.normals, P.offsets * (1.0 + rng.uniform(-1e-4, 1e-4, 7))
            )
            assert abs(lj.centered_mvie(bumped).det - base) <= 1e-3 * max(1.0, base)

    def test_row_permutation_stable(self, rng):
        P = random_symmetric_polytope(rng, rows=9)
        sol = lj.centered_mvie(P)
        perm = rng.permutation(9)
        sol_p = lj.centered_mvie(lj.SymmetricPolytope(P.normals[perm], P.offsets[perm]))
        assert np.linalg.norm(sol.T - sol_p.T) <= 1e-6
